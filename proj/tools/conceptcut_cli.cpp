// conceptcut: command-line front end.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error
// (unreadable or malformed input, failed output).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "conceptcut/conceptcut.hpp"
#include "json.hpp"

using namespace conceptcut;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw DataError("cannot write '" + path + "'");
}

// Non-comment lines split on tabs.
std::vector<std::vector<std::string>> read_table(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> row;
    for (auto f : split_tabs(line)) row.emplace_back(f);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size() || s[0] == '-') throw DataError("bad " + what + " '" + s + "'");
  return static_cast<std::size_t>(v);
}

// Runs job(i) for i in [0, n) on up to `jobs` threads. Results come back in
// input order; the first failure in input order is rethrown.
template <typename Result, typename Job>
std::vector<Result> run_pool(std::size_t n, std::size_t jobs, Job job) {
  std::vector<Result> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, n));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

struct Resources {
  std::string lexicon;
  std::string stoplist;
  std::string taxonomy;
};

Lexicon load_lexicon(const Resources& r, bool warn = true) {
  std::vector<LemmaEntry> entries;
  std::set<std::string> stop;
  if (!r.lexicon.empty()) {
    std::istringstream in(read_file(r.lexicon));
    entries = load_lexicon_entries(in);
  }
  if (!r.stoplist.empty()) {
    std::istringstream in(read_file(r.stoplist));
    stop = load_stoplist(in);
  }
  auto built = build_lexicon(std::move(entries), std::move(stop));
  if (warn)
    for (const auto& rej : built.rejected)
      std::cerr << "warning: lexicon entry " << rej.index << " rejected: " << rej.reason << "\n";
  return std::move(built.lexicon);
}

ConceptDag load_taxonomy_file(const std::string& path) {
  std::istringstream in(read_file(path));
  return load_taxonomy(in);
}

struct SegmenterFlags {
  std::size_t window_size = 25;
  double lambda = 0.5;
  unsigned smooth_iters = 2;
  std::optional<double> min_relevance;
  std::optional<std::size_t> max_boundaries;
  bool dice_product = false;

  SegmenterConfig config() const {
    SegmenterConfig c;
    c.window_size = window_size;
    c.smoothing_step = lambda;
    c.smoothing_iterations = smooth_iters;
    c.min_relevance = min_relevance;
    c.max_boundaries = max_boundaries;
    c.dice = dice_product ? DiceForm::product : DiceForm::sum;
    c.validate();
    return c;
  }
};

struct ExtractorFlags {
  double a = 0.5;
  bool unweighted_g = false;

  ExtractionConfig config() const {
    ExtractionConfig c;
    c.a = a;
    c.weighted_average = !unweighted_g;
    c.validate();
    return c;
  }
};

void add_resources(CLI::App* cmd, Resources& r, bool lexicon_required, bool taxonomy) {
  auto* lex = cmd->add_option("--lexicon", r.lexicon, "lexicon file (lemma, pos, spec, concept ids)");
  if (lexicon_required) lex->required();
  cmd->add_option("--stoplist", r.stoplist, "stoplist, one surface form per line");
  if (taxonomy) cmd->add_option("--taxonomy", r.taxonomy, "taxonomy file (N/E lines)")->required();
}

void add_segmenter(CLI::App* cmd, SegmenterFlags& f) {
  cmd->add_option("--window-size", f.window_size, "content tokens per window")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", f.lambda, "smoothing step")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--smooth-iters", f.smooth_iters, "smoothing iterations");
  cmd->add_option("--min-relevance", f.min_relevance, "drop boundaries below this relevance");
  cmd->add_option("--max-boundaries", f.max_boundaries, "keep at most this many boundaries");
  cmd->add_flag("--dice-product", f.dice_product, "unnormalized product-form Dice denominator");
}

void add_extractor(CLI::App* cmd, ExtractorFlags& f) {
  cmd->add_option("-a,--a", f.a, "genericity/informativeness weight in [0, 1]")->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--unweighted-g", f.unweighted_g, "plain mean of children instead of leaf-path weighting");
}

// Expanded by expand_config before parsing; declared so it shows in --help.
std::string config_placeholder;
void add_config(CLI::App* cmd) {
  cmd->add_option("--config", config_placeholder, "key=value file; command-line flags take precedence");
}

bool has_flag(const std::vector<std::string>& args, const std::string& key) {
  const std::string l = "--" + key, s = key.size() == 1 ? "-" + key : "";
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == l || a.rfind(l + "=", 0) == 0 || (!s.empty() && a == s);
  });
}

// Replaces `--config FILE` by the file's settings. Lines are `key = value`
// ('#' and ';' comments, [section] headers ignored); underscores in keys read
// as dashes; true/false turn flags on or off. Keys already given as flags are
// skipped, so the command line wins.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> files, rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size()) throw ConfigError("--config needs a file");
      files.push_back(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      files.push_back(args[i].substr(9));
    } else {
      rest.push_back(args[i]);
    }
  }
  std::vector<std::string> extra;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw ConfigError("cannot read config file '" + f + "'");
    std::string line;
    while (std::getline(in, line)) {
      auto t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';' || t[0] == '[') continue;
      auto eq = t.find('=');
      if (eq == std::string_view::npos) throw ConfigError("config line '" + std::string(t) + "' lacks '='");
      std::string key(trim(t.substr(0, eq)));
      std::string value(trim(t.substr(eq + 1)));
      std::replace(key.begin(), key.end(), '_', '-');
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      if (key.empty()) throw ConfigError("config line '" + std::string(t) + "' has no key");
      if (has_flag(rest, key) || has_flag(extra, key)) continue;
      if (value == "true") {
        extra.push_back("--" + key);
      } else if (value != "false") {
        extra.push_back("--" + key);
        extra.push_back(value);
      }
    }
  }
  rest.insert(rest.end(), extra.begin(), extra.end());
  return rest;
}

std::string topic_lines(std::size_t segment_index, const ScoredCut& cut, const SpanningDag& dag) {
  std::string out;
  const auto& tax = dag.taxonomy();
  for (const auto& s : cut.selected) {
    const auto& node = tax.node(s.concept_index);
    out += std::to_string(segment_index) + "\t" + node.id + "\t" + node.headword + "\t" + num(s.score) + "\t" +
           std::to_string(s.leaf_paths) + "\n";
  }
  return out;
}

nlohmann::json dag_json(const SpanningDag& dag, const ExtractionConfig& cfg, const ScoredCut& cut,
                        const DpTrace& trace) {
  using nlohmann::json;
  const auto& tax = dag.taxonomy();
  json nodes = json::array();
  for (std::uint32_t i = 0; i < dag.size(); ++i) {
    const auto& n = dag.node(i);
    const auto& c = tax.node(n.concept_index);
    json local = std::isfinite(trace.local[i]) ? json(trace.local[i]) : json(nullptr);
    nodes.push_back({{"index", i},
                     {"concept", c.id},
                     {"headword", c.headword},
                     {"in_bag", n.in_bag},
                     {"self_leaf", n.self_leaf},
                     {"leaf_paths", n.leaf_paths},
                     {"s1", score_s1(dag, i)},
                     {"s2", score_s2(dag, i)},
                     {"u", node_score(dag, i, cfg)},
                     {"local", local},
                     {"stored", trace.stored[i]},
                     {"expand", trace.expand[i] != 0},
                     {"parents", n.parents},
                     {"children", n.children}});
  }
  json selected = json::array();
  for (const auto& s : cut.selected) selected.push_back(s.node);
  return {{"a", cfg.a},
          {"weighted_average", cfg.weighted_average},
          {"total_leaf_paths", dag.total_leaf_paths()},
          {"roots", dag.roots()},
          {"nodes", nodes},
          {"cut", {{"score", cut.score}, {"selected", selected}}}};
}

// Segmentation files: doc_id <TAB> word_count <TAB> comma separated
// boundaries ('-' or empty for none).
std::map<std::string, Segmentation> read_segmentations(const std::string& path) {
  std::map<std::string, Segmentation> out;
  for (const auto& row : read_table(path)) {
    if (row.size() < 2 || row.size() > 3) throw DataError("segmentation line needs 2 or 3 columns in '" + path + "'");
    Segmentation s;
    s.word_count = parse_count(row[1], "word count");
    if (row.size() == 3 && row[2] != "-" && !trim(row[2]).empty())
      for (auto b : split(row[2], ',')) s.boundaries.push_back(parse_count(std::string(trim(b)), "boundary"));
    validate(s);
    if (!out.emplace(row[0], std::move(s)).second) throw DataError("duplicate document '" + row[0] + "' in '" + path + "'");
  }
  return out;
}

std::string format_segmentation(const std::string& id, const Segmentation& s) {
  std::string b;
  for (auto x : s.boundaries) b += (b.empty() ? "" : ",") + std::to_string(x);
  return id + "\t" + std::to_string(s.word_count) + "\t" + (b.empty() ? "-" : b) + "\n";
}

// doc_id <TAB> concept_id [<TAB> ignored...], in file order per document.
std::map<std::string, std::vector<std::string>> read_annotations(const std::string& path) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& row : read_table(path)) {
    if (row.size() < 2 || row[1].empty()) throw DataError("annotation line needs doc_id and concept_id in '" + path + "'");
    auto& v = out[row[0]];
    if (std::find(v.begin(), v.end(), row[1]) == v.end()) v.push_back(row[1]);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic segmentation and generic concept extraction", "conceptcut"};
  app.require_subcommand(1);
  std::string out_path;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  Resources res;
  SegmenterFlags seg;
  ExtractorFlags ext;
  std::vector<std::string> inputs;
  std::function<void()> action;

  auto common = [&](CLI::App* cmd) {
    add_config(cmd);
    cmd->add_option("-o,--out", out_path, "output file (default stdout)");
  };

  // lexicon-build
  auto* lexicon_cmd = app.add_subcommand("lexicon-build", "expand a lexicon and list surface forms");
  common(lexicon_cmd);
  add_resources(lexicon_cmd, res, true, false);
  lexicon_cmd->callback([&] {
    action = [&] {
      auto lex = load_lexicon(res);
      std::string out;
      for (const auto& s : lex.surfaces())
        for (const auto& c : lex.candidates(s)) {
          std::string ids;
          for (const auto& id : c.concept_ids) ids += (ids.empty() ? "" : ",") + id;
          out += s + "\t" + c.lemma + "\t" + c.pos + "\t" + (ids.empty() ? "-" : ids) + "\n";
        }
      for (const auto& s : lex.stoplist()) out += s + "\t-\tstop\t-\n";
      write_file(out_path, out);
    };
  });

  // segment
  std::string curve_path;
  auto* segment_cmd = app.add_subcommand("segment", "split documents into topical blocks");
  common(segment_cmd);
  add_resources(segment_cmd, res, false, false);
  add_segmenter(segment_cmd, seg);
  segment_cmd->add_option("--curve", curve_path, "also write gap/raw/smoothed curve here");
  segment_cmd->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  segment_cmd->add_option("inputs", inputs, "documents ('-' for stdin)")->required();
  segment_cmd->callback([&] {
    action = [&] {
      auto cfg = seg.config();
      auto lex = load_lexicon(res);
      struct Out {
        std::string boundaries, curve;
      };
      auto results = run_pool<Out>(inputs.size(), jobs, [&](std::size_t i) {
        auto r = segment(read_file(inputs[i]), lex, cfg);
        Out o;
        if (inputs.size() > 1) o.boundaries = o.curve = "# document " + inputs[i] + "\n";
        for (const auto& b : r.boundaries)
          o.boundaries += "boundary\t" + std::to_string(b.token_offset) + "\t" + std::to_string(b.char_offset) + "\t" +
                          num(b.relevance) + "\n";
        for (std::size_t g = 0; g < r.raw_curve.size(); ++g)
          o.curve += std::to_string(g) + "\t" + num(r.raw_curve[g]) + "\t" + num(r.smoothed_curve[g]) + "\n";
        return o;
      });
      std::string b, c;
      for (const auto& o : results) b += o.boundaries, c += o.curve;
      write_file(out_path, b);
      if (!curve_path.empty()) write_file(curve_path, c);
    };
  });

  // extract
  bool oracle = false;
  std::string dump_path;
  auto* extract_cmd = app.add_subcommand("extract", "extract the best concept cut of a whole document");
  common(extract_cmd);
  add_resources(extract_cmd, res, true, true);
  add_extractor(extract_cmd, ext);
  extract_cmd->add_flag("--oracle", oracle, "also run the exhaustive search and compare scores");
  extract_cmd->add_option("--dump-json", dump_path, "write the scored spanning DAG as JSON");
  extract_cmd->add_option("input", inputs, "document ('-' for stdin)")->required()->expected(1);
  extract_cmd->callback([&] {
    action = [&] {
      auto cfg = ext.config();
      auto lex = load_lexicon(res);
      auto tax = load_taxonomy_file(res.taxonomy);
      auto tokens = filter_stopwords(tokenize(read_file(inputs.at(0)), lex), lex);
      auto bag = bag_of_concepts(tokens, tax);
      for (const auto& w : bag.warnings) std::cerr << "warning: " << w << "\n";
      std::string out;
      auto dag = build_spanning_dag(bag, tax);
      if (dag) {
        DpTrace trace;
        auto cut = extract_cut(*dag, cfg, &trace);
        out = topic_lines(0, cut, *dag);
        if (oracle) {
          try {
            auto best = brute_force_best_cut(*dag, cfg);
            out += "# oracle\tdp=" + num(cut.score) + "\toracle=" + num(best.score) + "\t" +
                   (best.score == cut.score ? "equal" : "DIFFER") + "\n";
          } catch (const DataError& e) {
            out += std::string("# oracle skipped: ") + e.what() + "\n";
          }
        }
        if (!dump_path.empty()) write_file(dump_path, dag_json(*dag, cfg, cut, trace).dump(2) + "\n");
      } else if (!dump_path.empty()) {
        write_file(dump_path, "null\n");
      }
      write_file(out_path, out);
    };
  });

  // annotate
  auto* annotate_cmd = app.add_subcommand("annotate", "segment documents and extract concepts per segment");
  common(annotate_cmd);
  add_resources(annotate_cmd, res, true, true);
  add_segmenter(annotate_cmd, seg);
  add_extractor(annotate_cmd, ext);
  annotate_cmd->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  annotate_cmd->add_option("inputs", inputs, "documents ('-' for stdin)")->required();
  annotate_cmd->callback([&] {
    action = [&] {
      auto seg_cfg = seg.config();
      auto ext_cfg = ext.config();
      auto lex = load_lexicon(res);
      auto tax = load_taxonomy_file(res.taxonomy);
      auto results = run_pool<std::string>(inputs.size(), jobs, [&](std::size_t i) {
        auto r = segment(read_file(inputs[i]), lex, seg_cfg);
        std::string o = inputs.size() > 1 ? "# document " + inputs[i] + "\n" : "";
        for (std::size_t s = 0; s < r.segments.size(); ++s) {
          const auto& sg = r.segments[s];
          std::span<const Token> toks(r.tokens.data() + sg.token_begin, sg.token_end - sg.token_begin);
          auto bag = bag_of_concepts(toks, tax);
          if (auto dag = build_spanning_dag(bag, tax)) o += topic_lines(s, extract_cut(*dag, ext_cfg), *dag);
        }
        return o;
      });
      std::string out;
      for (const auto& o : results) out += o;
      write_file(out_path, out);
    };
  });

  // eval-seg
  std::string real_path, found_path;
  auto* eval_seg_cmd = app.add_subcommand("eval-seg", "position error between real and found segmentations");
  common(eval_seg_cmd);
  eval_seg_cmd->add_option("--real", real_path, "reference segmentation file")->required();
  eval_seg_cmd->add_option("--found", found_path, "produced segmentation file")->required();
  eval_seg_cmd->callback([&] {
    action = [&] {
      auto real = read_segmentations(real_path);
      auto found = read_segmentations(found_path);
      std::string out;
      double total = 0.0;
      for (const auto& [id, r] : real) {
        auto it = found.find(id);
        if (it == found.end()) throw DataError("document '" + id + "' missing from '" + found_path + "'");
        const double e = segmentation_error(r, it->second);
        total += e;
        out += id + "\t" + num(e) + "\t" + std::to_string(r.segment_count()) + "\t" +
               std::to_string(it->second.segment_count()) + "\n";
      }
      for (const auto& [id, f] : found)
        if (!real.count(id)) std::cerr << "warning: document '" << id << "' has no reference; ignored\n";
      if (!real.empty()) out += "# mean\t" + num(total / static_cast<double>(real.size())) + "\n";
      write_file(out_path, out);
    };
  });

  // eval-topics
  std::string produced_path, reference_path, path_mode = "undirected";
  double step = 0.05, fb = 1.0;
  bool exact = false;
  auto* eval_topics_cmd = app.add_subcommand("eval-topics", "probabilistic precision/recall of produced concepts");
  common(eval_topics_cmd);
  eval_topics_cmd->add_option("--taxonomy", res.taxonomy, "taxonomy file");
  eval_topics_cmd->add_option("--produced", produced_path, "doc_id<TAB>concept_id lines")->required();
  eval_topics_cmd->add_option("--reference", reference_path, "doc_id<TAB>concept_id lines")->required();
  eval_topics_cmd->add_option("--step", step, "threshold step")->check(CLI::Range(1e-6, 1.0));
  eval_topics_cmd->add_option("--b", fb, "F-measure weight")->check(CLI::PositiveNumber);
  eval_topics_cmd->add_option("--path-mode", path_mode, "undirected or common-ancestor")
      ->check(CLI::IsMember({"undirected", "common-ancestor"}));
  eval_topics_cmd->add_flag("--exact", exact, "set-overlap scores instead of the probabilistic sweep");
  eval_topics_cmd->callback([&] {
    action = [&] {
      if (!exact && res.taxonomy.empty()) throw ConfigError("--taxonomy is required unless --exact is given");
      auto produced = read_annotations(produced_path);
      auto reference = read_annotations(reference_path);
      std::vector<std::string> docs;
      for (const auto& [id, _] : reference) {
        if (produced.count(id)) docs.push_back(id);
        else std::cerr << "warning: document '" << id << "' has no produced concepts; ignored\n";
      }
      for (const auto& [id, _] : produced)
        if (!reference.count(id)) std::cerr << "warning: document '" << id << "' has no reference; ignored\n";
      if (docs.empty()) throw DataError("no document appears in both annotation files");
      std::string out;
      if (exact) {
        double p = 0, r = 0, f = 0;
        for (const auto& id : docs) {
          auto s = evaluate_exact_match(produced[id], reference[id]);
          p += s.precision, r += s.recall, f += s.f_measure;
        }
        const double n = static_cast<double>(docs.size());
        out = "exact\t" + num(p / n) + "\t" + num(r / n) + "\t" + num(f / n) + "\n";
      } else {
        auto tax = load_taxonomy_file(res.taxonomy);
        const auto mode = path_mode == "undirected" ? PathMode::undirected : PathMode::common_ancestor;
        auto thetas = default_thetas(step);
        std::vector<double> sp(thetas.size()), sr(thetas.size()), sf(thetas.size()), sa(thetas.size());
        std::vector<std::size_t> defined(thetas.size());
        for (const auto& id : docs) {
          auto mp = aggregate_probabilities(produced[id], reference[id], tax, mode);
          for (const auto& w : mp.warnings) std::cerr << "warning: " << id << ": " << w << "\n";
          auto pts = threshold_sweep(mp, thetas, fb);
          for (std::size_t t = 0; t < pts.size(); ++t) {
            if (!pts[t].defined) continue;
            ++defined[t];
            sp[t] += pts[t].precision, sr[t] += pts[t].recall, sf[t] += pts[t].f_measure, sa[t] += pts[t].accuracy;
          }
        }
        out = "# theta\tprecision\trecall\tf\taccuracy\n";
        for (std::size_t t = 0; t < thetas.size(); ++t) {
          const double n = defined[t] ? static_cast<double>(defined[t]) : std::nan("");
          out += num(thetas[t]) + "\t" + num(sp[t] / n) + "\t" + num(sr[t] / n) + "\t" + num(sf[t] / n) + "\t" +
                 num(sa[t] / n) + "\n";
        }
      }
      write_file(out_path, out);
    };
  });

  // synth-taxonomy
  std::uint64_t seed = 0;
  TaxonomyGenParams tax_params;
  auto* synth_tax_cmd = app.add_subcommand("synth-taxonomy", "write a seeded random taxonomy");
  common(synth_tax_cmd);
  synth_tax_cmd->add_option("--seed", seed, "random seed")->required();
  synth_tax_cmd->add_option("--nodes", tax_params.nodes, "linked concepts")->check(CLI::PositiveNumber);
  synth_tax_cmd->add_option("--roots", tax_params.roots, "root concepts")->check(CLI::PositiveNumber);
  synth_tax_cmd->add_option("--extra-parent-prob", tax_params.extra_parent_prob, "chance of a second parent")
      ->check(CLI::Range(0.0, 1.0));
  synth_tax_cmd->add_option("--anonymous-fraction", tax_params.anonymous_fraction, "share of unlabeled concepts")
      ->check(CLI::Range(0.0, 1.0));
  synth_tax_cmd->add_option("--orphans", tax_params.orphans, "unlinked concepts");
  synth_tax_cmd->callback([&] {
    action = [&] {
      std::ostringstream ss;
      write_taxonomy(ss, generate_taxonomy(tax_params, seed));
      write_file(out_path, ss.str());
    };
  });

  // synth-corpus
  std::size_t group = 5;
  std::optional<std::size_t> doc_count;
  std::string reference_out, corpus_id = "corpus";
  DocumentGenParams doc_params;
  auto* synth_corpus_cmd = app.add_subcommand("synth-corpus", "concatenate documents into an evaluation corpus");
  common(synth_corpus_cmd);
  synth_corpus_cmd->add_option("--seed", seed, "random seed")->required();
  synth_corpus_cmd->add_option("--group", group, "documents per corpus")->check(CLI::Range(2, 100000));
  synth_corpus_cmd->add_option("--docs", doc_count, "documents to generate (default 3 x group)");
  synth_corpus_cmd->add_option("--vocabulary", doc_params.vocabulary, "words per generated document")
      ->check(CLI::PositiveNumber);
  synth_corpus_cmd->add_option("--min-words", doc_params.min_words, "shortest generated document")
      ->check(CLI::PositiveNumber);
  synth_corpus_cmd->add_option("--max-words", doc_params.max_words, "longest generated document")
      ->check(CLI::PositiveNumber);
  synth_corpus_cmd->add_option("--input", inputs, "use these documents instead of generated ones");
  synth_corpus_cmd->add_option("--reference", reference_out, "write the junction segmentation here");
  synth_corpus_cmd->add_option("--id", corpus_id, "document id in the reference file");
  synth_corpus_cmd->callback([&] {
    action = [&] {
      std::vector<std::string> docs;
      if (!inputs.empty()) {
        if (doc_count) throw ConfigError("--docs and --input are mutually exclusive");
        for (const auto& p : inputs) docs.push_back(read_file(p));
      } else {
        // a different stream from the corpus draw so the two never correlate
        docs = generate_documents(doc_count.value_or(3 * group), doc_params, seed ^ 0x5deece66dULL);
      }
      auto c = synthesize_eval_corpus(docs, group, seed);
      write_file(out_path, c.text);
      if (!reference_out.empty()) write_file(reference_out, format_segmentation(corpus_id, c.real));
    };
  });

  // taxonomy-stats
  bool per_concept = false;
  auto* stats_cmd = app.add_subcommand("taxonomy-stats", "summary and path statistics of a taxonomy");
  common(stats_cmd);
  stats_cmd->add_option("--taxonomy", res.taxonomy, "taxonomy file")->required();
  stats_cmd->add_flag("--concepts", per_concept, "one line per concept: id, n_up, n_down, D, d");
  stats_cmd->callback([&] {
    action = [&] {
      auto tax = load_taxonomy_file(res.taxonomy);
      std::uint64_t leaf_paths = 0;
      std::size_t true_roots = 0;
      for (auto r : tax.roots())
        if (!tax.is_orphan(r)) ++true_roots, leaf_paths += tax.stats(r).leaf_paths;
      std::string out = "nodes\t" + std::to_string(tax.size()) + "\n" + "edges\t" + std::to_string(tax.edge_count()) +
                        "\n" + "roots\t" + std::to_string(true_roots) + "\n" + "orphans\t" +
                        std::to_string(tax.orphans().size()) + "\n" + "anonymous\t" +
                        std::to_string(tax.anonymous_count()) + "\n" + "max_depth\t" +
                        std::to_string(tax.max_depth()) + "\n" + "leaf_paths\t" + std::to_string(leaf_paths) + "\n";
      if (per_concept)
        for (ConceptIndex c = 0; c < tax.size(); ++c) {
          out += "concept\t" + tax.node(c).id;
          if (tax.is_orphan(c)) {
            out += "\torphan\n";
            continue;
          }
          const auto& s = tax.stats(c);
          out += "\t" + std::to_string(s.root_paths) + "\t" + std::to_string(s.leaf_paths) + "\t" +
                 num(s.root_distance) + "\t" + num(s.leaf_distance) + "\n";
        }
      write_file(out_path, out);
    };
  });

  std::vector<std::string> args;
  try {
    args = expand_config({argv + 1, argv + argc});
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  // CLI11 takes the arguments last to first
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    action();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}
