#pragma once

#include "conceptcut/error.hpp"
#include "conceptcut/evaluation.hpp"
#include "conceptcut/extractor.hpp"
#include "conceptcut/lexicon.hpp"
#include "conceptcut/segmenter.hpp"
#include "conceptcut/synth.hpp"
#include "conceptcut/taxonomy.hpp"
#include "conceptcut/text_util.hpp"
