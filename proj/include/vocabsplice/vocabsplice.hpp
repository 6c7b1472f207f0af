#pragma once

#include "vocabsplice/adapt.hpp"
#include "vocabsplice/bpe.hpp"
#include "vocabsplice/corpus.hpp"
#include "vocabsplice/embedding.hpp"
#include "vocabsplice/error.hpp"
#include "vocabsplice/squad.hpp"
#include "vocabsplice/squad_eval.hpp"
#include "vocabsplice/vocab.hpp"
#include "vocabsplice/wordpiece.hpp"
