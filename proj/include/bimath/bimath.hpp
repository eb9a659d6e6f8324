#pragma once

#include "bimath/answer.hpp"
#include "bimath/classify.hpp"
#include "bimath/corpus.hpp"
#include "bimath/curriculum.hpp"
#include "bimath/decompose.hpp"
#include "bimath/errors.hpp"
#include "bimath/evaluate.hpp"
#include "bimath/llm_client.hpp"
#include "bimath/rational.hpp"
#include "bimath/structure.hpp"
#include "bimath/types.hpp"
