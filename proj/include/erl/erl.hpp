#pragma once

#include "erl/catalog.hpp"
#include "erl/consistency.hpp"
#include "erl/errors.hpp"
#include "erl/evaluation.hpp"
#include "erl/inference.hpp"
#include "erl/prompt.hpp"
#include "erl/relation.hpp"
#include "erl/synthesis.hpp"

namespace erl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace erl
