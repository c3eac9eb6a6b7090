#pragma once

#include "baselines.hpp"
#include "eval.hpp"
#include "graph.hpp"
#include "imitation.hpp"
#include "io.hpp"
#include "scoring.hpp"
#include "synthgen.hpp"

namespace earlyrank {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace earlyrank
