#pragma once

#include "mfpotts/error.hpp"
#include "mfpotts/exact.hpp"
#include "mfpotts/graphon.hpp"
#include "mfpotts/limits.hpp"
#include "mfpotts/matrix.hpp"
#include "mfpotts/meanfield.hpp"
#include "mfpotts/model.hpp"
#include "mfpotts/numeric.hpp"
#include "mfpotts/rng.hpp"

namespace mfpotts {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mfpotts
