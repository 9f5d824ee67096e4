#pragma once

#include "doctest.h"
#include "painv/pipeline.hpp"

namespace testing {

using painv::Complex;
using painv::Real;

inline bool close(const Complex& a, const Complex& b, long slack = 24) {
  return painv::abs(a - b) <= painv::tolerance(slack) * (Real(1) + painv::abs(b));
}

inline bool small(const Real& x, long slack = 24) { return x <= painv::tolerance(slack); }

// Solved presets are shared across test cases; solving is deterministic.
const painv::SolvedPreset& solved(const std::string& name);

}  // namespace testing
