#pragma once

#include "torusflow/field.hpp"

namespace torusflow::test {

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) { return (a - b).sup_norm(); }
inline double max_abs_diff(const VectorField& a, const VectorField& b) { return (a - b).sup_norm(); }

}  // namespace torusflow::test
