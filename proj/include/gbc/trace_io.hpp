#pragma once

#include <string>

#include "gbc/booster.hpp"
#include "gbc/dataset.hpp"

namespace gbc {

// Renders a trace as consecutive CSV sections, three per iteration:
//
//   [iteration 1 residuals]
//   index,<feature names...>,y,p_prev,r
//   1,1.300000,1,0.500000,0.500000
//   ...
//
//   [iteration 1 leaves]
//   iteration,leaf_id,members,numerator,denominator,gamma
//   1,1,1 2 3,0.500000,0.750000,0.666667
//   ...
//
//   [iteration 1 summary]
//   iteration,total_loss
//   1,4.095549
//
// Instance indices are 1-based; member lists are space separated. Reals are
// fixed at six decimals.
std::string format_trace(const TrainingTrace& trace, const Dataset& dataset);

}  // namespace gbc
