// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace mcad::nk {

struct FdReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t worst_index = 0;
  bool passed = true;
};

// Central differences per coordinate. Relative error is
// |analytic - numeric| / max(|analytic|, |numeric|, floor); the floor keeps
// near-zero components from reporting pure rounding noise as failure.
FdReport finite_difference_check(const std::function<double(std::span<const double>)>& f,
                                 std::span<const double> point, std::span<const double> analytic,
                                 double step, double tolerance, double floor = 1e-6);

}  // namespace mcad::nk
