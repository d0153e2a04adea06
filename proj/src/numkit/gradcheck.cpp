// SPDX-License-Identifier: Apache-2.0

#include "mcad/numkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mcad/error.hpp"

namespace mcad::nk {

FdReport finite_difference_check(const std::function<double(std::span<const double>)>& f,
                                 std::span<const double> point, std::span<const double> analytic,
                                 double step, double tolerance, double floor) {
  if (point.size() != analytic.size())
    throw Error(ErrorCode::ShapeMismatch, "gradient length differs from point");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be > 0");
  FdReport rep;
  std::vector<double> x(point.begin(), point.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = f(x);
    x[i] = orig - step;
    const double down = f(x);
    x[i] = orig;
    const double numeric = (up - down) / (2.0 * step);
    const double abs_err = std::abs(numeric - analytic[i]);
    const double rel = abs_err / std::max({std::abs(numeric), std::abs(analytic[i]), floor});
    rep.max_abs_error = std::max(rep.max_abs_error, abs_err);
    if (rel > rep.max_rel_error || !std::isfinite(rel)) {
      rep.max_rel_error = rel;
      rep.worst_index = i;
    }
  }
  rep.passed = std::isfinite(rep.max_rel_error) && rep.max_rel_error < tolerance;
  return rep;
}

}  // namespace mcad::nk
