// SPDX-License-Identifier: Apache-2.0

#include "mcad/numkit/init.hpp"

#include <cmath>

namespace mcad::nk {

void xavier_uniform(std::span<double> values, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : values) v = rng.uniform(-limit, limit);
}

}  // namespace mcad::nk
