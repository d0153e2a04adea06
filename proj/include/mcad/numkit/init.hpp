// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>

#include "mcad/rng.hpp"

namespace mcad::nk {

// Uniform in +/- sqrt(6 / (fan_in + fan_out)).
void xavier_uniform(std::span<double> values, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace mcad::nk
