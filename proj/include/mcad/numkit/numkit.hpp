// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mcad/numkit/activations.hpp"
#include "mcad/numkit/attention.hpp"
#include "mcad/numkit/batchnorm.hpp"
#include "mcad/numkit/conv.hpp"
#include "mcad/numkit/gradcheck.hpp"
#include "mcad/numkit/linear.hpp"
#include "mcad/numkit/lstm.hpp"
#include "mcad/numkit/tensor.hpp"
#include "mcad/numkit/init.hpp"
