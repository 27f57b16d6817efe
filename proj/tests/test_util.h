/*
 * Copyright 2026 The namc Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NAMC_TESTS_TEST_UTIL_H_
#define NAMC_TESTS_TEST_UTIL_H_

#include <vector>

#include "namc/nam_model.h"

namespace namc::testing {

// ReLU(w z + b) with unit output weight.
inline UnivariateNet ReluNet(double w = 1.0, double b = 0.0) {
  return UnivariateNet({DenseLayer{1, 1, {w}, {b}}, DenseLayer{1, 1, {1.0}, {0.0}}});
}

// ReLU(z - 0.25) - ReLU(z - 0.75).
inline UnivariateNet RampNet() {
  return UnivariateNet({DenseLayer{1, 2, {1.0, 1.0}, {-0.25, -0.75}},
                        DenseLayer{2, 1, {1.0, -1.0}, {0.0}}});
}

// ReLU(z) - ReLU(z).
inline UnivariateNet CancelNet() {
  return UnivariateNet({DenseLayer{1, 2, {1.0, 1.0}, {0.0, 0.0}},
                        DenseLayer{2, 1, {1.0, -1.0}, {0.0}}});
}

inline NamModel Binary(std::vector<UnivariateNet> nets, double intercept) {
  return NamModel(Task::kBinary, {intercept}, {std::move(nets)});
}

}  // namespace namc::testing

#endif  // NAMC_TESTS_TEST_UTIL_H_
