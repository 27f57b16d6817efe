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

#ifndef NAMC_EXACT_PWL_H_
#define NAMC_EXACT_PWL_H_

#include <cstddef>
#include <vector>

#include "namc/nam_model.h"

namespace namc {

// Continuous piecewise-linear function on [t_0, t_k]. Piece p covers
// [t_p, t_{p+1}] and evaluates to slope[p] * z + offset[p].
class PwlFunction {
 public:
  PwlFunction(std::vector<double> breakpoints, std::vector<double> slopes,
              std::vector<double> offsets);

  Interval domain() const { return {breaks_.front(), breaks_.back()}; }
  int pieces() const { return static_cast<int>(slopes_.size()); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& slopes() const { return slopes_; }
  const std::vector<double>& offsets() const { return offsets_; }

  // z is clamped to the domain.
  double operator()(double z) const;

  // Largest jump between adjacent pieces at interior breakpoints.
  double max_discontinuity() const;

 private:
  std::vector<double> breaks_;
  std::vector<double> slopes_;
  std::vector<double> offsets_;
};

struct PwlOptions {
  std::size_t max_pieces = 1'000'000;
  // Crossings closer than this to an existing breakpoint are merged into it.
  double dedup_threshold = 1e-12;
};

// Exact restriction of `net` to `interval`. Every rectified unit splits the
// current pieces where its pre-activation crosses zero. Adjacent pieces with
// identical affine maps are merged. Throws BudgetExceededError when the piece
// count exceeds options.max_pieces.
PwlFunction propagate(const UnivariateNet& net, const Interval& interval,
                      const PwlOptions& options = {});

struct Extrema {
  double min = 0.0;
  double argmin = 0.0;
  double max = 0.0;
  double argmax = 0.0;
};

// Extrema over breakpoints; ties go to the smallest coordinate.
Extrema exact_extrema(const PwlFunction& pwl);

}  // namespace namc

#endif  // NAMC_EXACT_PWL_H_
