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

#include "namc/exact_pwl.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "namc/errors.h"

namespace namc {

PwlFunction::PwlFunction(std::vector<double> breakpoints,
                         std::vector<double> slopes,
                         std::vector<double> offsets)
    : breaks_(std::move(breakpoints)),
      slopes_(std::move(slopes)),
      offsets_(std::move(offsets)) {
  if (breaks_.size() < 2 || slopes_.size() + 1 != breaks_.size() ||
      offsets_.size() != slopes_.size()) {
    throw InvalidArgumentError("PwlFunction: inconsistent piece arrays");
  }
  for (std::size_t k = 1; k < breaks_.size(); ++k) {
    // A single degenerate piece represents a point interval.
    if (!(breaks_[k] > breaks_[k - 1]) &&
        !(breaks_.size() == 2 && breaks_[0] == breaks_[1])) {
      throw InvalidArgumentError("PwlFunction: breakpoints not increasing");
    }
  }
}

double PwlFunction::operator()(double z) const {
  z = std::clamp(z, breaks_.front(), breaks_.back());
  auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, z);
  const std::size_t p = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  return slopes_[p] * z + offsets_[p];
}

double PwlFunction::max_discontinuity() const {
  double jump = 0.0;
  for (std::size_t p = 1; p < slopes_.size(); ++p) {
    const double t = breaks_[p];
    const double left = slopes_[p - 1] * t + offsets_[p - 1];
    const double right = slopes_[p] * t + offsets_[p];
    jump = std::max(jump, std::abs(left - right));
  }
  return jump;
}

namespace {

// Affine pieces of every unit of one layer: entry [p * width + u].
struct LayerPieces {
  int width = 1;
  std::vector<double> slope;
  std::vector<double> offset;
};

bool SameAffine(double s0, double c0, double s1, double c1) {
  const auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * (1.0 + std::max(std::abs(a), std::abs(b)));
  };
  return close(s0, s1) && close(c0, c1);
}

}  // namespace

PwlFunction propagate(const UnivariateNet& net, const Interval& interval,
                      const PwlOptions& options) {
  if (!(interval.lo <= interval.hi)) {
    throw InvalidArgumentError("propagate: empty interval");
  }
  std::vector<double> breaks = {interval.lo, interval.hi};
  LayerPieces cur{1, {1.0}, {0.0}};
  const std::size_t last = net.layers().size() - 1;

  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    const DenseLayer& layer = net.layers()[k];
    const std::size_t pieces = breaks.size() - 1;
    LayerPieces pre{layer.out, {}, {}};
    pre.slope.resize(pieces * layer.out);
    pre.offset.resize(pieces * layer.out);
    for (std::size_t p = 0; p < pieces; ++p) {
      const double* s_in = cur.slope.data() + p * cur.width;
      const double* c_in = cur.offset.data() + p * cur.width;
      for (int o = 0; o < layer.out; ++o) {
        const double* row = layer.weights.data() + o * layer.in;
        double s = 0.0;
        double c = layer.bias[o];
        for (int i = 0; i < layer.in; ++i) {
          s += row[i] * s_in[i];
          c += row[i] * c_in[i];
        }
        pre.slope[p * layer.out + o] = s;
        pre.offset[p * layer.out + o] = c;
      }
    }
    if (k == last) {
      cur = std::move(pre);
      break;
    }

    // Zero crossings strictly inside each piece.
    std::vector<std::pair<double, std::size_t>> cuts;  // (z, parent piece)
    for (std::size_t p = 0; p < pieces; ++p) {
      const double lo = breaks[p];
      const double hi = breaks[p + 1];
      for (int o = 0; o < layer.out; ++o) {
        const double s = pre.slope[p * layer.out + o];
        if (s == 0.0) continue;
        const double z = -pre.offset[p * layer.out + o] / s;
        if (z > lo + options.dedup_threshold &&
            z < hi - options.dedup_threshold) {
          cuts.emplace_back(z, p);
        }
      }
    }
    std::vector<std::size_t> parent;
    if (cuts.empty()) {
      parent.resize(pieces);
      for (std::size_t p = 0; p < pieces; ++p) parent[p] = p;
    } else {
      std::sort(cuts.begin(), cuts.end());
      std::vector<double> refined;
      refined.reserve(breaks.size() + cuts.size());
      std::size_t c = 0;
      for (std::size_t p = 0; p < pieces; ++p) {
        refined.push_back(breaks[p]);
        parent.push_back(p);
        for (; c < cuts.size() && cuts[c].second == p; ++c) {
          if (cuts[c].first - refined.back() > options.dedup_threshold) {
            refined.push_back(cuts[c].first);
            parent.push_back(p);
          }
        }
      }
      refined.push_back(breaks.back());
      breaks = std::move(refined);
      if (parent.size() > options.max_pieces) {
        throw BudgetExceededError(
            "propagate: piece count " + std::to_string(parent.size()) +
            " exceeds cap " + std::to_string(options.max_pieces));
      }
    }

    // Rectify: a unit is active on a piece iff its pre-activation is
    // positive at the piece midpoint.
    const std::size_t refined_pieces = parent.size();
    LayerPieces post{layer.out, {}, {}};
    post.slope.resize(refined_pieces * layer.out);
    post.offset.resize(refined_pieces * layer.out);
    for (std::size_t q = 0; q < refined_pieces; ++q) {
      const double mid = 0.5 * (breaks[q] + breaks[q + 1]);
      const std::size_t p = parent[q];
      for (int o = 0; o < layer.out; ++o) {
        const double s = pre.slope[p * layer.out + o];
        const double c = pre.offset[p * layer.out + o];
        const bool active = s * mid + c > 0.0;
        post.slope[q * layer.out + o] = active ? s : 0.0;
        post.offset[q * layer.out + o] = active ? c : 0.0;
      }
    }
    cur = std::move(post);
  }

  std::vector<double> merged_breaks = {breaks.front()};
  std::vector<double> slopes;
  std::vector<double> offsets;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double s = cur.slope[p];
    const double c = cur.offset[p];
    if (!slopes.empty() && SameAffine(slopes.back(), offsets.back(), s, c)) {
      merged_breaks.back() = breaks[p + 1];
      continue;
    }
    slopes.push_back(s);
    offsets.push_back(c);
    merged_breaks.push_back(breaks[p + 1]);
  }
  return PwlFunction(std::move(merged_breaks), std::move(slopes),
                     std::move(offsets));
}

Extrema exact_extrema(const PwlFunction& pwl) {
  const std::vector<double>& t = pwl.breakpoints();
  Extrema e;
  e.argmin = e.argmax = t.front();
  e.min = e.max = pwl.slopes()[0] * t.front() + pwl.offsets()[0];
  for (int p = 0; p < pwl.pieces(); ++p) {
    for (double z : {t[p], t[p + 1]}) {
      const double v = pwl.slopes()[p] * z + pwl.offsets()[p];
      if (v < e.min) {
        e.min = v;
        e.argmin = z;
      }
      if (v > e.max) {
        e.max = v;
        e.argmax = z;
      }
    }
  }
  return e;
}

}  // namespace namc
