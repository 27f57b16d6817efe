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

#include "namc/verifier.h"

#include <algorithm>
#include <queue>
#include <string>
#include <vector>

#include "namc/errors.h"

namespace namc {

namespace {

// IBP with reusable buffers; one instance per branch-and-bound run.
class IbpEvaluator {
 public:
  explicit IbpEvaluator(const UnivariateNet& net)
      : net_(net),
        lo_(net.max_width()),
        hi_(net.max_width()),
        next_lo_(net.max_width()),
        next_hi_(net.max_width()) {}

  IbpBounds operator()(const Interval& interval) {
    lo_[0] = interval.lo;
    hi_[0] = interval.hi;
    const std::size_t last = net_.layers().size() - 1;
    for (std::size_t k = 0; k < net_.layers().size(); ++k) {
      const DenseLayer& layer = net_.layers()[k];
      for (int o = 0; o < layer.out; ++o) {
        const double* row = layer.weights.data() + o * layer.in;
        double l = layer.bias[o];
        double h = layer.bias[o];
        for (int i = 0; i < layer.in; ++i) {
          const double w = row[i];
          if (w >= 0.0) {
            l += w * lo_[i];
            h += w * hi_[i];
          } else {
            l += w * hi_[i];
            h += w * lo_[i];
          }
        }
        if (k != last) {
          l = std::max(l, 0.0);
          h = std::max(h, 0.0);
        }
        next_lo_[o] = l;
        next_hi_[o] = h;
      }
      std::swap(lo_, next_lo_);
      std::swap(hi_, next_hi_);
    }
    return {lo_[0], hi_[0]};
  }

 private:
  const UnivariateNet& net_;
  std::vector<double> lo_, hi_, next_lo_, next_hi_;
};

struct Node {
  double lower;
  Interval box;
};

// Min-heap on the IBP lower bound; ties resolved by position for determinism.
struct NodeAfter {
  bool operator()(const Node& a, const Node& b) const {
    if (a.lower != b.lower) return a.lower > b.lower;
    return a.box.lo > b.box.lo;
  }
};

using NodeQueue = std::priority_queue<Node, std::vector<Node>, NodeAfter>;

void CheckInterval(const Interval& interval) {
  if (!(interval.lo <= interval.hi)) {
    throw InvalidArgumentError("verifier: empty interval");
  }
}

[[noreturn]] void ThrowBudget(const VerifyBudget& budget) {
  throw BudgetExceededError("branch-and-bound exceeded " +
                            std::to_string(budget.max_subdivisions) +
                            " subdivisions");
}

}  // namespace

IbpBounds ibp_bounds(const UnivariateNet& net, const Interval& interval) {
  CheckInterval(interval);
  IbpEvaluator ibp(net);
  return ibp(interval);
}

VerifyOutcome verify_ge(const UnivariateNet& net, const Interval& interval,
                        double m, const VerifyBudget& budget) {
  CheckInterval(interval);
  VerifyOutcome out;
  const auto violated = [&](double z, double v) {
    out.verdict = Verdict::kViolated;
    out.witness = Witness{z, v};
    return out;
  };
  for (double z : {interval.lo, interval.hi}) {
    const double v = net(z);
    if (v < m) return violated(z, v);
  }
  IbpEvaluator ibp(net);
  NodeQueue queue;
  queue.push({ibp(interval).lower, interval});
  while (true) {
    Node node = queue.top();
    if (node.lower >= m - budget.tolerance) {
      out.verdict = Verdict::kHolds;
      out.certified_lower = node.lower;
      return out;
    }
    queue.pop();
    const double mid = node.box.midpoint();
    const double v = net(mid);
    if (v < m) return violated(mid, v);
    if (!(mid > node.box.lo && mid < node.box.hi)) {
      // No representable split point left; the endpoint values bound the
      // node up to rounding.
      const double vlo = net(node.box.lo);
      const double vhi = net(node.box.hi);
      if (vlo < m) return violated(node.box.lo, vlo);
      if (vhi < m) return violated(node.box.hi, vhi);
      queue.push({std::min({vlo, vhi, v}), node.box});
      continue;
    }
    if (++out.subdivisions > budget.max_subdivisions) ThrowBudget(budget);
    const Interval left{node.box.lo, mid};
    const Interval right{mid, node.box.hi};
    queue.push({ibp(left).lower, left});
    queue.push({ibp(right).lower, right});
  }
}

MinBound min_lower_bound(const UnivariateNet& net, const Interval& interval,
                         const VerifyBudget& budget) {
  CheckInterval(interval);
  MinBound out;
  out.best = {interval.lo, net(interval.lo)};
  const auto offer = [&](double z, double v) {
    if (v < out.best.value || (v == out.best.value && z < out.best.z)) {
      out.best = {z, v};
    }
  };
  offer(interval.hi, net(interval.hi));
  IbpEvaluator ibp(net);
  NodeQueue queue;
  queue.push({ibp(interval).lower, interval});
  while (true) {
    const Node node = queue.top();
    if (out.best.value - node.lower <= budget.tolerance) {
      out.lower = std::min(node.lower, out.best.value);
      return out;
    }
    queue.pop();
    const double mid = node.box.midpoint();
    offer(mid, net(mid));
    if (!(mid > node.box.lo && mid < node.box.hi)) {
      const double vlo = net(node.box.lo);
      const double vhi = net(node.box.hi);
      offer(node.box.lo, vlo);
      offer(node.box.hi, vhi);
      queue.push({std::min(vlo, vhi), node.box});
      continue;
    }
    if (++out.subdivisions > budget.max_subdivisions) ThrowBudget(budget);
    for (const Interval& child :
         {Interval{node.box.lo, mid}, Interval{mid, node.box.hi}}) {
      const double lower = ibp(child).lower;
      // Nodes bounded above the incumbent cannot hold the minimum.
      if (lower <= out.best.value) queue.push({lower, child});
    }
    if (queue.empty()) {
      out.lower = out.best.value;
      return out;
    }
  }
}

}  // namespace namc
