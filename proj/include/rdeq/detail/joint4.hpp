// Copyright 2026 The rdeq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RDEQ_DETAIL_JOINT4_HPP
#define RDEQ_DETAIL_JOINT4_HPP

#include "rdeq/model.hpp"

#include <array>

namespace rdeq::detail {

// Flat joint pmf over the four axes (x, y, w1, w2), row-major.
struct Joint4 {
  std::array<int, 4> dims;
  Eigen::ArrayXd p;

  int index(int x, int y, int w1, int w2) const {
    return ((x * dims[1] + y) * dims[2] + w1) * dims[3] + w2;
  }

  // Marginal over the axes flagged in `keep`, flattened row-major over the
  // kept axes in (x, y, w1, w2) order.
  Eigen::ArrayXd marginal(const std::array<bool, 4>& keep) const {
    int out_size = 1;
    for (int a = 0; a < 4; ++a) {
      if (keep[static_cast<size_t>(a)]) out_size *= dims[static_cast<size_t>(a)];
    }
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(out_size);
    std::array<int, 4> idx{};
    for (int flat = 0; flat < static_cast<int>(p.size()); ++flat) {
      int rem = flat;
      for (int a = 3; a >= 0; --a) {
        idx[static_cast<size_t>(a)] = rem % dims[static_cast<size_t>(a)];
        rem /= dims[static_cast<size_t>(a)];
      }
      int o = 0;
      for (int a = 0; a < 4; ++a) {
        if (keep[static_cast<size_t>(a)]) {
          o = o * dims[static_cast<size_t>(a)] + idx[static_cast<size_t>(a)];
        }
      }
      out(o) += p(flat);
    }
    return out;
  }

  double subset_entropy(const std::array<bool, 4>& keep) const {
    return entropy_unchecked(Vec(marginal(keep).matrix()));
  }
};

}  // namespace rdeq::detail

#endif  // RDEQ_DETAIL_JOINT4_HPP
