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

#ifndef RDEQ_OPTIMIZER_HPP
#define RDEQ_OPTIMIZER_HPP

#include "rdeq/model.hpp"

#include <optional>

namespace rdeq::optimizer {

/// Test channel p(w1, w2 | x); the induced joint satisfies Y - X - (W1, W2)
/// by construction. Alphabet caps: |W1| <= |X|+2, |W2| <= (|X|+1)^2.
struct UninformedCandidate {
  ConditionalPMF channel;  // given {X}, out {W1, W2}

  const Alphabet& w1_alphabet() const { return channel.out_alphabets[0]; }
  const Alphabet& w2_alphabet() const { return channel.out_alphabets[1]; }
};

/// Test channel p(w1, w2 | x, y) for the informed encoder.
struct InformedCandidate {
  ConditionalPMF channel;  // given {X, Y}, out {W1, W2}

  const Alphabet& w1_alphabet() const { return channel.out_alphabets[0]; }
  const Alphabet& w2_alphabet() const { return channel.out_alphabets[1]; }
};

/// Exact single-letter functionals of a candidate together with the
/// posterior-risk-minimizing deterministic decoders.
struct EvaluatedCandidate {
  RDEPoint point;
  std::vector<int> decoder1;  // w1 -> reconstruction index
  std::vector<int> decoder2;  // (w1, w2, y) row-major -> reconstruction index

  int decoder2_index(int w1, int w2, int y, int w2_size, int y_size) const {
    return (w1 * w2_size + w2) * y_size + y;
  }
};

EvaluatedCandidate evaluate_uninformed(const UninformedCandidate& cand,
                                       const JointPMF& source,
                                       const DistortionMeasure& d1_measure,
                                       const DistortionMeasure& d2_measure);

EvaluatedCandidate evaluate_informed(const InformedCandidate& cand,
                                     const JointPMF& source,
                                     const DistortionMeasure& d1_measure,
                                     const DistortionMeasure& d2_measure);

// Single description W2 = X xor Ber(d2/p), W1 degenerate. Requires d2 <= p/2.
UninformedCandidate reference_channel_L2(double p, double d2);

// Single description W1 = X xor Ber(d1), W2 degenerate. Requires d1 <= 1/2.
UninformedCandidate reference_channel_L3(double p, double d1);

// Cascade W2 = X xor Ber(d2/p), W1 = W2 xor Ber(alpha) with
// alpha = (d1 - d2/p) / (1 - 2 d2/p). Requires d2 < p*d1, d1 <= 1/2.
UninformedCandidate reference_channel_L4(double p, double d1, double d2);

// Informed single description: W1 uniform when y != E, W1 = x xor Ber(d2/p)
// when y = E. W2 degenerate. Requires d2 <= p/2.
InformedCandidate reference_channel_G3(double p, double d2);

// Informed single description: W1 = x xor Ber(beta) when y != E,
// W1 = x xor Ber(alpha) when y = E, beta = (d1 - p*alpha)/(1-p).
InformedCandidate reference_channel_G4(double p, double d1, double alpha);

enum class SearchCase { Uninformed, Informed };

struct SearchTargets {
  double d1 = 0.0;
  double d2 = 0.0;
  std::optional<double> equivocation;  // require E >= this when set
};

struct SearchConfig {
  int restarts = 8;
  int steps = 200;
  double step_scale = 0.25;
  std::uint64_t seed = 0;
  SearchTargets targets;
  int w1_size = 2;
  int w2_size = 2;
};

struct SearchResult {
  bool found = false;
  EvaluatedCandidate best;
  ConditionalPMF best_channel;
  std::uint64_t evaluated = 0;
  std::uint64_t feasible = 0;
};

// Randomized restarts with multiplicative local perturbation; minimizes rate
// among candidates meeting the targets. Deterministic given the seed.
SearchResult random_search(SearchCase which, const JointPMF& source,
                           const SearchConfig& config);

/// Equality and Jensen checks for the complement-swap symmetrization of a
/// binary reconstruction channel p(xhat1 | x, y).
struct SymmetrizationReport {
  double a = 0, b = 0, c = 0, d = 0, p = 0;
  // Index 0: original, 1: swapped complement, 2: equal mixture.
  double distortion[3] = {0, 0, 0};
  double rate[3] = {0, 0, 0};          // I(X,Y; Xhat1)
  double equivocation[3] = {0, 0, 0};  // H(Y | Xhat1)
  bool p1_p2_equal = false;
  bool rate_jensen = false;
  bool equivocation_jensen = false;

  bool pass() const { return p1_p2_equal && rate_jensen && equivocation_jensen; }
};

SymmetrizationReport symmetrize_check(double a, double b, double c, double d,
                                      double p);

}  // namespace rdeq::optimizer

#endif  // RDEQ_OPTIMIZER_HPP
