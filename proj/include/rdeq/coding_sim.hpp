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

#ifndef RDEQ_CODING_SIM_HPP
#define RDEQ_CODING_SIM_HPP

#include "rdeq/model.hpp"
#include "rdeq/optimizer.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace rdeq::coding_sim {

// Thrown when an exact enumeration would exceed the configured state budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, std::uint64_t required)
      : std::runtime_error(what), required_states(required) {}
  std::uint64_t required_states;
};

struct SimConfig {
  int n = 8;                     // blocklength
  double epsilon = 0.05;         // strong-typicality slack per joint-type cell
  double rate_slack = 0.05;      // added to information rates when sizing codebooks
  std::uint64_t seed = 0;
  std::uint64_t state_budget = 1ull << 26;  // max (x^n, y^n) joint states for exact mode
  bool exact_only = false;
  int mc_samples = 20000;        // Monte-Carlo sample count past the budget
};

/// Deterministic encoder f(x^n[, y^n]) -> index in [0, num_indices).
/// Uninformed encoders ignore y and are cached per x^n during enumeration.
struct EncoderMap {
  int num_indices = 1;
  bool informed = false;
  std::function<int(const std::vector<int>& x, const std::vector<int>& y)> encode;
};

struct SimResult {
  double equiv_rate = 0.0;       // H(Y^n | J) / n, bits
  bool exact = true;
  double limit_value = 0.0;      // the scheme's asymptotic target
  double distortion1 = 0.0;
  double distortion2 = 0.0;
  double encoding_failure_prob = 0.0;
  double decode_failure_prob = 0.0;
  double bin_uniformity_stat = 0.0;  // max |P(bin | typical) - 1/S|
  double rate_bits_used = 0.0;       // (log2 M1 + log2 S) / n
  // Decomposition diagnostics for the two-layer schemes.
  double equiv_given_j1 = 0.0;       // H(Y^n | J1) / n
  double bin_info_given_j1 = 0.0;    // I(Y^n; B | J1) / n via H(B|J1) - H(B|J1,Y^n)
  std::uint64_t mc_samples_used = 0;
};

// H(Y^n | J) / n computed exactly via H(Y^n) - H(J) + H(J | Y^n), exploiting
// the memoryless product structure. Throws BudgetError past the state budget.
double exact_equivocation(const EncoderMap& encoder, const JointPMF& source,
                          int n, std::uint64_t state_budget = 1ull << 26);

// Random binning of every x^n into `num_bins` bins; J is the bin index.
SimResult simulate_slepian_wolf(const JointPMF& source, const SimConfig& cfg,
                                int num_bins);

// Wyner-Ziv: codeword selection through p(u|x), random binning, decoder-side
// disambiguation against y^n; reconstruction maps (u, y) -> xhat.
SimResult simulate_wyner_ziv(const JointPMF& source, const ConditionalPMF& test_channel,
                             const std::vector<int>& reconstruction,
                             const SimConfig& cfg);

// Two-layer uninformed scheme: W1 rate-distortion layer plus conditionally
// generated, binned W2 layer. J = (j1, bin(j2)).
SimResult simulate_heegard_berger(const JointPMF& source,
                                  const optimizer::UninformedCandidate& cand,
                                  const SimConfig& cfg);

// Two-layer informed scheme: codeword selection uses (x^n, y^n).
SimResult simulate_kaspi(const JointPMF& source,
                         const optimizer::InformedCandidate& cand,
                         const SimConfig& cfg);

// Number of (x^n, y^n) joint support states the exact mode enumerates.
std::uint64_t enumeration_states(const JointPMF& source, int n);

}  // namespace rdeq::coding_sim

#endif  // RDEQ_CODING_SIM_HPP
