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

#ifndef RDEQ_MODEL_HPP
#define RDEQ_MODEL_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdeq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown when an argument lies outside its mathematical domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a probability table fails validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Probability-sum tolerance for user-supplied tables.
inline constexpr double kInputTol = 1e-9;
// Tolerance for tables constructed internally.
inline constexpr double kConstructTol = 1e-12;
// Entries below this are treated as exact zeros (0 log 0 = 0).
inline constexpr double kProbFloor = 1e-300;

/// Ordered finite set of symbol labels.
struct Alphabet {
  std::vector<std::string> symbols;

  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> syms);

  int size() const { return static_cast<int>(symbols.size()); }
  // Index of `label`, or throws DomainError.
  int index(const std::string& label) const;
  const std::string& label(int i) const { return symbols.at(static_cast<size_t>(i)); }

  static Alphabet binary();          // {0, 1}
  static Alphabet binary_erased();   // {0, 1, E}
  static Alphabet trivial();         // single symbol {*}
};

enum class Axis { Row, Col };

/// Joint pmf p(row, col) over a pair of finite alphabets.
struct JointPMF {
  Alphabet row_alphabet;
  Alphabet col_alphabet;
  Mat probs;  // row_alphabet.size() x col_alphabet.size()

  // Checks nonnegativity and total mass 1 within `tol`.
  void validate(double tol = kInputTol) const;
  Vec row_marginal() const;
  Vec col_marginal() const;
};

/// Conditional pmf table p(out tuple | given tuple). Rows index conditioning
/// tuples (row-major over `given_alphabets`), columns index output tuples.
struct ConditionalPMF {
  std::vector<Alphabet> given_alphabets;
  std::vector<Alphabet> out_alphabets;
  Mat probs;

  int given_size() const;
  int out_size() const;
  void validate(double tol = kInputTol) const;
};

struct ErasedSourceParams {
  double p = 0.0;  // erasure probability
};

/// Per-letter distortion table d(x, xhat) >= 0.
struct DistortionMeasure {
  Mat d;  // source alphabet x reconstruction alphabet

  void validate() const;
  static DistortionMeasure hamming_binary();
};

/// One point of the rate-distortion-equivocation region, in bits per symbol.
struct RDEPoint {
  double rate = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double equivocation = 0.0;
};

// Binary uniform X with erased side information Y over {0,1} x {0,1,E}.
JointPMF make_erased_source(const ErasedSourceParams& params);

// h(a) = -a log2 a - (1-a) log2 (1-a); domain [0,1].
double binary_entropy(double a);

// Shannon entropy in bits of a pmf; validates the input.
double entropy(const Vec& pmf);

// Entropy without validation; entries below kProbFloor are ignored.
double entropy_unchecked(const Vec& pmf);
double entropy_unchecked(const Mat& pmf);

// H(target | other axis) of a joint pmf.
double conditional_entropy(const JointPMF& joint, Axis target);

// I(row; col), clamped to [0, inf) against -1e-12 rounding.
double mutual_information(const JointPMF& joint);

// Hamming distortion on {0,1}; throws DomainError on other symbols.
int hamming(int x, int xhat);

}  // namespace rdeq

#endif  // RDEQ_MODEL_HPP
