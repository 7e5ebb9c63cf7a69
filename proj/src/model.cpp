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

#include "rdeq/model.hpp"

#include <cmath>
#include <unordered_set>

namespace rdeq {

Alphabet::Alphabet(std::vector<std::string> syms) : symbols(std::move(syms)) {
  if (symbols.empty()) {
    throw DomainError("alphabet must contain at least one symbol");
  }
  std::unordered_set<std::string> seen;
  for (const auto& s : symbols) {
    if (!seen.insert(s).second) {
      throw DomainError("duplicate symbol in alphabet: " + s);
    }
  }
}

int Alphabet::index(const std::string& label) const {
  for (int i = 0; i < size(); ++i) {
    if (symbols[static_cast<size_t>(i)] == label) return i;
  }
  throw DomainError("symbol not in alphabet: " + label);
}

Alphabet Alphabet::binary() { return Alphabet({"0", "1"}); }
Alphabet Alphabet::binary_erased() { return Alphabet({"0", "1", "E"}); }
Alphabet Alphabet::trivial() { return Alphabet({"*"}); }

void JointPMF::validate(double tol) const {
  if (probs.rows() != row_alphabet.size() || probs.cols() != col_alphabet.size()) {
    throw ValidationError("joint pmf table does not match alphabet sizes");
  }
  if ((probs.array() < 0.0).any()) {
    throw ValidationError("joint pmf has a negative entry");
  }
  const double total = probs.sum();
  if (std::abs(total - 1.0) > tol) {
    throw ValidationError("joint pmf entries sum to " + std::to_string(total));
  }
}

Vec JointPMF::row_marginal() const { return probs.rowwise().sum(); }
Vec JointPMF::col_marginal() const { return probs.colwise().sum().transpose(); }

int ConditionalPMF::given_size() const {
  int n = 1;
  for (const auto& a : given_alphabets) n *= a.size();
  return n;
}

int ConditionalPMF::out_size() const {
  int n = 1;
  for (const auto& a : out_alphabets) n *= a.size();
  return n;
}

void ConditionalPMF::validate(double tol) const {
  if (probs.rows() != given_size() || probs.cols() != out_size()) {
    throw ValidationError("conditional pmf table does not match alphabet sizes");
  }
  if ((probs.array() < 0.0).any()) {
    throw ValidationError("conditional pmf has a negative entry");
  }
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    const double total = probs.row(r).sum();
    if (std::abs(total - 1.0) > tol) {
      throw ValidationError("conditional pmf row sums to " + std::to_string(total));
    }
  }
}

void DistortionMeasure::validate() const {
  if (!(d.array() >= 0.0).all() || !d.array().isFinite().all()) {
    throw ValidationError("distortion entries must be finite and nonnegative");
  }
}

DistortionMeasure DistortionMeasure::hamming_binary() {
  Mat d(2, 2);
  d << 0, 1, 1, 0;
  return DistortionMeasure{d};
}

JointPMF make_erased_source(const ErasedSourceParams& params) {
  const double p = params.p;
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("erasure probability must lie in [0, 1]");
  }
  JointPMF src;
  src.row_alphabet = Alphabet::binary();
  src.col_alphabet = Alphabet::binary_erased();
  src.probs = Mat::Zero(2, 3);
  for (int x = 0; x < 2; ++x) {
    src.probs(x, x) = (1.0 - p) / 2.0;
    src.probs(x, 2) = p / 2.0;
  }
  return src;
}

double binary_entropy(double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw DomainError("binary_entropy argument must lie in [0, 1]");
  }
  double h = 0.0;
  if (a > kProbFloor) h -= a * std::log2(a);
  if (1.0 - a > kProbFloor) h -= (1.0 - a) * std::log2(1.0 - a);
  return h;
}

double entropy_unchecked(const Vec& pmf) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < pmf.size(); ++i) {
    const double v = pmf(i);
    if (v > kProbFloor) h -= v * std::log2(v);
  }
  return h;
}

double entropy_unchecked(const Mat& pmf) {
  return entropy_unchecked(Vec(Eigen::Map<const Vec>(pmf.data(), pmf.size())));
}

double entropy(const Vec& pmf) {
  if ((pmf.array() < 0.0).any()) {
    throw ValidationError("pmf has a negative entry");
  }
  if (std::abs(pmf.sum() - 1.0) > kInputTol) {
    throw ValidationError("pmf entries do not sum to 1");
  }
  return entropy_unchecked(pmf);
}

double conditional_entropy(const JointPMF& joint, Axis target) {
  joint.validate();
  const Vec other =
      (target == Axis::Row) ? joint.col_marginal() : joint.row_marginal();
  return entropy_unchecked(joint.probs) - entropy_unchecked(other);
}

double mutual_information(const JointPMF& joint) {
  joint.validate();
  const double i = entropy_unchecked(Vec(joint.row_marginal())) +
                   entropy_unchecked(Vec(joint.col_marginal())) -
                   entropy_unchecked(joint.probs);
  if (i < -1e-12) {
    throw ValidationError("mutual information below rounding tolerance");
  }
  return i < 0.0 ? 0.0 : i;
}

int hamming(int x, int xhat) {
  if ((x != 0 && x != 1) || (xhat != 0 && xhat != 1)) {
    throw DomainError("hamming distortion is defined on binary symbols");
  }
  return x == xhat ? 0 : 1;
}

}  // namespace rdeq
