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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rdeq/model.hpp"

#include <cmath>
#include <random>

using namespace rdeq;

namespace {

JointPMF random_joint(std::mt19937_64& rng, int nr, int nc) {
  std::vector<std::string> rs, cs;
  for (int i = 0; i < nr; ++i) rs.push_back("r" + std::to_string(i));
  for (int i = 0; i < nc; ++i) cs.push_back("c" + std::to_string(i));
  JointPMF j{Alphabet(rs), Alphabet(cs), Mat::Zero(nr, nc)};
  std::exponential_distribution<double> expo(1.0);
  double total = 0.0;
  for (int r = 0; r < nr; ++r) {
    for (int c = 0; c < nc; ++c) {
      j.probs(r, c) = expo(rng);
      total += j.probs(r, c);
    }
  }
  j.probs /= total;
  return j;
}

}  // namespace

TEST_CASE("alphabets") {
  CHECK(Alphabet::binary().size() == 2);
  CHECK(Alphabet::binary_erased().size() == 3);
  CHECK(Alphabet::trivial().size() == 1);
  CHECK(Alphabet::binary_erased().index("E") == 2);
  CHECK_THROWS_AS((void)Alphabet::binary().index("E"), DomainError);
  CHECK_THROWS_AS(Alphabet({"a", "a"}), DomainError);
}

TEST_CASE("binary entropy values") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.25) == doctest::Approx(0.8112781244591329).epsilon(1e-13));
  CHECK(binary_entropy(1.0 / 3.0) == doctest::Approx(0.9182958340544895).epsilon(1e-13));
  CHECK_THROWS_AS(binary_entropy(-0.01), DomainError);
  CHECK_THROWS_AS(binary_entropy(1.01), DomainError);
}

TEST_CASE("binary entropy symmetry and concavity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = unit(rng), b = unit(rng);
    CHECK(binary_entropy(a) == doctest::Approx(binary_entropy(1.0 - a)).epsilon(1e-12));
    const double mid = binary_entropy(0.5 * (a + b));
    CHECK(mid >= 0.5 * (binary_entropy(a) + binary_entropy(b)) - 1e-12);
  }
}

TEST_CASE("entropy basics") {
  Vec u = Vec::Constant(8, 1.0 / 8.0);
  CHECK(entropy(u) == doctest::Approx(3.0).epsilon(1e-13));
  Vec point = Vec::Zero(4);
  point(2) = 1.0;
  CHECK(entropy(point) == 0.0);
  Vec bad = Vec::Constant(3, 0.5);
  CHECK_THROWS_AS(entropy(bad), ValidationError);
  Vec neg(2);
  neg << 1.5, -0.5;
  CHECK_THROWS_AS(entropy(neg), ValidationError);
}

TEST_CASE("erased source table") {
  const double p = 0.25;
  JointPMF src = make_erased_source({p});
  src.validate();
  CHECK(src.row_alphabet.size() == 2);
  CHECK(src.col_alphabet.size() == 3);
  CHECK(src.probs(0, 0) == doctest::Approx((1 - p) / 2).epsilon(1e-15));
  CHECK(src.probs(0, 1) == 0.0);
  CHECK(src.probs(0, 2) == doctest::Approx(p / 2).epsilon(1e-15));
  CHECK(src.probs(1, 1) == doctest::Approx((1 - p) / 2).epsilon(1e-15));
  const Vec px = src.row_marginal();
  CHECK(px(0) == doctest::Approx(0.5).epsilon(1e-15));
  const Vec py = src.col_marginal();
  CHECK(py(2) == doctest::Approx(p).epsilon(1e-15));
  CHECK_THROWS_AS(make_erased_source({-0.1}), DomainError);
  CHECK_THROWS_AS(make_erased_source({1.1}), DomainError);
}

TEST_CASE("erased source information quantities") {
  const double p = 0.25;
  JointPMF src = make_erased_source({p});
  CHECK(entropy(src.col_marginal()) ==
        doctest::Approx(1.5612781244591329).epsilon(1e-13));
  // H(X|Y) = p, H(Y|X) = h(p), I(X;Y) = 1 - p for the erased source
  CHECK(conditional_entropy(src, Axis::Row) == doctest::Approx(p).epsilon(1e-13));
  CHECK(conditional_entropy(src, Axis::Col) ==
        doctest::Approx(binary_entropy(p)).epsilon(1e-13));
  CHECK(mutual_information(src) == doctest::Approx(1.0 - p).epsilon(1e-13));
}

TEST_CASE("chain rule on random joints") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    JointPMF j = random_joint(rng, 2 + static_cast<int>(rng() % 3),
                              2 + static_cast<int>(rng() % 3));
    const double h_joint = entropy_unchecked(j.probs);
    const double h_row = entropy(j.row_marginal());
    const double h_col = entropy(j.col_marginal());
    CHECK(h_joint == doctest::Approx(h_row + conditional_entropy(j, Axis::Col))
                         .epsilon(1e-11));
    CHECK(h_joint == doctest::Approx(h_col + conditional_entropy(j, Axis::Row))
                         .epsilon(1e-11));
    CHECK(mutual_information(j) >= 0.0);
    CHECK(mutual_information(j) ==
          doctest::Approx(h_row + h_col - h_joint).epsilon(1e-11));
  }
}

TEST_CASE("joint pmf validation") {
  JointPMF j{Alphabet::binary(), Alphabet::binary(), Mat::Zero(2, 2)};
  j.probs << 0.25, 0.25, 0.25, 0.25;
  CHECK_NOTHROW(j.validate());
  j.probs(0, 0) = 0.26;
  CHECK_THROWS_AS(j.validate(), ValidationError);
  j.probs(0, 0) = -0.01;
  CHECK_THROWS_AS(j.validate(), ValidationError);
  // mass off by less than the input tolerance passes
  j.probs << 0.25, 0.25, 0.25, 0.25 + 5e-10;
  CHECK_NOTHROW(j.validate());
}

TEST_CASE("conditional pmf validation") {
  ConditionalPMF c{{Alphabet::binary()}, {Alphabet::binary()}, Mat::Zero(2, 2)};
  c.probs << 0.9, 0.1, 0.3, 0.7;
  CHECK_NOTHROW(c.validate());
  CHECK(c.given_size() == 2);
  CHECK(c.out_size() == 2);
  c.probs(1, 0) = 0.4;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("hamming distortion") {
  CHECK(hamming(0, 0) == 0);
  CHECK(hamming(0, 1) == 1);
  CHECK(hamming(1, 0) == 1);
  CHECK(hamming(1, 1) == 0);
  CHECK_THROWS_AS(hamming(2, 0), DomainError);
  const DistortionMeasure m = DistortionMeasure::hamming_binary();
  CHECK(m.d(0, 1) == 1.0);
  CHECK(m.d(1, 1) == 0.0);
}
