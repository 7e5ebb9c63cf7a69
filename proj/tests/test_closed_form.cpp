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

#include "rdeq/closed_form.hpp"

#include <cmath>

using namespace rdeq;
using namespace rdeq::closed_form;

TEST_CASE("uninformed region classification") {
  const double p = 0.25;
  CHECK(classify_uninformed(0.6, 0.2, p) == UninformedRegion::L1);
  CHECK(classify_uninformed(0.6, 0.05, p) == UninformedRegion::L2);
  CHECK(classify_uninformed(0.1, 0.125, p) == UninformedRegion::L3);
  CHECK(classify_uninformed(0.1, 0.01, p) == UninformedRegion::L4);
  // boundary d2 = p*d1 belongs to the lower-rate region L3
  CHECK(classify_uninformed(0.2, p * 0.2, p) == UninformedRegion::L3);
}

TEST_CASE("uninformed rate values") {
  const double p = 0.25;
  CHECK(rate_uninformed(0.6, 0.2, p) == 0.0);
  CHECK(rate_uninformed(0.6, 0.05, p) ==
        doctest::Approx(0.0695179762781594).epsilon(1e-13));
  CHECK(rate_uninformed(0.1, 0.125, p) ==
        doctest::Approx(1.0 - binary_entropy(0.1)).epsilon(1e-13));
  CHECK(rate_uninformed(0.1, 0.02, p) ==
        doctest::Approx(0.5477085072574709).epsilon(1e-13));
  CHECK(rate_uninformed(0.0, p / 8.0, p) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rate_uninformed(0.5, 0.2, p) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("uninformed equivocation values") {
  const double p = 0.25;
  CHECK(equivocation_uninformed(0.1, p) ==
        doctest::Approx(1.1630248196510938).epsilon(1e-13));
  CHECK(equivocation_uninformed(0.0, p) ==
        doctest::Approx(binary_entropy(p)).epsilon(1e-13));
  CHECK(equivocation_uninformed(0.6, p) ==
        doctest::Approx(binary_entropy(p) + 1.0 - p).epsilon(1e-13));
}

TEST_CASE("uninformed monotonicity and continuity") {
  const double p = 0.25;
  double prev_rate = 2.0, prev_equiv = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double d1 = 0.5 * i / 100;
    const double r = rate_uninformed(d1, 0.03, p);
    const double e = equivocation_uninformed(d1, p);
    CHECK(r <= prev_rate + 1e-12);
    CHECK(e >= prev_equiv - 1e-12);
    prev_rate = r;
    prev_equiv = e;
  }
  // rate is continuous across the L3/L4 boundary d2 = p*d1
  const double d1 = 0.2;
  CHECK(rate_uninformed(d1, p * d1 - 1e-9, p) ==
        doctest::Approx(rate_uninformed(d1, p * d1 + 1e-9, p)).epsilon(1e-6));
  // equivocation is concave in d1 on [0, 1/2]
  for (int i = 1; i < 50; ++i) {
    const double a = 0.5 * i / 50, b = 0.5 * (i + 1) / 50 - 0.2 * (i % 3) / 50;
    const double mid = equivocation_uninformed(0.5 * (a + b), p);
    CHECK(mid >= 0.5 * (equivocation_uninformed(a, p) + equivocation_uninformed(b, p)) -
                     1e-12);
  }
}

TEST_CASE("informed regime classification") {
  const double p = 0.4;
  CHECK(classify_informed(0.6, 0.3, p).contains(InformedRegime::G1));
  CHECK_FALSE(classify_informed(0.6, 0.3, p).contains(InformedRegime::G3));
  const InformedRegimeSet g4 = classify_informed(0.2, 0.3, p);
  CHECK(g4.labels.size() == 1);
  CHECK(g4.contains(InformedRegime::G4));
  const InformedRegimeSet mid = classify_informed(0.5, 0.1, p);
  CHECK(mid.contains(InformedRegime::G2));
  CHECK(mid.contains(InformedRegime::G3));
  CHECK(mid.joined().find("G2") != std::string::npos);
  CHECK(classify_informed(0.1, 0.05, p).contains(InformedRegime::G5));
}

TEST_CASE("informed closed forms") {
  const double p = 0.4;
  const RDEPoint g1 = rate_equivocation_informed_closed(0.6, 0.3, p);
  CHECK(g1.rate == 0.0);
  CHECK(g1.equivocation ==
        doctest::Approx(binary_entropy(p) + 1.0 - p).epsilon(1e-13));
  const RDEPoint g3 = rate_equivocation_informed_closed(0.4, 0.1, p);
  CHECK(g3.rate == doctest::Approx(0.0754887502163469).epsilon(1e-13));
  CHECK(g3.equivocation ==
        doctest::Approx(binary_entropy(p) + 1.0 - p).epsilon(1e-13));
  CHECK_THROWS_AS(rate_equivocation_informed_closed(0.2, 0.3, p), DomainError);
}

TEST_CASE("informed dominance over uninformed") {
  // wherever both closed forms apply, the informed rate is no larger
  for (const double p : {0.25, 0.4}) {
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const double d1 = 0.5 * i / 20;
        const double d2 = (p / 2.0) * j / 20;
        if (!classify_informed(d1, d2, p).has_closed_form()) continue;
        const RDEPoint inf = rate_equivocation_informed_closed(d1, d2, p);
        CHECK(inf.rate <= rate_uninformed(d1, d2, p) + 1e-12);
        CHECK(inf.equivocation >= equivocation_uninformed(d1, p) - 1e-12);
      }
    }
  }
}

TEST_CASE("frontier anchors") {
  const double p = 0.4, d1 = 0.2, d2 = 0.3;
  CHECK(frontier_alpha_range(d1, d2, p).second == doctest::Approx(0.5).epsilon(1e-13));
  const FrontierSweep sweep = frontier_informed(d1, d2, p, {0.0, 0.2, 0.5});
  REQUIRE(sweep.points.size() == 3);
  CHECK(sweep.regime == InformedRegime::G4);
  CHECK(sweep.points[0].beta == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(sweep.points[0].rate == doctest::Approx(0.4490224995673063).epsilon(1e-12));
  CHECK(sweep.points[0].equivocation ==
        doctest::Approx(1.5219280948873623).epsilon(1e-12));
  CHECK(sweep.points[1].rate == doctest::Approx(0.2780719051126377).epsilon(1e-12));
  CHECK(sweep.points[1].equivocation ==
        doctest::Approx(1.4041074513870860).epsilon(1e-12));
  CHECK(sweep.points[2].rate == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(sweep.points[2].equivocation ==
        doctest::Approx(0.9709505944546686).epsilon(1e-12));
}

TEST_CASE("frontier shape and range handling") {
  const double p = 0.4, d1 = 0.2, d2 = 0.3;
  const FrontierSweep sweep = frontier_informed(d1, d2, p, default_alpha_grid(0.0, 0.5, 101));
  REQUIRE(sweep.points.size() == 101);
  int min_at = 0;
  for (int i = 1; i < 101; ++i) {
    CHECK(sweep.points[static_cast<size_t>(i)].equivocation <
          sweep.points[static_cast<size_t>(i - 1)].equivocation);
    if (sweep.points[static_cast<size_t>(i)].rate <
        sweep.points[static_cast<size_t>(min_at)].rate) {
      min_at = i;
    }
  }
  CHECK(sweep.points[static_cast<size_t>(min_at)].alpha ==
        doctest::Approx(d1).epsilon(1e-12));  // minimum-rate point at alpha = d1
  // out-of-range alphas are reported, not evaluated
  const FrontierSweep skip = frontier_informed(d1, d2, p, {0.25, 0.75});
  CHECK(skip.points.size() == 1);
  REQUIRE(skip.skipped.size() == 1);
  CHECK(skip.skipped[0].grid_index == 1);
  CHECK_THROWS_AS(frontier_informed(0.9, 0.3, 0.4, {0.1}), DomainError);
}

TEST_CASE("G5 frontier") {
  const double p = 0.4, d1 = 0.2, d2 = 0.1;  // d2 < d1: achievable-only regime
  CHECK(classify_informed(d1, d2, p).contains(InformedRegime::G5));
  const auto [lo, hi] = frontier_alpha_range(d1, d2, p);
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(d2 / p).epsilon(1e-13));
  const FrontierSweep sweep = frontier_informed(d1, d2, p, {0.0, 0.25});
  CHECK(sweep.regime == InformedRegime::G5);
  CHECK(sweep.points.size() == 2);
}

TEST_CASE("perfect privacy classification") {
  CHECK(perfect_privacy_achievable(0.6, 0.2, 0.25));
  CHECK(perfect_privacy_achievable(0.4, 0.1, 0.4));  // G3
  CHECK_FALSE(perfect_privacy_achievable(0.2, 0.3, 0.4));
}

TEST_CASE("uninformed curve sweep") {
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(0.5 * i / 50);
  const auto rows =
      curve_sweep(SweepCase::Uninformed, 0.25, FixedCoordinate::D2, 0.03125, grid);
  REQUIRE(rows.size() == 51);
  CHECK(rows.front().rate == doctest::Approx(1.0).epsilon(1e-12));
  // at d1 = 1/2 only the L2 term remains; continuous with the L4 limit
  CHECK(rows.back().rate ==
        doctest::Approx(0.25 * (1.0 - binary_entropy(0.125))).epsilon(1e-12));
  // region switch L3 -> L4 strictly past d1 = d2/p = 0.125, L2 at d1 = 1/2
  for (const auto& r : rows) {
    if (r.d1 <= 0.125 + 1e-12) {
      CHECK(r.labels == "L3");
    } else if (r.d1 < 0.5) {
      CHECK(r.labels == "L4");
    } else {
      CHECK(r.labels == "L2");
    }
  }
  // distortions beyond the saturation points are clamped and flagged
  const auto clamped =
      curve_sweep(SweepCase::Uninformed, 0.25, FixedCoordinate::D2, 0.2, {0.6});
  REQUIRE(clamped.size() == 1);
  CHECK(clamped[0].clamped);
  CHECK(clamped[0].rate == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("informed alpha curve sweep") {
  const auto rows = curve_sweep(SweepCase::Informed, 0.4, FixedCoordinate::D1, 0.2, {},
                                std::vector<double>{0.0, 0.2, 0.5});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].d2 == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(rows[1].d2 == doctest::Approx(0.08).epsilon(1e-13));
  CHECK(rows[1].rate == doctest::Approx(0.2780719051126377).epsilon(1e-12));
  CHECK(rows[2].equivocation == doctest::Approx(0.9709505944546686).epsilon(1e-12));
}

TEST_CASE("default alpha grid") {
  const auto g = default_alpha_grid(0.0, 0.5, 11);
  REQUIRE(g.size() == 11);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g[5] == doctest::Approx(0.25).epsilon(1e-15));
}
