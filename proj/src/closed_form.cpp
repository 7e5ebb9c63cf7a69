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

#include "rdeq/closed_form.hpp"

#include <algorithm>
#include <cmath>

namespace rdeq::closed_form {

namespace {

void check_point(double d1, double d2, double p) {
  if (d1 < 0.0 || d2 < 0.0) {
    throw DomainError("distortions must be nonnegative");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("erasure probability must lie in (0, 1)");
  }
}

double h(double a) { return binary_entropy(a); }

// Clamp arguments of h exactly at region boundaries against rounding.
double h_clamped_half(double a) {
  if (a > 0.5) {
    if (a > 0.5 + 1e-12) {
      throw ValidationError("entropy operand exceeds 1/2 after regioning");
    }
    a = 0.5;
  }
  return h(a);
}

}  // namespace

std::string to_string(UninformedRegion r) {
  switch (r) {
    case UninformedRegion::L1: return "L1";
    case UninformedRegion::L2: return "L2";
    case UninformedRegion::L3: return "L3";
    case UninformedRegion::L4: return "L4";
  }
  return "?";
}

std::string to_string(InformedRegime g) {
  switch (g) {
    case InformedRegime::G1: return "G1";
    case InformedRegime::G2: return "G2";
    case InformedRegime::G3: return "G3";
    case InformedRegime::G4: return "G4";
    case InformedRegime::G5: return "G5";
  }
  return "?";
}

bool InformedRegimeSet::contains(InformedRegime g) const {
  return std::find(labels.begin(), labels.end(), g) != labels.end();
}

bool InformedRegimeSet::has_closed_form() const {
  return contains(InformedRegime::G1) || contains(InformedRegime::G2) ||
         contains(InformedRegime::G3);
}

std::string InformedRegimeSet::joined() const {
  std::string out;
  for (const auto& g : labels) {
    if (!out.empty()) out += ';';
    out += to_string(g);
  }
  return out;
}

UninformedRegion classify_uninformed(double d1, double d2, double p) {
  check_point(d1, d2, p);
  if (d1 >= 0.5) {
    return d2 >= p / 2.0 ? UninformedRegion::L1 : UninformedRegion::L2;
  }
  return d2 >= p * d1 ? UninformedRegion::L3 : UninformedRegion::L4;
}

double rate_uninformed(double d1, double d2, double p) {
  switch (classify_uninformed(d1, d2, p)) {
    case UninformedRegion::L1:
      return 0.0;
    case UninformedRegion::L2:
      return p * (1.0 - h_clamped_half(d2 / p));
    case UninformedRegion::L3:
      return 1.0 - h_clamped_half(d1);
    case UninformedRegion::L4:
      return p * (1.0 - h_clamped_half(d2 / p)) +
             (1.0 - p) * (1.0 - h_clamped_half(d1));
  }
  throw ValidationError("unreachable region");
}

double equivocation_uninformed(double d1, double p) {
  if (d1 < 0.0) throw DomainError("distortion must be nonnegative");
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("erasure probability must lie in (0, 1)");
  }
  if (d1 <= 0.5) return h(p) + (1.0 - p) * h(d1);
  return h(p) + (1.0 - p);
}

InformedRegimeSet classify_informed(double d1, double d2, double p) {
  check_point(d1, d2, p);
  InformedRegimeSet set;
  if (d1 >= 0.5 && d2 >= p / 2.0) set.labels.push_back(InformedRegime::G1);
  if (d1 >= 0.5 && d2 <= p / 2.0) set.labels.push_back(InformedRegime::G2);
  if (d1 >= d2 + (1.0 - p) / 2.0 && d2 <= p / 2.0) {
    set.labels.push_back(InformedRegime::G3);
  }
  if (d1 <= 0.5 && d2 >= d1) set.labels.push_back(InformedRegime::G4);
  if (d1 <= d2 + (1.0 - p) / 2.0 && d2 <= d1) {
    set.labels.push_back(InformedRegime::G5);
  }
  if (set.labels.empty()) {
    throw ValidationError("no informed regime covers the given point");
  }
  return set;
}

RDEPoint rate_equivocation_informed_closed(double d1, double d2, double p) {
  const InformedRegimeSet set = classify_informed(d1, d2, p);
  if (!set.has_closed_form()) {
    throw DomainError(
        "point lies only in G4/G5; use frontier_informed for the tradeoff");
  }
  RDEPoint pt;
  pt.d1 = d1;
  pt.d2 = d2;
  pt.equivocation = h(p) + 1.0 - p;
  if (set.contains(InformedRegime::G1)) {
    pt.rate = 0.0;
  } else {
    pt.rate = p * (1.0 - h_clamped_half(d2 / p));
  }
  return pt;
}

std::pair<double, double> frontier_alpha_range(double d1, double d2, double p) {
  const InformedRegimeSet set = classify_informed(d1, d2, p);
  if (set.contains(InformedRegime::G4)) return {0.0, d1 / p};
  if (set.contains(InformedRegime::G5)) return {0.0, d2 / p};
  throw DomainError("point lies outside G4 and G5; regimes: " + set.joined());
}

std::vector<double> default_alpha_grid(double lo, double hi, int count) {
  std::vector<double> grid;
  grid.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  }
  return grid;
}

FrontierSweep frontier_informed(double d1, double d2, double p,
                                const std::vector<double>& alpha_grid) {
  const auto [lo, hi] = frontier_alpha_range(d1, d2, p);
  const InformedRegimeSet set = classify_informed(d1, d2, p);
  FrontierSweep sweep;
  sweep.regime = set.contains(InformedRegime::G4) ? InformedRegime::G4
                                                  : InformedRegime::G5;
  const double eps = 1e-12;
  for (int i = 0; i < static_cast<int>(alpha_grid.size()); ++i) {
    const double alpha = alpha_grid[static_cast<size_t>(i)];
    if (alpha < lo - eps || alpha > hi + eps) {
      sweep.skipped.push_back({i, alpha, "alpha outside admissible range"});
      continue;
    }
    double beta = (d1 - p * alpha) / (1.0 - p);
    if (beta < 0.0 && beta > -eps) beta = 0.0;
    if (beta < 0.0 || beta > 0.5 + eps) {
      sweep.skipped.push_back({i, alpha, "beta outside [0, 1/2]"});
      continue;
    }
    beta = std::min(beta, 0.5);
    FrontierPoint pt;
    pt.alpha = alpha;
    pt.beta = beta;
    pt.rate = 1.0 - (1.0 - p) * h(beta) - p * h(alpha);
    pt.equivocation = h(p) + (1.0 - p) * h(beta);
    sweep.points.push_back(pt);
  }
  return sweep;
}

bool perfect_privacy_achievable(double d1, double d2, double p) {
  return classify_informed(d1, d2, p).has_closed_form();
}

std::vector<CurveRow> curve_sweep(SweepCase which, double p, FixedCoordinate fixed,
                                  double fixed_value, const std::vector<double>& grid,
                                  const std::optional<std::vector<double>>& alpha_grid) {
  std::vector<CurveRow> rows;

  if (which == SweepCase::Informed && alpha_grid.has_value()) {
    // Frontier sweep: d1 fixed, each alpha achieves d2 = p * alpha.
    if (fixed != FixedCoordinate::D1) {
      throw DomainError("informed alpha sweep requires fixed d1");
    }
    const double d1 = fixed_value;
    for (const double alpha : *alpha_grid) {
      CurveRow row;
      row.p = p;
      row.d1 = d1;
      row.d2 = p * alpha;
      double beta = (d1 - p * alpha) / (1.0 - p);
      if (beta < 0.0 && beta > -1e-12) beta = 0.0;
      if (alpha < 0.0 || alpha > d1 / p + 1e-12 || beta < 0.0 || beta > 0.5 + 1e-12) {
        row.admissible = false;
        rows.push_back(row);
        continue;
      }
      beta = std::min(beta, 0.5);
      row.labels = classify_informed(row.d1, row.d2, p).joined();
      row.rate = 1.0 - (1.0 - p) * binary_entropy(beta) - p * binary_entropy(alpha);
      row.equivocation = binary_entropy(p) + (1.0 - p) * binary_entropy(beta);
      rows.push_back(row);
    }
    return rows;
  }

  for (const double g : grid) {
    CurveRow row;
    row.p = p;
    row.d1 = (fixed == FixedCoordinate::D1) ? fixed_value : g;
    row.d2 = (fixed == FixedCoordinate::D2) ? fixed_value : g;
    if (row.d1 < 0.0 || row.d2 < 0.0) {
      row.admissible = false;
      rows.push_back(row);
      continue;
    }
    // Larger distortions never raise the rate or lower the equivocation.
    double d1 = row.d1;
    double d2 = row.d2;
    if (d1 > 0.5) {
      d1 = 0.5;
      row.clamped = true;
    }
    if (d2 > p / 2.0) {
      d2 = p / 2.0;
      row.clamped = true;
    }
    if (which == SweepCase::Uninformed) {
      const UninformedRegion region = classify_uninformed(d1, d2, p);
      row.labels = to_string(region);
      row.rate = rate_uninformed(d1, d2, p);
      row.equivocation = equivocation_uninformed(d1, p);
    } else {
      const InformedRegimeSet set = classify_informed(d1, d2, p);
      row.labels = set.joined();
      if (set.has_closed_form()) {
        const RDEPoint pt = rate_equivocation_informed_closed(d1, d2, p);
        row.rate = pt.rate;
        row.equivocation = pt.equivocation;
      } else {
        row.admissible = false;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rdeq::closed_form
