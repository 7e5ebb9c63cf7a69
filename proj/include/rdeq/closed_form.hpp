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

#ifndef RDEQ_CLOSED_FORM_HPP
#define RDEQ_CLOSED_FORM_HPP

#include "rdeq/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rdeq::closed_form {

// Distortion regions for the uninformed (Heegard-Berger) case of the binary
// source with erased side information. Ties on boundaries go to the
// lower-rate region; the rate formulas agree there.
enum class UninformedRegion { L1, L2, L3, L4 };

std::string to_string(UninformedRegion r);

// Informed (Kaspi) regimes. They overlap, so classification yields a set.
enum class InformedRegime { G1, G2, G3, G4, G5 };

std::string to_string(InformedRegime g);

struct InformedRegimeSet {
  std::vector<InformedRegime> labels;  // in G1..G5 order

  bool contains(InformedRegime g) const;
  bool has_closed_form() const;  // intersects {G1, G2, G3}
  std::string joined() const;    // "G2;G3"
};

struct FrontierPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double rate = 0.0;
  double equivocation = 0.0;
};

// Frontier rows plus per-row range failures (index into the input grid).
struct FrontierSweep {
  std::vector<FrontierPoint> points;
  struct Skipped {
    int grid_index;
    double alpha;
    std::string reason;
  };
  std::vector<Skipped> skipped;
  InformedRegime regime = InformedRegime::G4;  // G4 (tight) or G5 (achievable only)
};

struct CurveRow {
  double d1 = 0.0;
  double d2 = 0.0;
  double p = 0.0;
  std::string labels;  // region label(s), ';'-joined for the informed case
  double rate = 0.0;
  double equivocation = 0.0;
  bool clamped = false;
  bool admissible = true;
};

enum class SweepCase { Uninformed, Informed };
enum class FixedCoordinate { D1, D2 };

UninformedRegion classify_uninformed(double d1, double d2, double p);

// R(D1, D2) for the uninformed case, in bits.
double rate_uninformed(double d1, double d2, double p);

// Gamma(D1, D2) for the uninformed case; independent of d2.
double equivocation_uninformed(double d1, double p);

InformedRegimeSet classify_informed(double d1, double d2, double p);

// Closed-form (rate, Gamma) for points meeting G1/G2/G3; the minimum rate
// among applicable regimes is returned. Throws DomainError for points that
// lie only in G4/G5 (use frontier_informed there).
RDEPoint rate_equivocation_informed_closed(double d1, double d2, double p);

// Parametric (alpha, beta, rate, equivocation) frontier for G4/G5 points.
FrontierSweep frontier_informed(double d1, double d2, double p,
                                const std::vector<double>& alpha_grid);

// Admissible alpha interval for the frontier at (d1, d2, p).
std::pair<double, double> frontier_alpha_range(double d1, double d2, double p);

// Evenly spaced grid of `count` points over [lo, hi], endpoints included.
std::vector<double> default_alpha_grid(double lo, double hi, int count = 513);

bool perfect_privacy_achievable(double d1, double d2, double p);

// Grid sweep combining classification and the closed forms, rows in grid
// order. Uninformed: the grid runs over the non-fixed distortion. Informed
// with an alpha grid: d1 is fixed, each row evaluates the frontier at one
// alpha (achieving d2 = p*alpha); without an alpha grid the G1-G3 closed
// forms are used and frontier-only points are flagged inadmissible.
std::vector<CurveRow> curve_sweep(SweepCase which, double p, FixedCoordinate fixed,
                                  double fixed_value, const std::vector<double>& grid,
                                  const std::optional<std::vector<double>>& alpha_grid =
                                      std::nullopt);

}  // namespace rdeq::closed_form

#endif  // RDEQ_CLOSED_FORM_HPP
