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

#include "rdeq/optimizer.hpp"

#include "rdeq/detail/joint4.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace rdeq::optimizer {

namespace {

void check_caps(const ConditionalPMF& channel, int x_size) {
  const int w1 = channel.out_alphabets[0].size();
  const int w2 = channel.out_alphabets[1].size();
  if (w1 > x_size + 2) {
    throw ValidationError("|W1| exceeds the cardinality cap |X|+2");
  }
  if (w2 > (x_size + 1) * (x_size + 1)) {
    throw ValidationError("|W2| exceeds the cardinality cap (|X|+1)^2");
  }
}

detail::Joint4 build_joint_uninformed(const UninformedCandidate& cand, const JointPMF& source) {
  cand.channel.validate(kConstructTol * 1e3);
  source.validate();
  check_caps(cand.channel, source.row_alphabet.size());
  const int nx = source.row_alphabet.size();
  const int ny = source.col_alphabet.size();
  const int n1 = cand.w1_alphabet().size();
  const int n2 = cand.w2_alphabet().size();
  detail::Joint4 j{{nx, ny, n1, n2}, Eigen::ArrayXd::Zero(nx * ny * n1 * n2)};
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      const double pxy = source.probs(x, y);
      if (pxy <= kProbFloor) continue;
      for (int w1 = 0; w1 < n1; ++w1) {
        for (int w2 = 0; w2 < n2; ++w2) {
          j.p(j.index(x, y, w1, w2)) = pxy * cand.channel.probs(x, w1 * n2 + w2);
        }
      }
    }
  }
  return j;
}

detail::Joint4 build_joint_informed(const InformedCandidate& cand, const JointPMF& source) {
  cand.channel.validate(kConstructTol * 1e3);
  source.validate();
  check_caps(cand.channel, source.row_alphabet.size());
  const int nx = source.row_alphabet.size();
  const int ny = source.col_alphabet.size();
  const int n1 = cand.w1_alphabet().size();
  const int n2 = cand.w2_alphabet().size();
  detail::Joint4 j{{nx, ny, n1, n2}, Eigen::ArrayXd::Zero(nx * ny * n1 * n2)};
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      const double pxy = source.probs(x, y);
      if (pxy <= kProbFloor) continue;
      for (int w1 = 0; w1 < n1; ++w1) {
        for (int w2 = 0; w2 < n2; ++w2) {
          j.p(j.index(x, y, w1, w2)) =
              pxy * cand.channel.probs(x * ny + y, w1 * n2 + w2);
        }
      }
    }
  }
  return j;
}

// Fills distortions and decoders; rate must already be set by the caller.
EvaluatedCandidate finish_evaluation(const detail::Joint4& j, double rate,
                                     const DistortionMeasure& d1_measure,
                                     const DistortionMeasure& d2_measure) {
  d1_measure.validate();
  d2_measure.validate();
  const int nx = j.dims[0], ny = j.dims[1], n1 = j.dims[2], n2 = j.dims[3];
  EvaluatedCandidate ev;
  ev.point.rate = rate;
  // H(Y | W1)
  ev.point.equivocation = j.subset_entropy({false, true, true, false}) -
                          j.subset_entropy({false, false, true, false});

  // Decoder 1: xhat(w1) minimizing posterior risk, ties to the smallest index.
  const Eigen::ArrayXd p_xw1 = j.marginal({true, false, true, false});
  const int r1 = static_cast<int>(d1_measure.d.cols());
  ev.decoder1.assign(static_cast<size_t>(n1), 0);
  double d1 = 0.0;
  for (int w1 = 0; w1 < n1; ++w1) {
    double best = std::numeric_limits<double>::infinity();
    int best_xhat = 0;
    for (int xhat = 0; xhat < r1; ++xhat) {
      double cost = 0.0;
      for (int x = 0; x < nx; ++x) cost += p_xw1(x * n1 + w1) * d1_measure.d(x, xhat);
      if (cost < best - 0.0) {
        best = cost;
        best_xhat = xhat;
      }
    }
    ev.decoder1[static_cast<size_t>(w1)] = best_xhat;
    d1 += best;
  }
  ev.point.d1 = d1;

  // Decoder 2: xhat(w1, w2, y).
  const int r2 = static_cast<int>(d2_measure.d.cols());
  ev.decoder2.assign(static_cast<size_t>(n1 * n2 * ny), 0);
  double d2 = 0.0;
  for (int w1 = 0; w1 < n1; ++w1) {
    for (int w2 = 0; w2 < n2; ++w2) {
      for (int y = 0; y < ny; ++y) {
        double best = std::numeric_limits<double>::infinity();
        int best_xhat = 0;
        for (int xhat = 0; xhat < r2; ++xhat) {
          double cost = 0.0;
          for (int x = 0; x < nx; ++x) {
            cost += j.p(j.index(x, y, w1, w2)) * d2_measure.d(x, xhat);
          }
          if (cost < best) {
            best = cost;
            best_xhat = xhat;
          }
        }
        ev.decoder2[static_cast<size_t>((w1 * n2 + w2) * ny + y)] = best_xhat;
        d2 += best;
      }
    }
  }
  ev.point.d2 = d2;
  return ev;
}

double conditional_description_rate(const detail::Joint4& j) {
  // I(X; W2 | W1, Y) = H(X,W1,Y) + H(W1,Y,W2) - H(W1,Y) - H(X,Y,W1,W2)
  return j.subset_entropy({true, true, true, false}) +
         j.subset_entropy({false, true, true, true}) -
         j.subset_entropy({false, true, true, false}) -
         j.subset_entropy({true, true, true, true});
}

Alphabet sized_alphabet(int n, const std::string& prefix) {
  std::vector<std::string> syms;
  syms.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) syms.push_back(prefix + std::to_string(i));
  return Alphabet(std::move(syms));
}

ConditionalPMF make_uninformed_channel(int n1, int n2) {
  ConditionalPMF ch;
  ch.given_alphabets = {Alphabet::binary()};
  ch.out_alphabets = {n1 == 1 ? Alphabet::trivial() : sized_alphabet(n1, "w"),
                      n2 == 1 ? Alphabet::trivial() : sized_alphabet(n2, "v")};
  ch.probs = Mat::Zero(2, n1 * n2);
  return ch;
}

ConditionalPMF make_informed_channel(int n1, int n2) {
  ConditionalPMF ch;
  ch.given_alphabets = {Alphabet::binary(), Alphabet::binary_erased()};
  ch.out_alphabets = {n1 == 1 ? Alphabet::trivial() : sized_alphabet(n1, "w"),
                      n2 == 1 ? Alphabet::trivial() : sized_alphabet(n2, "v")};
  ch.probs = Mat::Zero(6, n1 * n2);
  return ch;
}

double bsc(int in, int out, double crossover) {
  return in == out ? 1.0 - crossover : crossover;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Dirichlet(1) row over the simplex.
template <typename RowXpr>
void random_simplex_row(std::mt19937_64& rng, RowXpr row) {
  std::exponential_distribution<double> expo(1.0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    row(i) = expo(rng);
    total += row(i);
  }
  row /= total;
}

template <typename RowXpr>
void perturb_row(std::mt19937_64& rng, double scale, RowXpr row) {
  std::normal_distribution<double> gauss(0.0, scale);
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    row(i) = std::max(row(i) * std::exp(gauss(rng)), 1e-12);
  }
  row /= row.sum();
}

}  // namespace

EvaluatedCandidate evaluate_uninformed(const UninformedCandidate& cand,
                                       const JointPMF& source,
                                       const DistortionMeasure& d1_measure,
                                       const DistortionMeasure& d2_measure) {
  const detail::Joint4 j = build_joint_uninformed(cand, source);
  // I(X; W1)
  const double i_x_w1 = j.subset_entropy({true, false, false, false}) +
                        j.subset_entropy({false, false, true, false}) -
                        j.subset_entropy({true, false, true, false});
  const double rate = i_x_w1 + conditional_description_rate(j);
  return finish_evaluation(j, rate, d1_measure, d2_measure);
}

EvaluatedCandidate evaluate_informed(const InformedCandidate& cand,
                                     const JointPMF& source,
                                     const DistortionMeasure& d1_measure,
                                     const DistortionMeasure& d2_measure) {
  const detail::Joint4 j = build_joint_informed(cand, source);
  // I(X,Y; W1)
  const double i_xy_w1 = j.subset_entropy({true, true, false, false}) +
                         j.subset_entropy({false, false, true, false}) -
                         j.subset_entropy({true, true, true, false});
  const double rate = i_xy_w1 + conditional_description_rate(j);
  return finish_evaluation(j, rate, d1_measure, d2_measure);
}

UninformedCandidate reference_channel_L2(double p, double d2) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (d2 < 0.0 || d2 > p / 2.0) throw DomainError("L2 requires 0 <= d2 <= p/2");
  ConditionalPMF ch = make_uninformed_channel(1, 2);
  const double cross = d2 / p;
  for (int x = 0; x < 2; ++x) {
    for (int w2 = 0; w2 < 2; ++w2) ch.probs(x, w2) = bsc(x, w2, cross);
  }
  return UninformedCandidate{std::move(ch)};
}

UninformedCandidate reference_channel_L3(double p, double d1) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (d1 < 0.0 || d1 > 0.5) throw DomainError("L3 requires 0 <= d1 <= 1/2");
  ConditionalPMF ch = make_uninformed_channel(2, 1);
  for (int x = 0; x < 2; ++x) {
    for (int w1 = 0; w1 < 2; ++w1) ch.probs(x, w1) = bsc(x, w1, d1);
  }
  return UninformedCandidate{std::move(ch)};
}

UninformedCandidate reference_channel_L4(double p, double d1, double d2) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (d1 < 0.0 || d1 > 0.5) throw DomainError("L4 requires 0 <= d1 <= 1/2");
  const double cross2 = d2 / p;
  if (cross2 >= 0.5) throw DomainError("L4 requires d2/p < 1/2");
  if (d2 > p * d1) throw DomainError("L4 requires d2 <= p*d1");
  const double numer = d1 - cross2;
  const double alpha = numer <= 0.0 ? 0.0 : numer / (1.0 - 2.0 * cross2);
  ConditionalPMF ch = make_uninformed_channel(2, 2);
  for (int x = 0; x < 2; ++x) {
    for (int w1 = 0; w1 < 2; ++w1) {
      for (int w2 = 0; w2 < 2; ++w2) {
        ch.probs(x, w1 * 2 + w2) = bsc(x, w2, cross2) * bsc(w2, w1, alpha);
      }
    }
  }
  return UninformedCandidate{std::move(ch)};
}

InformedCandidate reference_channel_G3(double p, double d2) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (d2 < 0.0 || d2 > p / 2.0) throw DomainError("G3 requires 0 <= d2 <= p/2");
  ConditionalPMF ch = make_informed_channel(2, 1);
  const double cross = d2 / p;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 3; ++y) {
      for (int w1 = 0; w1 < 2; ++w1) {
        ch.probs(x * 3 + y, w1) = (y == 2) ? bsc(x, w1, cross) : 0.5;
      }
    }
  }
  return InformedCandidate{std::move(ch)};
}

InformedCandidate reference_channel_G4(double p, double d1, double alpha) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (alpha < 0.0 || alpha > d1 / p + 1e-12) {
    throw DomainError("G4 requires alpha in [0, d1/p]");
  }
  const double beta = (d1 - p * alpha) / (1.0 - p);
  if (beta < -1e-12 || beta > 0.5 + 1e-12) {
    throw DomainError("G4 requires beta = (d1 - p*alpha)/(1-p) in [0, 1/2]");
  }
  const double b = std::clamp(beta, 0.0, 0.5);
  ConditionalPMF ch = make_informed_channel(2, 1);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 3; ++y) {
      for (int w1 = 0; w1 < 2; ++w1) {
        ch.probs(x * 3 + y, w1) = bsc(x, w1, y == 2 ? alpha : b);
      }
    }
  }
  return InformedCandidate{std::move(ch)};
}

SearchResult random_search(SearchCase which, const JointPMF& source,
                           const SearchConfig& config) {
  if (config.restarts < 1 || config.steps < 1 || config.step_scale <= 0.0) {
    throw DomainError("search requires restarts >= 1, steps >= 1, step_scale > 0");
  }
  const DistortionMeasure d1m = DistortionMeasure::hamming_binary();
  const DistortionMeasure d2m = DistortionMeasure::hamming_binary();
  const SearchTargets& t = config.targets;
  const double slack = 1e-9;

  SearchResult result;
  double best_rate = std::numeric_limits<double>::infinity();

  auto feasible = [&](const RDEPoint& pt) {
    if (pt.d1 > t.d1 + slack || pt.d2 > t.d2 + slack) return false;
    if (t.equivocation && pt.equivocation < *t.equivocation - slack) return false;
    return true;
  };

  for (int restart = 0; restart < config.restarts; ++restart) {
    std::mt19937_64 rng(mix64(config.seed) ^ mix64(static_cast<std::uint64_t>(restart)));
    ConditionalPMF ch = (which == SearchCase::Uninformed)
                            ? make_uninformed_channel(config.w1_size, config.w2_size)
                            : make_informed_channel(config.w1_size, config.w2_size);
    for (Eigen::Index r = 0; r < ch.probs.rows(); ++r) {
      random_simplex_row(rng, ch.probs.row(r));
    }

    auto eval = [&](const ConditionalPMF& c) {
      return (which == SearchCase::Uninformed)
                 ? evaluate_uninformed(UninformedCandidate{c}, source, d1m, d2m)
                 : evaluate_informed(InformedCandidate{c}, source, d1m, d2m);
    };

    EvaluatedCandidate cur = eval(ch);
    ++result.evaluated;
    bool cur_ok = feasible(cur.point);
    if (cur_ok) ++result.feasible;

    for (int step = 0; step < config.steps; ++step) {
      ConditionalPMF trial = ch;
      for (Eigen::Index r = 0; r < trial.probs.rows(); ++r) {
        perturb_row(rng, config.step_scale, trial.probs.row(r));
      }
      EvaluatedCandidate ev = eval(trial);
      ++result.evaluated;
      const bool ok = feasible(ev.point);
      if (ok) ++result.feasible;
      // Move toward feasibility first, then toward lower rate.
      const bool accept =
          (!cur_ok && (ok || ev.point.d1 + ev.point.d2 < cur.point.d1 + cur.point.d2)) ||
          (cur_ok && ok && ev.point.rate < cur.point.rate);
      if (accept) {
        ch = std::move(trial);
        cur = std::move(ev);
        cur_ok = ok;
      }
    }

    if (cur_ok && cur.point.rate < best_rate) {
      best_rate = cur.point.rate;
      result.best = cur;
      result.best_channel = ch;
      result.found = true;
    }
  }
  return result;
}

SymmetrizationReport symmetrize_check(double a, double b, double c, double d,
                                      double p) {
  for (double v : {a, b, c, d}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("symmetrization parameters must lie in [0, 1]");
    }
  }
  const JointPMF source = make_erased_source({p});
  source.validate();

  SymmetrizationReport rep;
  rep.a = a;
  rep.b = b;
  rep.c = c;
  rep.d = d;
  rep.p = p;

  // channels[k](x, y) = P(Xhat1 = 0 | x, y); y order (0, 1, E). The (0,1)
  // and (1,0) cells carry zero source mass; 1/2 keeps the rows valid.
  std::array<std::array<std::array<double, 3>, 2>, 3> ch0{};
  auto& p1 = ch0[0];
  p1[0] = {a, 0.5, c};
  p1[1] = {0.5, b, d};
  auto& p2 = ch0[1];
  p2[0] = {1.0 - b, 0.5, 1.0 - d};
  p2[1] = {0.5, 1.0 - a, 1.0 - c};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 3; ++y) {
      ch0[2][static_cast<size_t>(x)][static_cast<size_t>(y)] =
          0.5 * (p1[static_cast<size_t>(x)][static_cast<size_t>(y)] +
                 p2[static_cast<size_t>(x)][static_cast<size_t>(y)]);
    }
  }

  for (int k = 0; k < 3; ++k) {
    // Joint over (x, y, xhat).
    Eigen::ArrayXd joint = Eigen::ArrayXd::Zero(2 * 3 * 2);
    Eigen::ArrayXd p_xy = Eigen::ArrayXd::Zero(2 * 3);
    Eigen::ArrayXd p_xhat = Eigen::ArrayXd::Zero(2);
    Eigen::ArrayXd p_y_xhat = Eigen::ArrayXd::Zero(3 * 2);
    double dist = 0.0;
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 3; ++y) {
        const double pxy = source.probs(x, y);
        if (pxy <= kProbFloor) continue;
        const double p0 = ch0[static_cast<size_t>(k)][static_cast<size_t>(x)]
                             [static_cast<size_t>(y)];
        for (int xhat = 0; xhat < 2; ++xhat) {
          const double pr = pxy * (xhat == 0 ? p0 : 1.0 - p0);
          joint((x * 3 + y) * 2 + xhat) = pr;
          p_xy(x * 3 + y) += pr;
          p_xhat(xhat) += pr;
          p_y_xhat(y * 2 + xhat) += pr;
          if (x != xhat) dist += pr;
        }
      }
    }
    const double h_joint = entropy_unchecked(Vec(joint.matrix()));
    const double h_xy = entropy_unchecked(Vec(p_xy.matrix()));
    const double h_xhat = entropy_unchecked(Vec(p_xhat.matrix()));
    const double h_y_xhat = entropy_unchecked(Vec(p_y_xhat.matrix()));
    rep.distortion[k] = dist;
    rep.rate[k] = h_xy + h_xhat - h_joint;            // I(X,Y; Xhat1)
    rep.equivocation[k] = h_y_xhat - h_xhat;          // H(Y | Xhat1)
  }

  rep.p1_p2_equal = std::abs(rep.distortion[0] - rep.distortion[1]) <= 1e-9 &&
                    std::abs(rep.rate[0] - rep.rate[1]) <= 1e-9 &&
                    std::abs(rep.equivocation[0] - rep.equivocation[1]) <= 1e-9;
  rep.rate_jensen = rep.rate[2] <= rep.rate[0] + 1e-12;
  rep.equivocation_jensen = rep.equivocation[2] >= rep.equivocation[0] - 1e-12;
  return rep;
}

}  // namespace rdeq::optimizer
