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

#include "rdeq/coding_sim.hpp"

#include "rdeq/detail/joint4.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace rdeq::coding_sim {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Codebook sizes round the real-valued exponent up to a power of two.
int pow2_size(double exponent_bits) {
  int e = static_cast<int>(std::ceil(exponent_bits - 1e-9));
  e = std::clamp(e, 0, 24);
  return 1 << e;
}

using Seq = std::vector<int>;

Seq sample_iid(std::mt19937_64& rng, const Vec& pmf, int n) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Seq seq(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double u = unif(rng);
    int sym = 0;
    for (; sym + 1 < pmf.size(); ++sym) {
      u -= pmf(sym);
      if (u <= 0.0) break;
    }
    seq[static_cast<size_t>(i)] = sym;
  }
  return seq;
}

// Strong typicality of the joint type against a flat pmf: every cell count
// within n*eps of n*p and exactly zero on zero-probability cells.
class TypicalityChecker {
 public:
  TypicalityChecker(Eigen::ArrayXd flat_pmf, int n, double eps)
      : pmf_(std::move(flat_pmf)), counts_(pmf_.size(), 0), n_(n), eps_(eps) {}

  template <typename CellFn>
  bool check(CellFn cell_of_position) {
    std::fill(counts_.begin(), counts_.end(), 0);
    for (int i = 0; i < n_; ++i) ++counts_[static_cast<size_t>(cell_of_position(i))];
    for (size_t c = 0; c < counts_.size(); ++c) {
      const double p = pmf_(static_cast<Eigen::Index>(c));
      if (p <= kProbFloor) {
        if (counts_[c] != 0) return false;
      } else if (std::abs(counts_[c] / static_cast<double>(n_) - p) > eps_) {
        return false;
      }
    }
    return true;
  }

 private:
  Eigen::ArrayXd pmf_;
  std::vector<int> counts_;
  int n_;
  double eps_;
};

struct EncodeOut {
  int j = 0;
  int j1 = 0;
  int b = 0;
  bool fail = false;
  bool typical = false;  // conditioning event for the bin-uniformity statistic
};

struct EngineSpec {
  int num_j = 1;
  int num_j1 = 1;
  int num_b = 1;
  bool informed = false;
  std::function<EncodeOut(const Seq& x, const Seq& y)> encode;
  std::function<void()> on_new_y;  // optional: invalidate per-y decode caches
  std::function<void(const Seq& x, const Seq& y, const EncodeOut&, double pxy)>
      observe;  // optional: distortion / decode-failure accumulation
};

struct EngineResult {
  double h_y = 0.0;  // single-letter H(Y)
  double equiv = 0.0;
  double equiv_j1 = 0.0;
  double bin_info = 0.0;
  double enc_fail = 0.0;
  double bin_uniformity = 0.0;
};

std::uint64_t count_states(const JointPMF& source, int n) {
  // sum over y^n of |supp p(x^n | y^n)| = (sum_y |supp p(x|y)|)^n
  std::uint64_t per_letter = 0;
  for (int y = 0; y < source.col_alphabet.size(); ++y) {
    std::uint64_t c = 0;
    for (int x = 0; x < source.row_alphabet.size(); ++x) {
      if (source.probs(x, y) > kProbFloor) ++c;
    }
    if (source.col_marginal()(y) > kProbFloor) per_letter += c;
  }
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > (1ull << 62) / std::max<std::uint64_t>(per_letter, 1)) {
      return 1ull << 62;
    }
    total *= per_letter;
  }
  return total;
}

EngineResult run_exact(const JointPMF& source, int n, const EngineSpec& spec,
                       std::uint64_t budget) {
  const std::uint64_t states = count_states(source, n);
  if (states > budget) {
    throw BudgetError("exact enumeration needs " + std::to_string(states) +
                          " states, budget is " + std::to_string(budget),
                      states);
  }
  const int nx = source.row_alphabet.size();
  const int ny = source.col_alphabet.size();
  const Vec p_y = source.col_marginal();
  // x-support and conditionals per y symbol
  std::vector<std::vector<int>> support(static_cast<size_t>(ny));
  Mat p_x_given_y = Mat::Zero(nx, ny);
  for (int y = 0; y < ny; ++y) {
    if (p_y(y) <= kProbFloor) continue;
    for (int x = 0; x < nx; ++x) {
      const double c = source.probs(x, y) / p_y(y);
      p_x_given_y(x, y) = c;
      if (c > kProbFloor) support[static_cast<size_t>(y)].push_back(x);
    }
  }

  // Encoder cache for uninformed encoders, keyed by the packed x index.
  std::uint64_t x_space = 1;
  for (int i = 0; i < n; ++i) x_space *= static_cast<std::uint64_t>(nx);
  std::vector<EncodeOut> cache;
  std::vector<char> cached;
  if (!spec.informed) {
    cache.resize(x_space);
    cached.assign(x_space, 0);
  }

  Eigen::ArrayXd pj = Eigen::ArrayXd::Zero(spec.num_j);
  Eigen::ArrayXd pj1 = Eigen::ArrayXd::Zero(spec.num_j1);
  Eigen::ArrayXd pb_typ = Eigen::ArrayXd::Zero(spec.num_b);
  Eigen::ArrayXd cond_j = Eigen::ArrayXd::Zero(spec.num_j);
  Eigen::ArrayXd cond_j1 = Eigen::ArrayXd::Zero(spec.num_j1);
  std::vector<int> touched_j, touched_j1;
  touched_j.reserve(1024);
  touched_j1.reserve(1024);

  double hj_given_y = 0.0, hj1_given_y = 0.0;
  double enc_fail = 0.0, typ_mass = 0.0;

  Seq y_seq(static_cast<size_t>(n), 0);
  Seq x_seq(static_cast<size_t>(n), 0);

  // Depth-first over x^n restricted to supp p(x|y); `pxg` carries the
  // conditional mass and `xidx` the packed index of the prefix.
  auto enumerate_x = [&](auto&& self, int pos, double pxg, std::uint64_t xidx,
                         double py_mass) -> void {
    if (pos == n) {
      EncodeOut out;
      if (!spec.informed) {
        if (!cached[xidx]) {
          cache[xidx] = spec.encode(x_seq, y_seq);
          cached[xidx] = 1;
        }
        out = cache[xidx];
      } else {
        out = spec.encode(x_seq, y_seq);
      }
      const double pxy = py_mass * pxg;
      if (cond_j(out.j) == 0.0) touched_j.push_back(out.j);
      cond_j(out.j) += pxg;
      if (cond_j1(out.j1) == 0.0) touched_j1.push_back(out.j1);
      cond_j1(out.j1) += pxg;
      pj(out.j) += pxy;
      pj1(out.j1) += pxy;
      if (out.fail) enc_fail += pxy;
      if (out.typical) {
        pb_typ(out.b) += pxy;
        typ_mass += pxy;
      }
      if (spec.observe) spec.observe(x_seq, y_seq, out, pxy);
      return;
    }
    const int y = y_seq[static_cast<size_t>(pos)];
    for (int x : support[static_cast<size_t>(y)]) {
      x_seq[static_cast<size_t>(pos)] = x;
      self(self, pos + 1, pxg * p_x_given_y(x, y),
           xidx * static_cast<std::uint64_t>(nx) + static_cast<std::uint64_t>(x),
           py_mass);
    }
  };

  auto enumerate_y = [&](auto&& self, int pos, double py_mass) -> void {
    if (pos == n) {
      if (spec.on_new_y) spec.on_new_y();
      for (int j : touched_j) cond_j(j) = 0.0;
      for (int j : touched_j1) cond_j1(j) = 0.0;
      touched_j.clear();
      touched_j1.clear();
      enumerate_x(enumerate_x, 0, 1.0, 0, py_mass);
      double hj = 0.0, hj1 = 0.0;
      for (int j : touched_j) {
        const double v = cond_j(j);
        if (v > kProbFloor) hj -= v * std::log2(v);
      }
      for (int j : touched_j1) {
        const double v = cond_j1(j);
        if (v > kProbFloor) hj1 -= v * std::log2(v);
      }
      hj_given_y += py_mass * hj;
      hj1_given_y += py_mass * hj1;
      return;
    }
    for (int y = 0; y < ny; ++y) {
      if (p_y(y) <= kProbFloor) continue;
      y_seq[static_cast<size_t>(pos)] = y;
      self(self, pos + 1, py_mass * p_y(y));
    }
  };
  enumerate_y(enumerate_y, 0, 1.0);

  EngineResult res;
  res.h_y = entropy_unchecked(p_y);
  const double h_j = entropy_unchecked(Vec(pj.matrix()));
  const double h_j1 = entropy_unchecked(Vec(pj1.matrix()));
  res.equiv = (n * res.h_y - h_j + hj_given_y) / n;
  res.equiv_j1 = (n * res.h_y - h_j1 + hj1_given_y) / n;
  // I(Y^n; B | J1) = H(B|J1) - H(B|J1, Y^n)
  res.bin_info = ((h_j - h_j1) - (hj_given_y - hj1_given_y)) / n;
  res.enc_fail = enc_fail;
  if (typ_mass > kProbFloor && spec.num_b > 1) {
    double dev = 0.0;
    for (int b = 0; b < spec.num_b; ++b) {
      dev = std::max(dev, std::abs(pb_typ(b) / typ_mass - 1.0 / spec.num_b));
    }
    res.bin_uniformity = dev;
  }
  return res;
}

// Monte-Carlo fallback: plug-in estimates of H(J) and E_y[H(J|y)] from
// sampled y^n blocks with exact (or sub-sampled) conditioning over x^n.
EngineResult run_monte_carlo(const JointPMF& source, int n, const EngineSpec& spec,
                             int num_samples, std::uint64_t seed,
                             double* observe_mass) {
  std::mt19937_64 rng(mix64(seed) ^ 0xc0ffee);
  const int nx = source.row_alphabet.size();
  const int ny = source.col_alphabet.size();
  const Vec p_y = source.col_marginal();
  Mat p_x_given_y = Mat::Zero(nx, ny);
  std::vector<std::vector<int>> support(static_cast<size_t>(ny));
  for (int y = 0; y < ny; ++y) {
    if (p_y(y) <= kProbFloor) continue;
    for (int x = 0; x < nx; ++x) {
      p_x_given_y(x, y) = source.probs(x, y) / p_y(y);
      if (p_x_given_y(x, y) > kProbFloor) support[static_cast<size_t>(y)].push_back(x);
    }
  }

  Eigen::ArrayXd pj = Eigen::ArrayXd::Zero(spec.num_j);
  Eigen::ArrayXd pj1 = Eigen::ArrayXd::Zero(spec.num_j1);
  Eigen::ArrayXd pb_typ = Eigen::ArrayXd::Zero(spec.num_b);
  double hj_given_y = 0.0, hj1_given_y = 0.0;
  double enc_fail = 0.0, typ_mass = 0.0;
  const std::uint64_t x_cap = 1ull << 14;  // exact conditioning cap per sample

  Seq y_seq(static_cast<size_t>(n)), x_seq(static_cast<size_t>(n));
  Eigen::ArrayXd cond_j(spec.num_j), cond_j1(spec.num_j1);
  const double w = 1.0 / num_samples;
  *observe_mass = 1.0;

  for (int s = 0; s < num_samples; ++s) {
    y_seq = sample_iid(rng, p_y, n);
    if (spec.on_new_y) spec.on_new_y();
    std::uint64_t x_states = 1;
    for (int i = 0; i < n && x_states <= x_cap; ++i) {
      x_states *= support[static_cast<size_t>(y_seq[static_cast<size_t>(i)])].size();
    }
    cond_j.setZero();
    cond_j1.setZero();
    if (x_states <= x_cap) {
      auto rec = [&](auto&& self, int pos, double pxg) -> void {
        if (pos == n) {
          const EncodeOut out = spec.encode(x_seq, y_seq);
          cond_j(out.j) += pxg;
          cond_j1(out.j1) += pxg;
          if (out.fail) enc_fail += w * pxg;
          if (out.typical) {
            pb_typ(out.b) += w * pxg;
            typ_mass += w * pxg;
          }
          if (spec.observe) spec.observe(x_seq, y_seq, out, w * pxg);
          return;
        }
        const int y = y_seq[static_cast<size_t>(pos)];
        for (int x : support[static_cast<size_t>(y)]) {
          x_seq[static_cast<size_t>(pos)] = x;
          self(self, pos + 1, pxg * p_x_given_y(x, y));
        }
      };
      rec(rec, 0, 1.0);
    } else {
      // conditional support too large: sub-sample x^n | y^n
      const int m = 1024;
      for (int t = 0; t < m; ++t) {
        for (int i = 0; i < n; ++i) {
          std::uniform_real_distribution<double> unif(0.0, 1.0);
          double u = unif(rng);
          int sym = 0;
          for (; sym + 1 < nx; ++sym) {
            u -= p_x_given_y(sym, y_seq[static_cast<size_t>(i)]);
            if (u <= 0.0) break;
          }
          x_seq[static_cast<size_t>(i)] = sym;
        }
        const EncodeOut out = spec.encode(x_seq, y_seq);
        cond_j(out.j) += 1.0 / m;
        cond_j1(out.j1) += 1.0 / m;
        if (out.fail) enc_fail += w / m;
        if (out.typical) {
          pb_typ(out.b) += w / m;
          typ_mass += w / m;
        }
        if (spec.observe) spec.observe(x_seq, y_seq, out, w / m);
      }
    }
    pj += w * cond_j;
    pj1 += w * cond_j1;
    hj_given_y += w * entropy_unchecked(Vec(cond_j.matrix()));
    hj1_given_y += w * entropy_unchecked(Vec(cond_j1.matrix()));
  }

  EngineResult res;
  res.h_y = entropy_unchecked(p_y);
  const double h_j = entropy_unchecked(Vec(pj.matrix()));
  const double h_j1 = entropy_unchecked(Vec(pj1.matrix()));
  res.equiv = std::clamp((n * res.h_y - h_j + hj_given_y) / n, 0.0, res.h_y);
  res.equiv_j1 = std::clamp((n * res.h_y - h_j1 + hj1_given_y) / n, 0.0, res.h_y);
  res.bin_info = ((h_j - h_j1) - (hj_given_y - hj1_given_y)) / n;
  res.enc_fail = enc_fail;
  if (typ_mass > kProbFloor && spec.num_b > 1) {
    double dev = 0.0;
    for (int b = 0; b < spec.num_b; ++b) {
      dev = std::max(dev, std::abs(pb_typ(b) / typ_mass - 1.0 / spec.num_b));
    }
    res.bin_uniformity = dev;
  }
  return res;
}

EngineResult run_engine(const JointPMF& source, const SimConfig& cfg,
                        const EngineSpec& spec, SimResult* out) {
  const std::uint64_t states = count_states(source, cfg.n);
  if (states <= cfg.state_budget) {
    out->exact = true;
    return run_exact(source, cfg.n, spec, cfg.state_budget);
  }
  if (cfg.exact_only) {
    throw BudgetError("exact enumeration needs " + std::to_string(states) +
                          " states, budget is " + std::to_string(cfg.state_budget),
                      states);
  }
  out->exact = false;
  out->mc_samples_used = static_cast<std::uint64_t>(cfg.mc_samples);
  double mass = 1.0;
  return run_monte_carlo(source, cfg.n, spec, cfg.mc_samples, cfg.seed, &mass);
}

// Coinciding codewords inside a bin are one sequence to a decoder that looks
// for a unique typical member, so they are collapsed up front.
void dedupe_members(std::vector<int>& members, const std::vector<Seq>& codebook) {
  std::vector<int> unique;
  for (int c : members) {
    bool dup = false;
    for (int u : unique) {
      if (codebook[static_cast<size_t>(c)] == codebook[static_cast<size_t>(u)]) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(c);
  }
  members = std::move(unique);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

detail::Joint4 build_joint4(const JointPMF& source, const ConditionalPMF& channel,
                            bool informed) {
  const int nx = source.row_alphabet.size();
  const int ny = source.col_alphabet.size();
  const int n1 = channel.out_alphabets[0].size();
  const int n2 = channel.out_alphabets[1].size();
  detail::Joint4 j{{nx, ny, n1, n2}, Eigen::ArrayXd::Zero(nx * ny * n1 * n2)};
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      const double pxy = source.probs(x, y);
      if (pxy <= kProbFloor) continue;
      const int row = informed ? x * ny + y : x;
      for (int w1 = 0; w1 < n1; ++w1) {
        for (int w2 = 0; w2 < n2; ++w2) {
          j.p(j.index(x, y, w1, w2)) = pxy * channel.probs(row, w1 * n2 + w2);
        }
      }
    }
  }
  return j;
}

}  // namespace

std::uint64_t enumeration_states(const JointPMF& source, int n) {
  return count_states(source, n);
}

double exact_equivocation(const EncoderMap& encoder, const JointPMF& source,
                          int n, std::uint64_t state_budget) {
  source.validate();
  if (n < 1) throw DomainError("blocklength must be positive");
  EngineSpec spec;
  spec.num_j = encoder.num_indices;
  spec.num_j1 = 1;
  spec.num_b = 1;
  spec.informed = encoder.informed;
  spec.encode = [&](const Seq& x, const Seq& y) {
    EncodeOut out;
    out.j = encoder.encode(x, y);
    return out;
  };
  return run_exact(source, n, spec, state_budget).equiv;
}

SimResult simulate_slepian_wolf(const JointPMF& source, const SimConfig& cfg,
                                int num_bins) {
  source.validate();
  if (num_bins < 1) throw DomainError("num_bins must be >= 1");
  const int nx = source.row_alphabet.size();
  std::uint64_t x_space = 1;
  for (int i = 0; i < cfg.n; ++i) x_space *= static_cast<std::uint64_t>(nx);
  if (x_space > (1ull << 26)) {
    throw BudgetError("x^n space too large for a stored bin assignment", x_space);
  }

  std::mt19937_64 rng(mix64(cfg.seed));
  std::uniform_int_distribution<int> bin_dist(0, num_bins - 1);
  std::vector<int> bin_of(x_space);
  for (auto& b : bin_of) b = bin_dist(rng);

  const Vec p_x = source.row_marginal();
  TypicalityChecker x_typ(Eigen::ArrayXd(p_x.array()), cfg.n, cfg.epsilon);

  SimResult res;
  EngineSpec spec;
  spec.num_j = num_bins;
  spec.num_j1 = num_bins;
  spec.num_b = num_bins;
  spec.informed = false;
  spec.encode = [&](const Seq& x, const Seq&) {
    EncodeOut out;
    std::uint64_t idx = 0;
    for (int v : x) idx = idx * static_cast<std::uint64_t>(nx) + static_cast<std::uint64_t>(v);
    out.j = out.j1 = out.b = bin_of[idx];
    out.typical = x_typ.check([&](int i) { return x[static_cast<size_t>(i)]; });
    return out;
  };
  const EngineResult eng = run_engine(source, cfg, spec, &res);
  res.equiv_rate = eng.equiv;
  res.equiv_given_j1 = eng.equiv_j1;
  res.bin_info_given_j1 = 0.0;
  res.limit_value = eng.h_y;
  res.bin_uniformity_stat = eng.bin_uniformity;
  res.rate_bits_used = std::log2(static_cast<double>(num_bins)) / cfg.n;
  return res;
}

SimResult simulate_wyner_ziv(const JointPMF& source, const ConditionalPMF& test_channel,
                             const std::vector<int>& reconstruction,
                             const SimConfig& cfg) {
  source.validate();
  test_channel.validate();
  const int nx = source.row_alphabet.size();
  const int ny = source.col_alphabet.size();
  const int nu = test_channel.out_size();
  if (test_channel.given_size() != nx) {
    throw ValidationError("test channel conditioning alphabet must match X");
  }
  if (static_cast<int>(reconstruction.size()) != nu * ny) {
    throw ValidationError("reconstruction table must cover (u, y)");
  }

  // Joint p(x, y, u) and its marginals.
  Eigen::ArrayXd p_xu = Eigen::ArrayXd::Zero(nx * nu);
  Eigen::ArrayXd p_uy = Eigen::ArrayXd::Zero(nu * ny);
  Vec p_u = Vec::Zero(nu);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      const double pxy = source.probs(x, y);
      if (pxy <= kProbFloor) continue;
      for (int u = 0; u < nu; ++u) {
        const double pr = pxy * test_channel.probs(x, u);
        p_xu(x * nu + u) += pr;
        p_uy(u * ny + y) += pr;
        p_u(u) += pr;
      }
    }
  }
  const double h_x = entropy_unchecked(Vec(source.row_marginal()));
  const double h_y = entropy_unchecked(Vec(source.col_marginal()));
  const double h_u = entropy_unchecked(p_u);
  const double i_xu = h_x + h_u - entropy_unchecked(Vec(p_xu.matrix()));
  const double i_yu = h_y + h_u - entropy_unchecked(Vec(p_uy.matrix()));

  const int num_codewords = pow2_size(cfg.n * (i_xu + cfg.rate_slack));
  const int num_bins = pow2_size(cfg.n * (std::max(i_xu - i_yu, 0.0) + cfg.rate_slack));

  std::mt19937_64 rng(mix64(cfg.seed));
  std::vector<Seq> codebook(static_cast<size_t>(num_codewords));
  for (auto& cw : codebook) cw = sample_iid(rng, p_u, cfg.n);
  std::uniform_int_distribution<int> bin_dist(0, num_bins - 1);
  std::vector<int> bin_of(static_cast<size_t>(num_codewords));
  for (auto& b : bin_of) b = bin_dist(rng);
  std::vector<std::vector<int>> bin_members(static_cast<size_t>(num_bins));
  for (int c = 0; c < num_codewords; ++c) {
    bin_members[static_cast<size_t>(bin_of[static_cast<size_t>(c)])].push_back(c);
  }
  for (auto& members : bin_members) dedupe_members(members, codebook);

  TypicalityChecker xu_typ(p_xu, cfg.n, cfg.epsilon);
  TypicalityChecker uy_typ(p_uy, cfg.n, cfg.epsilon);

  SimResult res;
  double d2_sum = 0.0, dec_fail = 0.0;
  // Decode cache per y^n block, keyed by bin index.
  std::unordered_map<int, std::pair<int, bool>> decode_cache;

  EngineSpec spec;
  spec.num_j = num_bins;
  spec.num_j1 = num_bins;
  spec.num_b = num_bins;
  spec.informed = false;
  spec.encode = [&](const Seq& x, const Seq&) {
    EncodeOut out;
    int chosen = -1;
    for (int c = 0; c < num_codewords; ++c) {
      const Seq& u = codebook[static_cast<size_t>(c)];
      if (xu_typ.check([&](int i) {
            return x[static_cast<size_t>(i)] * nu + u[static_cast<size_t>(i)];
          })) {
        chosen = c;
        break;
      }
    }
    if (chosen < 0) {
      chosen = 0;
      out.fail = true;
    }
    out.j = out.j1 = out.b = bin_of[static_cast<size_t>(chosen)];
    out.typical = !out.fail;
    return out;
  };
  spec.on_new_y = [&] { decode_cache.clear(); };
  spec.observe = [&](const Seq& x, const Seq& y, const EncodeOut& out, double pxy) {
    auto it = decode_cache.find(out.j);
    if (it == decode_cache.end()) {
      const auto& members = bin_members[static_cast<size_t>(out.j)];
      int found = -1, count = 0;
      for (int c : members) {
        const Seq& u = codebook[static_cast<size_t>(c)];
        if (uy_typ.check([&](int i) {
              return u[static_cast<size_t>(i)] * ny + y[static_cast<size_t>(i)];
            })) {
          if (found < 0) found = c;
          ++count;
        }
      }
      bool fail = count != 1;
      if (found < 0) found = members.empty() ? 0 : members.front();
      it = decode_cache.emplace(out.j, std::make_pair(found, fail)).first;
    }
    const Seq& u = codebook[static_cast<size_t>(it->second.first)];
    int d = 0;
    for (int i = 0; i < cfg.n; ++i) {
      const int xhat = reconstruction[static_cast<size_t>(
          u[static_cast<size_t>(i)] * ny + y[static_cast<size_t>(i)])];
      if (xhat != x[static_cast<size_t>(i)]) ++d;
    }
    d2_sum += pxy * d / cfg.n;
    if (it->second.second) dec_fail += pxy;
  };

  const EngineResult eng = run_engine(source, cfg, spec, &res);
  res.equiv_rate = eng.equiv;
  res.equiv_given_j1 = eng.equiv_j1;
  res.limit_value = eng.h_y;
  res.encoding_failure_prob = clamp01(eng.enc_fail);
  res.decode_failure_prob = clamp01(dec_fail);
  res.distortion2 = d2_sum;
  res.bin_uniformity_stat = eng.bin_uniformity;
  res.rate_bits_used = std::log2(static_cast<double>(num_bins)) / cfg.n;
  return res;
}

namespace {

// Shared two-layer driver. The informed flag selects the Kaspi variant
// (codeword search over (x, y), unconditional W2 codebook).
SimResult simulate_two_layer(const JointPMF& source, const ConditionalPMF& channel,
                             const SimConfig& cfg, bool informed) {
  source.validate();
  channel.validate();
  const int nx = source.row_alphabet.size();
  const int ny = source.col_alphabet.size();
  const int n1 = channel.out_alphabets[0].size();
  const int n2 = channel.out_alphabets[1].size();
  if (nx != 2) throw ValidationError("two-layer simulators expect a binary X");

  const detail::Joint4 j4 = build_joint4(source, channel, informed);
  const DistortionMeasure ham = DistortionMeasure::hamming_binary();
  optimizer::EvaluatedCandidate ev =
      informed
          ? optimizer::evaluate_informed(optimizer::InformedCandidate{channel},
                                         source, ham, ham)
          : optimizer::evaluate_uninformed(optimizer::UninformedCandidate{channel},
                                           source, ham, ham);

  const double h_w1 = j4.subset_entropy({false, false, true, false});
  const double h_w1w2 = j4.subset_entropy({false, false, true, true});
  const double h_w2 = j4.subset_entropy({false, false, false, true});
  const double h_xw1 = j4.subset_entropy({true, false, true, false});
  const double h_xw1w2 = j4.subset_entropy({true, false, true, true});
  const double h_yw1 = j4.subset_entropy({false, true, true, false});
  const double h_yw1w2 = j4.subset_entropy({false, true, true, true});
  const double h_x = j4.subset_entropy({true, false, false, false});
  const double h_xy = j4.subset_entropy({true, true, false, false});
  const double h_xyw1 = j4.subset_entropy({true, true, true, false});
  const double h_xyw1w2 = j4.subset_entropy({true, true, true, true});

  double i_layer1, i_layer2, i_side2;
  if (informed) {
    i_layer1 = h_xy + h_w1 - h_xyw1;                 // I(XY; W1)
    i_layer2 = h_xyw1 + h_w2 - h_xyw1w2;             // I(XYW1; W2)
    i_side2 = h_yw1 + h_w2 - h_yw1w2;                // I(W1 Y; W2)
  } else {
    i_layer1 = h_x + h_w1 - h_xw1;                   // I(X; W1)
    i_layer2 = (h_xw1 - h_w1) - (h_xw1w2 - h_w1w2);  // I(X; W2 | W1)
    i_side2 = (h_yw1 - h_w1) - (h_yw1w2 - h_w1w2);   // I(Y; W2 | W1)
  }

  const int m1 = pow2_size(cfg.n * (i_layer1 + cfg.rate_slack));
  const int m2 = pow2_size(cfg.n * (i_layer2 + cfg.rate_slack));
  const int num_bins = pow2_size(cfg.n * (std::max(i_layer2 - i_side2, 0.0) + cfg.rate_slack));

  std::mt19937_64 rng(mix64(cfg.seed));
  const Vec p_w1 = j4.marginal({false, false, true, false}).matrix();
  const Vec p_w2 = j4.marginal({false, false, false, true}).matrix();
  const Eigen::ArrayXd p_w1w2 = j4.marginal({false, false, true, true});
  // p(w2 | w1) rows for the conditional codebooks of the uninformed scheme
  Mat p_w2_given_w1 = Mat::Zero(n1, n2);
  for (int w1 = 0; w1 < n1; ++w1) {
    if (p_w1(w1) > kProbFloor) {
      for (int w2 = 0; w2 < n2; ++w2) {
        p_w2_given_w1(w1, w2) = p_w1w2(w1 * n2 + w2) / p_w1(w1);
      }
    } else {
      p_w2_given_w1(w1, 0) = 1.0;  // unreachable conditioning symbol
    }
  }

  std::vector<Seq> cw1(static_cast<size_t>(m1));
  for (auto& cw : cw1) cw = sample_iid(rng, p_w1, cfg.n);

  // layer-2 codebooks: conditional per j1 when uninformed, shared when informed
  const int w2_books = informed ? 1 : m1;
  std::vector<std::vector<Seq>> cw2(static_cast<size_t>(w2_books));
  for (int b = 0; b < w2_books; ++b) {
    auto& book = cw2[static_cast<size_t>(b)];
    book.resize(static_cast<size_t>(m2));
    for (int c = 0; c < m2; ++c) {
      Seq w(static_cast<size_t>(cfg.n));
      for (int i = 0; i < cfg.n; ++i) {
        if (informed) {
          w[static_cast<size_t>(i)] = sample_iid(rng, p_w2, 1)[0];
        } else {
          const int w1_sym = cw1[static_cast<size_t>(b)][static_cast<size_t>(i)];
          w[static_cast<size_t>(i)] =
              sample_iid(rng, Vec(p_w2_given_w1.row(w1_sym).transpose()), 1)[0];
        }
      }
      book[static_cast<size_t>(c)] = std::move(w);
    }
  }

  std::uniform_int_distribution<int> bin_dist(0, num_bins - 1);
  std::vector<std::vector<int>> bin_of(static_cast<size_t>(w2_books));
  std::vector<std::vector<std::vector<int>>> bin_members(static_cast<size_t>(w2_books));
  for (int b = 0; b < w2_books; ++b) {
    bin_of[static_cast<size_t>(b)].resize(static_cast<size_t>(m2));
    bin_members[static_cast<size_t>(b)].resize(static_cast<size_t>(num_bins));
    for (int c = 0; c < m2; ++c) {
      const int bin = bin_dist(rng);
      bin_of[static_cast<size_t>(b)][static_cast<size_t>(c)] = bin;
      bin_members[static_cast<size_t>(b)][static_cast<size_t>(bin)].push_back(c);
    }
    for (auto& members : bin_members[static_cast<size_t>(b)]) {
      dedupe_members(members, cw2[static_cast<size_t>(b)]);
    }
  }

  // Typicality targets for the encoder layers and the bin disambiguation.
  TypicalityChecker layer1_typ(
      informed ? j4.marginal({true, true, true, false})
               : j4.marginal({true, false, true, false}),
      cfg.n, cfg.epsilon);
  TypicalityChecker layer2_typ(
      informed ? j4.marginal({true, true, true, true})
               : j4.marginal({true, false, true, true}),
      cfg.n, cfg.epsilon);
  TypicalityChecker decode_typ(j4.marginal({false, true, true, true}), cfg.n,
                               cfg.epsilon);

  SimResult res;
  double d1_sum = 0.0, d2_sum = 0.0, dec_fail = 0.0;
  std::unordered_map<long long, std::pair<int, bool>> decode_cache;

  EngineSpec spec;
  spec.num_j = m1 * num_bins;
  spec.num_j1 = m1;
  spec.num_b = num_bins;
  spec.informed = informed;
  spec.encode = [&](const Seq& x, const Seq& y) {
    EncodeOut out;
    int j1 = -1;
    for (int c = 0; c < m1; ++c) {
      const Seq& w = cw1[static_cast<size_t>(c)];
      const bool ok =
          informed
              ? layer1_typ.check([&](int i) {
                  return (x[static_cast<size_t>(i)] * ny + y[static_cast<size_t>(i)]) * n1 +
                         w[static_cast<size_t>(i)];
                })
              : layer1_typ.check([&](int i) {
                  return x[static_cast<size_t>(i)] * n1 + w[static_cast<size_t>(i)];
                });
      if (ok) {
        j1 = c;
        break;
      }
    }
    if (j1 < 0) {
      // fallback index (1,1): transmit j1 = 0 and the bin of codeword 0
      out.fail = true;
      out.j1 = 0;
      out.b = bin_of[0][0];
      out.j = out.b;
      return out;
    }
    const auto& book = cw2[static_cast<size_t>(informed ? 0 : j1)];
    const Seq& w1s = cw1[static_cast<size_t>(j1)];
    int j2 = -1;
    for (int c = 0; c < m2; ++c) {
      const Seq& w2s = book[static_cast<size_t>(c)];
      const bool ok =
          informed
              ? layer2_typ.check([&](int i) {
                  return ((x[static_cast<size_t>(i)] * ny + y[static_cast<size_t>(i)]) * n1 +
                          w1s[static_cast<size_t>(i)]) *
                             n2 +
                         w2s[static_cast<size_t>(i)];
                })
              : layer2_typ.check([&](int i) {
                  return (x[static_cast<size_t>(i)] * n1 + w1s[static_cast<size_t>(i)]) * n2 +
                         w2s[static_cast<size_t>(i)];
                });
      if (ok) {
        j2 = c;
        break;
      }
    }
    if (j2 < 0) {
      out.fail = true;
      j2 = 0;
    }
    out.j1 = j1;
    out.b = bin_of[static_cast<size_t>(informed ? 0 : j1)][static_cast<size_t>(j2)];
    out.j = j1 * num_bins + out.b;
    out.typical = !out.fail;
    return out;
  };
  spec.on_new_y = [&] { decode_cache.clear(); };
  spec.observe = [&](const Seq& x, const Seq& y, const EncodeOut& out, double pxy) {
    const Seq& w1s = cw1[static_cast<size_t>(out.j1)];
    // decoder 1: symbolwise reconstruction from the W1 codeword
    int d1 = 0;
    for (int i = 0; i < cfg.n; ++i) {
      const int xhat = ev.decoder1[static_cast<size_t>(w1s[static_cast<size_t>(i)])];
      if (xhat != x[static_cast<size_t>(i)]) ++d1;
    }
    d1_sum += pxy * d1 / cfg.n;

    // decoder 2: disambiguate the bin against (w1^n, y^n)
    const long long key = static_cast<long long>(out.j1) * num_bins + out.b;
    auto it = decode_cache.find(key);
    if (it == decode_cache.end()) {
      const auto& members =
          bin_members[static_cast<size_t>(informed ? 0 : out.j1)][static_cast<size_t>(out.b)];
      const auto& book = cw2[static_cast<size_t>(informed ? 0 : out.j1)];
      int found = -1, count = 0;
      for (int c : members) {
        const Seq& w2s = book[static_cast<size_t>(c)];
        if (decode_typ.check([&](int i) {
              return (y[static_cast<size_t>(i)] * n1 + w1s[static_cast<size_t>(i)]) * n2 +
                     w2s[static_cast<size_t>(i)];
            })) {
          if (found < 0) found = c;
          ++count;
        }
      }
      bool fail = count != 1;
      if (found < 0) found = members.empty() ? 0 : members.front();
      it = decode_cache.emplace(key, std::make_pair(found, fail)).first;
    }
    const Seq& w2s =
        cw2[static_cast<size_t>(informed ? 0 : out.j1)][static_cast<size_t>(it->second.first)];
    int d2 = 0;
    for (int i = 0; i < cfg.n; ++i) {
      const int xhat = ev.decoder2[static_cast<size_t>(
          (w1s[static_cast<size_t>(i)] * n2 + w2s[static_cast<size_t>(i)]) * ny +
          y[static_cast<size_t>(i)])];
      if (xhat != x[static_cast<size_t>(i)]) ++d2;
    }
    d2_sum += pxy * d2 / cfg.n;
    if (it->second.second) dec_fail += pxy;
  };

  const EngineResult eng = run_engine(source, cfg, spec, &res);
  res.equiv_rate = eng.equiv;
  res.equiv_given_j1 = eng.equiv_j1;
  res.bin_info_given_j1 = eng.bin_info;
  res.limit_value = ev.point.equivocation;  // H(Y | W1)
  res.encoding_failure_prob = clamp01(eng.enc_fail);
  res.decode_failure_prob = clamp01(dec_fail);
  res.distortion1 = d1_sum;
  res.distortion2 = d2_sum;
  res.bin_uniformity_stat = eng.bin_uniformity;
  res.rate_bits_used =
      (std::log2(static_cast<double>(m1)) + std::log2(static_cast<double>(num_bins))) / cfg.n;
  return res;
}

}  // namespace

SimResult simulate_heegard_berger(const JointPMF& source,
                                  const optimizer::UninformedCandidate& cand,
                                  const SimConfig& cfg) {
  return simulate_two_layer(source, cand.channel, cfg, false);
}

SimResult simulate_kaspi(const JointPMF& source,
                         const optimizer::InformedCandidate& cand,
                         const SimConfig& cfg) {
  return simulate_two_layer(source, cand.channel, cfg, true);
}

}  // namespace rdeq::coding_sim
