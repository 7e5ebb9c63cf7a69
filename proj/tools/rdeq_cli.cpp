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
#include "rdeq/coding_sim.hpp"
#include "rdeq/model.hpp"
#include "rdeq/optimizer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <clocale>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::json;

// 12 significant digits, C locale, '.' decimal separator.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Round-trip-exact rendering for manifest parameters.
std::string fmt_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// `start:stop:step`, endpoints inclusive when step divides the span within
// 1e-12; a plain number yields a single point.
std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() == 1) {
    out.push_back(std::stod(parts[0]));
    return out;
  }
  if (parts.size() != 3) {
    throw CLI::ValidationError("grid", "expected `value` or `start:stop:step`: " + s);
  }
  const double start = std::stod(parts[0]);
  const double stop = std::stod(parts[1]);
  const double step = std::stod(parts[2]);
  if (step <= 0.0 || stop < start) {
    throw CLI::ValidationError("grid", "need step > 0 and stop >= start: " + s);
  }
  const double span = stop - start;
  const long long count = std::llround(span / step);
  if (std::abs(count * step - span) <= 1e-12 * std::max(1.0, std::abs(span))) {
    for (long long i = 0; i <= count; ++i) {
      out.push_back(i == count ? stop : start + i * step);
    }
  } else {
    for (double v = start; v <= stop + 1e-12; v += step) out.push_back(v);
  }
  return out;
}

// Comma-separated integers; each item may be `a:b` (inclusive, step 1).
std::vector<long long> parse_int_list(const std::string& s) {
  std::vector<long long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.push_back(std::stoll(item));
    } else {
      const long long a = std::stoll(item.substr(0, colon));
      const long long b = std::stoll(item.substr(colon + 1));
      if (b < a) throw CLI::ValidationError("list", "descending range: " + item);
      for (long long v = a; v <= b; ++v) out.push_back(v);
    }
  }
  return out;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct CommandOutput {
  std::string data;
  int exit_code = 0;
  std::string command;
  std::map<std::string, std::string> params;  // resolved; replayable as flags
};

int emit(const CommandOutput& out, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << out.data;
    return out.exit_code;
  }
  {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot open output path " << out_path << "\n";
      return 2;
    }
    f << out.data;
  }
  json manifest;
  manifest["command"] = out.command;
  manifest["parameters"] = out.params;
  manifest["timestamp"] = timestamp_utc();
  manifest["tool_version"] = kToolVersion;
  std::ofstream mf(out_path + ".manifest.json", std::ios::binary);
  mf << manifest.dump(2) << "\n";
  return out.exit_code;
}

// ---------------------------------------------------------------------------
// curve

CommandOutput cmd_curve(const std::string& case_name, double p,
                        const std::string& d1_s, const std::string& d2_s,
                        const std::string& alpha_s) {
  using namespace rdeq;
  using namespace rdeq::closed_form;
  CommandOutput out;
  out.command = "curve";
  out.params = {{"case", case_name}, {"p", fmt_exact(p)}};
  if (!d1_s.empty()) out.params["d1"] = d1_s;
  if (!d2_s.empty()) out.params["d2"] = d2_s;
  if (!alpha_s.empty()) out.params["alpha"] = alpha_s;

  const SweepCase which =
      (case_name == "informed") ? SweepCase::Informed : SweepCase::Uninformed;
  if (case_name != "informed" && case_name != "uninformed") {
    throw CLI::ValidationError("--case", "must be `uninformed` or `informed`");
  }

  std::vector<CurveRow> rows;
  if (!alpha_s.empty()) {
    if (which != SweepCase::Informed || d1_s.empty() || d1_s.find(':') != std::string::npos) {
      throw CLI::ValidationError("--alpha",
                                 "alpha sweeps need --case informed and a fixed --d1");
    }
    rows = curve_sweep(which, p, FixedCoordinate::D1, std::stod(d1_s), {},
                       parse_grid(alpha_s));
  } else {
    const bool d1_grid = d1_s.find(':') != std::string::npos;
    const bool d2_grid = d2_s.find(':') != std::string::npos;
    if (d1_s.empty() || d2_s.empty() || d1_grid == d2_grid) {
      throw CLI::ValidationError(
          "--d1/--d2", "exactly one of --d1/--d2 must be a grid, the other fixed");
    }
    if (d1_grid) {
      rows = curve_sweep(which, p, FixedCoordinate::D2, std::stod(d2_s), parse_grid(d1_s));
    } else {
      rows = curve_sweep(which, p, FixedCoordinate::D1, std::stod(d1_s), parse_grid(d2_s));
    }
  }

  std::string csv = "d1,d2,p,region,rate_bits,equivocation_bits,clamped\n";
  for (const auto& r : rows) {
    csv += fmt(r.d1) + "," + fmt(r.d2) + "," + fmt(r.p) + "," + r.labels + ",";
    if (r.admissible) {
      csv += fmt(r.rate) + "," + fmt(r.equivocation);
    } else {
      csv += ",";
    }
    csv += std::string(",") + (r.clamped ? "1" : "0") + "\n";
  }
  out.data = std::move(csv);
  return out;
}

// ---------------------------------------------------------------------------
// frontier

CommandOutput cmd_frontier(double p, double d1, double d2, const std::string& alpha_s) {
  using namespace rdeq::closed_form;
  CommandOutput out;
  out.command = "frontier";
  out.params = {{"p", fmt_exact(p)},
                {"d1", fmt_exact(d1)},
                {"d2", fmt_exact(d2)},
                {"alpha", alpha_s}};

  const InformedRegimeSet set = classify_informed(d1, d2, p);
  if (!set.contains(InformedRegime::G4) && !set.contains(InformedRegime::G5)) {
    throw CLI::ValidationError(
        "frontier", "point lies in regime(s) " + set.joined() +
                        "; the parametric frontier applies to G4/G5 only");
  }
  const FrontierSweep sweep = frontier_informed(d1, d2, p, parse_grid(alpha_s));
  const std::string regime = to_string(sweep.regime);
  const std::string optimality =
      sweep.regime == InformedRegime::G4 ? "tight" : "achievable-only";
  for (const auto& sk : sweep.skipped) {
    std::cerr << "note: alpha=" << fmt(sk.alpha) << " skipped: " << sk.reason << "\n";
  }

  std::string csv = "alpha,beta,rate_bits,equivocation_bits,regime,optimality\n";
  for (const auto& pt : sweep.points) {
    csv += fmt(pt.alpha) + "," + fmt(pt.beta) + "," + fmt(pt.rate) + "," +
           fmt(pt.equivocation) + "," + regime + "," + optimality + "\n";
  }
  out.data = std::move(csv);
  return out;
}

// ---------------------------------------------------------------------------
// regions

CommandOutput cmd_regions(const std::string& case_name, double p,
                          const std::string& d1_s, const std::string& d2_s) {
  using namespace rdeq::closed_form;
  CommandOutput out;
  out.command = "regions";
  out.params = {{"case", case_name}, {"p", fmt_exact(p)}, {"d1", d1_s}, {"d2", d2_s}};
  if (case_name != "informed" && case_name != "uninformed") {
    throw CLI::ValidationError("--case", "must be `uninformed` or `informed`");
  }
  const std::vector<double> g1 = parse_grid(d1_s);
  const std::vector<double> g2 = parse_grid(d2_s);
  if (g1.size() < 2 || g2.size() < 2) {
    throw CLI::ValidationError("--d1/--d2", "grid resolution must be >= 2");
  }
  std::string csv = "d1,d2,labels\n";
  for (const double d1 : g1) {
    for (const double d2 : g2) {
      const std::string labels = (case_name == "informed")
                                     ? classify_informed(d1, d2, p).joined()
                                     : to_string(classify_uninformed(d1, d2, p));
      csv += fmt(d1) + "," + fmt(d2) + "," + labels + "\n";
    }
  }
  out.data = std::move(csv);
  return out;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyPoint {
  std::map<std::string, double> params;
  rdeq::RDEPoint expected;
  rdeq::RDEPoint computed;
};

json point_json(const rdeq::RDEPoint& pt) {
  return json{{"d1", pt.d1},
              {"d2", pt.d2},
              {"equivocation_bits", pt.equivocation},
              {"rate_bits", pt.rate}};
}

double point_error(const rdeq::RDEPoint& a, const rdeq::RDEPoint& b) {
  return std::max({std::abs(a.rate - b.rate), std::abs(a.d1 - b.d1),
                   std::abs(a.d2 - b.d2),
                   std::abs(a.equivocation - b.equivocation)});
}

CommandOutput cmd_verify(double p, double tol, const std::string& only) {
  using namespace rdeq;
  namespace cf = rdeq::closed_form;
  namespace opt = rdeq::optimizer;
  CommandOutput out;
  out.command = "verify";
  out.params = {{"p", fmt_exact(p)}, {"tol", fmt_exact(tol)}};
  if (!only.empty()) out.params["only"] = only;

  const JointPMF source = make_erased_source({p});
  const DistortionMeasure ham = DistortionMeasure::hamming_binary();
  const int sweep_points = 11;

  std::map<std::string, std::vector<VerifyPoint>> suites;

  for (int i = 1; i <= sweep_points; ++i) {
    const double d2 = (p / 2.0) * i / sweep_points;
    VerifyPoint vp;
    vp.params = {{"d2", d2}};
    vp.expected = {cf::rate_uninformed(0.5, d2, p), 0.5, d2,
                   cf::equivocation_uninformed(0.5, p)};
    vp.computed =
        opt::evaluate_uninformed(opt::reference_channel_L2(p, d2), source, ham, ham).point;
    suites["L2"].push_back(vp);
  }
  for (int i = 1; i <= sweep_points; ++i) {
    const double d1 = 0.5 * i / sweep_points;
    VerifyPoint vp;
    vp.params = {{"d1", d1}};
    vp.expected = {cf::rate_uninformed(d1, p * d1, p), d1, p * d1,
                   cf::equivocation_uninformed(d1, p)};
    vp.computed =
        opt::evaluate_uninformed(opt::reference_channel_L3(p, d1), source, ham, ham).point;
    suites["L3"].push_back(vp);
  }
  for (int i = 1; i <= sweep_points; ++i) {
    const double d1 = 0.1 + 0.35 * (i - 1) / (sweep_points - 1);
    const double d2 = 0.5 * p * d1;  // inside L4: d2 < p*d1
    VerifyPoint vp;
    vp.params = {{"d1", d1}, {"d2", d2}};
    vp.expected = {cf::rate_uninformed(d1, d2, p), d1, d2,
                   cf::equivocation_uninformed(d1, p)};
    vp.computed =
        opt::evaluate_uninformed(opt::reference_channel_L4(p, d1, d2), source, ham, ham).point;
    suites["L4"].push_back(vp);
  }
  for (int i = 1; i <= sweep_points; ++i) {
    const double d2 = (p / 2.0) * i / sweep_points;
    VerifyPoint vp;
    vp.params = {{"d2", d2}};
    const RDEPoint closed = cf::rate_equivocation_informed_closed(
        d2 + (1.0 - p) / 2.0, d2, p);
    vp.expected = {closed.rate, d2 + (1.0 - p) / 2.0, d2, closed.equivocation};
    vp.computed =
        opt::evaluate_informed(opt::reference_channel_G3(p, d2), source, ham, ham).point;
    suites["G3"].push_back(vp);
  }
  {
    const double d1 = p / 2.0;
    for (int i = 0; i < sweep_points; ++i) {
      const double alpha = (d1 / p) * i / (sweep_points - 1);
      const double beta = (d1 - p * alpha) / (1.0 - p);
      VerifyPoint vp;
      vp.params = {{"alpha", alpha}, {"d1", d1}};
      vp.expected = {1.0 - (1.0 - p) * binary_entropy(beta) - p * binary_entropy(alpha),
                     d1, p * alpha,
                     binary_entropy(p) + (1.0 - p) * binary_entropy(beta)};
      vp.computed =
          opt::evaluate_informed(opt::reference_channel_G4(p, d1, alpha), source, ham, ham)
              .point;
      suites["G4"].push_back(vp);
    }
  }

  json report;
  bool all_pass = true;
  for (const auto& [name, points] : suites) {
    if (!only.empty() && only != name) continue;
    double max_err = 0.0;
    const VerifyPoint* worst = &points.front();
    for (const auto& vp : points) {
      const double e = point_error(vp.expected, vp.computed);
      if (e >= max_err) {
        max_err = e;
        worst = &vp;
      }
    }
    json entry;
    entry["max_abs_error"] = max_err;
    entry["points"] = points.size();
    entry["pass"] = max_err <= tol;
    entry["worst"] = {{"computed", point_json(worst->computed)},
                      {"expected", point_json(worst->expected)},
                      {"params", worst->params}};
    report[name] = entry;
    if (max_err > tol) all_pass = false;
  }
  out.data = report.dump(2) + "\n";
  out.exit_code = all_pass ? 0 : 1;
  return out;
}

// ---------------------------------------------------------------------------
// search

CommandOutput cmd_search(const std::string& case_name, double p, double d1, double d2,
                         double min_equiv, bool has_min_equiv, int restarts, int steps,
                         double step_scale, int w1_size, int w2_size,
                         std::uint64_t seed) {
  using namespace rdeq;
  namespace cf = rdeq::closed_form;
  namespace opt = rdeq::optimizer;
  CommandOutput out;
  out.command = "search";
  out.params = {{"case", case_name},
                {"p", fmt_exact(p)},
                {"d1", fmt_exact(d1)},
                {"d2", fmt_exact(d2)},
                {"restarts", std::to_string(restarts)},
                {"steps", std::to_string(steps)},
                {"step-scale", fmt_exact(step_scale)},
                {"w1-size", std::to_string(w1_size)},
                {"w2-size", std::to_string(w2_size)},
                {"seed", std::to_string(seed)}};
  if (has_min_equiv) out.params["min-equivocation"] = fmt_exact(min_equiv);
  if (case_name != "informed" && case_name != "uninformed") {
    throw CLI::ValidationError("--case", "must be `uninformed` or `informed`");
  }

  const JointPMF source = make_erased_source({p});
  opt::SearchConfig cfg;
  cfg.restarts = restarts;
  cfg.steps = steps;
  cfg.step_scale = step_scale;
  cfg.seed = seed;
  cfg.w1_size = w1_size;
  cfg.w2_size = w2_size;
  cfg.targets.d1 = d1;
  cfg.targets.d2 = d2;
  if (has_min_equiv) cfg.targets.equivocation = min_equiv;

  const opt::SearchResult res = opt::random_search(
      case_name == "informed" ? opt::SearchCase::Informed : opt::SearchCase::Uninformed,
      source, cfg);

  json report;
  report["evaluated"] = res.evaluated;
  report["feasible"] = res.feasible;
  report["found"] = res.found;
  if (case_name == "uninformed") {
    report["bound"] = {{"equivocation_bits", cf::equivocation_uninformed(d1, p)},
                       {"rate_bits", cf::rate_uninformed(d1, d2, p)}};
  } else {
    const cf::InformedRegimeSet set = cf::classify_informed(d1, d2, p);
    if (set.has_closed_form()) {
      const RDEPoint b = cf::rate_equivocation_informed_closed(d1, d2, p);
      report["bound"] = {{"equivocation_bits", b.equivocation}, {"rate_bits", b.rate}};
    } else {
      report["bound"] = nullptr;  // parametric frontier regime
    }
  }
  if (res.found) {
    report["best"] = point_json(res.best.point);
    json table = json::array();
    for (Eigen::Index r = 0; r < res.best_channel.probs.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < res.best_channel.probs.cols(); ++c) {
        row.push_back(res.best_channel.probs(r, c));
      }
      table.push_back(row);
    }
    report["channel"] = table;
  } else {
    report["best"] = nullptr;
    report["channel"] = json::array();
  }
  out.data = report.dump(2) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// simulate

CommandOutput cmd_simulate(const std::string& scheme, double p, const std::string& n_s,
                           const std::string& seeds_s, double rate, double crossover,
                           double d1, double d2, double alpha, double epsilon,
                           double rate_slack, bool exact_only, int mc_samples,
                           std::uint64_t budget) {
  using namespace rdeq;
  namespace sim = rdeq::coding_sim;
  namespace opt = rdeq::optimizer;
  CommandOutput out;
  out.command = "simulate";
  out.params = {{"scheme", scheme},
                {"p", fmt_exact(p)},
                {"n", n_s},
                {"seeds", seeds_s},
                {"epsilon", fmt_exact(epsilon)},
                {"rate-slack", fmt_exact(rate_slack)},
                {"mc-samples", std::to_string(mc_samples)},
                {"budget", std::to_string(budget)}};
  if (exact_only) out.params["exact-only"] = "true";

  const std::vector<long long> ns = parse_int_list(n_s);
  const std::vector<long long> seeds = parse_int_list(seeds_s);
  if (ns.empty() || seeds.empty()) {
    throw CLI::ValidationError("--n/--seeds", "need at least one blocklength and seed");
  }
  const JointPMF source = make_erased_source({p});

  std::string csv =
      "scheme,n,seed,rate_bits_used,equiv_rate_bits,limit_bits,gap_bits,"
      "distortion1,distortion2,encoding_failure,decode_failure,bin_uniformity,"
      "exact,mc_samples\n";
  for (const long long n : ns) {
    for (const long long seed : seeds) {
      sim::SimConfig cfg;
      cfg.n = static_cast<int>(n);
      cfg.epsilon = epsilon;
      cfg.rate_slack = rate_slack;
      cfg.seed = static_cast<std::uint64_t>(seed);
      cfg.state_budget = budget;
      cfg.exact_only = exact_only;
      cfg.mc_samples = mc_samples;

      sim::SimResult res;
      if (scheme == "sw") {
        const double r = rate > 0.0 ? rate : p + 0.1;  // H(X|Y) + 0.1 default
        out.params["rate"] = fmt_exact(r);
        const int bins = 1 << std::max(0, static_cast<int>(std::ceil(cfg.n * r - 1e-9)));
        res = sim::simulate_slepian_wolf(source, cfg, bins);
      } else if (scheme == "wz") {
        out.params["crossover"] = fmt_exact(crossover);
        ConditionalPMF tc{{Alphabet::binary()},
                          {Alphabet::binary()},
                          (Mat(2, 2) << 1.0 - crossover, crossover, crossover,
                           1.0 - crossover)
                              .finished()};
        // reconstruction (u, y) -> xhat: trust y when unerased, else u
        const std::vector<int> recon = {0, 1, 0, 0, 1, 1};
        res = sim::simulate_wyner_ziv(source, tc, recon, cfg);
      } else if (scheme == "hb") {
        out.params["d1"] = fmt_exact(d1);
        out.params["d2"] = fmt_exact(d2);
        res = sim::simulate_heegard_berger(source, opt::reference_channel_L4(p, d1, d2), cfg);
      } else if (scheme == "kaspi") {
        if (alpha >= 0.0) {
          out.params["d1"] = fmt_exact(d1);
          out.params["alpha"] = fmt_exact(alpha);
          res = sim::simulate_kaspi(source, opt::reference_channel_G4(p, d1, alpha), cfg);
        } else {
          out.params["d2"] = fmt_exact(d2);
          res = sim::simulate_kaspi(source, opt::reference_channel_G3(p, d2), cfg);
        }
      } else {
        throw CLI::ValidationError("--scheme", "must be one of sw, wz, hb, kaspi");
      }

      csv += scheme + "," + std::to_string(n) + "," + std::to_string(seed) + "," +
             fmt(res.rate_bits_used) + "," + fmt(res.equiv_rate) + "," +
             fmt(res.limit_value) + "," + fmt(std::abs(res.limit_value - res.equiv_rate)) +
             "," + fmt(res.distortion1) + "," + fmt(res.distortion2) + "," +
             fmt(res.encoding_failure_prob) + "," + fmt(res.decode_failure_prob) + "," +
             fmt(res.bin_uniformity_stat) + "," + (res.exact ? "1" : "0") + "," +
             std::to_string(res.mc_samples_used) + "\n";
    }
  }
  out.data = std::move(csv);
  return out;
}

// ---------------------------------------------------------------------------
// symmetry

CommandOutput cmd_symmetry(int samples, double p, bool has_p, std::uint64_t seed) {
  namespace opt = rdeq::optimizer;
  CommandOutput out;
  out.command = "symmetry";
  out.params = {{"samples", std::to_string(samples)}, {"seed", std::to_string(seed)}};
  if (has_p) out.params["p"] = fmt_exact(p);

  if (samples == 0) {
    std::cerr << "warning: zero samples requested; vacuous pass\n";
  }
  std::mt19937_64 rng(seed ^ 0x5deece66dULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int fail_equal = 0, fail_rate = 0, fail_equiv = 0;
  json first_failure = nullptr;
  for (int s = 0; s < samples; ++s) {
    const double a = unit(rng), b = unit(rng), c = unit(rng), d = unit(rng);
    const double ps = has_p ? p : 0.05 + 0.9 * unit(rng);
    const opt::SymmetrizationReport rep = opt::symmetrize_check(a, b, c, d, ps);
    if (!rep.p1_p2_equal) ++fail_equal;
    if (!rep.rate_jensen) ++fail_rate;
    if (!rep.equivocation_jensen) ++fail_equiv;
    if (!rep.pass() && first_failure.is_null()) {
      first_failure = {{"a", a}, {"b", b}, {"c", c}, {"d", d}, {"p", ps}};
    }
  }
  const int failures = fail_equal + fail_rate + fail_equiv;
  json report;
  report["equality_failures"] = fail_equal;
  report["equivocation_jensen_failures"] = fail_equiv;
  report["failures"] = failures;
  report["first_failure"] = first_failure;
  report["rate_jensen_failures"] = fail_rate;
  report["samples"] = samples;
  out.data = report.dump(2) + "\n";
  out.exit_code = failures == 0 ? 0 : 1;
  return out;
}

// ---------------------------------------------------------------------------

int run(std::vector<std::string> args);

int cmd_replay(const std::string& manifest_path, const std::string& out_path) {
  std::ifstream f(manifest_path);
  if (!f) {
    std::cerr << "error: cannot read manifest " << manifest_path << "\n";
    return 2;
  }
  json manifest = json::parse(f);
  std::vector<std::string> args;
  args.push_back(manifest.at("command").get<std::string>());
  for (const auto& [k, v] : manifest.at("parameters").items()) {
    if (v.get<std::string>() == "true") {
      args.push_back("--" + k);
    } else {
      args.push_back("--" + k + "=" + v.get<std::string>());
    }
  }
  if (!out_path.empty()) args.push_back("--out=" + out_path);
  return run(std::move(args));
}

// Loads `key=value` lines (# comments) and splices them in as flags right
// after the subcommand token so explicit flags still override.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  for (size_t i = 0; i < args.size();) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("--config", "cannot read " + path);
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t')) {
      line.pop_back();
    }
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line = line.substr(start);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      extra.push_back("--" + line);  // bare flag
    } else {
      std::string key = line.substr(0, eq);
      std::string value = line.substr(eq + 1);
      while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
      const auto vstart = value.find_first_not_of(" \t");
      value = vstart == std::string::npos ? "" : value.substr(vstart);
      extra.push_back("--" + key + "=" + value);
    }
  }
  // insert after the subcommand token (first non-flag argument)
  size_t pos = 0;
  while (pos < args.size() && args[pos].rfind("--", 0) == 0) ++pos;
  if (pos < args.size()) ++pos;
  args.insert(args.begin() + static_cast<long>(pos), extra.begin(), extra.end());
  return args;
}

int run(std::vector<std::string> args) {
  CLI::App app{"rate-distortion-equivocation tools for the binary source with "
               "erased side information"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  std::string out_path;
  std::uint64_t seed = 0;
  app.add_option("--out", out_path, "output path (default: stdout)");
  app.add_option("--seed", seed, "master seed");

  std::string case_name = "uninformed", d1_s, d2_s, alpha_s;
  double p = 0.25;

  auto* curve = app.add_subcommand("curve", "closed-form rate/equivocation sweep");
  curve->fallthrough();
  curve->add_option("--case", case_name, "uninformed | informed");
  curve->add_option("--p", p, "erasure probability")->required();
  curve->add_option("--d1", d1_s, "fixed value or start:stop:step grid");
  curve->add_option("--d2", d2_s, "fixed value or start:stop:step grid");
  curve->add_option("--alpha", alpha_s, "informed case: alpha grid (d2 = p*alpha)");

  double fd1 = 0.0, fd2 = 0.0;
  auto* frontier = app.add_subcommand("frontier", "parametric informed frontier");
  frontier->fallthrough();
  frontier->add_option("--p", p, "erasure probability")->required();
  frontier->add_option("--d1", fd1, "distortion target, decoder 1")->required();
  frontier->add_option("--d2", fd2, "distortion target, decoder 2")->required();
  frontier->add_option("--alpha", alpha_s, "alpha grid start:stop:step")->required();

  auto* regions = app.add_subcommand("regions", "distortion-plane classification grid");
  regions->fallthrough();
  regions->add_option("--case", case_name, "uninformed | informed");
  regions->add_option("--p", p, "erasure probability")->required();
  regions->add_option("--d1", d1_s, "d1 grid start:stop:step")->required();
  regions->add_option("--d2", d2_s, "d2 grid start:stop:step")->required();

  double tol = 1e-9;
  std::string only;
  auto* verify = app.add_subcommand("verify", "test-channel vs closed-form agreement");
  verify->fallthrough();
  verify->add_option("--p", p, "erasure probability");
  verify->add_option("--tol", tol, "max |error| to pass");
  verify->add_option("--only", only, "restrict to one channel family (L2..G4)");

  double min_equiv = 0.0;
  int restarts = 8, steps = 200, w1_size = 2, w2_size = 2;
  double step_scale = 0.25;
  auto* search = app.add_subcommand("search", "randomized test-channel search");
  search->fallthrough();
  search->add_option("--case", case_name, "uninformed | informed");
  search->add_option("--p", p, "erasure probability")->required();
  search->add_option("--d1", fd1, "distortion target, decoder 1")->required();
  search->add_option("--d2", fd2, "distortion target, decoder 2")->required();
  auto* me_opt = search->add_option("--min-equivocation", min_equiv,
                                    "require equivocation >= this");
  search->add_option("--restarts", restarts, "independent restarts");
  search->add_option("--steps", steps, "perturbation steps per restart");
  search->add_option("--step-scale", step_scale, "multiplicative noise scale");
  search->add_option("--w1-size", w1_size, "|W1|");
  search->add_option("--w2-size", w2_size, "|W2|");

  std::string scheme, n_s = "8", seeds_s = "0";
  double rate = -1.0, crossover = 0.1, sd1 = 0.1, sd2 = 0.02, salpha = -1.0;
  double epsilon = 0.05, rate_slack = 0.05;
  bool exact_only = false;
  int mc_samples = 20000;
  std::uint64_t budget = 1ull << 26;
  auto* simulate = app.add_subcommand("simulate", "finite-blocklength random binning");
  simulate->fallthrough();
  simulate->add_option("--scheme", scheme, "sw | wz | hb | kaspi")->required();
  simulate->add_option("--p", p, "erasure probability")->required();
  simulate->add_option("--n", n_s, "blocklengths, e.g. 4,8,12");
  simulate->add_option("--seeds", seeds_s, "seed list, e.g. 0:19");
  simulate->add_option("--rate", rate, "sw: bits per symbol (default H(X|Y)+0.1)");
  simulate->add_option("--crossover", crossover, "wz: test channel U = X xor Ber(c)");
  simulate->add_option("--d1", sd1, "hb/kaspi(G4): distortion 1 target");
  simulate->add_option("--d2", sd2, "hb/kaspi(G3): distortion 2 target");
  simulate->add_option("--alpha", salpha, "kaspi: use the G4 channel at this alpha");
  simulate->add_option("--epsilon", epsilon, "typicality slack per cell");
  simulate->add_option("--rate-slack", rate_slack, "codebook sizing slack");
  simulate->add_flag("--exact-only", exact_only, "refuse Monte-Carlo fallback");
  simulate->add_option("--mc-samples", mc_samples, "fallback sample count");
  simulate->add_option("--budget", budget, "exact enumeration state budget");

  int samples = 10000;
  auto* symmetry = app.add_subcommand("symmetry", "reconstruction-channel symmetrization checks");
  symmetry->fallthrough();
  symmetry->add_option("--samples", samples, "random (a,b,c,d) draws");
  auto* sp_opt = symmetry->add_option("--p", p, "fix the erasure probability");

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "re-run a command from its manifest");
  replay->fallthrough();
  replay->add_option("--manifest", manifest_path, "manifest JSON path")->required();

  try {
    args = apply_config(std::move(args));
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CommandOutput out;
    if (app.got_subcommand(curve)) {
      out = cmd_curve(case_name, p, d1_s, d2_s, alpha_s);
    } else if (app.got_subcommand(frontier)) {
      out = cmd_frontier(p, fd1, fd2, alpha_s);
    } else if (app.got_subcommand(regions)) {
      out = cmd_regions(case_name, p, d1_s, d2_s);
    } else if (app.got_subcommand(verify)) {
      out = cmd_verify(p, tol, only);
    } else if (app.got_subcommand(search)) {
      out = cmd_search(case_name, p, fd1, fd2, min_equiv, me_opt->count() > 0, restarts,
                       steps, step_scale, w1_size, w2_size, seed);
    } else if (app.got_subcommand(simulate)) {
      out = cmd_simulate(scheme, p, n_s, seeds_s, rate, crossover, sd1, sd2, salpha,
                         epsilon, rate_slack, exact_only, mc_samples, budget);
    } else if (app.got_subcommand(symmetry)) {
      out = cmd_symmetry(samples, p, sp_opt->count() > 0, seed);
    } else if (app.got_subcommand(replay)) {
      return cmd_replay(manifest_path, out_path);
    }
    return emit(out, out_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rdeq::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rdeq::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rdeq::coding_sim::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args));
}
