#pragma once

// Acceptance checks shared by the `validate` subcommand and the acceptance test
// binary. Tolerances and runtime budgets are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "npspec/geometry.hpp"
#include "npspec/gpt.hpp"
#include "npspec/inverse_scan.hpp"
#include "npspec/material.hpp"
#include "npspec/np_analytic.hpp"
#include "npspec/np_numeric.hpp"
#include "npspec/twodisks.hpp"

namespace npspec::validation {

struct Result {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;
};

struct ShapeCase {
  int m;
  double delta;
  double rho0;
};

/// The five class-Q shapes used throughout (rho0 varied for the size recovery).
inline const std::vector<ShapeCase>& paper_shapes() {
  static const std::vector<ShapeCase> v{
      {3, 0.066667, 0.0}, {4, 0.05, 0.5}, {5, 0.03333, -0.25}, {6, 0.02381, 0.25}, {7, 0.021978, 1.0}};
  return v;
}

inline SpectralDecomposition nystrom_spectrum(const AlgebraicDomain& dom, int N) {
  const BoundaryCurve c = discretize(dom, N);
  return numeric_spectrum(discretize_np(c), discretize_single_layer(c));
}

/// Largest distance when each target is paired with a distinct candidate,
/// closest pairs first.
inline double greedy_match_distance(const std::vector<double>& targets, const std::vector<double>& candidates) {
  struct Pair {
    double d;
    std::size_t i, j;
  };
  std::vector<Pair> all;
  all.reserve(targets.size() * candidates.size());
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = 0; j < candidates.size(); ++j) all.push_back({std::abs(targets[i] - candidates[j]), i, j});
  std::sort(all.begin(), all.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
  std::vector<bool> ti(targets.size(), false), cj(candidates.size(), false);
  double worst = 0.0;
  std::size_t left = targets.size();
  for (const Pair& p : all) {
    if (ti[p.i] || cj[p.j]) continue;
    ti[p.i] = cj[p.j] = true;
    worst = std::max(worst, p.d);
    if (--left == 0) break;
  }
  return left == 0 ? worst : std::numeric_limits<double>::infinity();
}

/// Mismatch between the order-delta eigenvalues and the Nystrom spectrum (top
/// eigenvalue 1/2 removed).
inline double asymptotic_mismatch(const AlgebraicDomain& dom, int N) {
  const SpectralDecomposition dec = nystrom_spectrum(dom, N);
  std::vector<double> num(dec.eigenvalues.data() + 1, dec.eigenvalues.data() + dec.eigenvalues.size());
  return greedy_match_distance(asymptotic_eigenvalues(dom), num);
}

namespace detail {

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

template <class F>
Result timed(int id, std::string name, double budget, F body) {
  Result r;
  r.id = id;
  r.name = std::move(name);
  r.budget = budget;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail += std::string(" error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > budget) {
    r.passed = false;
    r.detail += " runtime " + sci(r.seconds) + " s over budget " + sci(budget) + " s";
  }
  return r;
}

}  // namespace detail

inline Result criterion1() {
  return detail::timed(1, "asymptotic vs Nystrom spectrum (N=512)", 30.0, [](Result& r) {
    r.passed = true;
    for (const auto& s : paper_shapes()) {
      const AlgebraicDomain dom(0.0, s.m, s.delta);
      const double mis = asymptotic_mismatch(dom, 512);
      const double tol = std::max(5.0 * s.delta * s.delta, 1e-4);
      r.passed = r.passed && mis <= tol;
      r.detail += " m=" + std::to_string(s.m) + ":" + detail::sci(mis) + "/" + detail::sci(tol);
    }
  });
}

inline Result criterion2() {
  return detail::timed(2, "O(delta^2) mismatch decay, m=3", 20.0, [](Result& r) {
    std::vector<double> mis;
    for (double d : {0.08, 0.04, 0.02}) mis.push_back(asymptotic_mismatch(AlgebraicDomain(0.0, 3, d), 512));
    r.passed = true;
    for (std::size_t i = 0; i + 1 < mis.size(); ++i) {
      const double ratio = mis[i] / mis[i + 1];
      r.passed = r.passed && ratio >= 3.0 && ratio <= 5.0;
      r.detail += " ratio=" + detail::sci(ratio);
    }
    r.detail += " (band [3, 5])";
  });
}

inline Result criterion3() {
  return detail::timed(3, "two-disk exact spectrum (N=256 per circle)", 20.0, [](Result& r) {
    r.passed = true;
    for (double eps : {2.0, 1.5, 1.2}) {
      const TwoDiskConfig cfg(1.0, eps);
      const auto curves = disk_curves(cfg, 256);
      const SpectralDecomposition dec = numeric_spectrum(discretize_np(curves), discretize_single_layer(curves));
      const VectorXd& ev = dec.eigenvalues;
      const Eigen::Index n = ev.size();
      double err = 0.0;
      for (int k = 1; k <= 3; ++k)
        for (int copy = 0; copy < 2; ++copy) {
          const double exact = eigenvalue(cfg, k, ModeSign::plus);
          const Eigen::Index top = 2 + 2 * (k - 1) + copy;
          const Eigen::Index bottom = n - 1 - (2 * (k - 1) + copy);
          err = std::max({err, std::abs(ev[top] - exact), std::abs(ev[bottom] + exact)});
        }
      r.passed = r.passed && err <= 1e-6;
      r.detail += " eps=" + detail::sci(eps) + ":" + detail::sci(err);
    }
    r.detail += " (tol 1e-6)";
  });
}

inline Result criterion4() {
  return detail::timed(4, "polarization tensor identities", 60.0, [](Result& r) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int it = 0; it < 20; ++it) {
      const int m = 1 + int(u01(rng) * 7.0);
      const double delta = u01(rng) * 0.5 / m;
      const double rho0 = -0.5 + u01(rng);
      const double im = (u01(rng) < 0.5 ? -1.0 : 1.0) * (1e-3 + u01(rng) * 0.099);
      const cplx lam(-0.6 + 1.2 * u01(rng), im);
      const BoundaryCurve c = discretize(AlgebraicDomain(rho0, m, delta), 256);
      const DiscreteOperator np = discretize_np(c);
      const DiscreteOperator sl = discretize_single_layer(c);
      const cplx direct = gpt_direct(np, lam, 1, 1, TensorKind::cc);
      const cplx spec = gpt_spectral_sum(numeric_spectrum(np, sl), sl, lam, x1_traces(np.nodes));
      worst = std::max(worst, std::abs(direct - spec) / std::abs(direct));
    }
    const bool ok_a = worst <= 1e-8;
    r.detail += " direct-vs-spectral:" + detail::sci(worst);

    const double rho0 = 0.3;
    const cplx lam(0.2, 0.05);
    const cplx disk = gpt_direct(discretize(AlgebraicDomain::disk(rho0), 128), lam, 1, 1, TensorKind::cc);
    const cplx disk_exact = kPi * std::exp(2.0 * rho0) / lam;
    const double err_b = std::abs(disk - disk_exact) / std::abs(disk_exact);
    const bool ok_b = err_b <= 1e-10;
    r.detail += " disk:" + detail::sci(err_b);

    const TwoDiskConfig cfg(1.0, 2.0);
    const auto curves = disk_curves(cfg, 256);
    const DiscreteOperator np2 = discretize_np(curves);
    const DiscreteOperator sl2 = discretize_single_layer(curves);
    const cplx lam2(0.1, 0.01);
    const cplx block = gpt_spectral_sum(numeric_spectrum(np2, sl2), sl2, lam2, x1_traces(np2.nodes));
    const cplx series = m11_eps(cfg, lam2).value;
    const double err_c = std::abs(block - series) / std::abs(series);
    const bool ok_c = err_c <= 1e-8;
    r.detail += " two-disk:" + detail::sci(err_c);

    const cplx far = m11_eps(TwoDiskConfig(1.0, 100.0), 0.3).value;
    const double err_d = std::abs(far - 2.0 * kPi / 0.3) / (2.0 * kPi / 0.3);
    const bool ok_d = err_d <= 0.01;
    r.detail += " far:" + detail::sci(err_d);
    r.passed = ok_a && ok_b && ok_c && ok_d;
  });
}

inline LinearSweep synthetic_sweep() { return LinearSweep{400.0, 800.0, -0.12, 0.12, 1e-3}; }
inline WavelengthGrid synthetic_grid() { return WavelengthGrid{400.0, 800.0, 4001}; }

inline Result criterion5() {
  return detail::timed(5, "shape classification round trip", 30.0, [](Result& r) {
    r.passed = true;
    for (const auto& s : paper_shapes()) {
      const AlgebraicDomain dom(s.rho0, s.m, s.delta);
      const ShapeReconstruction rec = reconstruct_shape(forward_scan(dom, synthetic_sweep(), synthetic_grid()));
      const double dre = std::abs(rec.delta - s.delta) / s.delta;
      const double drho = std::abs(rec.rho0 - s.rho0);
      const bool ok = rec.m == s.m && dre <= 0.02 && drho <= 0.02;
      r.passed = r.passed && ok;
      r.detail += " m=" + std::to_string(s.m) + "->" + std::to_string(rec.m) + " ddelta=" + detail::sci(dre) +
                  " drho0=" + detail::sci(drho);
    }
  });
}

inline Result criterion6() {
  return detail::timed(6, "gap reconstruction round trip", 10.0, [](Result& r) {
    r.passed = true;
    for (double eps : {1.2, 1.5, 2.0}) {
      const TwoDiskConfig cfg(1.0, eps);
      const GapReconstruction g = reconstruct_gap_from_scan(forward_scan(cfg, synthetic_sweep(), synthetic_grid()), 1.0);
      const double rel = std::abs(g.eps - eps) / eps;
      const double exact = std::abs(reconstruct_eps(eigenvalue(cfg, 1, ModeSign::plus), 1.0) - eps);
      r.passed = r.passed && rel <= 1e-3 && exact <= 1e-12;
      r.detail += " eps=" + detail::sci(eps) + ": scan " + detail::sci(rel) + " closed-form " + detail::sci(exact);
    }
  });
}

inline Result criterion7() {
  return detail::timed(7, "gap-field blow-up law", 10.0, [](Result& r) {
    const double dl = 0.01;
    auto field = [](double eps, double d) {
      const TwoDiskConfig cfg(1.0, eps);
      return std::abs(gap_field(cfg, cplx(k_plus(cfg, 1), d), 1.0).Ep);
    };
    const double ratio_d = field(0.01, dl / 2) / field(0.01, dl);
    bool ok = ratio_d >= 1.9 && ratio_d <= 2.1;
    r.detail += " delta-halving:" + detail::sci(ratio_d);
    double worst = 0.0;
    for (double eps : {2e-3, 4e-3, 6e-3, 8e-3, 1e-2}) {
      const double observed = field(eps / 2, dl) / field(eps, dl);
      const double predicted = (std::exp(-2.0 * TwoDiskConfig(1.0, eps / 2).xi0()) / (eps / 2)) /
                               (std::exp(-2.0 * TwoDiskConfig(1.0, eps).xi0()) / eps);
      worst = std::max(worst, std::abs(observed / predicted - 1.0));
    }
    ok = ok && worst <= 0.15;
    r.detail += " eps-law worst deviation:" + detail::sci(worst);
    r.passed = ok;
  });
}

inline Result criterion8() {
  return detail::timed(8, "structural zeros for odd m", 30.0, [](Result& r) {
    double worst = 0.0;
    const cplx lam(0.1, 0.01);
    for (const auto& s : paper_shapes()) {
      if (s.m % 2 == 0) continue;
      const DiscreteOperator np = discretize_np(discretize(AlgebraicDomain(0.0, s.m, s.delta), 256));
      for (TensorKind k : {TensorKind::cc, TensorKind::cs, TensorKind::sc, TensorKind::ss}) {
        worst = std::max(worst, std::abs(gpt_direct(np, lam, 1, 2, k)));
        worst = std::max(worst, std::abs(gpt_direct(np, lam, 2, 1, k)));
      }
      worst = std::max(worst, std::abs(gpt_direct(np, lam, 2, 2, TensorKind::cs)));
      worst = std::max(worst, std::abs(gpt_direct(np, lam, 2, 2, TensorKind::sc)));
    }
    r.passed = worst <= 1e-8;
    r.detail = " max |entry|:" + detail::sci(worst) + " (tol 1e-8)";
  });
}

inline const std::vector<std::function<Result()>>& criteria() {
  static const std::vector<std::function<Result()>> v{criterion1, criterion2, criterion3, criterion4,
                                                      criterion5, criterion6, criterion7, criterion8};
  return v;
}

inline std::string format_line(const Result& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " (" << detail::sci(r.seconds)
     << " s)" << r.detail;
  return os.str();
}

/// Runs the selected criteria (all when `only` is empty); returns true if all pass.
inline bool run(std::ostream& out, const std::vector<int>& only = {}) {
  bool all = true;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    const int id = int(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const Result r = criteria()[i]();
    out << format_line(r) << '\n' << std::flush;
    all = all && r.passed;
  }
  return all;
}

}  // namespace npspec::validation
