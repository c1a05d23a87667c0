#pragma once

// Two equal disks in bipolar coordinates: exact NP eigenpairs, the m11 series,
// gap inversion, and the field at the centre of the gap.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "npspec/errors.hpp"
#include "npspec/geometry.hpp"
#include "npspec/np_numeric.hpp"

namespace npspec {

/// Disks of radius r centred at (-(r + eps/2), 0) and (r + eps/2, 0).
class TwoDiskConfig {
 public:
  TwoDiskConfig(double r, double eps) : r_(r), eps_(eps) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidDomain("disk radius must be positive");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidDomain("gap eps must be positive");
    alpha_ = std::sqrt(eps * (r + 0.25 * eps));
    xi0_ = std::asinh(alpha_ / r);
  }

  double r() const { return r_; }
  double eps() const { return eps_; }
  double alpha() const { return alpha_; }
  double xi0() const { return xi0_; }
  double centre_offset() const { return r_ + 0.5 * eps_; }

 private:
  double r_, eps_, alpha_, xi0_;
};

enum class ModeSign { plus, minus };

inline const char* to_string(ModeSign s) { return s == ModeSign::plus ? "plus" : "minus"; }
inline double sign_of(ModeSign s) { return s == ModeSign::plus ? 1.0 : -1.0; }

struct Bipolar {
  double xi;
  double theta;
};

/// xi = ln|(z+alpha)/(z-alpha)|, theta = -arg((z+alpha)/(z-alpha)) in [0, 2 pi).
inline Bipolar to_bipolar(const TwoDiskConfig& cfg, const Point& p) {
  const cplx z = to_complex(p);
  const cplx q = (z + cfg.alpha()) / (z - cfg.alpha());
  double th = -std::arg(q);
  if (th < 0.0) th += 2.0 * kPi;
  return {std::log(std::abs(q)), th};
}

inline Point from_bipolar(const TwoDiskConfig& cfg, double xi, double theta) {
  const double d = std::cosh(xi) - std::cos(theta);
  return {cfg.alpha() * std::sinh(xi) / d, cfg.alpha() * std::sin(theta) / d};
}

/// Scale factor h = (cosh xi - cos theta) / alpha; dsigma = dtheta / h on xi = const.
inline double scale_factor(const TwoDiskConfig& cfg, double xi, double theta) {
  return (std::cosh(xi) - std::cos(theta)) / cfg.alpha();
}

/// Boundaries of B1 (left, xi = -xi0) and B2 (right, xi = xi0), each with N nodes.
inline std::array<BoundaryCurve, 2> disk_curves(const TwoDiskConfig& cfg, int N) {
  const double c = cfg.centre_offset();
  return {discretize_circle(Point(-c, 0.0), cfg.r(), N), discretize_circle(Point(c, 0.0), cfg.r(), N)};
}

inline double eigenvalue(const TwoDiskConfig& cfg, int n, ModeSign s) {
  if (n == 0) throw OutOfRange("mode index must be nonzero");
  return sign_of(s) * 0.5 * std::exp(-2.0 * std::abs(n) * cfg.xi0());
}

struct DiskEigenmode {
  int n;
  ModeSign sign;
  double eigenvalue;
  double normalization;
};

inline DiskEigenmode make_mode(const TwoDiskConfig& cfg, int n, ModeSign s) {
  const double lam = eigenvalue(cfg, n, s);
  const double q = std::exp(-2.0 * std::abs(n) * cfg.xi0());
  const double nrm = std::sqrt(std::abs(n) / (2.0 * kPi * (1.0 - sign_of(s) * q)));
  return {n, s, lam, nrm};
}

/// Piecewise solution u_n of the transmission eigenproblem, additive constant zero.
inline cplx mode_potential(const TwoDiskConfig& cfg, int n, ModeSign s, double xi, double theta) {
  if (n == 0) throw OutOfRange("mode index must be nonzero");
  const double an = std::abs(n);
  const double x0 = cfg.xi0();
  const double sg = sign_of(s);
  const cplx ph = std::polar(1.0, n * theta);
  const double outer = (std::exp(an * x0) - sg * std::exp(-an * x0)) / (2.0 * an);
  if (xi < -x0) return -sg * outer * std::exp(an * xi) * ph;
  if (xi > x0) return outer * std::exp(-an * xi) * ph;
  return std::exp(-an * x0) * (std::exp(an * xi) - sg * std::exp(-an * xi)) / (2.0 * an) * ph;
}

/// d u_n / d xi. At |xi| = xi0 `inside_disk` picks the one-sided limit.
inline cplx mode_potential_dxi(const TwoDiskConfig& cfg, int n, ModeSign s, double xi, double theta,
                               bool inside_disk = false) {
  if (n == 0) throw OutOfRange("mode index must be nonzero");
  const double an = std::abs(n);
  const double x0 = cfg.xi0();
  const double sg = sign_of(s);
  const cplx ph = std::polar(1.0, n * theta);
  const double outer = (std::exp(an * x0) - sg * std::exp(-an * x0)) / 2.0;
  const bool left = xi < -x0 || (inside_disk && xi <= -x0);
  const bool right = xi > x0 || (inside_disk && xi >= x0);
  if (left) return -sg * outer * std::exp(an * xi) * ph;
  if (right) return -outer * std::exp(-an * xi) * ph;
  return std::exp(-an * x0) * (std::exp(an * xi) + sg * std::exp(-an * xi)) / 2.0 * ph;
}

/// Single-layer potential of the normalized density Psi_n at (xi, theta). For the
/// minus family it is -u_n shifted to vanish at infinity (xi = 0, theta = 0).
inline cplx mode_single_layer(const TwoDiskConfig& cfg, int n, ModeSign s, double xi, double theta) {
  const DiskEigenmode md = make_mode(cfg, n, s);
  const cplx u = mode_potential(cfg, n, s, xi, theta);
  if (s == ModeSign::plus) return md.normalization * u;
  const cplx at_inf = mode_potential(cfg, n, s, 0.0, 0.0);
  return -md.normalization * (u - at_inf);
}

/// Psi_n = c e^{in theta} (h(-xi0, theta), -+ h(xi0, theta)) at bipolar angles.
inline std::pair<VectorXc, VectorXc> eigendensity_samples(const TwoDiskConfig& cfg, int n, ModeSign s,
                                                          const std::vector<double>& thetas) {
  const DiskEigenmode md = make_mode(cfg, n, s);
  const auto k = Eigen::Index(thetas.size());
  VectorXc b1(k), b2(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double th = thetas[std::size_t(j)];
    const cplx ph = md.normalization * std::polar(1.0, n * th);
    b1[j] = ph * scale_factor(cfg, -cfg.xi0(), th);
    b2[j] = -sign_of(s) * ph * scale_factor(cfg, cfg.xi0(), th);
  }
  return {b1, b2};
}

/// Psi_n on Nystrom nodes of disk_curves(cfg, N) (component 0 = B1).
inline VectorXc eigendensity_on_nodes(const TwoDiskConfig& cfg, int n, ModeSign s, const NodeSet& ns) {
  const DiskEigenmode md = make_mode(cfg, n, s);
  VectorXc out(ns.size());
  for (Eigen::Index i = 0; i < ns.size(); ++i) {
    const Bipolar b = to_bipolar(cfg, ns.points[i]);
    const cplx ph = md.normalization * std::polar(1.0, n * b.theta);
    if (ns.component[i] == 0)
      out[i] = ph * scale_factor(cfg, -cfg.xi0(), b.theta);
    else
      out[i] = -sign_of(s) * ph * scale_factor(cfg, cfg.xi0(), b.theta);
  }
  return out;
}

/// Partial sum of sgn(xi) alpha [1 + 2 sum_n e^{-n|xi|} cos n theta].
inline double x1_bipolar_partial(const TwoDiskConfig& cfg, double xi, double theta, int terms) {
  double s = 1.0;
  for (int n = 1; n <= terms; ++n) s += 2.0 * std::exp(-n * std::abs(xi)) * std::cos(n * theta);
  return (xi < 0.0 ? -1.0 : 1.0) * cfg.alpha() * s;
}

struct SeriesValue {
  cplx value;
  double tail_bound;
  int terms;
};

namespace detail {

inline constexpr double kSeriesPoleTol = 1e-12;
inline constexpr double kSeriesRelTol = 1e-12;
inline constexpr int kSeriesMaxTerms = 1 << 22;

/// sum_{n > N} n q^n.
inline double weighted_geometric_tail(double q, int N) {
  return std::pow(q, N + 1) * ((N + 1) - N * q) / ((1.0 - q) * (1.0 - q));
}

/// Distance from lambda to {q^n / 2 : n > N}, bounded below by the segment [0, q^{N+1}/2].
inline double distance_to_tail_spectrum(cplx lambda, double q, int N) {
  const double top = 0.5 * std::pow(q, N + 1);
  const double x = std::clamp(lambda.real(), 0.0, top);
  return std::abs(lambda - cplx(x, 0.0));
}

inline void check_series_pole(cplx lambda, double q, int N) {
  if (std::abs(lambda.imag()) >= kSeriesPoleTol) return;
  for (int n = 1; n <= N; ++n)
    if (std::abs(lambda.real() - 0.5 * std::pow(q, n)) < kSeriesPoleTol)
      throw SeriesPole("lambda hits the eigenvalue of mode n=" + std::to_string(n));
}

/// Sums f(n) for n = 1.. with a bound tail(N), doubling N until the tail is below
/// the relative tolerance when `adaptive` is set.
template <class Term, class Tail>
SeriesValue adaptive_sum(int n_max, bool adaptive, Term term, Tail tail) {
  if (n_max < 1) throw OutOfRange("n_max must be >= 1");
  cplx s = 0.0;
  int n = 0;
  int target = n_max;
  for (;;) {
    for (; n < target; ++n) s += term(n + 1);
    const double t = tail(target);
    if (!adaptive || t <= kSeriesRelTol * std::abs(s) || target >= kSeriesMaxTerms) return {s, t, target};
    target = std::min(2 * target, kSeriesMaxTerms);
  }
}

}  // namespace detail

/// m11 = 8 pi alpha^2 sum_n n e^{-2 n xi0} / (lambda - e^{-2 n xi0}/2).
inline SeriesValue m11_eps(const TwoDiskConfig& cfg, cplx lambda, int n_max = 64, bool adaptive = true) {
  const double q = std::exp(-2.0 * cfg.xi0());
  const double c = 8.0 * kPi * cfg.alpha() * cfg.alpha();
  detail::check_series_pole(lambda, q, n_max);
  if (lambda == cplx(0.0)) throw SeriesPole("lambda = 0 is the accumulation point of the spectrum");
  return detail::adaptive_sum(
      n_max, adaptive,
      [&](int n) {
        const double qn = std::pow(q, n);
        const cplx den = lambda - 0.5 * qn;
        if (std::abs(den) < detail::kSeriesPoleTol)
          throw SeriesPole("lambda hits the eigenvalue of mode n=" + std::to_string(n));
        return c * n * qn / den;
      },
      [&](int N) {
        const double d = detail::distance_to_tail_spectrum(lambda, q, N);
        return d > 0.0 ? c * detail::weighted_geometric_tail(q, N) / d : HUGE_VAL;
      });
}

/// Inverts lambda1 = e^{-2 xi0}/2 together with r cosh xi0 = eps/2 + r.
inline double reconstruct_eps(double lambda1, double r) {
  if (!(lambda1 > 0.0 && lambda1 < 0.5)) throw OutOfRange("lambda1 must lie in (0, 1/2)");
  if (!(r > 0.0)) throw OutOfRange("radius must be positive");
  const double xi0 = -0.5 * std::log(2.0 * lambda1);
  return 2.0 * r * (std::cosh(xi0) - 1.0);
}

inline cplx lambda_of_k(cplx k) { return (k + 1.0) / (2.0 * (k - 1.0)); }
inline cplx k_of_lambda(cplx lambda) { return -(1.0 + 2.0 * lambda) / (1.0 - 2.0 * lambda); }

/// k for which the plus mode n resonates: -coth(n xi0).
inline double k_plus(const TwoDiskConfig& cfg, int n) { return -1.0 / std::tanh(std::abs(n) * cfg.xi0()); }

struct GapField {
  Eigen::Vector2cd field;  // grad u at the gap centre
  cplx Ep;
  double tail_bound;
  int terms;
};

/// Field at the gap centre under the uniform field E0 e_x:
/// E_p = E0 sum_n 4n e^{-2n xi0} (-1)^{n+1} (1-k)(k_n-1)/(k-k_n).
inline GapField gap_field(const TwoDiskConfig& cfg, cplx k, double E0, int n_max = 64, bool adaptive = true) {
  const double q = std::exp(-2.0 * cfg.xi0());
  GapField g;
  if (k == cplx(1.0)) {
    g.Ep = 0.0;
    g.tail_bound = 0.0;
    g.terms = 0;
  } else {
    if (std::abs(k.imag()) < detail::kSeriesPoleTol)
      for (int n = 1; n <= n_max; ++n)
        if (std::abs(k.real() - k_plus(cfg, n)) < detail::kSeriesPoleTol)
          throw SeriesPole("k hits the resonance of mode n=" + std::to_string(n));
    const cplx lambda = lambda_of_k(k);
    const SeriesValue sv = detail::adaptive_sum(
        n_max, adaptive,
        [&](int n) {
          const double kn = k_plus(cfg, n);
          const cplx den = k - kn;
          if (std::abs(den) < detail::kSeriesPoleTol)
            throw SeriesPole("k hits the resonance of mode n=" + std::to_string(n));
          const double alt = n % 2 == 1 ? 1.0 : -1.0;
          return E0 * 4.0 * n * std::pow(q, n) * alt * (1.0 - k) * (kn - 1.0) / den;
        },
        [&](int N) {
          const double d = detail::distance_to_tail_spectrum(lambda, q, N);
          return d > 0.0 ? 4.0 * std::abs(E0) * detail::weighted_geometric_tail(q, N) / d : HUGE_VAL;
        });
    g.Ep = sv.value;
    g.tail_bound = sv.tail_bound;
    g.terms = sv.terms;
  }
  g.field = Eigen::Vector2cd(E0 + g.Ep, 0.0);
  return g;
}

/// Only the resonant term n = N of the gap-field series.
inline cplx gap_field_single_mode(const TwoDiskConfig& cfg, cplx k, double E0, int N) {
  const double kn = k_plus(cfg, N);
  const double alt = N % 2 == 1 ? 1.0 : -1.0;
  return E0 * 4.0 * N * std::exp(-2.0 * N * cfg.xi0()) * alt * (1.0 - k) * (kn - 1.0) / (k - kn);
}

/// Small-gap estimate at k = k_N + i delta: E_p ~ i E0 (4 r / (N delta eps)) e^{-2N xi0} (-1)^{N+1}.
inline cplx gap_field_small_gap(const TwoDiskConfig& cfg, double delta, double E0, int N) {
  const double alt = N % 2 == 1 ? 1.0 : -1.0;
  return cplx(0.0, 1.0) * E0 * 4.0 * cfg.r() / (N * delta * cfg.eps()) * std::exp(-2.0 * N * cfg.xi0()) * alt;
}

}  // namespace npspec
