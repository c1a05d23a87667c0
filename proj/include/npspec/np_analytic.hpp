#pragma once

// Closed-form action of K* and S on Fourier densities of class-Q domains, and the
// order-delta spectral theory built on the anti-diagonal matrix M.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "npspec/errors.hpp"
#include "npspec/geometry.hpp"

namespace npspec {

enum class Parity { cosine, sine };
enum class Weight { plain, over_J };

inline const char* to_string(Parity p) { return p == Parity::cosine ? "cosine" : "sine"; }

/// c0 + sum_n (c_n cos n theta + s_n sin n theta), optionally multiplied by 1/J.
/// Index 0 of `cos`/`sin` holds mode n = 1.
struct FourierSeries {
  double c0 = 0.0;
  std::vector<double> cos;
  std::vector<double> sin;
  Weight weight = Weight::plain;

  FourierSeries() = default;
  explicit FourierSeries(int n_max, Weight w = Weight::plain)
      : cos(std::size_t(std::max(n_max, 1)), 0.0), sin(std::size_t(std::max(n_max, 1)), 0.0), weight(w) {}

  int n_max() const { return int(cos.size()); }

  double& cos_at(int n) { return cos.at(std::size_t(n - 1)); }
  double& sin_at(int n) { return sin.at(std::size_t(n - 1)); }
  double cos_at(int n) const { return n <= n_max() ? cos[std::size_t(n - 1)] : 0.0; }
  double sin_at(int n) const { return n <= n_max() ? sin[std::size_t(n - 1)] : 0.0; }

  /// Value of the trigonometric part only (no 1/J factor).
  double trig(double theta) const {
    double v = c0;
    for (int n = 1; n <= n_max(); ++n)
      v += cos[std::size_t(n - 1)] * std::cos(n * theta) + sin[std::size_t(n - 1)] * std::sin(n * theta);
    return v;
  }

  double operator()(const AlgebraicDomain& dom, double theta) const {
    const double t = trig(theta);
    return weight == Weight::over_J ? t / jacobian(dom, theta) : t;
  }

  bool is_zero(double tol = 0.0) const {
    if (std::abs(c0) > tol) return false;
    for (double c : cos)
      if (std::abs(c) > tol) return false;
    for (double s : sin)
      if (std::abs(s) > tol) return false;
    return true;
  }
};

/// Samples of a series on a discretized curve of the same domain.
inline Eigen::VectorXd sample(const FourierSeries& f, const BoundaryCurve& c) {
  Eigen::VectorXd out(Eigen::Index(c.size()));
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double t = f.trig(c.thetas[j]);
    out[Eigen::Index(j)] = f.weight == Weight::over_J ? t / c.jacobians[j] : t;
  }
  return out;
}

namespace detail {

inline double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

inline void check_mode(const AlgebraicDomain& dom, int n) {
  if (n < 1 || n > dom.order())
    throw OutOfRange("closed form needs 1 <= n <= m (n=" + std::to_string(n) +
                     ", m=" + std::to_string(dom.order()) + ")");
}

inline void add_mode(FourierSeries& f, Parity p, int t, double c) {
  if (p == Parity::cosine)
    f.cos_at(t) += c;
  else
    f.sin_at(t) += c;
}

}  // namespace detail

/// K*[J^{-1} cos n theta] (or sin) for 1 <= n <= m. The result is exact, with
/// t_k = (m+1)k - n.
inline FourierSeries np_apply_fourier(const AlgebraicDomain& dom, int n, Parity parity) {
  detail::check_mode(dom, n);
  const int m = dom.order();
  const double d = dom.delta();
  FourierSeries out(m * n, Weight::over_J);
  const double sgn = parity == Parity::cosine ? 1.0 : -1.0;
  for (int k = 1; k <= n; ++k) {
    const int t = (m + 1) * k - n;
    detail::add_mode(out, parity, t, sgn * std::pow(d, k) * t / (2.0 * n) * detail::binomial(n, k));
  }
  return out;
}

/// Boundary trace of S[J^{-1} cos n theta] (or sin) for 1 <= n <= m.
inline FourierSeries single_layer_fourier(const AlgebraicDomain& dom, int n, Parity parity) {
  detail::check_mode(dom, n);
  const int m = dom.order();
  const double d = dom.delta();
  FourierSeries out(m * n, Weight::plain);
  const double sgn = parity == Parity::cosine ? -1.0 : 1.0;
  detail::add_mode(out, parity, n, -1.0 / (2.0 * n));
  for (int k = 1; k <= n; ++k) {
    const int t = (m + 1) * k - n;
    detail::add_mode(out, parity, t, sgn * std::pow(d, k) * detail::binomial(n, k) / (2.0 * n));
  }
  return out;
}

/// Anti-diagonal M with M(i, m+1-i) = i (1-based), so that K* ~ (delta/2) M on the
/// cosine coefficients of v_1..v_m.
inline Eigen::MatrixXd matrix_M(int m) {
  if (m < 1) throw OutOfRange("matrix_M needs m >= 1");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i <= m; ++i) M(i - 1, m - i) = i;
  return M;
}

struct MEigenpair {
  double eigenvalue;
  Eigen::VectorXd vector;  // unit Euclidean norm
  int j;                   // pairs mode j with mode m+1-j
  int sign;                // +1, -1, or 0 for the self-paired middle mode
};

/// Closed-form eigenpairs of matrix_M(m), sorted by decreasing eigenvalue.
inline std::vector<MEigenpair> matrix_M_spectrum(int m) {
  if (m < 1) throw OutOfRange("matrix_M_spectrum needs m >= 1");
  std::vector<MEigenpair> out;
  for (int j = 1; 2 * j <= m; ++j) {
    const int jj = m + 1 - j;
    const double mu = std::sqrt(double(j) * jj);
    for (int s : {1, -1}) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
      v[j - 1] = std::sqrt(double(j));
      v[jj - 1] = s * std::sqrt(double(jj));
      out.push_back({s * mu, v.normalized(), j, s});
    }
  }
  if (m % 2 == 1) {
    const int k = (m + 1) / 2;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    v[k - 1] = 1.0;
    out.push_back({double(k), v, k, 0});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const MEigenpair& a, const MEigenpair& b) { return a.eigenvalue > b.eigenvalue; });
  return out;
}

struct AsymptoticEigenpair {
  double eigenvalue;
  FourierSeries eigenfunction;  // over_J combination of v_1..v_m
  Parity parity;
  int j;
  int sign;
};

/// Order-delta eigenpairs: (delta/2) mu on cosine densities, -(delta/2) mu on sine
/// densities. Cosine entries come first, each block by decreasing eigenvalue.
inline std::vector<AsymptoticEigenpair> asymptotic_eigenpairs(const AlgebraicDomain& dom) {
  const int m = dom.order();
  const double half = 0.5 * dom.delta();
  std::vector<AsymptoticEigenpair> out;
  for (Parity p : {Parity::cosine, Parity::sine}) {
    const double sgn = p == Parity::cosine ? 1.0 : -1.0;
    std::vector<AsymptoticEigenpair> block;
    for (const auto& e : matrix_M_spectrum(m)) {
      FourierSeries f(m, Weight::over_J);
      for (int n = 1; n <= m; ++n) {
        if (p == Parity::cosine)
          f.cos_at(n) = e.vector[n - 1];
        else
          f.sin_at(n) = e.vector[n - 1];
      }
      block.push_back({sgn * half * e.eigenvalue, std::move(f), p, e.j, e.sign});
    }
    std::stable_sort(block.begin(), block.end(), [](const auto& a, const auto& b) {
      return a.eigenvalue > b.eigenvalue;
    });
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

inline std::vector<double> asymptotic_eigenvalues(const AlgebraicDomain& dom) {
  std::vector<double> v;
  for (const auto& e : asymptotic_eigenpairs(dom)) v.push_back(e.eigenvalue);
  return v;
}

}  // namespace npspec
