#pragma once

// Contracted generalized polarization tensors: direct resolvent quadrature,
// spectral sums, and the two-pole asymptotic formulas for class-Q domains.

#include <cmath>
#include <complex>
#include <string>

#include "npspec/errors.hpp"
#include "npspec/geometry.hpp"
#include "npspec/np_numeric.hpp"

namespace npspec {

/// First letter: real/imaginary part of the source P_m; second: of the test P_n.
enum class TensorKind { cc, cs, sc, ss };

inline TensorKind parse_tensor_kind(const std::string& s) {
  if (s == "cc") return TensorKind::cc;
  if (s == "cs") return TensorKind::cs;
  if (s == "sc") return TensorKind::sc;
  if (s == "ss") return TensorKind::ss;
  throw FormatError("tensor kind must be one of cc, cs, sc, ss");
}

/// Boundary trace of a harmonic function and its outward normal derivative.
struct HarmonicPair {
  VectorXd trace;
  VectorXd normal_derivative;
};

/// Re or Im of P_n = (x1 + i x2)^n on the nodes, with its normal derivative.
inline HarmonicPair harmonic_traces(const NodeSet& ns, int n, bool imaginary) {
  if (n < 1) throw OutOfRange("harmonic order must be >= 1");
  HarmonicPair h{VectorXd(ns.size()), VectorXd(ns.size())};
  for (Eigen::Index i = 0; i < ns.size(); ++i) {
    const cplx z = to_complex(ns.points[i]);
    const cplx nu = to_complex(ns.normals[i]);
    const cplx p = std::pow(z, n);
    const cplx dp = double(n) * std::pow(z, n - 1) * nu;
    h.trace[i] = imaginary ? p.imag() : p.real();
    h.normal_derivative[i] = imaginary ? dp.imag() : dp.real();
  }
  return h;
}

inline HarmonicPair x1_traces(const NodeSet& ns) { return harmonic_traces(ns, 1, false); }

/// int Q_n (lambda I - K*)^{-1}[dP_m/dnu] dsigma.
inline cplx gpt_direct(const DiscreteOperator& np, cplx lambda, int m, int n, TensorKind kind) {
  const bool src_im = kind == TensorKind::sc || kind == TensorKind::ss;
  const bool tst_im = kind == TensorKind::cs || kind == TensorKind::ss;
  const HarmonicPair src = harmonic_traces(np.nodes, m, src_im);
  const HarmonicPair tst = harmonic_traces(np.nodes, n, tst_im);
  const VectorXc phi = resolvent_solve(np, lambda, src.normal_derivative);
  return (np.weights().cwiseProduct(tst.trace)).cast<cplx>().dot(phi);
}

inline cplx gpt_direct(std::span<const BoundaryCurve> curves, cplx lambda, int m, int n, TensorKind kind) {
  return gpt_direct(discretize_np(curves), lambda, m, n, kind);
}

inline cplx gpt_direct(const BoundaryCurve& curve, cplx lambda, int m, int n, TensorKind kind) {
  return gpt_direct(discretize_np(curve), lambda, m, n, kind);
}

namespace detail {
inline constexpr double kTopModeGap = 1e-8;
}

/// sum_j (1/2 - lambda_j)/(lambda - lambda_j) <H, phi_j>^2 / <phi_j, -S phi_j>.
/// Modes at 1/2 carry no weight and are skipped.
inline cplx gpt_spectral_sum(const SpectralDecomposition& dec, const DiscreteOperator& sl, cplx lambda,
                             const HarmonicPair& harmonic) {
  const VectorXd& w = sl.weights();
  const VectorXd wh = w.cwiseProduct(harmonic.trace);
  cplx total = 0.0;
  for (Eigen::Index j = 0; j < dec.eigenvalues.size(); ++j) {
    const double lj = dec.eigenvalues[j];
    if (std::abs(0.5 - lj) < detail::kTopModeGap) continue;
    const VectorXd phi = dec.eigenvectors.col(j);
    const double a = wh.dot(phi);
    const double norm = -w.dot(phi.cwiseProduct(sl.matrix * phi));
    if (lambda == cplx(lj))
      throw NearSingular("lambda coincides with a discrete eigenvalue " + io::fmt(lj));
    total += (0.5 - lj) * a * a / norm / (lambda - lj);
  }
  return total;
}

/// sum_j <Q, phi_j> <phi_j, g>_gram / (lambda - lambda_j): the full eigen-expansion of
/// the resolvent applied to a source density g and tested against a trace Q.
inline cplx gpt_spectral_sum(const SpectralDecomposition& dec, const VectorXd& weights, cplx lambda,
                             const VectorXd& source, const VectorXd& test) {
  const VectorXd wq = weights.cwiseProduct(test);
  const VectorXd gg = dec.gram * source;
  cplx total = 0.0;
  for (Eigen::Index j = 0; j < dec.eigenvalues.size(); ++j) {
    const double lj = dec.eigenvalues[j];
    if (lambda == cplx(lj))
      throw NearSingular("lambda coincides with a discrete eigenvalue " + io::fmt(lj));
    const auto phi = dec.eigenvectors.col(j);
    total += wq.dot(phi) * phi.dot(gg) / (lambda - lj);
  }
  return total;
}

struct AsymptoticOptions {
  bool allow_even_m = false;  // extension: even m uses the j = 1 pair of matrix_M
  enum class M22Form { printed, corrected } m22 = M22Form::printed;
};

namespace detail {

inline void check_pole(cplx lambda, double pole) {
  if (lambda.imag() == 0.0 && lambda.real() == pole)
    throw ExactPole("lambda sits exactly on the pole " + io::fmt(pole));
}

}  // namespace detail

/// Poles +-(delta/2) sqrt(m) of the m11 approximation.
inline double m11_pole(const AlgebraicDomain& dom) { return 0.5 * dom.delta() * std::sqrt(double(dom.order())); }

/// Poles +-(delta/2) sqrt(2(m-1)) of the M22cc approximation.
inline double m22_pole(const AlgebraicDomain& dom) {
  return 0.5 * dom.delta() * std::sqrt(2.0 * (dom.order() - 1));
}

inline cplx m11_asymptotic(const AlgebraicDomain& dom, cplx lambda, const AsymptoticOptions& opt = {}) {
  if (dom.order() % 2 == 0 && !opt.allow_even_m && dom.delta() != 0.0)
    throw OutOfRange("m11 approximation is stated for odd m; enable the even-m extension");
  const double lp = m11_pole(dom);
  detail::check_pole(lambda, lp);
  detail::check_pole(lambda, -lp);
  return 0.5 * kPi * std::exp(2.0 * dom.rho0()) * (1.0 / (lambda - lp) + 1.0 / (lambda + lp));
}

/// M22cc approximation. The printed form weights the two poles by
/// (1/2 -+ lambda')/(1/2 +- lambda'); the corrected form uses unit residues, and for
/// m = 3 a single pole at delta with weight 2.
inline cplx m22cc_asymptotic(const AlgebraicDomain& dom, cplx lambda, const AsymptoticOptions& opt = {}) {
  const double scale = kPi * std::exp(4.0 * dom.rho0());
  if (dom.delta() == 0.0) {
    detail::check_pole(lambda, 0.0);
    return 2.0 * scale / lambda;
  }
  if (dom.order() < 2) throw OutOfRange("M22cc approximation needs m >= 2");
  const double lp = m22_pole(dom);
  const double lm = -lp;
  detail::check_pole(lambda, lp);
  if (opt.m22 == AsymptoticOptions::M22Form::corrected) {
    if (dom.order() == 3) return 2.0 * scale / (lambda - lp);
    detail::check_pole(lambda, lm);
    return scale * (1.0 / (lambda - lp) + 1.0 / (lambda - lm));
  }
  detail::check_pole(lambda, lm);
  return scale * ((0.5 - lp) / ((0.5 + lp) * (lambda - lp)) + (0.5 + lm) / ((0.5 - lm) * (lambda - lm)));
}

}  // namespace npspec
