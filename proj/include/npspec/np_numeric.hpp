#pragma once

// Nystrom discretization of K* and S on one or more smooth closed curves, the
// symmetrized spectral problem, and dense resolvent solves.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "npspec/errors.hpp"
#include "npspec/geometry.hpp"

namespace npspec {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

inline constexpr double kOverlapDistance = 1e-9;
inline constexpr double kConditionLimit = 1e14;

/// Concatenated quadrature nodes of all curves.
struct NodeSet {
  std::vector<Point> points;
  std::vector<Point> normals;
  std::vector<double> thetas;
  std::vector<double> jacobians;
  std::vector<double> curvatures;
  std::vector<int> component;
  std::vector<Eigen::Index> offsets;  // start index of each curve, plus total
  VectorXd weights;

  Eigen::Index size() const { return Eigen::Index(points.size()); }
  int components() const { return int(offsets.size()) - 1; }
  Eigen::Index curve_size(int c) const { return offsets[c + 1] - offsets[c]; }

  VectorXd x() const {
    VectorXd v(size());
    for (Eigen::Index i = 0; i < size(); ++i) v[i] = points[i].x();
    return v;
  }
  VectorXd y() const {
    VectorXd v(size());
    for (Eigen::Index i = 0; i < size(); ++i) v[i] = points[i].y();
    return v;
  }
};

inline NodeSet make_nodes(std::span<const BoundaryCurve> curves) {
  if (curves.empty()) throw OutOfRange("need at least one curve");
  NodeSet ns;
  ns.offsets.push_back(0);
  std::vector<double> w;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const BoundaryCurve& cv = curves[c];
    if (cv.size() < 32 || cv.size() % 2 != 0)
      throw OutOfRange("each curve needs an even sample count >= 32");
    for (std::size_t j = 0; j < cv.size(); ++j) {
      ns.points.push_back(cv.points[j]);
      ns.normals.push_back(cv.normals[j]);
      ns.thetas.push_back(cv.thetas[j]);
      ns.jacobians.push_back(cv.jacobians[j]);
      ns.curvatures.push_back(cv.curvatures[j]);
      ns.component.push_back(int(c));
      w.push_back(cv.weight(j));
    }
    ns.offsets.push_back(Eigen::Index(ns.points.size()));
  }
  ns.weights = Eigen::Map<VectorXd>(w.data(), Eigen::Index(w.size()));

  double dmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ns.size(); ++i)
    for (Eigen::Index j = ns.offsets[ns.component[i] + 1]; j < ns.size(); ++j)
      dmin = std::min(dmin, (ns.points[i] - ns.points[j]).norm());
  if (dmin < kOverlapDistance)
    throw CurveOverlap("curves are closer than " + io::fmt(kOverlapDistance) + " (" + io::fmt(dmin) + ")");
  return ns;
}

enum class OperatorKind { np, single_layer };

struct DiscreteOperator {
  OperatorKind kind;
  MatrixXd matrix;
  NodeSet nodes;

  const VectorXd& weights() const { return nodes.weights; }
  Eigen::Index size() const { return matrix.rows(); }
};

/// K* with kernel <x-y, nu_x> / (2 pi |x-y|^2); the self term is kappa / (4 pi).
inline DiscreteOperator discretize_np(std::span<const BoundaryCurve> curves) {
  NodeSet ns = make_nodes(curves);
  const Eigen::Index n = ns.size();
  MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& x = ns.points[i];
    const Point& nu = ns.normals[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      double k;
      if (i == j) {
        k = ns.curvatures[i] / (4.0 * kPi);
      } else {
        const Point d = x - ns.points[j];
        k = d.dot(nu) / (2.0 * kPi * d.squaredNorm());
      }
      K(i, j) = k * ns.weights[j];
    }
  }
  return {OperatorKind::np, std::move(K), std::move(ns)};
}

inline DiscreteOperator discretize_np(const BoundaryCurve& curve) {
  return discretize_np(std::span<const BoundaryCurve>(&curve, 1));
}

namespace detail {

/// Quadrature weights for the periodic kernel ln|2 sin((t_i - t_j)/2)| on N
/// equispaced nodes, indexed by (i - j) mod N.
inline VectorXd log_sine_weights(Eigen::Index N) {
  const Eigen::Index half = N / 2;
  VectorXd R(N);
  for (Eigen::Index d = 0; d < N; ++d) {
    const double t = 2.0 * kPi * double(d) / double(N);
    double s = 0.0;
    for (Eigen::Index m = 1; m < half; ++m) s += std::cos(double(m) * t) / double(m);
    R[d] = -(2.0 * kPi / double(N)) * s - kPi / (double(N) * double(half)) * std::cos(double(half) * t);
  }
  return R;
}

}  // namespace detail

/// S with kernel ln|x-y| / (2 pi). Self blocks split off ln|2 sin((t-s)/2)| and
/// integrate it exactly against trigonometric interpolants; the smooth remainder
/// and cross-curve blocks use the trapezoid rule.
inline DiscreteOperator discretize_single_layer(std::span<const BoundaryCurve> curves) {
  NodeSet ns = make_nodes(curves);
  const Eigen::Index n = ns.size();
  MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (ns.component[i] != ns.component[j])
        S(i, j) = ns.weights[j] * std::log((ns.points[i] - ns.points[j]).norm()) / (2.0 * kPi);

  for (int c = 0; c < ns.components(); ++c) {
    const Eigen::Index o = ns.offsets[c];
    const Eigen::Index N = ns.curve_size(c);
    const VectorXd R = detail::log_sine_weights(N);
    const double h = 2.0 * kPi / double(N);
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index j = 0; j < N; ++j) {
        const Eigen::Index d = (i - j + N) % N;
        double smooth;
        if (i == j) {
          smooth = std::log(ns.jacobians[o + j]);
        } else {
          const double dt = ns.thetas[o + i] - ns.thetas[o + j];
          smooth = std::log((ns.points[o + i] - ns.points[o + j]).norm() / std::abs(2.0 * std::sin(0.5 * dt)));
        }
        S(o + i, o + j) = (R[d] + h * smooth) * ns.jacobians[o + j] / (2.0 * kPi);
      }
    }
  }
  return {OperatorKind::single_layer, std::move(S), std::move(ns)};
}

inline DiscreteOperator discretize_single_layer(const BoundaryCurve& curve) {
  return discretize_single_layer(std::span<const BoundaryCurve>(&curve, 1));
}

/// Energy form -<phi, S psi> in node coordinates, symmetrized.
inline MatrixXd energy_form(const DiscreteOperator& sl) {
  MatrixXd G = -(sl.weights().asDiagonal() * sl.matrix);
  return 0.5 * (G + G.transpose());
}

struct SpectralDecomposition {
  VectorXd eigenvalues;   // descending
  MatrixXd eigenvectors;  // columns, gram-orthonormal
  MatrixXd gram;          // energy form plus the per-component mean penalty
  MatrixXd energy;        // plain -<phi, S psi>
};

/// Generalized symmetric eigenproblem for K* under -<., S .>.
///
/// The plain energy form is only semi-definite (or indefinite when a component has
/// logarithmic capacity above one), so a rank-one term on each component's
/// integral is added. Densities with zero integral on every component are
/// untouched, and those are exactly the eigenvectors with eigenvalue != 1/2.
inline SpectralDecomposition numeric_spectrum(const DiscreteOperator& np, const DiscreteOperator& sl) {
  if (np.kind != OperatorKind::np || sl.kind != OperatorKind::single_layer || np.size() != sl.size())
    throw OutOfRange("numeric_spectrum needs matching NP and single-layer discretizations");
  const NodeSet& ns = np.nodes;
  const Eigen::Index n = np.size();

  SpectralDecomposition out;
  out.energy = energy_form(sl);
  MatrixXd G = out.energy;
  const double beta = (1.0 + out.energy.cwiseAbs().maxCoeff() * double(n)) / ns.weights.squaredNorm();
  for (int c = 0; c < ns.components(); ++c) {
    VectorXd u = VectorXd::Zero(n);
    u.segment(ns.offsets[c], ns.curve_size(c)) = ns.weights.segment(ns.offsets[c], ns.curve_size(c));
    G.noalias() += beta * u * u.transpose();
  }
  out.gram = G;

  Eigen::LLT<MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G, Eigen::EigenvaluesOnly);
    throw GramNotPositive("energy form is not positive definite (min eigenvalue " +
                          io::fmt(es.eigenvalues().minCoeff()) + ")");
  }
  MatrixXd A = G * np.matrix;
  A = 0.5 * (A + A.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(A, G, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) throw GramNotPositive("generalized eigensolve failed");
  out.eigenvalues = ges.eigenvalues().reverse();
  out.eigenvectors = ges.eigenvectors().rowwise().reverse();
  return out;
}

/// Solves (lambda I - K*) phi = rhs by LU with a reciprocal-condition check.
inline VectorXc resolvent_solve(const DiscreteOperator& np, cplx lambda, const VectorXc& rhs) {
  if (rhs.size() != np.size()) throw OutOfRange("rhs length does not match the discretization");
  MatrixXc A = -np.matrix.cast<cplx>();
  A.diagonal().array() += lambda;
  Eigen::PartialPivLU<MatrixXc> lu(A);
  const double rc = lu.rcond();
  if (!(rc * kConditionLimit > 1.0))
    throw NearSingular("lambda I - K* is near singular at lambda=" + io::fmt(lambda.real()) + "+" +
                       io::fmt(lambda.imag()) + "i (condition ~" + io::fmt(1.0 / rc) + ")");
  return lu.solve(rhs);
}

inline VectorXc resolvent_solve(const DiscreteOperator& np, cplx lambda, const VectorXd& rhs) {
  return resolvent_solve(np, lambda, VectorXc(rhs.cast<cplx>()));
}

/// S[phi](x) for x off the boundary (trapezoid rule; accurate a few node spacings away).
template <class Vec>
auto single_layer_at(const NodeSet& ns, const Vec& phi, const Point& x) {
  using T = typename Vec::Scalar;
  T s = T(0);
  for (Eigen::Index j = 0; j < ns.size(); ++j)
    s += ns.weights[j] * std::log((x - ns.points[j]).norm()) * phi[j];
  return s / (2.0 * kPi);
}

/// Gradient of S[phi] at an off-boundary point.
template <class Vec>
auto single_layer_gradient_at(const NodeSet& ns, const Vec& phi, const Point& x) {
  using T = typename Vec::Scalar;
  T gx = T(0), gy = T(0);
  for (Eigen::Index j = 0; j < ns.size(); ++j) {
    const Point d = x - ns.points[j];
    const double c = ns.weights[j] / (2.0 * kPi * d.squaredNorm());
    gx += c * d.x() * phi[j];
    gy += c * d.y() * phi[j];
  }
  return Eigen::Matrix<T, 2, 1>(gx, gy);
}

}  // namespace npspec
