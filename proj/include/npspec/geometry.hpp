#pragma once

// Class-Q algebraic domains (images of a circle under zeta + a / zeta^m) and
// uniformly sampled closed boundary curves.

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "npspec/errors.hpp"
#include "npspec/io.hpp"

namespace npspec {

using Point = Eigen::Vector2d;
using cplx = std::complex<double>;

inline Point to_point(cplx z) { return {z.real(), z.imag()}; }
inline cplx to_complex(const Point& p) { return {p.x(), p.y()}; }

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kJacobianFloor = 1e-12;

/// Shape record (rho0, m, delta) of a class-Q domain.
///
/// The boundary is theta -> e^{rho0} (e^{i theta} + delta e^{-i m theta}); m and delta
/// fix the shape, rho0 only the size. Construction enforces |delta| < 1/m, which keeps
/// the derivative of the conformal map nonvanishing on |zeta| >= e^{rho0}.
class AlgebraicDomain {
 public:
  AlgebraicDomain(double rho0, int m, double delta) : rho0_(rho0), m_(m), delta_(delta) {
    if (m < 1) throw InvalidDomain("polynomial order m must be >= 1, got " + std::to_string(m));
    if (!std::isfinite(rho0) || !std::isfinite(delta))
      throw InvalidDomain("rho0 and delta must be finite");
    if (std::abs(delta) * m >= 1.0)
      throw InvalidDomain("|delta| must be < 1/m for an injective map (delta=" + io::fmt(delta) +
                          ", m=" + std::to_string(m) + ")");
  }

  static AlgebraicDomain disk(double rho0 = 0.0) { return {rho0, 1, 0.0}; }

  double rho0() const { return rho0_; }
  int order() const { return m_; }
  double delta() const { return delta_; }
  double radius() const { return std::exp(rho0_); }

  /// Coefficient a of Phi(zeta) = zeta + a / zeta^m, a = e^{(m+1) rho0} delta.
  double a() const { return std::exp((m_ + 1) * rho0_) * delta_; }

  cplx map(cplx zeta) const { return zeta + a() / std::pow(zeta, m_); }

  cplx boundary(double theta) const {
    return radius() * (std::polar(1.0, theta) + delta_ * std::polar(1.0, -m_ * theta));
  }

  /// d/dxi Phi(e^xi) at xi = rho0 + i theta. Also the unnormalized outward normal.
  cplx map_derivative(double theta) const {
    return radius() * (std::polar(1.0, theta) - m_ * delta_ * std::polar(1.0, -m_ * theta));
  }

  /// Signed curvature of the counter-clockwise boundary at theta.
  double curvature(double theta) const {
    const cplx dz = cplx(0.0, 1.0) * map_derivative(theta);
    const cplx d2z = -radius() * (std::polar(1.0, theta) +
                                  double(m_) * m_ * delta_ * std::polar(1.0, -m_ * theta));
    const double speed = std::abs(dz);
    return std::imag(std::conj(dz) * d2z) / (speed * speed * speed);
  }

  /// Enclosed area pi (e^{2 rho0} - m a^2 e^{-2 m rho0}).
  double area() const {
    const double r2 = std::exp(2.0 * rho0_);
    return kPi * (r2 - m_ * a() * a() * std::exp(-2.0 * m_ * rho0_));
  }

 private:
  double rho0_;
  int m_;
  double delta_;
};

inline Point boundary_point(const AlgebraicDomain& dom, double theta) {
  return to_point(dom.boundary(theta));
}

inline double jacobian(const AlgebraicDomain& dom, double theta) {
  const double j = std::abs(dom.map_derivative(theta));
  if (!(j >= kJacobianFloor))
    throw DegenerateParametrization("jacobian " + io::fmt(j) + " below floor at theta=" +
                                    io::fmt(theta));
  return j;
}

/// Uniform-angle samples of a closed curve. `jacobians` are |dx/dtheta| so the
/// trapezoid weight of node j is jacobians[j] * 2 pi / N.
struct BoundaryCurve {
  std::vector<double> thetas;
  std::vector<Point> points;
  std::vector<double> jacobians;
  std::vector<Point> normals;
  std::vector<double> curvatures;

  std::size_t size() const { return points.size(); }
  double weight(std::size_t j) const { return jacobians[j] * 2.0 * kPi / double(size()); }

  double arc_length() const {
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += weight(j);
    return s;
  }
};

/// Shoelace area of the sampled polygon (positive for counter-clockwise order).
inline double shoelace_area(const BoundaryCurve& c) {
  double twice = 0.0;
  const std::size_t n = c.size();
  for (std::size_t j = 0; j < n; ++j) {
    const Point& p = c.points[j];
    const Point& q = c.points[(j + 1) % n];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * twice;
}

inline double polygon_length(const BoundaryCurve& c) {
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) s += (c.points[(j + 1) % c.size()] - c.points[j]).norm();
  return s;
}

inline int winding_number(const BoundaryCurve& c, const Point& about) {
  double turn = 0.0;
  const std::size_t n = c.size();
  for (std::size_t j = 0; j < n; ++j) {
    const cplx a = to_complex(c.points[j] - about);
    const cplx b = to_complex(c.points[(j + 1) % n] - about);
    turn += std::arg(b / a);
  }
  return int(std::lround(turn / (2.0 * kPi)));
}

namespace detail {

inline void check_orientation(const BoundaryCurve& c, const Point& interior) {
  if (winding_number(c, interior) != 1 || shoelace_area(c) <= 0.0)
    throw DegenerateParametrization("sampled curve is not a simple counter-clockwise loop");
}

inline void check_sample_count(int n) {
  if (n < 8 || n % 2 != 0)
    throw OutOfRange("sample count must be even and >= 8, got " + std::to_string(n));
}

}  // namespace detail

inline BoundaryCurve discretize(const AlgebraicDomain& dom, int n) {
  detail::check_sample_count(n);
  BoundaryCurve c;
  c.thetas.reserve(n);
  c.points.reserve(n);
  c.jacobians.reserve(n);
  c.normals.reserve(n);
  c.curvatures.reserve(n);
  for (int j = 0; j < n; ++j) {
    const double theta = 2.0 * kPi * j / n;
    const double jac = jacobian(dom, theta);
    // tangent i*Phi' rotated by -90 degrees is Phi' itself
    const cplx normal = dom.map_derivative(theta) / jac;
    c.thetas.push_back(theta);
    c.points.push_back(boundary_point(dom, theta));
    c.jacobians.push_back(jac);
    c.normals.push_back(to_point(normal));
    c.curvatures.push_back(dom.curvature(theta));
  }
  // Phi has no zeros outside the inner circle, so the origin is interior.
  detail::check_orientation(c, Point::Zero());
  return c;
}

inline BoundaryCurve discretize_circle(const Point& center, double radius, int n) {
  detail::check_sample_count(n);
  if (!(radius > 0.0)) throw InvalidDomain("circle radius must be positive");
  BoundaryCurve c;
  for (int j = 0; j < n; ++j) {
    const double theta = 2.0 * kPi * j / n;
    const Point u(std::cos(theta), std::sin(theta));
    c.thetas.push_back(theta);
    c.points.push_back(center + radius * u);
    c.jacobians.push_back(radius);
    c.normals.push_back(u);
    c.curvatures.push_back(1.0 / radius);
  }
  return c;
}

inline void write_csv(std::ostream& os, const BoundaryCurve& c) {
  os << "theta,x,y,jacobian,nx,ny\n";
  for (std::size_t j = 0; j < c.size(); ++j) {
    os << io::fmt(c.thetas[j]) << ',' << io::fmt(c.points[j].x()) << ',' << io::fmt(c.points[j].y())
       << ',' << io::fmt(c.jacobians[j]) << ',' << io::fmt(c.normals[j].x()) << ','
       << io::fmt(c.normals[j].y()) << '\n';
  }
}

}  // namespace npspec
