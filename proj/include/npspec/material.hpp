#pragma once

// Wavelength -> contrast lambda through a Drude permittivity, plus a synthetic
// linear sweep used for controlled round-trip tests.

#include <cmath>
#include <complex>
#include <concepts>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "npspec/errors.hpp"
#include "npspec/geometry.hpp"
#include "npspec/io.hpp"

namespace npspec {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Angular frequency (rad/s) of a vacuum wavelength in nm.
inline double omega_of_wavelength(double wl_nm) { return 2.0 * kPi * kSpeedOfLight / (wl_nm * 1e-9); }

/// lambda = (sigma + 1) / (2 (sigma - 1)).
inline cplx lambda_of_sigma(cplx sigma) {
  if (std::abs(sigma - 1.0) < 1e-14) throw NoContrast("sigma = 1 carries no contrast");
  return (sigma + 1.0) / (2.0 * (sigma - 1.0));
}

inline cplx sigma_of_lambda(cplx lambda) { return (2.0 * lambda + 1.0) / (2.0 * lambda - 1.0); }

/// Drude metal in a uniform background. Defaults put sigma = -1 at 600 nm.
struct DrudeModel {
  double omega_p = std::sqrt(2.0) * 2.0 * kPi * kSpeedOfLight / 600e-9;  // rad/s
  double inv_tau = 1.0e14;                                              // rad/s
  double eps_bg = 1.0;
  double wl_min = 400.0;  // nm
  double wl_max = 800.0;  // nm

  void validate() const {
    if (!(omega_p > 0.0) || !(inv_tau > 0.0)) throw OutOfRange("omega_p and inv_tau must be positive");
    if (!(eps_bg > 0.0)) throw OutOfRange("eps_bg must be positive");
    if (!(wl_min > 0.0) || !(wl_max > wl_min)) throw OutOfRange("need 0 < wl_min < wl_max");
  }

  cplx sigma(double wl) const {
    if (!(wl >= wl_min && wl <= wl_max))
      throw OutOfRange("wavelength " + io::fmt(wl) + " nm outside [" + io::fmt(wl_min) + ", " +
                       io::fmt(wl_max) + "]");
    const double w = omega_of_wavelength(wl);
    const cplx eps_metal = 1.0 - omega_p * omega_p / cplx(w * w, w * inv_tau);
    return eps_metal / eps_bg;
  }

  cplx lambda(double wl) const { return lambda_of_sigma(sigma(wl)); }
  double lo() const { return wl_min; }
  double hi() const { return wl_max; }
};

inline cplx sigma_of_wavelength(const DrudeModel& m, double wl) { return m.sigma(wl); }
inline cplx lambda_of_wavelength(const DrudeModel& m, double wl) { return m.lambda(wl); }

/// Reads `key = value` lines (omega_p, inv_tau, eps_bg, wl_min, wl_max); '#' starts a comment.
inline DrudeModel parse_drude_config(std::istream& in) {
  DrudeModel m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw FormatError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const double v = io::parse_double(trim(line.substr(eq + 1)));
    if (key == "omega_p")
      m.omega_p = v;
    else if (key == "inv_tau")
      m.inv_tau = v;
    else if (key == "eps_bg")
      m.eps_bg = v;
    else if (key == "wl_min")
      m.wl_min = v;
    else if (key == "wl_max")
      m.wl_max = v;
    else
      throw FormatError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  m.validate();
  return m;
}

inline DrudeModel load_drude_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open material config '" + path + "'");
  return parse_drude_config(f);
}

/// Re lambda linear in wavelength with a constant imaginary part.
struct LinearSweep {
  double wl_min = 400.0, wl_max = 800.0;
  double re_at_min = -0.12, re_at_max = 0.12;
  double im = 1e-3;

  cplx lambda(double wl) const {
    if (!(wl >= wl_min && wl <= wl_max)) throw OutOfRange("wavelength outside the sweep range");
    const double t = (wl - wl_min) / (wl_max - wl_min);
    return {re_at_min + t * (re_at_max - re_at_min), im};
  }
  double lo() const { return wl_min; }
  double hi() const { return wl_max; }
};

template <class M>
concept ContrastModel = requires(const M& m, double wl) {
  { m.lambda(wl) } -> std::convertible_to<cplx>;
  { m.lo() } -> std::convertible_to<double>;
  { m.hi() } -> std::convertible_to<double>;
};

/// Number of sign changes of Re lambda - target on `count` uniform samples.
template <ContrastModel M>
int count_crossings(const M& model, double target, int count = 2001) {
  int n = 0;
  double prev = model.lambda(model.lo()).real() - target;
  for (int i = 1; i < count; ++i) {
    const double wl = model.lo() + (model.hi() - model.lo()) * i / (count - 1);
    const double cur = model.lambda(wl).real() - target;
    if ((prev < 0.0) != (cur < 0.0)) ++n;
    prev = cur;
  }
  return n;
}

}  // namespace npspec
