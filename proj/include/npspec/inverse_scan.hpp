#pragma once

// Forward resonance scans over wavelength, peak detection, and the inverse steps
// recovering (rho0, m, delta) of a class-Q domain or the gap of two disks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "npspec/errors.hpp"
#include "npspec/geometry.hpp"
#include "npspec/gpt.hpp"
#include "npspec/io.hpp"
#include "npspec/material.hpp"
#include "npspec/np_numeric.hpp"
#include "npspec/twodisks.hpp"

namespace npspec {

struct WavelengthGrid {
  double wl_min = 400.0;
  double wl_max = 800.0;
  int count = 4001;

  std::vector<double> points() const {
    if (count < 16) throw OutOfRange("wavelength grid needs at least 16 points");
    if (!(wl_max > wl_min)) throw OutOfRange("wavelength grid needs wl_min < wl_max");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[std::size_t(i)] = wl_min + (wl_max - wl_min) * i / (count - 1);
    v.back() = wl_max;
    return v;
  }
};

enum class Trace { m11, m22cc };

inline const char* to_string(Trace t) { return t == Trace::m11 ? "m11" : "m22cc"; }

struct ResonanceScan {
  std::vector<double> wavelengths;  // nm, strictly increasing
  std::vector<cplx> lambdas;
  std::vector<cplx> m11;
  std::vector<cplx> m22cc;  // empty when not computed

  std::size_t size() const { return wavelengths.size(); }
  bool has_m22() const { return !m22cc.empty(); }

  const std::vector<cplx>& trace(Trace t) const {
    if (t == Trace::m22cc && !has_m22()) throw OutOfRange("scan carries no M22cc trace");
    return t == Trace::m11 ? m11 : m22cc;
  }

  void validate() const {
    const std::size_t n = size();
    if (n < 3) throw FormatError("scan needs at least three rows");
    if (lambdas.size() != n || m11.size() != n || (has_m22() && m22cc.size() != n))
      throw FormatError("scan columns have different lengths");
    for (std::size_t i = 1; i < n; ++i)
      if (!(wavelengths[i] > wavelengths[i - 1])) throw FormatError("scan wavelengths must increase strictly");
    for (const cplx& v : m11)
      if (!std::isfinite(std::abs(v))) throw FormatError("scan m11 trace is not finite");
  }
};

namespace detail {

inline AsymptoticOptions scan_options(AsymptoticOptions opt) {
  opt.allow_even_m = true;
  return opt;
}

}  // namespace detail

/// Asymptotic traces for a class-Q target. M22cc is omitted for m = 1 ellipses.
template <ContrastModel M>
ResonanceScan forward_scan(const AlgebraicDomain& dom, const M& model, const WavelengthGrid& grid,
                           AsymptoticOptions opt = {}) {
  opt = detail::scan_options(opt);
  const bool with_m22 = dom.order() >= 2 || dom.delta() == 0.0;
  ResonanceScan s;
  for (double wl : grid.points()) {
    const cplx lam = model.lambda(wl);
    s.wavelengths.push_back(wl);
    s.lambdas.push_back(lam);
    s.m11.push_back(m11_asymptotic(dom, lam, opt));
    if (with_m22) s.m22cc.push_back(m22cc_asymptotic(dom, lam, opt));
  }
  return s;
}

/// Exact-series traces for two disks (no M22cc).
template <ContrastModel M>
ResonanceScan forward_scan(const TwoDiskConfig& cfg, const M& model, const WavelengthGrid& grid) {
  ResonanceScan s;
  for (double wl : grid.points()) {
    const cplx lam = model.lambda(wl);
    s.wavelengths.push_back(wl);
    s.lambdas.push_back(lam);
    s.m11.push_back(m11_eps(cfg, lam).value);
  }
  return s;
}

namespace detail {

template <ContrastModel M>
ResonanceScan oracle_scan(const DiscreteOperator& np, const M& model, const WavelengthGrid& grid, bool with_m22) {
  ResonanceScan s;
  const HarmonicPair p1 = harmonic_traces(np.nodes, 1, false);
  const HarmonicPair p2 = harmonic_traces(np.nodes, 2, false);
  const VectorXc w1 = np.weights().cwiseProduct(p1.trace).cast<cplx>();
  const VectorXc w2 = np.weights().cwiseProduct(p2.trace).cast<cplx>();
  for (double wl : grid.points()) {
    const cplx lam = model.lambda(wl);
    s.wavelengths.push_back(wl);
    s.lambdas.push_back(lam);
    s.m11.push_back(w1.dot(resolvent_solve(np, lam, p1.normal_derivative)));
    if (with_m22) s.m22cc.push_back(w2.dot(resolvent_solve(np, lam, p2.normal_derivative)));
  }
  return s;
}

}  // namespace detail

/// Traces from Nystrom resolvent solves on N nodes.
template <ContrastModel M>
ResonanceScan forward_scan_oracle(const AlgebraicDomain& dom, const M& model, const WavelengthGrid& grid,
                                  int N = 256) {
  return detail::oracle_scan(discretize_np(discretize(dom, N)), model, grid, true);
}

template <ContrastModel M>
ResonanceScan forward_scan_oracle(const TwoDiskConfig& cfg, const M& model, const WavelengthGrid& grid,
                                  int N = 256) {
  const auto curves = disk_curves(cfg, N);
  return detail::oracle_scan(discretize_np(curves), model, grid, false);
}

struct Peak {
  double position;  // refined abscissa
  double height;    // refined ordinate
  double prominence;
  std::size_t index;  // grid index of the sampled maximum
};

/// Vertex of the parabola through three points (non-uniform spacing allowed).
inline std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double a = x0 - x1, b = x2 - x1;  // local coordinates around x1
  const double denom = a * b * (a - b);
  if (denom == 0.0) return {x1, y1};
  const double A = (b * (y0 - y1) - a * (y2 - y1)) / denom;
  const double B = (a * a * (y2 - y1) - b * b * (y0 - y1)) / denom;
  if (!(A < 0.0)) return {x1, y1};
  const double t = std::clamp(-B / (2.0 * A), std::min(a, b), std::max(a, b));
  return {x1 + t, y1 + B * t + A * t * t};
}

/// Strict local maxima of y whose topographic prominence is at least
/// `prominence` times max(y), refined by three-point parabolic interpolation.
inline std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y, double prominence) {
  if (x.size() != y.size()) throw OutOfRange("peak search needs matching abscissae and values");
  std::vector<Peak> out;
  const std::size_t n = y.size();
  if (n < 3) return out;
  const double ymax = *std::max_element(y.begin(), y.end());
  const double thresh = prominence * ymax;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] > y[i + 1])) continue;
    double lmin = y[i];
    for (std::size_t j = i; j-- > 0;) {
      if (y[j] > y[i]) break;
      lmin = std::min(lmin, y[j]);
    }
    double rmin = y[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (y[j] > y[i]) break;
      rmin = std::min(rmin, y[j]);
    }
    const double prom = y[i] - std::max(lmin, rmin);
    if (!(prom > 0.0) || prom < thresh) continue;
    const auto [px, py] = parabola_vertex(x[i - 1], y[i - 1], x[i], y[i], x[i + 1], y[i + 1]);
    out.push_back({px, py, prom, i});
  }
  return out;
}

struct ScanPeak {
  double wavelength;
  cplx lambda;  // interpolated at the refined wavelength
  double height;
  double prominence;
  Trace trace;
};

inline constexpr double kDefaultProminence = 0.05;

inline cplx interpolate_lambda(const ResonanceScan& s, double wl) {
  const auto it = std::upper_bound(s.wavelengths.begin(), s.wavelengths.end(), wl);
  std::size_t i = std::size_t(std::max<std::ptrdiff_t>(1, it - s.wavelengths.begin()));
  i = std::min(i, s.size() - 1);
  const double t = (wl - s.wavelengths[i - 1]) / (s.wavelengths[i] - s.wavelengths[i - 1]);
  return s.lambdas[i - 1] + t * (s.lambdas[i] - s.lambdas[i - 1]);
}

/// Peaks of |trace| sorted by wavelength.
inline std::vector<ScanPeak> detect_peaks(const ResonanceScan& scan, double prominence = kDefaultProminence,
                                          Trace trace = Trace::m11) {
  scan.validate();
  const auto& tr = scan.trace(trace);
  std::vector<double> mag(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) mag[i] = std::abs(tr[i]);
  std::vector<ScanPeak> out;
  for (const Peak& p : find_peaks(scan.wavelengths, mag, prominence))
    out.push_back({p.position, interpolate_lambda(scan, p.position), p.height, p.prominence, trace});
  if (out.empty()) throw NoPeaks(std::string("no ") + to_string(trace) + " peak exceeds the prominence threshold");
  return out;
}

struct Classification {
  int m;
  double delta;
  double m_real;
  double residual;  // |m_real - m|
};

/// m = lp^2 / (lp^2 - lpp^2/2), delta = 2 sqrt(lp^2 - lpp^2/2).
inline Classification classify_domain(double lambda_plus, double lambda_plus_prime) {
  const double den = lambda_plus * lambda_plus - 0.5 * lambda_plus_prime * lambda_plus_prime;
  if (!(den > 0.0)) throw Inconsistent("lambda_+^2 must exceed lambda_+'^2 / 2");
  const double m_real = lambda_plus * lambda_plus / den;
  const double m = std::round(m_real);
  const double res = std::abs(m_real - m);
  if (res > 0.25 || m < 1.0)
    throw Inconsistent("recovered order " + io::fmt(m_real) + " is not close to a positive integer");
  return {int(m), 2.0 * std::sqrt(den), m_real, res};
}

/// Solves height = (pi/2) e^{2 rho0} |1/(i eta) + 1/(lambda_+ - lambda_- + i eta)| for rho0.
inline double size_from_peak(double peak_height, double im_lambda_at_peak, double lambda_plus, double lambda_minus) {
  const double eta = std::abs(im_lambda_at_peak);
  if (!(eta > 0.0)) throw IllConditioned("peak needs a nonzero imaginary part of lambda");
  if (!(peak_height > 0.0)) throw IllConditioned("peak height must be positive");
  const double sep = std::abs(lambda_plus - lambda_minus);
  if (sep > 0.0 && sep < 3.0 * eta) throw IllConditioned("poles closer than 3 Im(lambda); peak heights blend");
  const double factor = 0.5 * kPi * std::abs(1.0 / cplx(0.0, eta) + 1.0 / cplx(sep, eta));
  return 0.5 * std::log(peak_height / factor);
}

struct ShapeReconstruction {
  int m;
  double delta;
  double rho0;
  double m_real;
  double residual;
  double lambda_plus;
  double lambda_plus_prime;
  bool disk;
  std::vector<ScanPeak> m11_peaks;
  std::vector<ScanPeak> m22_peaks;
};

namespace detail {

inline const ScanPeak* tallest_positive(const std::vector<ScanPeak>& peaks) {
  const ScanPeak* best = nullptr;
  for (const auto& p : peaks)
    if (p.lambda.real() > 0.0 && (!best || p.height > best->height)) best = &p;
  return best;
}

}  // namespace detail

/// Recovers (rho0, m, delta) from the positive-side m11 and M22cc peaks. A lone
/// m11 peak at Re lambda ~ 0 is read as a disk.
inline ShapeReconstruction reconstruct_shape(const ResonanceScan& scan, double prominence = kDefaultProminence) {
  ShapeReconstruction r{};
  r.m11_peaks = detect_peaks(scan, prominence, Trace::m11);
  if (scan.has_m22()) r.m22_peaks = detect_peaks(scan, prominence, Trace::m22cc);

  if (r.m11_peaks.size() == 1 &&
      std::abs(r.m11_peaks[0].lambda.real()) <= 3.0 * std::abs(r.m11_peaks[0].lambda.imag())) {
    const ScanPeak& p = r.m11_peaks[0];
    r.disk = true;
    r.m = 1;
    r.delta = 0.0;
    r.m_real = 1.0;
    r.rho0 = size_from_peak(p.height, p.lambda.imag(), 0.0, 0.0);
    return r;
  }

  const ScanPeak* lp = detail::tallest_positive(r.m11_peaks);
  if (!lp) throw NoPeaks("no m11 peak on the positive lambda side");
  r.lambda_plus = lp->lambda.real();
  if (scan.has_m22()) {
    const ScanPeak* lpp = detail::tallest_positive(r.m22_peaks);
    if (!lpp) throw NoPeaks("no M22cc peak on the positive lambda side");
    r.lambda_plus_prime = lpp->lambda.real();
  }
  const Classification c = classify_domain(r.lambda_plus, r.lambda_plus_prime);
  r.m = c.m;
  r.delta = c.delta;
  r.m_real = c.m_real;
  r.residual = c.residual;
  r.rho0 = size_from_peak(lp->height, lp->lambda.imag(), r.lambda_plus, -r.lambda_plus);
  return r;
}

struct GapReconstruction {
  double eps;
  double lambda1;
  ScanPeak peak;
};

/// Dominant m11 peak gives lambda_1 = e^{-2 xi0}/2, inverted for the gap.
inline GapReconstruction reconstruct_gap_from_scan(const ResonanceScan& scan, double r,
                                                   double prominence = kDefaultProminence) {
  const auto peaks = detect_peaks(scan, prominence, Trace::m11);
  const auto it = std::max_element(peaks.begin(), peaks.end(),
                                   [](const ScanPeak& a, const ScanPeak& b) { return a.height < b.height; });
  const double l1 = it->lambda.real();
  return {reconstruct_eps(l1, r), l1, *it};
}

inline void write_scan_csv(std::ostream& os, const ResonanceScan& s) {
  os << "wavelength_nm,re_lambda,im_lambda,abs_m11,abs_m22cc\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << io::fmt(s.wavelengths[i]) << ',' << io::fmt(s.lambdas[i].real()) << ',' << io::fmt(s.lambdas[i].imag())
       << ',' << io::fmt(std::abs(s.m11[i])) << ',';
    if (s.has_m22()) os << io::fmt(std::abs(s.m22cc[i]));
    os << '\n';
  }
}

/// Reads the CSV written by write_scan_csv. Traces come back as magnitudes; an
/// all-empty abs_m22cc column means no M22cc trace.
inline ResonanceScan read_scan_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty scan file");
  const auto header = io::split_csv_line(line);
  const std::vector<std::string> want{"wavelength_nm", "re_lambda", "im_lambda", "abs_m11", "abs_m22cc"};
  if (header != want) throw FormatError("unexpected scan header '" + line + "'");
  ResonanceScan s;
  std::vector<std::optional<double>> m22;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = io::split_csv_line(line);
    if (cells.size() != 5) throw FormatError("line " + std::to_string(lineno) + ": expected 5 columns");
    s.wavelengths.push_back(io::parse_double(cells[0]));
    s.lambdas.emplace_back(io::parse_double(cells[1]), io::parse_double(cells[2]));
    s.m11.emplace_back(io::parse_double(cells[3]), 0.0);
    m22.push_back(cells[4].empty() ? std::nullopt : std::optional<double>(io::parse_double(cells[4])));
  }
  const auto present = std::count_if(m22.begin(), m22.end(), [](const auto& v) { return v.has_value(); });
  if (present == std::ptrdiff_t(m22.size()) && !m22.empty()) {
    for (const auto& v : m22) s.m22cc.emplace_back(*v, 0.0);
  } else if (present != 0) {
    throw FormatError("abs_m22cc column is only partly filled");
  }
  s.validate();
  return s;
}

inline ResonanceScan load_scan_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open scan file '" + path + "'");
  return read_scan_csv(f);
}

}  // namespace npspec
