#pragma once

// Command-line front end. run() returns 0 on success, 1 on domain errors and 2 on
// usage errors.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "npspec/npspec.hpp"
#include "npspec/validation.hpp"

namespace npspec::cli {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// key=value tokens given as positional arguments.
class Params {
 public:
  Params() = default;
  Params(const std::vector<std::string>& tokens, std::vector<std::string> allowed) : allowed_(std::move(allowed)) {
    for (const auto& t : tokens) {
      const auto eq = t.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("expected key=value, got '" + t + "'");
      const std::string key = t.substr(0, eq);
      if (std::find(allowed_.begin(), allowed_.end(), key) == allowed_.end())
        throw UsageError("unknown setting '" + key + "'");
      if (values_.count(key)) throw UsageError("setting '" + key + "' given twice");
      values_[key] = t.substr(eq + 1);
    }
  }

  bool has(const std::string& k) const { return values_.count(k) != 0; }

  double real(const std::string& k, std::optional<double> fallback = std::nullopt) const {
    const auto it = values_.find(k);
    if (it == values_.end()) {
      if (!fallback) throw UsageError("missing setting " + k + "=...");
      return *fallback;
    }
    try {
      return io::parse_double(it->second);
    } catch (const FormatError&) {
      throw UsageError("setting " + k + " is not a number: '" + it->second + "'");
    }
  }

  int integer(const std::string& k, std::optional<int> fallback = std::nullopt) const {
    const double v = real(k, fallback ? std::optional<double>(*fallback) : std::nullopt);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError("setting " + k + " must be an integer");
    return int(v);
  }

  std::vector<double> list(const std::string& k, const std::vector<double>& fallback) const {
    const auto it = values_.find(k);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    try {
      for (const auto& c : io::split_csv_line(it->second)) out.push_back(io::parse_double(c));
    } catch (const FormatError&) {
      throw UsageError("setting " + k + " must be a comma-separated list of numbers");
    }
    return out;
  }

 private:
  std::vector<std::string> allowed_;
  std::map<std::string, std::string> values_;
};

inline std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline const std::vector<std::string> kAlgebraicKeys{"rho0", "m", "delta"};
inline const std::vector<std::string> kTwoDiskKeys{"r", "eps"};

inline AlgebraicDomain algebraic_from(const Params& p) {
  return {p.real("rho0", 0.0), p.integer("m"), p.real("delta")};
}

inline TwoDiskConfig twodisk_from(const Params& p) { return {p.real("r", 1.0), p.real("eps")}; }

inline int sample_count(const Params& p, int fallback) {
  const int N = p.integer("N", fallback);
  if (N < 64 || N > 4096 || (N & (N - 1)) != 0) throw UsageError("N must be a power of two in [64, 4096]");
  return N;
}

inline json target_json(const AlgebraicDomain& d) {
  return {{"kind", "algebraic"}, {"rho0", d.rho0()}, {"m", d.order()}, {"delta", d.delta()}, {"a", d.a()}};
}

inline json target_json(const TwoDiskConfig& c) {
  return {{"kind", "twodisks"}, {"r", c.r()}, {"eps", c.eps()}, {"alpha", c.alpha()}, {"xi0", c.xi0()}};
}

inline json peak_json(const ScanPeak& p) {
  return {{"trace", to_string(p.trace)}, {"wavelength_nm", p.wavelength}, {"re_lambda", p.lambda.real()},
          {"im_lambda", p.lambda.imag()}, {"height", p.height},         {"prominence", p.prominence}};
}

/// Sink that is either the given stream or a file named by --out.
class Output {
 public:
  Output(std::ostream& fallback, const std::string& path) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw FormatError("cannot open output file '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ostream* os_;
  std::unique_ptr<std::ofstream> file_;
};

struct Target {
  bool algebraic = false;
  bool twodisks = false;

  void check() const {
    if (algebraic == twodisks) throw UsageError("choose exactly one of --algebraic or --twodisks");
  }
};

inline void add_target(CLI::App* sub, Target& t) {
  sub->add_flag("--algebraic", t.algebraic, "class-Q target; settings rho0= m= delta=");
  sub->add_flag("--twodisks", t.twodisks, "two-disk target; settings r= eps=");
}

inline std::vector<double> lambda_axis(const Params& p) {
  const double lo = p.real("re_min", -0.2);
  const double hi = p.real("re_max", 0.2);
  const int count = p.integer("count", 81);
  if (count < 1) throw UsageError("count must be positive");
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return v;
}

inline std::string complex_cells(cplx z) { return io::fmt(z.real()) + "," + io::fmt(z.imag()); }

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neumann-Poincare spectra, polarization tensors and resonance inversion", "npspec"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for all subcommands");

  std::vector<std::string> tokens;
  std::string out_path;
  Target target;
  std::function<int()> action;

  // emit-boundary
  auto* emit = app.add_subcommand("emit-boundary", "Write boundary samples as CSV");
  add_target(emit, target);
  emit->add_option("settings", tokens, "key=value settings (N=256)");
  emit->add_option("-o,--out", out_path, "output file (default stdout)");
  emit->callback([&] {
    action = [&] {
      target.check();
      Output o(out, out_path);
      if (target.algebraic) {
        const Params p(tokens, concat(kAlgebraicKeys, {"N"}));
        write_csv(*o, discretize(algebraic_from(p), sample_count(p, 256)));
      } else {
        const Params p(tokens, concat(kTwoDiskKeys, {"N"}));
        const auto curves = disk_curves(twodisk_from(p), sample_count(p, 256));
        *o << "component,theta,x,y,jacobian,nx,ny\n";
        for (int c = 0; c < 2; ++c) {
          std::ostringstream body;
          write_csv(body, curves[std::size_t(c)]);
          std::istringstream lines(body.str());
          std::string line;
          std::getline(lines, line);
          while (std::getline(lines, line)) *o << (c + 1) << ',' << line << '\n';
        }
      }
      return 0;
    };
  });

  // spectrum
  bool analytic = false, numeric = false;
  auto* spectrum = app.add_subcommand("spectrum", "Analytic and/or Nystrom NP spectrum as JSON");
  add_target(spectrum, target);
  spectrum->add_flag("--analytic", analytic, "closed-form (or order-delta) eigenvalues");
  spectrum->add_flag("--numeric", numeric, "Nystrom eigenvalues; setting N= (default 512, per curve)");
  spectrum->add_option("settings", tokens, "key=value settings");
  spectrum->add_option("-o,--out", out_path, "output file (default stdout)");
  spectrum->callback([&] {
    action = [&] {
      target.check();
      if (!analytic && !numeric) throw UsageError("choose --analytic, --numeric or both");
      json j;
      std::vector<double> exact;
      SpectralDecomposition dec;
      if (target.algebraic) {
        const Params p(tokens, concat(kAlgebraicKeys, {"N"}));
        const AlgebraicDomain dom = algebraic_from(p);
        const int N = sample_count(p, 512);
        j["target"] = target_json(dom);
        if (analytic) {
          json arr = json::array();
          for (const auto& e : asymptotic_eigenpairs(dom)) {
            const auto& c = e.parity == Parity::cosine ? e.eigenfunction.cos : e.eigenfunction.sin;
            arr.push_back({{"parity", to_string(e.parity)}, {"eigenvalue", e.eigenvalue}, {"j", e.j},
                           {"sign", e.sign}, {"coefficients", c}});
            exact.push_back(e.eigenvalue);
          }
          j["analytic"] = arr;
        }
        if (numeric) {
          dec = validation::nystrom_spectrum(dom, N);
          j["numeric"] = {{"N", N}, {"eigenvalues", std::vector<double>(dec.eigenvalues.data(),
                                                                         dec.eigenvalues.data() + dec.eigenvalues.size())}};
        }
        if (analytic && numeric) {
          const std::vector<double> rest(dec.eigenvalues.data() + 1, dec.eigenvalues.data() + dec.eigenvalues.size());
          j["max_pairing_distance"] = validation::greedy_match_distance(exact, rest);
        }
      } else {
        const Params p(tokens, concat(kTwoDiskKeys, {"N", "modes"}));
        const TwoDiskConfig cfg = twodisk_from(p);
        const int N = sample_count(p, 256);
        const int modes = p.integer("modes", 3);
        if (modes < 1) throw UsageError("modes must be positive");
        j["target"] = target_json(cfg);
        if (analytic) {
          json arr = json::array();
          for (int n = 1; n <= modes; ++n)
            for (ModeSign s : {ModeSign::plus, ModeSign::minus}) {
              const DiskEigenmode md = make_mode(cfg, n, s);
              arr.push_back({{"n", n}, {"sign", to_string(s)}, {"eigenvalue", md.eigenvalue},
                             {"normalization", md.normalization}, {"multiplicity", 2}});
              exact.push_back(md.eigenvalue);
              exact.push_back(md.eigenvalue);
            }
          j["analytic"] = arr;
        }
        if (numeric) {
          const auto curves = disk_curves(cfg, N);
          dec = numeric_spectrum(discretize_np(curves), discretize_single_layer(curves));
          j["numeric"] = {{"N", N}, {"eigenvalues", std::vector<double>(dec.eigenvalues.data(),
                                                                         dec.eigenvalues.data() + dec.eigenvalues.size())}};
        }
        if (analytic && numeric) {
          const std::vector<double> rest(dec.eigenvalues.data() + 2, dec.eigenvalues.data() + dec.eigenvalues.size());
          j["max_pairing_distance"] = validation::greedy_match_distance(exact, rest);
        }
      }
      Output o(out, out_path);
      *o << j.dump(2) << '\n';
      return 0;
    };
  });

  // gpt
  bool oracle = false, corrected = false;
  auto* gpt = app.add_subcommand("gpt", "m11 and M22cc over a lambda sweep as CSV");
  gpt->add_flag("--algebraic", target.algebraic, "class-Q target; settings rho0= m= delta=");
  gpt->add_flag("--oracle", oracle, "use Nystrom resolvent solves (setting N=, default 256)");
  gpt->add_flag("--corrected", corrected, "M22cc with unit residues instead of the printed weights");
  gpt->add_option("settings", tokens, "key=value settings: re_min re_max count im");
  gpt->add_option("-o,--out", out_path, "output file (default stdout)");
  gpt->callback([&] {
    action = [&] {
      const Params p(tokens, concat(kAlgebraicKeys, {"N", "re_min", "re_max", "count", "im"}));
      const AlgebraicDomain dom = algebraic_from(p);
      const double im = p.real("im", 1e-3);
      AsymptoticOptions opt;
      opt.allow_even_m = true;
      if (corrected) opt.m22 = AsymptoticOptions::M22Form::corrected;
      std::optional<DiscreteOperator> np;
      if (oracle) np = discretize_np(discretize(dom, sample_count(p, 256)));
      const bool with_m22 = oracle || dom.order() >= 2 || dom.delta() == 0.0;
      Output o(out, out_path);
      *o << "lambda_re,lambda_im,m11_re,m11_im,m22cc_re,m22cc_im\n";
      for (double re : lambda_axis(p)) {
        const cplx lam(re, im);
        const cplx m11 = oracle ? gpt_direct(*np, lam, 1, 1, TensorKind::cc) : m11_asymptotic(dom, lam, opt);
        *o << complex_cells(lam) << ',' << complex_cells(m11) << ',';
        if (with_m22)
          *o << complex_cells(oracle ? gpt_direct(*np, lam, 2, 2, TensorKind::cc) : m22cc_asymptotic(dom, lam, opt));
        else
          *o << ',';
        *o << '\n';
      }
      return 0;
    };
  });

  // scan
  bool synthetic = false;
  std::string material_path;
  auto* scan = app.add_subcommand("scan", "Forward resonance scan over wavelength as CSV");
  add_target(scan, target);
  scan->add_option("--material", material_path, "Drude config file (omega_p, inv_tau, eps_bg, wl_min, wl_max)");
  scan->add_flag("--synthetic", synthetic, "linear Re lambda sweep; settings sweep_re0 sweep_re1 sweep_im");
  scan->add_flag("--oracle", oracle, "Nystrom resolvent traces (setting N=, default 256)");
  scan->add_option("settings", tokens,
                   "key=value settings: target keys, omega_p inv_tau eps_bg, wl_min wl_max count, N");
  scan->add_option("-o,--out", out_path, "output file (default stdout)");
  scan->callback([&] {
    action = [&] {
      target.check();
      const std::vector<std::string> common{"N",     "omega_p",   "inv_tau",   "eps_bg",   "wl_min",
                                            "wl_max", "count",     "sweep_re0", "sweep_re1", "sweep_im"};
      const Params p(tokens, concat(target.algebraic ? kAlgebraicKeys : kTwoDiskKeys, common));
      if (synthetic && !material_path.empty()) throw UsageError("--synthetic and --material are exclusive");
      DrudeModel drude;
      if (!material_path.empty()) drude = load_drude_config(material_path);
      drude.omega_p = p.real("omega_p", drude.omega_p);
      drude.inv_tau = p.real("inv_tau", drude.inv_tau);
      drude.eps_bg = p.real("eps_bg", drude.eps_bg);
      drude.wl_min = p.real("wl_min", drude.wl_min);
      drude.wl_max = p.real("wl_max", drude.wl_max);
      drude.validate();
      LinearSweep sweep{drude.wl_min, drude.wl_max, p.real("sweep_re0", -0.12), p.real("sweep_re1", 0.12),
                        p.real("sweep_im", 1e-3)};
      const WavelengthGrid grid{drude.wl_min, drude.wl_max, p.integer("count", 4001)};
      if (grid.count < 16) throw UsageError("count must be >= 16");
      const int N = sample_count(p, 256);
      auto go = [&](const auto& model) {
        if (target.algebraic) {
          const AlgebraicDomain dom = algebraic_from(p);
          return oracle ? forward_scan_oracle(dom, model, grid, N) : forward_scan(dom, model, grid);
        }
        const TwoDiskConfig cfg = twodisk_from(p);
        return oracle ? forward_scan_oracle(cfg, model, grid, N) : forward_scan(cfg, model, grid);
      };
      const ResonanceScan s = synthetic ? go(sweep) : go(drude);
      Output o(out, out_path);
      write_scan_csv(*o, s);
      return 0;
    };
  });

  // reconstruct-shape
  std::string scan_path;
  double prominence = kDefaultProminence;
  auto* rshape = app.add_subcommand("reconstruct-shape", "Recover rho0, m, delta from a scan CSV");
  rshape->add_option("--scan", scan_path, "scan CSV written by `scan`")->required();
  rshape->add_option("--prominence", prominence, "minimum peak prominence as a fraction of the trace maximum");
  rshape->add_option("-o,--out", out_path, "output file (default stdout)");
  rshape->callback([&] {
    action = [&] {
      const ShapeReconstruction r = reconstruct_shape(load_scan_csv(scan_path), prominence);
      json peaks = json::array();
      for (const auto& pk : r.m11_peaks) peaks.push_back(peak_json(pk));
      for (const auto& pk : r.m22_peaks) peaks.push_back(peak_json(pk));
      json j{{"m", r.m},
             {"delta", r.delta},
             {"rho0", r.rho0},
             {"disk", r.disk},
             {"lambda_plus", r.lambda_plus},
             {"lambda_plus_prime", r.lambda_plus_prime},
             {"residuals", {{"m_real", r.m_real}, {"m_residual", r.residual}}},
             {"peaks", peaks}};
      Output o(out, out_path);
      *o << j.dump(2) << '\n';
      return 0;
    };
  });

  // reconstruct-gap
  double radius = 1.0;
  auto* rgap = app.add_subcommand("reconstruct-gap", "Recover the two-disk gap from a scan CSV");
  rgap->add_option("--r", radius, "disk radius")->required();
  rgap->add_option("--scan", scan_path, "scan CSV written by `scan`")->required();
  rgap->add_option("--prominence", prominence, "minimum peak prominence as a fraction of the trace maximum");
  rgap->add_option("-o,--out", out_path, "output file (default stdout)");
  rgap->callback([&] {
    action = [&] {
      const GapReconstruction g = reconstruct_gap_from_scan(load_scan_csv(scan_path), radius, prominence);
      const TwoDiskConfig cfg(radius, g.eps);
      json j{{"eps", g.eps},
             {"r", radius},
             {"lambda1", g.lambda1},
             {"xi0", cfg.xi0()},
             {"residuals", {{"im_lambda_at_peak", g.peak.lambda.imag()}}},
             {"peaks", json::array({peak_json(g.peak)})}};
      Output o(out, out_path);
      *o << j.dump(2) << '\n';
      return 0;
    };
  });

  // twodisks
  auto* td = app.add_subcommand("twodisks", "Closed-form two-disk quantities as CSV");
  td->require_subcommand(1);
  auto* td_spec = td->add_subcommand("spectrum", "eigenvalues +-e^{-2 n xi0}/2");
  td_spec->add_option("settings", tokens, "key=value settings: r eps modes");
  td_spec->add_option("-o,--out", out_path, "output file (default stdout)");
  td_spec->callback([&] {
    action = [&] {
      const Params p(tokens, concat(kTwoDiskKeys, {"modes"}));
      const TwoDiskConfig cfg = twodisk_from(p);
      const int modes = p.integer("modes", 8);
      if (modes < 1) throw UsageError("modes must be positive");
      Output o(out, out_path);
      *o << "n,sign,eigenvalue,normalization\n";
      for (int n = 1; n <= modes; ++n)
        for (ModeSign s : {ModeSign::plus, ModeSign::minus}) {
          const DiskEigenmode md = make_mode(cfg, n, s);
          *o << n << ',' << to_string(s) << ',' << io::fmt(md.eigenvalue) << ',' << io::fmt(md.normalization) << '\n';
        }
      return 0;
    };
  });
  auto* td_m11 = td->add_subcommand("m11", "m11 series over a lambda sweep");
  td_m11->add_option("settings", tokens, "key=value settings: r eps re_min re_max count im n_max");
  td_m11->add_option("-o,--out", out_path, "output file (default stdout)");
  td_m11->callback([&] {
    action = [&] {
      const Params p(tokens, concat(kTwoDiskKeys, {"re_min", "re_max", "count", "im", "n_max"}));
      const TwoDiskConfig cfg = twodisk_from(p);
      const double im = p.real("im", 1e-3);
      const int n_max = p.integer("n_max", 64);
      Output o(out, out_path);
      *o << "lambda_re,lambda_im,m11_re,m11_im,tail_bound,terms\n";
      for (double re : lambda_axis(p)) {
        const cplx lam(re, im);
        const SeriesValue v = m11_eps(cfg, lam, n_max);
        *o << complex_cells(lam) << ',' << complex_cells(v.value) << ',' << io::fmt(v.tail_bound) << ','
           << v.terms << '\n';
      }
      return 0;
    };
  });
  auto* td_gap = td->add_subcommand("gapfield", "field at the gap centre for k = k_N + i delta");
  td_gap->add_option("settings", tokens, "key=value settings: r eps mode deltas E0 n_max");
  td_gap->add_option("-o,--out", out_path, "output file (default stdout)");
  td_gap->callback([&] {
    action = [&] {
      const Params p(tokens, concat(kTwoDiskKeys, {"mode", "deltas", "E0", "n_max"}));
      const TwoDiskConfig cfg = twodisk_from(p);
      const int mode = p.integer("mode", 1);
      if (mode < 1) throw UsageError("mode must be >= 1");
      const double E0 = p.real("E0", 1.0);
      const int n_max = p.integer("n_max", 64);
      Output o(out, out_path);
      *o << "delta,k_re,k_im,Ep_re,Ep_im,abs_Ep,abs_single_mode,abs_small_gap,terms\n";
      for (double d : p.list("deltas", {0.04, 0.02, 0.01, 0.005})) {
        const cplx k(k_plus(cfg, mode), d);
        const GapField g = gap_field(cfg, k, E0, n_max);
        *o << io::fmt(d) << ',' << complex_cells(k) << ',' << complex_cells(g.Ep) << ',' << io::fmt(std::abs(g.Ep))
           << ',' << io::fmt(std::abs(gap_field_single_mode(cfg, k, E0, mode))) << ','
           << io::fmt(std::abs(gap_field_small_gap(cfg, d, E0, mode))) << ',' << g.terms << '\n';
      }
      return 0;
    };
  });

  // validate
  std::vector<int> only;
  auto* val = app.add_subcommand("validate", "Run the acceptance checks and print a pass/fail table");
  val->add_option("--only", only, "criterion ids to run (default all)")->delimiter(',');
  val->callback([&] {
    action = [&] {
      for (int id : only)
        if (id < 1 || id > int(validation::criteria().size())) throw UsageError("unknown criterion " + std::to_string(id));
      return validation::run(out, only) ? 0 : 1;
    };
  });

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* shown = &app;
    for (const CLI::App* s = &app; !s->get_subcommands().empty();) {
      s = s->get_subcommands().front();
      shown = s;
    }
    err << shown->help();
    return 2;
  }

  try {
    return action ? action() : 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n\n";
    CLI::App* shown = &app;
    while (!shown->get_subcommands().empty()) shown = shown->get_subcommands().front();
    err << shown->help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), out, err);
}

}  // namespace npspec::cli
