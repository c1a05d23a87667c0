#include <gtest/gtest.h>

#include "npspec/gpt.hpp"
#include "npspec/np_numeric.hpp"
#include "npspec/twodisks.hpp"

using namespace npspec;

namespace {

struct Pair {
  TwoDiskConfig cfg;
  std::array<BoundaryCurve, 2> curves;
  DiscreteOperator K, S;
  explicit Pair(double eps, int N = 256)
      : cfg(1.0, eps), curves(disk_curves(cfg, N)), K(discretize_np(curves)), S(discretize_single_layer(curves)) {}
};

// <a, -S b> with the quadrature weights
cplx energy(const Pair& s, const VectorXc& a, const VectorXc& b) {
  const VectorXc sb = s.S.matrix.cast<cplx>() * b;
  return -(a.conjugate().array() * s.K.weights().array().cast<cplx>() * sb.array()).sum();
}

}  // namespace

TEST(TwoDisks, ConfigGeometry) {
  for (double eps : {0.1, 1.2, 2.0}) {
    const TwoDiskConfig cfg(1.0, eps);
    EXPECT_NEAR(cfg.alpha() * cfg.alpha(), eps + eps * eps / 4, 1e-14);
    EXPECT_NEAR(std::cosh(cfg.xi0()), eps / 2 + 1.0, 1e-14);
  }
  EXPECT_THROW(TwoDiskConfig(1.0, 0.0), InvalidDomain);
  EXPECT_THROW(TwoDiskConfig(-1.0, 1.0), InvalidDomain);
}

TEST(TwoDisks, EigenvalueExamples) {
  EXPECT_NEAR(eigenvalue(TwoDiskConfig(1.0, 2.0), 1, ModeSign::plus), 0.035898, 1e-6);
  EXPECT_NEAR(eigenvalue(TwoDiskConfig(1.0, 1.5), 1, ModeSign::plus), 0.0492538, 1e-6);
  EXPECT_NEAR(eigenvalue(TwoDiskConfig(1.0, 1.2), 1, ModeSign::plus), 0.0616006, 1e-6);
  const TwoDiskConfig cfg(1.0, 0.5);
  for (int n = 1; n <= 5; ++n) {
    EXPECT_EQ(eigenvalue(cfg, n, ModeSign::minus), -eigenvalue(cfg, n, ModeSign::plus));
    EXPECT_EQ(eigenvalue(cfg, -n, ModeSign::plus), eigenvalue(cfg, n, ModeSign::plus));
    EXPECT_LT(eigenvalue(cfg, n + 1, ModeSign::plus), eigenvalue(cfg, n, ModeSign::plus));
  }
}

TEST(TwoDisks, BipolarRoundTripAndBoundary) {
  const TwoDiskConfig cfg(1.0, 1.5);
  for (double xi : {-1.0, -0.2, 0.4, 2.0})
    for (double th : {0.3, 2.0, 4.5}) {
      const Bipolar b = to_bipolar(cfg, from_bipolar(cfg, xi, th));
      EXPECT_NEAR(b.xi, xi, 1e-12);
      EXPECT_NEAR(b.theta, th, 1e-12);
    }
  const auto curves = disk_curves(cfg, 64);
  for (const Point& p : curves[1].points) EXPECT_NEAR(to_bipolar(cfg, p).xi, cfg.xi0(), 1e-12);
  for (const Point& p : curves[0].points) EXPECT_NEAR(to_bipolar(cfg, p).xi, -cfg.xi0(), 1e-12);
  EXPECT_LT(curves[0].points[0].x(), 0.0);
}

TEST(TwoDisks, PotentialContinuityAndFluxRatio) {
  const TwoDiskConfig cfg(1.0, 0.8);
  const double x0 = cfg.xi0();
  for (int n = 1; n <= 4; ++n)
    for (ModeSign s : {ModeSign::plus, ModeSign::minus})
      for (double th : {0.0, 1.3}) {
        for (double edge : {-x0, x0})
          EXPECT_LT(std::abs(mode_potential(cfg, n, s, edge - 1e-13, th) - mode_potential(cfg, n, s, edge + 1e-13, th)),
                    1e-10);
        const cplx outside = mode_potential_dxi(cfg, n, s, x0, th, false);
        const cplx inside = mode_potential_dxi(cfg, n, s, x0, th, true);
        const double want = s == ModeSign::plus ? -1.0 / std::tanh(n * x0) : -std::tanh(n * x0);
        EXPECT_LT(std::abs(outside / inside - want), 1e-12) << n;
      }
}

TEST(TwoDisks, PotentialDecaysAwayFromDisks) {
  const TwoDiskConfig cfg(1.0, 0.8);
  const double x0 = cfg.xi0();
  const double a = std::abs(mode_potential(cfg, 2, ModeSign::plus, x0 + 0.5, 0.7));
  const double b = std::abs(mode_potential(cfg, 2, ModeSign::plus, x0 + 1.0, 0.7));
  EXPECT_NEAR(b / a, std::exp(-1.0), 1e-12);
  EXPECT_THROW(mode_potential(cfg, 0, ModeSign::plus, 0.0, 0.0), OutOfRange);
}

TEST(TwoDisks, SingleLayerOfEigendensity) {
  const Pair st(1.5);
  for (int n : {1, 2, -3})
    for (ModeSign s : {ModeSign::plus, ModeSign::minus}) {
      const VectorXc psi = eigendensity_on_nodes(st.cfg, n, s, st.K.nodes);
      const VectorXc kpsi = st.K.matrix.cast<cplx>() * psi;
      EXPECT_LT((kpsi - eigenvalue(st.cfg, n, s) * psi).norm() / psi.norm(), 1e-8);
      const VectorXc spsi = st.S.matrix.cast<cplx>() * psi;
      double worst = 0.0;
      for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const Bipolar b = to_bipolar(st.cfg, st.K.nodes.points[i]);
        const double xi = st.K.nodes.component[i] == 0 ? -st.cfg.xi0() : st.cfg.xi0();
        worst = std::max(worst, std::abs(spsi[i] - mode_single_layer(st.cfg, n, s, xi, b.theta)));
      }
      EXPECT_LT(worst, 1e-6) << "n=" << n << " " << to_string(s);
    }
}

TEST(TwoDisks, GramNormalizationAndOrthogonality) {
  const Pair st(1.5);
  std::vector<VectorXc> modes;
  for (int n : {1, 2, 3})
    for (ModeSign s : {ModeSign::plus, ModeSign::minus}) modes.push_back(eigendensity_on_nodes(st.cfg, n, s, st.K.nodes));
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const cplx g = energy(st, modes[i], modes[j]);
      EXPECT_LT(std::abs(g - (i == j ? 1.0 : 0.0)), 1e-8) << i << "," << j;
    }
}

TEST(TwoDisks, MatchesNystromEigenvectors) {
  const Pair st(2.0);
  const SpectralDecomposition dec = numeric_spectrum(st.K, st.S);
  // eigenvalues 0 and 1 are the constants on each disk; 2 and 3 span the n = +-1 plus modes
  const MatrixXd V = dec.eigenvectors.middleCols(2, 2);
  const VectorXc psi = eigendensity_on_nodes(st.cfg, 1, ModeSign::plus, st.K.nodes);
  for (const VectorXd& part : {VectorXd(psi.real()), VectorXd(psi.imag())}) {
    const VectorXd coef = V.transpose() * dec.gram * part;
    const double proj = std::sqrt(coef.squaredNorm());
    const double full = std::sqrt(part.dot(dec.gram * part));
    EXPECT_GT(proj / full, 0.999);
  }
}

TEST(TwoDisks, X1IsOrthogonalToMinusModes) {
  const Pair st(1.5);
  const HarmonicPair h = x1_traces(st.K.nodes);
  for (int n = 1; n <= 3; ++n) {
    const VectorXc psi = eigendensity_on_nodes(st.cfg, n, ModeSign::minus, st.K.nodes);
    const cplx ip = (h.trace.cast<cplx>().array() * st.K.weights().array().cast<cplx>() * psi.array()).sum();
    EXPECT_LT(std::abs(ip), 1e-10) << n;
  }
}

TEST(TwoDisks, X1BipolarExpansion) {
  for (double eps : {2.0 * (std::cosh(0.6) - 1.0), 1.2, 1.5, 2.0}) {
    const TwoDiskConfig cfg(1.0, eps);
    ASSERT_GE(cfg.xi0(), 0.6 - 1e-12);
    double worst = 0.0;
    for (int j = 0; j < 64; ++j) {
      const double th = 2 * kPi * j / 64;
      for (double xi : {cfg.xi0(), -cfg.xi0()}) {
        const double exact = from_bipolar(cfg, xi, th).x();
        worst = std::max(worst, std::abs(x1_bipolar_partial(cfg, xi, th, 40) - exact));
      }
    }
    EXPECT_LT(worst, 1e-10) << "eps=" << eps;
  }
}

TEST(TwoDisks, M11FarLimitAndConvergence) {
  const TwoDiskConfig cfg(1.0, 1.5);
  const cplx lam(0.3, 1e-3);
  const SeriesValue a = m11_eps(cfg, lam, 64, false);
  const SeriesValue b = m11_eps(cfg, lam, 128, false);
  EXPECT_LT(std::abs(a.value - b.value) / std::abs(b.value), 1e-10);
  EXPECT_GE(a.tail_bound, 0.0);
  const double big = 1e5;
  const TwoDiskConfig far(1.0, big);
  const cplx l2(0.2, 0.0);
  EXPECT_NEAR(std::abs(m11_eps(far, l2).value) / (2 * kPi / 0.2), 1.0, 1e-3);
  EXPECT_THROW(m11_eps(cfg, 0.0), SeriesPole);
  EXPECT_THROW(m11_eps(cfg, eigenvalue(cfg, 2, ModeSign::plus)), SeriesPole);
}

TEST(TwoDisks, ReconstructEps) {
  for (double eps : {2.0, 1.5, 1.2, 0.05}) {
    const TwoDiskConfig cfg(1.0, eps);
    EXPECT_NEAR(reconstruct_eps(eigenvalue(cfg, 1, ModeSign::plus), 1.0), eps, 1e-12 * std::max(1.0, eps));
  }
  EXPECT_NEAR(reconstruct_eps(0.035898, 1.0), 2.0, 1e-4);
  EXPECT_THROW(reconstruct_eps(0.6, 1.0), OutOfRange);
  EXPECT_THROW(reconstruct_eps(0.0, 1.0), OutOfRange);
}

TEST(TwoDisks, ContrastMaps) {
  for (cplx lam : {cplx(0.2, 0.0), cplx(-0.1, 0.03)}) EXPECT_LT(std::abs(lambda_of_k(k_of_lambda(lam)) - lam), 1e-14);
  const TwoDiskConfig cfg(1.0, 1.5);
  EXPECT_NEAR(lambda_of_k(k_plus(cfg, 1)).real(), eigenvalue(cfg, 1, ModeSign::plus), 1e-14);
}

// Field at the gap centre compared with the Nystrom transmission solution.
TEST(TwoDisks, GapFieldMatchesNystrom) {
  const Pair st(1.5);
  const HarmonicPair h = x1_traces(st.K.nodes);
  for (cplx k : {cplx(5.0, 0.0), cplx(-2.0, 0.5), cplx(0.3, 0.0)}) {
    const cplx lam = lambda_of_k(k);
    const VectorXc phi = resolvent_solve(st.K, lam, h.normal_derivative);
    const Eigen::Vector2cd grad = single_layer_gradient_at(st.K.nodes, phi, Point(0.0, 0.0));
    const GapField g = gap_field(st.cfg, k, 1.0);
    EXPECT_LT(std::abs(grad[0] - g.Ep), 1e-8 * std::max(1.0, std::abs(g.Ep))) << k;
    EXPECT_LT(std::abs(grad[1]), 1e-10);
    EXPECT_LT(std::abs(g.field[0] - (1.0 + g.Ep)), 1e-15);
  }
}

TEST(TwoDisks, GapFieldNearResonance) {
  const TwoDiskConfig cfg(1.0, 0.05);
  EXPECT_THROW(gap_field(cfg, k_plus(cfg, 1), 1.0), SeriesPole);
  EXPECT_EQ(gap_field(cfg, 1.0, 1.0).Ep, cplx(0.0));
  const double a = std::abs(gap_field(cfg, cplx(k_plus(cfg, 1), 0.01), 1.0).Ep);
  const double b = std::abs(gap_field(cfg, cplx(k_plus(cfg, 1), 0.005), 1.0).Ep);
  EXPECT_NEAR(b / a, 2.0, 0.1);
  // the small-gap estimate is leading order in sqrt(eps)
  double prev = HUGE_VAL;
  for (double eps : {0.05, 0.01, 0.001}) {
    const TwoDiskConfig c(1.0, eps);
    const cplx single = gap_field_single_mode(c, cplx(k_plus(c, 1), 1e-3), 1.0, 1);
    const double rel = std::abs(single - gap_field_small_gap(c, 1e-3, 1.0, 1)) / std::abs(single);
    EXPECT_LT(rel, prev);
    prev = rel;
  }
  EXPECT_LT(prev, 0.1);
}
