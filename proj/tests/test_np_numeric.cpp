#include <gtest/gtest.h>

#include <algorithm>

#include "npspec/gpt.hpp"
#include "npspec/np_analytic.hpp"
#include "npspec/np_numeric.hpp"
#include "npspec/twodisks.hpp"

using namespace npspec;

namespace {

SpectralDecomposition spectrum_of(const BoundaryCurve& c) {
  return numeric_spectrum(discretize_np(c), discretize_single_layer(c));
}

VectorXd cos_samples(const BoundaryCurve& c, int n) {
  VectorXd v(Eigen::Index(c.size()));
  for (std::size_t j = 0; j < c.size(); ++j) v[Eigen::Index(j)] = std::cos(n * c.thetas[j]);
  return v;
}

}  // namespace

TEST(NpNumeric, DiskAnnihilatesNonconstantModes) {
  const BoundaryCurve c = discretize(AlgebraicDomain::disk(), 64);
  const DiscreteOperator K = discretize_np(c);
  EXPECT_LT((K.matrix * cos_samples(c, 1)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(K.weights().sum(), 2 * kPi, 1e-12);
}

TEST(NpNumeric, DiskSpectrum) {
  const BoundaryCurve c = discretize(AlgebraicDomain::disk(), 64);
  const SpectralDecomposition dec = spectrum_of(c);
  EXPECT_NEAR(dec.eigenvalues[0], 0.5, 1e-10);
  for (Eigen::Index i = 1; i < dec.eigenvalues.size(); ++i) EXPECT_NEAR(dec.eigenvalues[i], 0.0, 1e-9);
  const VectorXd v = dec.eigenvectors.col(0);
  EXPECT_LT((v.array() - v.mean()).abs().maxCoeff(), 1e-10 * std::abs(v.mean()));
}

TEST(NpNumeric, DiskSingleLayerEigenrelation) {
  const BoundaryCurve c = discretize(AlgebraicDomain::disk(), 128);
  const DiscreteOperator S = discretize_single_layer(c);
  for (int n = 1; n <= 8; ++n) {
    const VectorXd f = cos_samples(c, n);
    EXPECT_LT((S.matrix * f + f / (2.0 * n)).cwiseAbs().maxCoeff(), 1e-10) << "n=" << n;
  }
}

TEST(NpNumeric, PaperShapeEigenvalues) {
  const SpectralDecomposition dec = spectrum_of(discretize(AlgebraicDomain(0.0, 3, 0.066667), 512));
  std::vector<double> top;
  for (Eigen::Index i = 1; i < dec.eigenvalues.size(); ++i) top.push_back(dec.eigenvalues[i]);
  std::sort(top.begin(), top.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  std::vector<double> got(top.begin(), top.begin() + 6), want{0.066667, -0.066667, 0.057735, 0.057735,
                                                              -0.057735, -0.057735};
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(got[std::size_t(i)], want[std::size_t(i)], 2e-3);
}

TEST(NpNumeric, EvenOrderLeadingPair) {
  const SpectralDecomposition dec = spectrum_of(discretize(AlgebraicDomain(0.0, 4, 0.05), 512));
  const double want = 0.025 * std::sqrt(6.0);
  EXPECT_NEAR(dec.eigenvalues[1], want, 1e-3);
  EXPECT_NEAR(dec.eigenvalues[dec.eigenvalues.size() - 1], -want, 1e-3);
}

TEST(NpNumeric, TwoDiskLeadingPair) {
  const TwoDiskConfig cfg(1.0, 2.0);
  const auto curves = disk_curves(cfg, 256);
  const SpectralDecomposition dec = numeric_spectrum(discretize_np(curves), discretize_single_layer(curves));
  const double want = 0.5 * std::pow(2.0 - std::sqrt(3.0), 2);
  EXPECT_NEAR(dec.eigenvalues[0], 0.5, 1e-10);
  EXPECT_NEAR(dec.eigenvalues[1], 0.5, 1e-10);
  EXPECT_NEAR(dec.eigenvalues[2], want, 1e-6);
  EXPECT_NEAR(dec.eigenvalues[dec.eigenvalues.size() - 1], -want, 1e-6);
}

TEST(NpNumeric, ContainmentAndGramOrthonormality) {
  for (auto [rho0, m, delta] : {std::tuple{0.0, 3, 0.1}, {0.4, 2, 0.3}, {-0.3, 6, 0.1}}) {
    const BoundaryCurve c = discretize(AlgebraicDomain(rho0, m, delta), 256);
    const SpectralDecomposition dec = spectrum_of(c);
    EXPECT_LE(dec.eigenvalues.maxCoeff(), 0.5 + 1e-6);
    EXPECT_GT(dec.eigenvalues.minCoeff(), -0.5 - 1e-6);
    const MatrixXd I = dec.eigenvectors.transpose() * dec.gram * dec.eigenvectors;
    EXPECT_LT((I - MatrixXd::Identity(I.rows(), I.cols())).cwiseAbs().maxCoeff(), 1e-8);
    for (Eigen::Index j = 1; j < dec.eigenvalues.size(); ++j) {
      const VectorXd v = dec.eigenvectors.col(j);
      EXPECT_NEAR(v.dot(dec.energy * v), 1.0, 1e-8);
    }
  }
}

TEST(NpNumeric, SpectralConvergenceInN) {
  const AlgebraicDomain d(0.0, 5, 0.1);
  const VectorXd a = spectrum_of(discretize(d, 512)).eigenvalues;
  const VectorXd b = spectrum_of(discretize(d, 1024)).eigenvalues;
  auto largest = [](const VectorXd& v) {
    std::vector<double> s(v.data() + 1, v.data() + v.size());
    std::sort(s.begin(), s.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
    s.resize(10);
    std::sort(s.begin(), s.end());
    return s;
  };
  const auto la = largest(a), lb = largest(b);
  for (int i = 0; i < 10; ++i) EXPECT_LT(std::abs(la[std::size_t(i)] - lb[std::size_t(i)]), 1e-8);
}

TEST(NpNumeric, ApproximateSymmetryOfSpectrum) {
  const SpectralDecomposition dec = spectrum_of(discretize(AlgebraicDomain(0.0, 3, 0.02), 256));
  const VectorXd& e = dec.eigenvalues;
  const Eigen::Index n = e.size();
  for (int i = 1; i <= 4; ++i) EXPECT_NEAR(e[i], -e[n - i], 4 * 0.02 * 0.02);
}

TEST(NpNumeric, ResolventOnDisk) {
  const BoundaryCurve c = discretize(AlgebraicDomain::disk(), 64);
  const DiscreteOperator K = discretize_np(c);
  const VectorXd rhs = cos_samples(c, 1);
  const VectorXc phi = resolvent_solve(K, 1.0, rhs);
  EXPECT_LT((phi - rhs.cast<cplx>()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(resolvent_solve(K, 0.0, rhs), NearSingular);
  EXPECT_THROW(resolvent_solve(K, 0.3, VectorXd(VectorXd::Ones(3))), OutOfRange);
}

TEST(NpNumeric, ResolventResidual) {
  const BoundaryCurve c = discretize(AlgebraicDomain(0.1, 4, 0.1), 256);
  const DiscreteOperator K = discretize_np(c);
  const HarmonicPair h = x1_traces(K.nodes);
  const cplx lam(0.07, 0.002);
  const VectorXc phi = resolvent_solve(K, lam, h.normal_derivative);
  const VectorXc back = lam * phi - K.matrix.cast<cplx>() * phi;
  EXPECT_LT((back - h.normal_derivative.cast<cplx>()).norm() / h.normal_derivative.norm(), 1e-10);
}

TEST(NpNumeric, ResolventMatchesSpectralSumAtRealLambda) {
  const BoundaryCurve c = discretize(AlgebraicDomain(0.0, 3, 0.066667), 256);
  const DiscreteOperator K = discretize_np(c);
  const DiscreteOperator S = discretize_single_layer(c);
  const cplx direct = gpt_direct(K, 0.25, 1, 1, TensorKind::cc);
  const cplx spec = gpt_spectral_sum(numeric_spectrum(K, S), S, 0.25, x1_traces(K.nodes));
  EXPECT_LT(std::abs(direct - spec), 1e-6);
}

TEST(NpNumeric, ResolventGrowsNearEigenvalue) {
  const BoundaryCurve c = discretize(AlgebraicDomain(0.0, 3, 0.066667), 256);
  const DiscreteOperator K = discretize_np(c);
  const DiscreteOperator S = discretize_single_layer(c);
  const SpectralDecomposition dec = numeric_spectrum(K, S);
  const HarmonicPair h = x1_traces(K.nodes);
  // positive eigenvalue whose mode carries the most x1 weight
  Eigen::Index best = 1;
  double wmax = 0.0;
  for (Eigen::Index j = 1; j < dec.eigenvalues.size(); ++j) {
    if (dec.eigenvalues[j] <= 0.0) continue;
    const double w = std::abs(K.weights().cwiseProduct(h.trace).dot(dec.eigenvectors.col(j)));
    if (w > wmax) wmax = w, best = j;
  }
  const double lp = dec.eigenvalues[best];
  EXPECT_NEAR(lp, 0.057735, 2e-3);
  const double n1 = resolvent_solve(K, cplx(lp, 1e-2), h.normal_derivative).norm();
  const double n2 = resolvent_solve(K, cplx(lp, 1e-3), h.normal_derivative).norm();
  EXPECT_TRUE(std::isfinite(n2));
  EXPECT_GT(n2 / n1, 5.0);
  EXPECT_LT(n2 / n1, 10.5);
}

TEST(NpNumeric, OverlappingCurvesRejected) {
  const std::vector<BoundaryCurve> same{discretize_circle(Point(0, 0), 1.0, 64),
                                        discretize_circle(Point(0, 0), 1.0, 64)};
  EXPECT_THROW(discretize_np(same), CurveOverlap);
  EXPECT_THROW(discretize_single_layer(same), CurveOverlap);
  const BoundaryCurve small = discretize_circle(Point(0, 0), 1.0, 16);
  EXPECT_THROW(discretize_np(small), OutOfRange);
}

TEST(NpNumeric, MismatchedOperatorsRejected) {
  const BoundaryCurve c = discretize(AlgebraicDomain::disk(), 64);
  const DiscreteOperator K = discretize_np(c);
  EXPECT_THROW(numeric_spectrum(K, K), OutOfRange);
}
