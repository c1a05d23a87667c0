#include <gtest/gtest.h>

#include <sstream>

#include "npspec/material.hpp"

using namespace npspec;

TEST(Material, ContrastMapping) {
  EXPECT_NEAR(lambda_of_sigma(-3.0).real(), 0.25, 1e-15);
  EXPECT_NEAR(lambda_of_sigma(0.0).real(), -0.5, 1e-15);
  EXPECT_NEAR(lambda_of_sigma(1e12).real(), 0.5, 1e-11);
  EXPECT_NEAR(std::abs(lambda_of_sigma(-1.0)), 0.0, 1e-15);
  EXPECT_THROW(lambda_of_sigma(1.0), NoContrast);
  for (cplx s : {cplx(-2.0, 0.3), cplx(4.0, 0.0), cplx(-0.5, 1.0)})
    EXPECT_LT(std::abs(sigma_of_lambda(lambda_of_sigma(s)) - s), 1e-12);
}

TEST(Material, DrudeResonanceNearSixHundred) {
  DrudeModel m;
  m.inv_tau = 1e6;
  const cplx s = m.sigma(600.0);
  EXPECT_NEAR(s.real(), -1.0, 1e-12);
  EXPECT_NEAR(std::abs(m.lambda(600.0)), 0.0, 1e-8);
}

TEST(Material, HighFrequencyLimit) {
  DrudeModel m;
  m.wl_min = 1e-3;
  EXPECT_NEAR(std::abs(m.sigma(1e-3) - 1.0), 0.0, 1e-8);
}

TEST(Material, DefaultsArePassive) {
  const DrudeModel m;
  for (double wl = 400.0; wl <= 800.0; wl += 25.0) {
    EXPECT_GT(m.sigma(wl).imag(), 0.0);
    EXPECT_LT(m.lambda(wl).imag(), 0.0);
  }
  for (double wl = 550.0; wl <= 650.0; wl += 10.0) EXPECT_LT(std::abs(m.lambda(wl).imag()), 0.05);
}

TEST(Material, BackgroundScaling) {
  DrudeModel a, b;
  b.eps_bg = 2.0;
  EXPECT_LT(std::abs(b.sigma(500.0) - a.sigma(500.0) / 2.0), 1e-12);
}

TEST(Material, TargetsCrossedOnce) {
  const DrudeModel m;
  for (double t : {-0.06, 0.0359, 0.0577, 0.0667}) EXPECT_EQ(count_crossings(m, t), 1) << t;
  EXPECT_EQ(count_crossings(LinearSweep{}, 0.1), 1);
}

TEST(Material, OutOfWindow) {
  const DrudeModel m;
  EXPECT_THROW(m.sigma(300.0), OutOfRange);
  EXPECT_THROW(LinearSweep{}.lambda(900.0), OutOfRange);
}

TEST(Material, ConfigParsing) {
  std::istringstream good("# silver-like\nomega_p = 2e16\n inv_tau=3e13 # comment\n\neps_bg = 1.77\nwl_min = 350\nwl_max = 700\n");
  const DrudeModel m = parse_drude_config(good);
  EXPECT_EQ(m.omega_p, 2e16);
  EXPECT_EQ(m.inv_tau, 3e13);
  EXPECT_EQ(m.eps_bg, 1.77);
  EXPECT_EQ(m.wl_min, 350.0);
  EXPECT_EQ(m.wl_max, 700.0);

  std::istringstream unknown("gamma = 1\n");
  EXPECT_THROW(parse_drude_config(unknown), FormatError);
  std::istringstream bad("omega_p = abc\n");
  EXPECT_THROW(parse_drude_config(bad), FormatError);
  std::istringstream negative("inv_tau = -1\n");
  EXPECT_THROW(parse_drude_config(negative), OutOfRange);
  EXPECT_THROW(load_drude_config("/nonexistent/drude.cfg"), FormatError);
}
