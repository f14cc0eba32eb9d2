#include "idconc/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "idconc/certify.hpp"

namespace idconc {
namespace {

std::string digits_of(const BigReal& v, int n) {
  return v.str(n, std::ios_base::fixed);
}

TEST(OraclePoissonCdf, ReproducesPublishedScanValues) {
  const BigReal lam8 = (BigReal(17) - sqrt(BigReal(33))) / 2;
  const BigReal v8 = oracle_poisson_cdf(lam8, 7);
  EXPECT_EQ(digits_of(v8, 15), "0.793450747058153");

  const BigReal lam3 = (BigReal(7) + sqrt(BigReal(13))) / 2;
  const BigReal v3 = oracle_poisson_cdf(lam3, 3);
  EXPECT_EQ(digits_of(v3, 15), "0.225065994481669");
}

TEST(OraclePoissonCdf, ClosedFormAtLambdaOne) {
  const BigReal v = oracle_poisson_cdf(BigReal(1), 2);
  const BigReal exact = BigReal(5) / 2 * exp(-BigReal(1));
  EXPECT_LT(abs(v - exact), pow(BigReal(10), -40));
}

TEST(OracleSkellam, SeriesAndConvolutionAgree) {
  // Convolution route vs the Bessel-type series, both at 50 digits.
  for (double lam : {0.5, 1.0, 7.0}) {
    for (long long l : {0LL, 1LL, 4LL}) {
      const BigReal conv = oracle_skellam_pmf(BigReal(lam), l);
      BigReal t = 1;
      for (long long j = 1; j <= l; ++j) t *= BigReal(lam) / j;
      BigReal sum = t;
      for (long long k = 0; k < 600; ++k) {
        t *= BigReal(lam) * BigReal(lam) / (BigReal(k + 1) * BigReal(k + 1 + l));
        sum += t;
      }
      const BigReal series = exp(-2 * BigReal(lam)) * sum;
      EXPECT_LT(abs(conv - series), pow(BigReal(10), -40)) << "lam=" << lam << " l=" << l;
    }
  }
}

TEST(OracleSkellam, BesselConstant) {
  // e^{-1} sum 1/(4^k (k!)^2) to 40 digits.
  const BigReal v = oracle_skellam_pmf(BigReal(1) / 2, 0);
  BigReal term = 1, sum = 1;
  for (int k = 1; k <= 80; ++k) {
    term /= BigReal(4) * k * k;
    sum += term;
  }
  const BigReal exact = exp(-BigReal(1)) * sum;
  EXPECT_LT(abs(v - exact), pow(BigReal(10), -40));
  EXPECT_EQ(digits_of(v, 16), "0.4657596075936404");
}

TEST(OracleSkellam, NormalizesOverL) {
  for (double lam : {1.0, 10.0}) {
    BigReal sum = oracle_skellam_pmf(BigReal(lam), 0);
    for (long long l = 1; l <= 200; ++l) sum += 2 * oracle_skellam_pmf(BigReal(lam), l);
    EXPECT_LT(abs(sum - 1), pow(BigReal(10), -30)) << "lam=" << lam;
  }
}

TEST(OracleErf, NormalCdfValues) {
  const BigReal phi1 = oracle_normal_cdf(BigReal(1));
  EXPECT_EQ(digits_of(phi1, 16), "0.8413447460685429");
  EXPECT_EQ(oracle_normal_cdf(BigReal(0)), BigReal(1) / 2);
  // Symmetry identity to 45 digits.
  EXPECT_LT(abs(oracle_normal_cdf(BigReal(1)) + oracle_normal_cdf(BigReal(-1)) - 1),
            pow(BigReal(10), -45));
  // Phi(-0.96) + 0.0541 < 0.2227, the closed-chain interval constant.
  const BigReal sum = oracle_normal_cdf(BigReal("-0.96")) + BigReal("0.0541");
  EXPECT_LT(sum, BigReal("0.2227"));
}

TEST(OracleQGap, QuantifiesTheTruncation) {
  const BigReal gap200 = oracle_q_truncation_gap(200.0, 250);
  EXPECT_GT(gap200, 0);
  EXPECT_LT(gap200, BigReal(1) / 1000000);  // < 1e-6: reproduction is meaningful
  const BigReal gap05 = oracle_q_truncation_gap(0.5, 250);
  EXPECT_LT(gap05, pow(BigReal(10), -30));
  const BigReal gap100 = oracle_q_truncation_gap(100.0, 250);
  EXPECT_LE(gap100, gap200);
}

TEST(OracleVsMain, BoundedValuesContainTheTruth) {
  // The example corpus: every BoundedValue should contain its oracle value.
  struct Case {
    BoundedValue main;
    BigReal oracle;
    const char* label;
  };
  const BigReal lam8 = (BigReal(17) - sqrt(BigReal(33))) / 2;
  const std::vector<Case> cases = {
      {poisson_pmf(4.0, 6), oracle_poisson_cdf(BigReal(4), 6) - oracle_poisson_cdf(BigReal(4), 5),
       "pmf(4,6)"},
      {poisson_cdf(1.0, 2), BigReal(5) / 2 * exp(-BigReal(1)), "cdf(1,2)"},
      {poisson_cdf((17.0 - std::sqrt(33.0)) / 2.0, 7), oracle_poisson_cdf(lam8, 7), "cdf(lam8,7)"},
      {poisson_cdf(604.0, 628), oracle_poisson_cdf(BigReal(604), 628), "cdf(604,628)"},
      {skellam_pmf(0.5, 0), oracle_skellam_pmf(BigReal(1) / 2, 0), "skellam(0.5,0)"},
      {skellam_pmf(1.0, 1), oracle_skellam_pmf(BigReal(1), 1), "skellam(1,1)"},
      {skellam_pmf(20.0, 15), oracle_skellam_pmf(BigReal(20), 15), "skellam(20,15)"},
      {skellam_pmf(200.0, 3), oracle_skellam_pmf(BigReal(200), 3), "skellam(200,3)"},
      {q_truncated(0.5, 250),
       oracle_skellam_pmf(BigReal(1) / 2, 0) + 2 * oracle_skellam_pmf(BigReal(1) / 2, 1) -
           oracle_q_truncation_gap(0.5, 250),
       "q(0.5,250)"},
      {normal_cdf(1.0), oracle_normal_cdf(BigReal(1)), "Phi(1)"},
      {normal_cdf(-3.5), oracle_normal_cdf(BigReal("-3.5")), "Phi(-3.5)"},
  };
  for (const Case& c : cases) {
    const double diff = std::fabs(static_cast<double>(BigReal(c.main.value) - c.oracle));
    EXPECT_LE(diff, c.main.abs_err) << c.label;
  }
}

TEST(OracleVsMain, RandomizedConcentrationWithinAbsErr) {
  std::mt19937_64 rng(7777);
  std::uniform_real_distribution<double> up(0.011, 0.989);
  std::uniform_real_distribution<double> ul(0.01, 50.0);
  for (int i = 0; i < 120; ++i) {
    Family fam;
    switch (i % 4) {
      case 0: fam = Geometric{up(rng)}; break;
      case 1: fam = SymGeometric{up(rng)}; break;
      case 2: fam = Poisson{ul(rng)}; break;
      default: fam = SymPoisson{ul(rng)}; break;
    }
    const Mode mode = (i / 4) % 2 == 0 ? Mode::Closed : Mode::Open;
    const BoundedValue v = concentration(fam, mode);
    const double o = static_cast<double>(oracle_concentration(fam, mode));
    EXPECT_LE(std::fabs(v.value - o), v.abs_err) << "i=" << i;
  }
}

TEST(OracleMoments, AgreeWithClosedForms) {
  for (double lam : {0.7, 2.0, 9.0}) {
    const MomentSet m = moments(Poisson{lam});
    EXPECT_NEAR(m.mean, static_cast<double>(oracle_moment(Poisson{lam}, 1)), 1e-12);
    EXPECT_NEAR(*m.third_raw, static_cast<double>(oracle_moment(Poisson{lam}, 3)), 1e-9);
    EXPECT_NEAR(*m.fourth_raw, static_cast<double>(oracle_moment(Poisson{lam}, 4)), 1e-8);
  }
  const MomentSet sg = moments(SymGeometric{0.35});
  EXPECT_NEAR(sg.variance, static_cast<double>(oracle_moment(SymGeometric{0.35}, 2)), 1e-10);
  const MomentSet sp = moments(SymPoisson{4.0});
  EXPECT_NEAR(sp.variance, static_cast<double>(oracle_moment(SymPoisson{4.0}, 2)), 1e-9);
}

TEST(OraclePrecision, RuntimeParameter) {
  EXPECT_THROW(oracle_set_precision(20), std::domain_error);
  oracle_set_precision(80);
  EXPECT_EQ(oracle_precision(), 80u);
  const BigReal v = oracle_normal_cdf(BigReal(1));
  EXPECT_EQ(digits_of(v, 16), "0.8413447460685429");
  oracle_set_precision(50);
}

}  // namespace
}  // namespace idconc
