#include "idconc/certify.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <map>
#include <stdexcept>

namespace idconc {
namespace {

TEST(NormalCdf, BasicValues) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0).value, 0.5);
  EXPECT_NEAR(normal_cdf(1.0).value, 0.8413447460685429, 1e-13);
  EXPECT_NEAR(normal_cdf(-1.0).value, 1.0 - normal_cdf(1.0).value, 1e-15);
  EXPECT_THROW(normal_cdf(std::nan("")), std::domain_error);
}

TEST(NormalCdf, AgreesWithErfcOnAGrid) {
  for (double x = -8.0; x <= 8.0; x += 0.0625) {
    const BoundedValue v = normal_cdf(x);
    const double ref = 0.5 * std::erfc(-x / std::sqrt(2.0));
    EXPECT_NEAR(v.value, ref, 1e-13) << "x=" << x;
    EXPECT_LE(v.abs_err, 1e-12);
  }
}

TEST(RhoPoisson1, ValueAndBruteForce) {
  EXPECT_NEAR(rho_poisson1(), 1.0 + 2.0 * std::exp(-1.0), 1e-15);
  double brute = 0.0;
  for (long long k = 0; k <= 60; ++k) {
    const double d = std::fabs(static_cast<double>(k) - 1.0);
    brute += d * d * d * poisson_pmf(1.0, k).value;
  }
  EXPECT_NEAR(rho_poisson1(), brute, 1e-12);
  EXPECT_LT(0.7656 * rho_poisson1(), 1.328898);
}

TEST(BeBand, QuotedBoundsAt604) {
  const double rho = rho_poisson1();
  const BeBand k1 = be_band(604, 1.0, rho, 0.7656);
  EXPECT_GT(k1.lower, 0.7872);
  EXPECT_LT(k1.lower, 0.7873);
  const BeBand k3 = be_band(604, -1.0, rho, 0.7656);
  EXPECT_LT(k3.upper, 0.2128);
  EXPECT_GT(k3.upper, 0.2127);
  EXPECT_THROW(be_band(0, 1.0, rho, 0.7656), std::domain_error);
  EXPECT_THROW(be_band(10, 1.0, -1.0, 0.7656), std::domain_error);
}

TEST(BeBand, SmallNThresholdBand) {
  // The interval band at the n=108 threshold; the printed "0.6886" slightly
  // overstates the honest 0.68855, within 5e-5.
  const double t = (std::sqrt(108.0) - 1.0) / std::sqrt(109.0);
  const BeBand b = be_band(109, t, rho_poisson1(), 0.7656);
  EXPECT_NEAR(b.lower, 0.6885534030094086, 1e-12);
  EXPECT_NEAR(b.lower, 0.6886, 5e-5);
}

TEST(BeBand, ContainsTrueCdfValues) {
  const double rho = rho_poisson1();
  for (long long n : {108LL, 200LL, 604LL, 1000LL}) {
    const double nd = static_cast<double>(n);
    const double s = std::sqrt(nd);
    const BeBand k1 = be_band(n, 1.0, rho, 0.7656);
    const double target1 = poisson_cdf(nd, static_cast<long long>(std::floor(nd + s))).value;
    EXPECT_GT(target1, k1.lower) << "n=" << n;
    EXPECT_LT(target1, k1.upper) << "n=" << n;
    const BeBand k3 = be_band(n, -1.0, rho, 0.7656);
    const double target3 = poisson_cdf(nd, static_cast<long long>(std::floor(nd - s))).value;
    EXPECT_GT(target3, k3.lower) << "n=" << n;
    EXPECT_LT(target3, k3.upper) << "n=" << n;
  }
}

TEST(BeThresholdCheck, ClosedChainPassesAndReplays) {
  const ThresholdCheck tc = be_threshold_check(Mode::Closed);
  EXPECT_TRUE(tc.pass);
  EXPECT_TRUE(tc.monotone_ok);
  EXPECT_EQ(tc.n_threshold, 604);
  EXPECT_NEAR(tc.quoted_margin, 0.5542 - 1.5 * std::exp(-1.0), 1e-12);
  EXPECT_NEAR(tc.quoted_margin, 0.00238, 1e-5);
  EXPECT_NEAR(tc.computed_lower, 0.7770717008676211, 1e-12);
  EXPECT_NEAR(tc.computed_upper, 0.2225649225376125, 1e-12);
  for (const QuotedReplay& r : tc.replays) {
    EXPECT_NEAR(r.as_printed, r.quoted, 1e-12) << r.label;
    EXPECT_TRUE(r.rounding_valid) << r.label;
    // Each printed constant carries one directed 4dp rounding (~2e-4); the
    // conclusion subtracts two of them.
    EXPECT_NEAR(r.computed, r.quoted, r.label == "conclusion" ? 4e-4 : 2e-4) << r.label;
  }
}

TEST(BeThresholdCheck, OpenChainPassesWithDocumentedReplays) {
  const ThresholdCheck tc = be_threshold_check(Mode::Open);
  EXPECT_TRUE(tc.pass);
  EXPECT_TRUE(tc.monotone_ok);
  EXPECT_EQ(tc.n_threshold, 108);
  EXPECT_NEAR(tc.quoted_margin, 0.3793 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(tc.quoted_margin, 0.01142, 1e-5);
  // Honest chain values.
  EXPECT_NEAR(tc.computed_lower, 0.6885534030094086, 1e-12);
  EXPECT_NEAR(tc.computed_upper, 0.3097082426079326, 1e-12);
  EXPECT_NEAR(tc.computed_margin, (0.6885534030094086 - 0.3097082426079326) - std::exp(-1.0),
              1e-12);
  std::map<std::string, QuotedReplay> by_label;
  for (const QuotedReplay& r : tc.replays) by_label[r.label] = r;
  // Every printed constant reproduces through the documented convention.
  for (const auto& [label, r] : by_label) {
    EXPECT_NEAR(r.as_printed, r.quoted, 1e-12) << label;
  }
  // The z-table constants are honest only to ~5e-4; the tail ones to 5e-5.
  EXPECT_NEAR(by_label["interval-lower"].computed, 0.6886, 5e-5);
  EXPECT_FALSE(by_label["interval-lower"].rounding_valid);
  EXPECT_GT(std::fabs(by_label["interval-upper"].computed - 0.3093), 5e-5);
  EXPECT_NEAR(by_label["interval-upper"].computed, 0.3093, 5e-4);
  EXPECT_FALSE(by_label["interval-upper"].rounding_valid);
  EXPECT_NEAR(by_label["conclusion"].computed, 0.3793, 5e-4);
}

TEST(PoissonCaseTable, ClosedReplaysQuotedBounds) {
  const std::vector<PieceReport> table = poisson_case_table(Mode::Closed);
  ASSERT_EQ(table.size(), 10u);
  const double quoted[] = {0.68252, 0.73576, 0.9197, 0.55182, 0.68335,
                           0.80191, 0.60899, 0.69355, 0.79774, 0.64792};
  for (std::size_t i = 0; i < table.size(); ++i) {
    EXPECT_NEAR(table[i].piece_inf, quoted[i], 5e-5) << table[i].case_id;
    EXPECT_EQ(table[i].quoted, quoted[i]);
  }
}

TEST(PoissonCaseTable, ClosedStructure) {
  const std::vector<PieceReport> table = poisson_case_table(Mode::Closed);
  const PieceReport& iv = table[3];
  EXPECT_EQ(iv.case_id, "poisson-closed/(iv)");
  EXPECT_EQ(iv.k_lo, 1);
  EXPECT_EQ(iv.k_hi, 2);
  EXPECT_EQ(iv.monotonicity, Monotonicity::Unimodal);
  ASSERT_TRUE(iv.stationary.has_value());
  EXPECT_NEAR(*iv.stationary, std::sqrt(2.0), 1e-15);
  EXPECT_EQ(iv.inf_kind, InfKind::Limit);
  EXPECT_DOUBLE_EQ(iv.inf_at, 1.0);
  EXPECT_NEAR(iv.piece_inf, 1.5 * std::exp(-1.0), 1e-15);

  // Case (vi) is genuinely decreasing (stationary point 24^{1/4} sits left
  // of the piece); case (x) is unimodal at 360^{1/4}, not decreasing.
  EXPECT_EQ(table[5].monotonicity, Monotonicity::Decreasing);
  EXPECT_EQ(table[5].inf_kind, InfKind::Right);  // closed right endpoint
  const PieceReport& x = table[9];
  EXPECT_EQ(x.monotonicity, Monotonicity::Unimodal);
  ASSERT_TRUE(x.stationary.has_value());
  EXPECT_NEAR(*x.stationary, std::pow(360.0, 0.25), 1e-12);
  EXPECT_EQ(x.inf_kind, InfKind::Limit);

  // Case (ix): the value at lambda = 4 exceeds the quoted bound.
  EXPECT_GT(table[8].piece_inf, 0.79774);
}

TEST(PoissonCaseTable, OpenReplaysQuotedBounds) {
  const std::vector<PieceReport> table = poisson_case_table(Mode::Open);
  ASSERT_EQ(table.size(), 10u);
  const PieceReport& iii = table[2];
  EXPECT_EQ(iii.case_id, "poisson-open/(iii)");
  EXPECT_NEAR(iii.piece_inf, std::exp(-1.0), 1e-15);
  EXPECT_NEAR(iii.piece_inf, 0.36788, 5e-5);
  const PieceReport& ix = table[8];
  EXPECT_GT(ix.piece_inf, 0.547);
  EXPECT_NEAR(ix.piece_inf, 0.547, 5e-5);
  // Attained right endpoints where the interval is closed on the right.
  EXPECT_EQ(table[4].inf_kind, InfKind::Right);   // (v): (b2, b3]
  EXPECT_EQ(table[9].inf_kind, InfKind::Right);   // (x): (4, b6]
  EXPECT_EQ(table[3].inf_kind, InfKind::Limit);   // (iv): inf at open left end
  EXPECT_DOUBLE_EQ(table[3].inf_at, 1.0);
}

TEST(PoissonCaseTable, PieceValuesMatchSpotChecks) {
  const std::vector<PieceReport> closed = poisson_case_table(Mode::Closed);
  // Case (i): values e^{-lambda} > e^{-(3-sqrt5)/2} ~ 0.68252.
  EXPECT_NEAR(piece_value(closed[0], 0.2), std::exp(-0.2), 1e-15);
  EXPECT_NEAR(closed[0].piece_inf, std::exp(-(3.0 - std::sqrt(5.0)) / 2.0), 1e-14);
  // Case (ix) closed: I(4) > 0.79774; open: I'(4) > 0.547.
  EXPECT_NEAR(closed[8].piece_inf, 0.79774782715375541, 1e-13);
}

TEST(SkellamBeLower, Values) {
  const BoundedValue v200 = skellam_be_lower(200.0);
  EXPECT_GT(v200.value, 0.4793);
  EXPECT_NEAR(v200.value, 0.47942269213708590, 1e-12);
  const BoundedValue vbig = skellam_be_lower(1e6);
  const double span = 0.6826894921370859;
  EXPECT_LT(std::fabs(vbig.value - span), std::fabs(v200.value - span));
  EXPECT_NEAR(vbig.value, 0.6798148654836841, 1e-10);
  EXPECT_THROW(skellam_be_lower(199.0), std::domain_error);
}

TEST(SkellamBeLower, MomentFormulaMatchesBruteForce) {
  // E[N^3] = mu(1+3mu+mu^2) at mu = lambda/floor(lambda).
  const double mu = 200.7 / 200.0;
  const double formula = mu * (1.0 + 3.0 * mu + mu * mu);
  double brute = 0.0;
  for (long long k = 0; k <= 80; ++k) {
    brute += static_cast<double>(k * k * k) * poisson_pmf(mu, k).value;
  }
  EXPECT_NEAR(formula, brute, 1e-12);
}

TEST(LipschitzBound, ValuesAndEmpiricalSlope) {
  EXPECT_DOUBLE_EQ(lipschitz_bound(20), -78.0);
  EXPECT_DOUBLE_EQ(lipschitz_bound(2), -6.0);
  EXPECT_THROW(lipschitz_bound(1), std::domain_error);
  EXPECT_THROW(lipschitz_bound(21), std::domain_error);
  // Central-difference slope of the open concentration on piece interiors
  // stays above the per-piece bound.
  const double h = 1e-5;
  for (int n = 2; n <= 20; n += 3) {
    const double lo = static_cast<double>((n - 1) * (n - 1)) / 2.0;
    const double hi = static_cast<double>(n * n) / 2.0;
    for (double frac : {0.25, 0.5, 0.75}) {
      const double lam = lo + (hi - lo) * frac;
      const double slope = (concentration(SymPoisson{lam + h}, Mode::Open).value -
                            concentration(SymPoisson{lam - h}, Mode::Open).value) /
                           (2.0 * h);
      EXPECT_GE(slope, lipschitz_bound(n) - 1e-3) << "n=" << n << " lam=" << lam;
      EXPECT_GE(slope, -78.0 - 1e-3);
    }
  }
}

TEST(Step1, DerivativeCheck) {
  const BoundedValue v = step1_derivative_check();
  EXPECT_LT(v.value, 0.0);
  EXPECT_NEAR(v.value, -0.025319682324967963, 1e-15);
  EXPECT_NEAR(v.value, -0.0253, 5e-5);
  // Decreasing consequence, checked directly.
  const double p01 = skellam_pmf(0.1, 0).value;
  const double p03 = skellam_pmf(0.3, 0).value;
  const double p049 = skellam_pmf(0.49, 0).value;
  EXPECT_GT(p01, p03);
  EXPECT_GT(p03, p049);
}

TEST(CertifyInterval, PublishedConfiguration) {
  const LipschitzGridBound b = certify_interval_0p5_200();
  EXPECT_DOUBLE_EQ(b.grid_min, 0.564565);
  EXPECT_DOUBLE_EQ(b.lipschitz_const, 78.0);
  EXPECT_DOUBLE_EQ(b.step, 0.0005);
  EXPECT_NEAR(b.penalty, 0.039, 1e-15);
  EXPECT_NEAR(b.bound_raw, 0.525565, 1e-12);
  EXPECT_NEAR(b.bound, 0.52556, 1e-12);
  // Sanity: 0.564565 - 0.039 = 0.525565 >= 0.52556.
  EXPECT_GE(b.bound_raw, b.bound);
}

TEST(CertifyInterval, CoarseGridWeakensTheBound) {
  GridScanResult coarse;
  coarse.step = 0.05;
  coarse.min_value = 0.58;
  coarse.truncation_k = 250;
  coarse.points = 3991;
  const LipschitzGridBound b = certify_interval_0p5_200(coarse);
  EXPECT_NEAR(b.bound_raw, 0.58 - 78.0 * 0.05, 1e-12);
  EXPECT_LT(b.bound_raw, 0.0);  // far too weak to certify anything
}

TEST(ExactConsts, MatchAnalyticValues) {
  EXPECT_DOUBLE_EQ(exact_const(ExactTag::ThreeQuarters).decimal, 0.75);
  EXPECT_NEAR(exact_const(ExactTag::Sqrt3Over3).decimal, 0.57735026918962573, 1e-14);
  EXPECT_NEAR(exact_const(ExactTag::ThreeHalvesOverE).decimal, 0.55181916175716348, 1e-14);
  EXPECT_NEAR(exact_const(ExactTag::OneOverE).decimal, 0.36787944117144233, 1e-14);
  EXPECT_NEAR(exact_const(ExactTag::BesselSeriesOverE).decimal, 0.46575960759364043, 1e-14);
}

void expect_dominance(const Certificate& cert) {
  int witnesses = 0;
  for (const EvidenceItem& e : cert.evidence) {
    if (e.witness) {
      ++witnesses;
      continue;
    }
    if (e.lower_bound > 0.0) {
      EXPECT_GT(e.lower_bound, cert.inf_decimal) << cert.family_kind << " " << e.label;
    }
  }
  EXPECT_EQ(witnesses, 1) << cert.family_kind;
}

TEST(Certificates, AllFamiliesAndModes) {
  struct Expected {
    const char* family;
    double inf;
    double attained_at;
  };
  const Expected rows[] = {
      {"geometric", 0.75, 0.75},
      {"sym-geometric", std::sqrt(3.0) / 3.0, std::sqrt(3.0) - 1.0},
      {"poisson", 0.0, 1.0},  // inf depends on the mode
      {"sym-poisson", 0.46575960759364043, 0.5},
  };
  for (const Expected& row : rows) {
    for (Mode mode : {Mode::Closed, Mode::Open}) {
      const Certificate cert = infimum_certificate(row.family, mode);
      double expected_inf = row.inf;
      if (std::string(row.family) == "poisson") {
        expected_inf = mode == Mode::Closed ? 1.5 * std::exp(-1.0) : std::exp(-1.0);
      }
      EXPECT_NEAR(cert.inf_decimal, expected_inf, 1e-12) << row.family;
      EXPECT_EQ(cert.attained, mode == Mode::Open) << row.family;
      if (mode == Mode::Open) {
        ASSERT_TRUE(cert.attained_at.has_value());
        EXPECT_DOUBLE_EQ(*cert.attained_at, row.attained_at) << row.family;
      } else {
        EXPECT_FALSE(cert.attained_at.has_value());
      }
      expect_dominance(cert);
    }
  }
  EXPECT_THROW(infimum_certificate("nosuch", Mode::Closed), std::domain_error);
}

TEST(Certificates, PoissonClosedMarginsMatchQuotedSlack) {
  const Certificate cert = infimum_certificate("poisson", Mode::Closed);
  // Scan-segment evidence: bound 0.79345 - 0.22507 = 0.56838, giving the
  // quoted slack 0.56838 - 0.55182 over the infimum.
  const ScanPairEvidence* seg = nullptr;
  const ThresholdCheck* be = nullptr;
  for (const EvidenceItem& e : cert.evidence) {
    if (const auto* s = std::get_if<ScanPairEvidence>(&e.detail)) seg = s;
    if (const auto* t = std::get_if<ThresholdCheck>(&e.detail)) be = t;
  }
  ASSERT_NE(seg, nullptr);
  ASSERT_NE(be, nullptr);
  EXPECT_NEAR(seg->segment_bound, 0.56838, 5e-5);
  EXPECT_DOUBLE_EQ(seg->quoted_g1, 0.79345);
  EXPECT_DOUBLE_EQ(seg->quoted_g2, 0.22507);
  EXPECT_NEAR((seg->segment_bound - cert.inf_decimal) - (0.56838 - 0.55182), 0.0, 1e-4);
  EXPECT_NEAR(be->quoted_margin, 0.5542 - 0.55182, 1e-4);
}

TEST(Certificates, SymPoissonEvidenceChain) {
  const Certificate cert = infimum_certificate("sym-poisson", Mode::Open);
  bool have_grid = false, have_tail = false, have_step1 = false, have_deriv = false;
  for (const EvidenceItem& e : cert.evidence) {
    if (const auto* g = std::get_if<LipschitzGridBound>(&e.detail)) {
      have_grid = true;
      EXPECT_NEAR(g->bound, 0.52556, 1e-12);
      EXPECT_GT(e.lower_bound, cert.inf_decimal);
    }
    if (const auto* b = std::get_if<BeLowerEvidence>(&e.detail)) {
      have_tail = true;
      EXPECT_GT(b->bound.value, 0.4793);
      EXPECT_DOUBLE_EQ(b->quoted, 0.4793);
    }
    if (const auto* p = std::get_if<PieceReport>(&e.detail)) {
      have_step1 = true;
      EXPECT_TRUE(e.witness);
      EXPECT_EQ(p->inf_kind, InfKind::Right);
    }
    if (const auto* d = std::get_if<DerivativeEvidence>(&e.detail)) {
      have_deriv = true;
      EXPECT_LT(d->bound_value.value, 0.0);
      EXPECT_LT(d->max_fd_slope, 0.0);
    }
  }
  EXPECT_TRUE(have_grid && have_tail && have_step1 && have_deriv);
}

TEST(Certificates, JsonSchemaRoundTrips) {
  for (const char* fam : {"geometric", "sym-geometric", "poisson", "sym-poisson"}) {
    for (Mode mode : {Mode::Closed, Mode::Open}) {
      const Certificate cert = infimum_certificate(fam, mode);
      const std::string text = certificate_to_json(cert);
      const nlohmann::json j = nlohmann::json::parse(text);
      EXPECT_EQ(j.at("family").get<std::string>(), fam);
      EXPECT_EQ(j.at("mode").get<std::string>(), mode == Mode::Closed ? "closed" : "open");
      EXPECT_TRUE(j.at("inf_exact").is_object());
      EXPECT_TRUE(j.at("inf_exact").at("tag").is_string());
      EXPECT_DOUBLE_EQ(j.at("inf_exact").at("decimal").get<double>(), cert.inf_exact.decimal);
      EXPECT_EQ(j.at("attained").get<bool>(), cert.attained);
      if (cert.attained) {
        EXPECT_DOUBLE_EQ(j.at("attained_at").get<double>(), *cert.attained_at);
      } else {
        EXPECT_TRUE(j.at("attained_at").is_null());
      }
      const auto& ev = j.at("evidence");
      ASSERT_TRUE(ev.is_array());
      EXPECT_EQ(ev.size(), cert.evidence.size());
      int witnesses = 0;
      for (const auto& item : ev) {
        EXPECT_TRUE(item.at("type").is_string());
        EXPECT_TRUE(item.at("label").is_string());
        if (item.at("witness").get<bool>()) ++witnesses;
      }
      EXPECT_EQ(witnesses, 1);
    }
  }
}

TEST(Certificates, JsonPrints17SignificantDigits) {
  const Certificate cert = infimum_certificate("poisson", Mode::Open);
  const std::string text = certificate_to_json(cert);
  // The infimum decimal e^{-1} must appear with its full 17-digit form.
  EXPECT_NE(text.find("0.36787944117144233"), std::string::npos);
}

}  // namespace
}  // namespace idconc
