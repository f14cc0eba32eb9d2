#pragma once

// Independent high-precision brute-force engine. Everything here evaluates
// by a different route than the main build (convolutions instead of single
// series, arbitrary precision instead of doubles) so the two sides can
// cross-check each other.

#include <boost/multiprecision/mpfr.hpp>

#include "idconc/concentration.hpp"

namespace idconc {

using BigReal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;

/// Working precision in decimal digits; >= 50, default 50.
void oracle_set_precision(unsigned digits);
unsigned oracle_precision();

/// Partial sum e^{-lambda} sum_{k<=m} lambda^k/k! at working precision.
BigReal oracle_poisson_cdf(const BigReal& lambda, long long m);

/// Skellam pmf by the convolution route:
/// sum_j pois(lambda, |l|+j) pois(lambda, j).
BigReal oracle_skellam_pmf(const BigReal& lambda, long long l);

BigReal oracle_erf(const BigReal& x);
BigReal oracle_normal_cdf(const BigReal& x);

/// Difference between the fully converged symmetric-Poisson sum Q and its
/// K-term truncation: the quantity the truncated reproduction silently
/// drops.
BigReal oracle_q_truncation_gap(double lambda, int terms);

/// Concentration by direct high-precision summation; the support range is
/// re-derived in BigReal, independent of the double-precision path.
BigReal oracle_concentration(const Family& family, Mode mode);

/// Brute-force raw moment sum k^r pmf(k), r <= 4.
BigReal oracle_moment(const Family& family, int r);

}  // namespace idconc
