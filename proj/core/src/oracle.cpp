#include "idconc/oracle.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <stdexcept>

namespace idconc {

namespace {

unsigned g_digits = 50;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// Stop threshold well below the working precision.
BigReal tiny_rel() { return boost::multiprecision::pow(BigReal(10), -static_cast<int>(g_digits) - 15); }

}  // namespace

void oracle_set_precision(unsigned digits) {
  require(digits >= 50, "oracle precision must be at least 50 digits");
  g_digits = digits;
  BigReal::default_precision(digits);
}

unsigned oracle_precision() { return g_digits; }

namespace {

struct PrecisionInit {
  PrecisionInit() { BigReal::default_precision(g_digits); }
} g_precision_init;

}  // namespace

BigReal oracle_poisson_cdf(const BigReal& lambda, long long m) {
  require(lambda > 0, "oracle_poisson_cdf: lambda must be positive");
  if (m < 0) return BigReal(0);
  BigReal term = exp(-lambda);
  BigReal sum = term;
  for (long long k = 1; k <= m; ++k) {
    term *= lambda / k;
    sum += term;
  }
  return sum;
}

BigReal oracle_skellam_pmf(const BigReal& lambda, long long l) {
  require(lambda > 0, "oracle_skellam_pmf: lambda must be positive");
  const long long la = l < 0 ? -l : l;
  const BigReal e = exp(-lambda);
  BigReal a = e;  // pois(lambda, la + j)
  for (long long k = 1; k <= la; ++k) a *= lambda / k;
  BigReal b = e;  // pois(lambda, j)
  BigReal sum = a * b;
  const BigReal stop = tiny_rel();
  for (long long j = 0; j < 1000000; ++j) {
    a *= lambda / (la + j + 1);
    b *= lambda / (j + 1);
    const BigReal t = a * b;
    sum += t;
    if (BigReal(j) > 2 * lambda && t < sum * stop) break;
  }
  return sum;
}

BigReal oracle_erf(const BigReal& x) { return boost::math::erf(x); }

BigReal oracle_normal_cdf(const BigReal& x) {
  return boost::math::erfc(-x / sqrt(BigReal(2))) / 2;
}

namespace {

// One l-series of Q: sum_k lambda^{2k+l} / (k! (k+l)!), truncated at K terms
// or run to convergence when K < 0.
BigReal q_series(const BigReal& lambda, long long l, long long K) {
  BigReal t = 1;
  for (long long j = 1; j <= l; ++j) t *= lambda / j;
  BigReal sum = t;
  const BigReal lam2 = lambda * lambda;
  const BigReal stop = tiny_rel();
  const long long cap = K >= 0 ? K : 4000000;
  for (long long k = 0; k < cap; ++k) {
    t *= lam2 / (BigReal(k + 1) * BigReal(k + 1 + l));
    sum += t;
    if (K < 0 && BigReal(k) > lambda && t < sum * stop) break;
  }
  return sum;
}

BigReal q_value(const BigReal& lambda, long long K) {
  const long long lmax = boost::multiprecision::floor(sqrt(2 * lambda)).convert_to<long long>();
  BigReal total = q_series(lambda, 0, K);
  for (long long l = 1; l <= lmax; ++l) total += 2 * q_series(lambda, l, K);
  return exp(-2 * lambda) * total;
}

}  // namespace

BigReal oracle_q_truncation_gap(double lambda, int terms) {
  require(std::isfinite(lambda) && lambda > 0.0, "oracle_q_truncation_gap: bad lambda");
  const BigReal lam(lambda);
  return q_value(lam, -1) - q_value(lam, terms);
}

BigReal oracle_concentration(const Family& family, Mode mode) {
  validate(family);
  return std::visit(
      [&](const auto& f) -> BigReal {
        using T = std::decay_t<decltype(f)>;
        using boost::multiprecision::ceil;
        using boost::multiprecision::floor;
        if constexpr (std::is_same_v<T, Geometric>) {
          const BigReal p(f.p);
          const BigReal q = 1 - p;
          const BigReal s = sqrt(q);
          const BigReal hi_real = (q + s) / p;
          long long hi = mode == Mode::Closed ? floor(hi_real).convert_to<long long>()
                                              : (-floor(-hi_real)).convert_to<long long>() - 1;
          if (hi < 0) return BigReal(0);
          // sum_{k=0}^{hi} p q^k = 1 - q^{hi+1}
          return 1 - pow(q, hi + 1);
        } else if constexpr (std::is_same_v<T, SymGeometric>) {
          const BigReal p(f.p);
          const BigReal q = 1 - p;
          const BigReal sig = sqrt(2 * q) / p;
          long long hi = mode == Mode::Closed ? floor(sig).convert_to<long long>()
                                              : (-floor(-sig)).convert_to<long long>() - 1;
          if (hi < 0) return BigReal(0);
          BigReal sum = (1 - q) / (1 + q);
          BigReal t = sum;
          for (long long k = 1; k <= hi; ++k) {
            t *= q;
            sum += 2 * t;
          }
          return sum;
        } else if constexpr (std::is_same_v<T, Poisson>) {
          const BigReal lam(f.lambda);
          const BigReal s = sqrt(lam);
          long long lo = mode == Mode::Closed ? ceil(lam - s).convert_to<long long>()
                                              : floor(lam - s).convert_to<long long>() + 1;
          long long hi = mode == Mode::Closed ? floor(lam + s).convert_to<long long>()
                                              : ceil(lam + s).convert_to<long long>() - 1;
          if (lo < 0) lo = 0;
          if (lo > hi) return BigReal(0);
          return oracle_poisson_cdf(lam, hi) - oracle_poisson_cdf(lam, lo - 1);
        } else {
          const BigReal lam(f.lambda);
          const BigReal sig = sqrt(2 * lam);
          long long hi = mode == Mode::Closed ? floor(sig).convert_to<long long>()
                                              : ceil(sig).convert_to<long long>() - 1;
          if (hi < 0) return BigReal(0);
          BigReal sum = oracle_skellam_pmf(lam, 0);
          for (long long l = 1; l <= hi; ++l) sum += 2 * oracle_skellam_pmf(lam, l);
          return sum;
        }
      },
      family);
}

BigReal oracle_moment(const Family& family, int r) {
  validate(family);
  require(r >= 0 && r <= 4, "oracle_moment: r must lie in [0,4]");
  const BigReal stop = tiny_rel();
  return std::visit(
      [&](const auto& f) -> BigReal {
        using T = std::decay_t<decltype(f)>;
        auto power = [&](long long k) {
          BigReal v = 1;
          for (int i = 0; i < r; ++i) v *= k;
          return v;
        };
        if constexpr (std::is_same_v<T, Geometric>) {
          const BigReal p(f.p);
          const BigReal q = 1 - p;
          BigReal pmf = p;
          BigReal sum = 0;  // k = 0 contributes 0 for r >= 1
          if (r == 0) sum = pmf;
          for (long long k = 1; k < 1000000; ++k) {
            pmf *= q;
            const BigReal t = power(k) * pmf;
            sum += t;
            if (t < (1 + abs(sum)) * stop) break;
          }
          return sum;
        } else if constexpr (std::is_same_v<T, SymGeometric>) {
          if (r % 2 == 1) return BigReal(0);
          const BigReal p(f.p);
          const BigReal q = 1 - p;
          BigReal pmf = (1 - q) / (1 + q);
          BigReal sum = r == 0 ? pmf : BigReal(0);
          for (long long k = 1; k < 1000000; ++k) {
            pmf *= q;
            const BigReal t = 2 * power(k) * pmf;
            sum += t;
            if (t < (1 + abs(sum)) * stop) break;
          }
          return sum;
        } else if constexpr (std::is_same_v<T, Poisson>) {
          const BigReal lam(f.lambda);
          BigReal pmf = exp(-lam);
          BigReal sum = r == 0 ? pmf : BigReal(0);
          for (long long k = 1; k < 1000000; ++k) {
            pmf *= lam / k;
            const BigReal t = power(k) * pmf;
            sum += t;
            if (BigReal(k) > 2 * lam && t < (1 + abs(sum)) * stop) break;
          }
          return sum;
        } else {
          if (r % 2 == 1) return BigReal(0);
          const BigReal lam(f.lambda);
          BigReal sum = r == 0 ? oracle_skellam_pmf(lam, 0) : BigReal(0);
          for (long long k = 1; k < 1000000; ++k) {
            const BigReal t = 2 * power(k) * oracle_skellam_pmf(lam, k);
            sum += t;
            if (BigReal(k) > 3 * lam && t < (1 + abs(sum)) * stop) break;
          }
          return sum;
        }
      },
      family);
}

}  // namespace idconc
