#include "idconc/distributions.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace idconc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// k! is exactly representable as a double for k <= 20.
constexpr double kFactorial[21] = {
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
};

// Kahan-compensated accumulator.
struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

void validate(const Family& family) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Geometric> || std::is_same_v<T, SymGeometric>) {
          require(std::isfinite(f.p) && f.p > 0.0 && f.p < 1.0, "p must lie in (0,1)");
        } else {
          require(std::isfinite(f.lambda) && f.lambda > 0.0, "lambda must be positive and finite");
        }
      },
      family);
}

double log_factorial(long long k) {
  require(k >= 0, "log_factorial: k must be nonnegative");
  if (k <= 20) return std::log(kFactorial[k]);
  // Stirling series at z = k+1; truncation after the z^-7 term keeps the
  // absolute error below 1/(1188 z^9) < 8e-16 for k >= 21.
  const double z = static_cast<double>(k) + 1.0;
  const double z2 = z * z;
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  double series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2) -
                  1.0 / (1680.0 * z * z2 * z2 * z2);
  return (z - 0.5) * std::log(z) - z + kHalfLog2Pi + series;
}

BoundedValue poisson_pmf(double lambda, long long k) {
  require(std::isfinite(lambda) && lambda > 0.0, "poisson_pmf: lambda must be positive and finite");
  require(k >= 0, "poisson_pmf: k must be nonnegative");
  const double kd = static_cast<double>(k);
  const double lf = log_factorial(k);
  const double arg = kd * std::log(lambda) - lambda - lf;
  const double value = std::exp(arg);
  // exp of an argument carrying absolute error ~ |arg terms| * eps gives the
  // same relative error in the result.
  const double arg_mag = std::fabs(kd * std::log(lambda)) + lambda + std::fabs(lf);
  return {value, value * (arg_mag + 4.0) * kEps};
}

BoundedValue poisson_cdf(double lambda, long long m) {
  require(std::isfinite(lambda) && lambda > 0.0, "poisson_cdf: lambda must be positive and finite");
  if (m < 0) return {0.0, 0.0};

  if (lambda <= 700.0) {
    // Term recurrence from e^{-lambda}; no underflow up to lambda ~ 708.
    double term = std::exp(-lambda);
    Kahan acc;
    acc.add(term);
    for (long long k = 1; k <= m; ++k) {
      term *= lambda / static_cast<double>(k);
      acc.add(term);
    }
    const double relerr = (2.0 * static_cast<double>(m) + 8.0) * kEps;
    return {acc.sum, acc.sum * relerr};
  }

  // Out-of-scope lambda: per-term log-space evaluation, immune to e^{-lambda}
  // underflow.
  Kahan acc;
  double err = 0.0;
  for (long long k = 0; k <= m; ++k) {
    BoundedValue t = poisson_pmf(lambda, k);
    acc.add(t.value);
    err += t.abs_err;
  }
  err += (static_cast<double>(m) + 2.0) * kEps * acc.sum;
  return {acc.sum, err};
}

Prob geometric_pmf(double p, long long k) {
  require(std::isfinite(p) && p > 0.0 && p < 1.0, "geometric_pmf: p must lie in (0,1)");
  require(k >= 0, "geometric_pmf: k must be nonnegative");
  return {p * std::pow(1.0 - p, static_cast<double>(k))};
}

Prob sym_geometric_pmf(double p, long long k) {
  require(std::isfinite(p) && p > 0.0 && p < 1.0, "sym_geometric_pmf: p must lie in (0,1)");
  const double q = 1.0 - p;
  const double ak = static_cast<double>(k < 0 ? -k : k);
  return {(1.0 - q) * std::pow(q, ak) / (1.0 + q)};
}

BoundedValue skellam_pmf(double lambda, long long l, double target_abs_err) {
  require(std::isfinite(lambda) && lambda > 0.0, "skellam_pmf: lambda must be positive and finite");
  const long long la = l < 0 ? -l : l;
  const double lam2 = lambda * lambda;

  // t_0 = lambda^l / l!; build by products for small l, log space otherwise.
  double t;
  double t0relerr;
  if (la <= 32) {
    t = 1.0;
    for (long long j = 1; j <= la; ++j) t *= lambda / static_cast<double>(j);
    t0relerr = (2.0 * static_cast<double>(la) + 2.0) * kEps;
  } else {
    const double lf = log_factorial(la);
    const double arg = static_cast<double>(la) * std::log(lambda) - lf;
    t = std::exp(arg);
    t0relerr = (std::fabs(arg) + std::fabs(lf) + 4.0) * kEps;
  }

  Kahan acc;
  acc.add(t);
  const double prefactor = std::exp(-2.0 * lambda);
  const double stop_rel = std::ldexp(1.0, -70);
  double tail = 0.0;
  long long k = 0;
  const long long k_cap = static_cast<long long>(4.0 * lambda) + la + 400;
  while (k < k_cap) {
    const double ratio = (lambda / static_cast<double>(k + 1)) *
                         (lambda / static_cast<double>(k + 1 + la));
    t *= lam2 / (static_cast<double>(k + 1) * static_cast<double>(k + 1 + la));
    acc.add(t);
    ++k;
    if (ratio < 1.0) {
      tail = t * ratio / (1.0 - ratio);
      const double budget = std::fmax(target_abs_err / std::fmax(prefactor, 1e-300),
                                      acc.sum * stop_rel);
      if (t <= acc.sum * stop_rel && tail <= budget) break;
    }
  }

  const double value = prefactor * acc.sum;
  const double round_rel =
      t0relerr + (3.0 * static_cast<double>(k) + 2.0 * lambda + 8.0) * kEps;
  return {value, value * round_rel + prefactor * tail};
}

MomentSet moments(const Family& family) {
  validate(family);
  return std::visit(
      [](const auto& f) -> MomentSet {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Geometric>) {
          const double q = 1.0 - f.p;
          return {q / f.p, q / (f.p * f.p), std::nullopt, std::nullopt};
        } else if constexpr (std::is_same_v<T, SymGeometric>) {
          const double q = 1.0 - f.p;
          return {0.0, 2.0 * q / (f.p * f.p), 0.0, std::nullopt};
        } else if constexpr (std::is_same_v<T, Poisson>) {
          const double l = f.lambda;
          return {l, l, l * (1.0 + 3.0 * l + l * l), l * (1.0 + 7.0 * l + 6.0 * l * l + l * l * l)};
        } else {
          static_assert(std::is_same_v<T, SymPoisson>);
          return {0.0, 2.0 * f.lambda, 0.0, std::nullopt};
        }
      },
      family);
}

}  // namespace idconc
