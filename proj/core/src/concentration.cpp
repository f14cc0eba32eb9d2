#include "idconc/concentration.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace idconc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

long long closed_lo(double x) { return static_cast<long long>(std::ceil(x)); }
long long closed_hi(double x) { return static_cast<long long>(std::floor(x)); }
long long open_lo(double x) { return static_cast<long long>(std::floor(x)) + 1; }
long long open_hi(double x) { return static_cast<long long>(std::ceil(x)) - 1; }

// Interval endpoints grouped so that the breakpoint parameters of the case
// analyses (p = 3/4, lambda integer or n^2/2) land on exact doubles.
struct RealInterval {
  double lo, hi;
  long long support_min;  // -inf encoded as LLONG_MIN not needed; use flag
  bool bounded_below;
};

RealInterval sigma_interval(const Family& family) {
  return std::visit(
      [](const auto& f) -> RealInterval {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Geometric>) {
          const double q = 1.0 - f.p;
          const double s = std::sqrt(q);
          return {(q - s) / f.p, (q + s) / f.p, 0, true};
        } else if constexpr (std::is_same_v<T, SymGeometric>) {
          const double sig = std::sqrt(2.0 * (1.0 - f.p)) / f.p;
          return {-sig, sig, 0, false};
        } else if constexpr (std::is_same_v<T, Poisson>) {
          const double s = std::sqrt(f.lambda);
          return {f.lambda - s, f.lambda + s, 0, true};
        } else {
          const double sig = std::sqrt(2.0 * f.lambda);
          return {-sig, sig, 0, false};
        }
      },
      family);
}

}  // namespace

SupportRange stddev_range(const Family& family, Mode mode) {
  validate(family);
  const RealInterval iv = sigma_interval(family);
  SupportRange r;
  if (mode == Mode::Closed) {
    r.lo = closed_lo(iv.lo);
    r.hi = closed_hi(iv.hi);
  } else {
    r.lo = open_lo(iv.lo);
    r.hi = open_hi(iv.hi);
  }
  if (iv.bounded_below && r.lo < iv.support_min) r.lo = iv.support_min;
  return r;
}

BoundedValue concentration_over(const Family& family, const SupportRange& range) {
  validate(family);
  if (range.empty()) return {0.0, 0.0};

  return std::visit(
      [&](const auto& f) -> BoundedValue {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Geometric>) {
          double sum = 0.0;
          for (long long k = range.lo; k <= range.hi; ++k) sum += geometric_pmf(f.p, k).value;
          const double n = static_cast<double>(range.hi - range.lo + 1);
          return {sum, sum * (2.0 * static_cast<double>(range.hi) + n + 8.0) * kEps};
        } else if constexpr (std::is_same_v<T, SymGeometric>) {
          // Symmetric range: pmf(0) + 2 sum_{k>=1} pmf(k).
          double sum = 0.0;
          double errw = 0.0;
          if (range.lo == -range.hi) {
            sum = sym_geometric_pmf(f.p, 0).value;
            for (long long k = 1; k <= range.hi; ++k) sum += 2.0 * sym_geometric_pmf(f.p, k).value;
            errw = 2.0 * static_cast<double>(range.hi);
          } else {
            for (long long k = range.lo; k <= range.hi; ++k) sum += sym_geometric_pmf(f.p, k).value;
            errw = static_cast<double>(range.hi - range.lo + 1);
          }
          const double kmax = static_cast<double>(std::max(std::llabs(range.lo), range.hi));
          return {sum, sum * (2.0 * kmax + errw + 8.0) * kEps};
        } else if constexpr (std::is_same_v<T, Poisson>) {
          const long long lo = std::max<long long>(range.lo, 0);
          if (lo > range.hi) return {0.0, 0.0};
          BoundedValue t = poisson_pmf(f.lambda, lo);
          double sum = t.value;
          double relerr = t.value > 0.0 ? t.abs_err / t.value : 0.0;
          double term = t.value;
          for (long long k = lo + 1; k <= range.hi; ++k) {
            term *= f.lambda / static_cast<double>(k);
            sum += term;
          }
          const double n = static_cast<double>(range.hi - lo + 1);
          return {sum, sum * (relerr + 3.0 * n * kEps)};
        } else {
          static_assert(std::is_same_v<T, SymPoisson>);
          double sum = 0.0;
          double err = 0.0;
          if (range.lo == -range.hi) {
            BoundedValue c = skellam_pmf(f.lambda, 0);
            sum = c.value;
            err = c.abs_err;
            for (long long l = 1; l <= range.hi; ++l) {
              BoundedValue t = skellam_pmf(f.lambda, l);
              sum += 2.0 * t.value;
              err += 2.0 * t.abs_err;
            }
          } else {
            for (long long l = range.lo; l <= range.hi; ++l) {
              BoundedValue t = skellam_pmf(f.lambda, l);
              sum += t.value;
              err += t.abs_err;
            }
          }
          err += static_cast<double>(range.hi - range.lo + 2) * kEps * sum;
          return {sum, err};
        }
      },
      family);
}

BoundedValue concentration(const Family& family, Mode mode) {
  return concentration_over(family, stddev_range(family, mode));
}

BoundedValue geometric_closed_form(double p, Mode mode) {
  require(std::isfinite(p) && p > 0.0 && p < 1.0, "geometric_closed_form: p must lie in (0,1)");
  const double q = 1.0 - p;
  // First piece of the case analysis: the range is {0} and the value is p.
  // In open mode the piece includes its left boundary p = 3/4, where
  // mu + sigma = 1 is excluded from the interval.
  if ((mode == Mode::Closed && p > 0.75) || (mode == Mode::Open && p >= 0.75)) {
    return {p, 2.0 * kEps};
  }
  const SupportRange r = stddev_range(Geometric{p}, mode);
  const double e = static_cast<double>(r.hi + 1);
  const double value = 1.0 - std::pow(q, e);
  return {value, (e + 8.0) * kEps};
}

BoundedValue sym_geometric_closed_form(double p, Mode mode) {
  require(std::isfinite(p) && p > 0.0 && p < 1.0,
          "sym_geometric_closed_form: p must lie in (0,1)");
  const double q = 1.0 - p;
  const double threshold = std::sqrt(3.0) - 1.0;  // sigma = 1 here
  if ((mode == Mode::Closed && p > threshold) || (mode == Mode::Open && p >= threshold)) {
    return {p / (2.0 - p), 4.0 * kEps};
  }
  const SupportRange r = stddev_range(SymGeometric{p}, mode);
  const double e = static_cast<double>(r.hi + 1);
  const double value = 1.0 - 2.0 * std::pow(q, e) / (1.0 + q);
  return {value, (e + 10.0) * kEps};
}

Prob fourpoint_concentration(double a1, double a2, double eps) {
  require(std::isfinite(a1) && std::isfinite(a2) && a1 >= 0.0 && a2 > a1,
          "fourpoint_concentration: need 0 <= a1 < a2");
  require(std::isfinite(eps) && eps > 0.0 && eps <= 1.0,
          "fourpoint_concentration: eps must lie in (0,1]");
  // Var = a1^2 eps + a2^2 (1-eps) lies in [a1^2, a2^2); compare squares so
  // the a1 atom is never lost to sqrt rounding.
  const double var = a1 * a1 * eps + a2 * a2 * (1.0 - eps);
  double mass = 0.0;
  if (a1 * a1 <= var) mass += eps;
  if (a2 * a2 <= var) mass += 1.0 - eps;
  return {mass};
}

Prob epsilon_gap_check(double eps, double lambda) {
  require(std::isfinite(eps) && eps > 0.0 && eps < std::sqrt(2.0) / 2.0,
          "epsilon_gap_check: eps must lie in (0, sqrt(2)/2)");
  require(std::isfinite(lambda) && lambda > eps * eps && lambda < 0.5,
          "epsilon_gap_check: lambda must lie in (eps^2, 1/2)");
  const double s = eps * std::sqrt(lambda);
  SupportRange r{closed_lo(lambda - s), closed_hi(lambda + s)};
  if (r.empty()) return {0.0};
  double sum = 0.0;
  for (long long k = std::max<long long>(r.lo, 0); k <= r.hi; ++k)
    sum += poisson_pmf(lambda, k).value;
  return {sum};
}

std::vector<Prob> sup_limit_probe(const std::vector<double>& lambda_seq) {
  require(!lambda_seq.empty(), "sup_limit_probe: empty sequence");
  for (std::size_t i = 0; i < lambda_seq.size(); ++i) {
    require(std::isfinite(lambda_seq[i]) && lambda_seq[i] > 0.0,
            "sup_limit_probe: sequence must be positive");
    require(i == 0 || lambda_seq[i] < lambda_seq[i - 1],
            "sup_limit_probe: sequence must be strictly decreasing");
  }
  std::vector<Prob> out;
  out.reserve(lambda_seq.size());
  for (double lam : lambda_seq) {
    out.push_back({concentration(Poisson{lam}, Mode::Open).value});
  }
  return out;
}

}  // namespace idconc
