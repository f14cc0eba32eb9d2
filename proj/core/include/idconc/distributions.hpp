#pragma once

// Error-bounded pmf/cdf/moment evaluation for the four lattice families
// (geometric, symmetric geometric, Poisson, symmetric Poisson). Everything
// downstream consumes only these.

#include <cmath>
#include <optional>
#include <variant>

namespace idconc {

/// A probability in [0, 1].
struct Prob {
  double value = 0.0;
};

/// A computed real paired with a certified absolute error that covers both
/// series truncation and accumulated rounding. The true quantity lies in
/// [value - abs_err, value + abs_err].
struct BoundedValue {
  double value = 0.0;
  double abs_err = 0.0;

  bool contains(double x) const { return std::fabs(value - x) <= abs_err; }
};

struct Geometric {
  double p;  // P{X=k} = p(1-p)^k on k = 0,1,2,...
};
struct SymGeometric {
  double p;  // difference of two independent Geometric(p) variables
};
struct Poisson {
  double lambda;
};
struct SymPoisson {
  double lambda;  // difference of two independent Poisson(lambda) variables
};

using Family = std::variant<Geometric, SymGeometric, Poisson, SymPoisson>;

/// Throws std::domain_error unless the family parameter is finite and
/// strictly inside its open domain (p in (0,1), lambda > 0).
void validate(const Family& family);

struct MomentSet {
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> third_raw;
  std::optional<double> fourth_raw;
};

/// log(k!), exact from the integer factorial for k <= 20 and by a Stirling
/// series beyond (absolute error < 1e-15 for all k). Local so that pmf
/// evaluation stays overflow-free up to lambda ~ 650, k ~ 700.
double log_factorial(long long k);

/// e^{-lambda} lambda^k / k!, computed in log space for large k.
BoundedValue poisson_pmf(double lambda, long long k);

/// P{N_lambda <= m}: compensated forward summation from k = 0 (0 for m < 0).
BoundedValue poisson_cdf(double lambda, long long m);

/// p(1-p)^k, exact formula.
Prob geometric_pmf(double p, long long k);

/// (1-q) q^{|k|} / (1+q) with q = 1-p; symmetric in k.
Prob sym_geometric_pmf(double p, long long k);

/// P{Y_lambda = l} = e^{-2 lambda} sum_k lambda^{2k+|l|} / (k! (k+|l|)!),
/// adaptively truncated. abs_err covers the geometric-ratio tail bound plus
/// rounding; target_abs_err, when positive, relaxes the stop criterion to
/// that accuracy.
BoundedValue skellam_pmf(double lambda, long long l, double target_abs_err = 0.0);

/// Closed-form moments; Poisson also carries the raw third and fourth
/// moments lambda(1+3l+l^2) and lambda(1+7l+6l^2+l^3).
MomentSet moments(const Family& family);

}  // namespace idconc
