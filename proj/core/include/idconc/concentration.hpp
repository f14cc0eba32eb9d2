#pragma once

// One-standard-deviation concentration probabilities: the integer range of
// the interval [mu - sigma, mu + sigma], the generic pmf-summing evaluator,
// the geometric-family closed forms, and the illustrative constructions
// (four-point law, epsilon-shrunk empty interval, sup-limit probe).

#include <vector>

#include "idconc/distributions.hpp"

namespace idconc {

enum class Mode { Closed, Open };  // P{|X-E[X]| <= sigma} vs strict <

/// Integer support range [lo, hi] realizing the interval-to-lattice
/// reduction; empty when lo > hi. All integers in [lo, hi] lie inside the
/// requested (open or closed) real interval.
struct SupportRange {
  long long lo = 0;
  long long hi = -1;

  bool empty() const { return lo > hi; }
};

/// Integer range of [mu - sigma, mu + sigma]. Closed mode keeps integer
/// endpoints (ceil/floor); open mode excludes them (floor+1 / ceil-1).
/// Endpoint integrality on raw reals is decided by exact binary-float
/// comparison; use the breakpoint path in search.hpp when exactness at a
/// boundary parameter matters.
SupportRange stddev_range(const Family& family, Mode mode);

/// Sum of the family pmf over an explicit range. The single point of truth
/// for endpoint bookkeeping is the range itself, never a floating comparison
/// inside the loop.
BoundedValue concentration_over(const Family& family, const SupportRange& range);

/// P{|X - E[X]| <= sigma} (Closed) or < sigma (Open).
BoundedValue concentration(const Family& family, Mode mode);

/// Geometric closed form: p on the first piece, 1 - q^E beyond, with the
/// exponent taken from the mode's support range.
BoundedValue geometric_closed_form(double p, Mode mode);

/// Symmetric-geometric closed form: p/(2-p) on the first piece,
/// 1 - 2 q^E/(1+q) beyond.
BoundedValue sym_geometric_closed_form(double p, Mode mode);

/// Closed-mode concentration of the four-point law
/// P{X=+-a1} = eps/2, P{X=+-a2} = (1-eps)/2: equals eps, demonstrating that
/// without infinite divisibility the concentration takes any value in (0,1].
Prob fourpoint_concentration(double a1, double a2, double eps);

/// P{lambda - eps sqrt(lambda) <= N_lambda <= lambda + eps sqrt(lambda)} for
/// eps in (0, sqrt(2)/2), lambda in (eps^2, 1/2): the shrunk interval
/// contains no integer, so the mass is always 0.
Prob epsilon_gap_check(double eps, double lambda);

/// Open-mode Poisson concentration along a strictly decreasing positive
/// sequence; approaches 1 as lambda drops to 0.
std::vector<Prob> sup_limit_probe(const std::vector<double>& lambda_seq);

}  // namespace idconc
