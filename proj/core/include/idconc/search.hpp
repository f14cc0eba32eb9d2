#pragma once

// Breakpoint enumeration for lambda +- sqrt(lambda) = n, the discrete scans
// over breakpoint sequences, the piece-infimum sequences of the geometric
// families, the truncated symmetric-Poisson sum Q and its grid scan, and
// figure-data generation.

#include <array>
#include <string>
#include <vector>

#include "idconc/concentration.hpp"

namespace idconc {

enum class BreakpointKind {
  Upper,  // lambda + sqrt(lambda) = n, the root below n
  Lower,  // lambda - sqrt(lambda) = n, the root above n
};

/// Integer n with the exact root of lambda +- sqrt(lambda) = n.
struct Breakpoint {
  long long n = 0;
  BreakpointKind kind = BreakpointKind::Upper;
  double lambda = 0.0;
};

/// Upper: lambda = (2n+1 - sqrt(4n+1))/2; Lower: (2n+1 + sqrt(4n+1))/2.
/// Verifies |lambda +- sqrt(lambda) - n| <= 4 ulp * n.
Breakpoint breakpoint(long long n, BreakpointKind kind);

/// Support range for Poisson at the breakpoint parameter with the boundary
/// endpoint resolved exactly from n (the raw-real path cannot decide
/// integrality there).
SupportRange stddev_range_at(const Breakpoint& bp, Mode mode);

/// Poisson concentration at the breakpoint parameter via the exact range.
BoundedValue concentration_at(const Breakpoint& bp, Mode mode);

enum class ScanDirection { Min, Max };

struct ScanResult {
  double arg = 0.0;  // integer index or real argument of the extremum
  double extremum = 0.0;
  ScanDirection direction = ScanDirection::Min;
  double range_lo = 0.0;
  double range_hi = 0.0;
  long long samples = 0;
};

/// Minimizes n -> P{N_{lambda_n^{upper}} <= n-1} over [n_lo, n_hi], n_lo >= 8.
/// Ties break toward smaller n.
ScanResult scan_g1(long long n_lo, long long n_hi);

/// Maximizes n -> P{N_{lambda_n^{lower}} <= n} over [n_lo, n_hi], n_lo >= 3.
ScanResult scan_g2(long long n_lo, long long n_hi);

/// P{N_{(15-sqrt(29))/2} <= 2}, the left-endpoint value of the subtrahend on
/// the scan segment.
BoundedValue g2_left_endpoint();

/// a_n = 1 - (n/(n+1))^{2n}, the infimum of the n-th geometric piece; n >= 2.
double geometric_piece_inf(long long n);

/// a_n = 1 - (1 - 2/(1+s))^n / (1 - 1/(1+s)) with s = sqrt(2n^2+1), the
/// infimum of the n-th symmetric-geometric piece; n >= 2.
double sym_geometric_piece_inf(long long n);

/// Q_lambda truncated at K terms per l-series:
/// e^{-2 lambda} [ sum_{k<=K} lambda^{2k}/(k!)^2
///               + 2 sum_{l=1}^{floor(sqrt(2 lambda))} sum_{k<=K} ... ].
/// abs_err covers accumulated rounding only; the K-term cut is definitional.
BoundedValue q_truncated(double lambda, int terms);

struct GridScanResult {
  double step = 0.0;
  double lambda_star = 0.0;
  double min_value = 0.0;
  int truncation_k = 0;
  long long points = 0;
};

/// Evaluates q_truncated on the arithmetic grid lo, lo+step, ... and returns
/// the minimum (ties toward smaller lambda). Partitioned across `threads`;
/// the (value, argument) reduction makes the result partition-independent.
GridScanResult grid_scan_q(double lo, double hi, double step, int terms, unsigned threads = 1);

struct FigureTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Figure 1: (n, P{N_{lambda_n^{upper}} <= n-1}) for n in [8, 629].
/// Figure 2: (n, P{N_{lambda_n^{lower}} <= n})   for n in [3, 579].
/// Figure 3: (lambda, closed, open) on (0, 1/2) at step 1/1000.
/// Figure 4: (lambda, closed, open) on (0, 10)  at step 1/100.
FigureTable figure_data(int which);

}  // namespace idconc
