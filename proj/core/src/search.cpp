#include "idconc/search.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace idconc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace

Breakpoint breakpoint(long long n, BreakpointKind kind) {
  require(n >= 1, "breakpoint: n must be positive");
  const double nd = static_cast<double>(n);
  const double disc = std::sqrt(4.0 * nd + 1.0);
  const double lambda =
      kind == BreakpointKind::Upper ? (2.0 * nd + 1.0 - disc) / 2.0 : (2.0 * nd + 1.0 + disc) / 2.0;
  const double resid = kind == BreakpointKind::Upper ? lambda + std::sqrt(lambda) - nd
                                                     : lambda - std::sqrt(lambda) - nd;
  if (std::fabs(resid) > 4.0 * kEps * nd) {
    throw std::logic_error("breakpoint: root residual exceeds 4 ulp * n");
  }
  return {n, kind, lambda};
}

SupportRange stddev_range_at(const Breakpoint& bp, Mode mode) {
  const double lam = bp.lambda;
  SupportRange r;
  if (bp.kind == BreakpointKind::Upper) {
    // lambda + sqrt(lambda) = n exactly.
    r.hi = mode == Mode::Closed ? bp.n : bp.n - 1;
    const double lo = lam - std::sqrt(lam);
    r.lo = mode == Mode::Closed ? static_cast<long long>(std::ceil(lo))
                                : static_cast<long long>(std::floor(lo)) + 1;
  } else {
    // lambda - sqrt(lambda) = n exactly.
    r.lo = mode == Mode::Closed ? bp.n : bp.n + 1;
    const double hi = lam + std::sqrt(lam);
    r.hi = mode == Mode::Closed ? static_cast<long long>(std::floor(hi))
                                : static_cast<long long>(std::ceil(hi)) - 1;
  }
  if (r.lo < 0) r.lo = 0;
  return r;
}

BoundedValue concentration_at(const Breakpoint& bp, Mode mode) {
  return concentration_over(Poisson{bp.lambda}, stddev_range_at(bp, mode));
}

namespace {

ScanResult scan_breakpoints(long long n_lo, long long n_hi, BreakpointKind kind,
                            ScanDirection dir) {
  require(n_lo <= n_hi, "scan: empty range");
  ScanResult best;
  best.direction = dir;
  best.range_lo = static_cast<double>(n_lo);
  best.range_hi = static_cast<double>(n_hi);
  best.samples = n_hi - n_lo + 1;
  bool first = true;
  for (long long n = n_lo; n <= n_hi; ++n) {
    const Breakpoint bp = breakpoint(n, kind);
    const long long m = kind == BreakpointKind::Upper ? n - 1 : n;
    const double v = poisson_cdf(bp.lambda, m).value;
    const bool better = dir == ScanDirection::Min ? v < best.extremum : v > best.extremum;
    if (first || better) {
      best.arg = static_cast<double>(n);
      best.extremum = v;
      first = false;
    }
  }
  return best;
}

}  // namespace

ScanResult scan_g1(long long n_lo, long long n_hi) {
  require(n_lo >= 8, "scan_g1: n_lo must be >= 8");
  return scan_breakpoints(n_lo, n_hi, BreakpointKind::Upper, ScanDirection::Min);
}

ScanResult scan_g2(long long n_lo, long long n_hi) {
  require(n_lo >= 3, "scan_g2: n_lo must be >= 3");
  return scan_breakpoints(n_lo, n_hi, BreakpointKind::Lower, ScanDirection::Max);
}

BoundedValue g2_left_endpoint() {
  const double lam = (15.0 - std::sqrt(29.0)) / 2.0;
  return poisson_cdf(lam, 2);
}

double geometric_piece_inf(long long n) {
  require(n >= 2, "geometric_piece_inf: n must be >= 2");
  const double nd = static_cast<double>(n);
  return 1.0 - std::pow(nd / (nd + 1.0), 2.0 * nd);
}

double sym_geometric_piece_inf(long long n) {
  require(n >= 2, "sym_geometric_piece_inf: n must be >= 2");
  const double nd = static_cast<double>(n);
  const double s = std::sqrt(2.0 * nd * nd + 1.0);
  return 1.0 - std::pow(1.0 - 2.0 / (1.0 + s), nd) / (1.0 - 1.0 / (1.0 + s));
}

BoundedValue q_truncated(double lambda, int terms) {
  require(std::isfinite(lambda) && lambda > 0.0, "q_truncated: lambda must be positive");
  require(terms >= 0, "q_truncated: terms must be nonnegative");
  const int lmax = static_cast<int>(std::floor(std::sqrt(2.0 * lambda)));
  const double lam2 = lambda * lambda;
  double total = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    double t = 1.0;
    for (int j = 1; j <= l; ++j) t *= lambda / static_cast<double>(j);
    double s = t;
    for (int k = 0; k < terms; ++k) {
      t *= lam2 / (static_cast<double>(k + 1) * static_cast<double>(k + 1 + l));
      s += t;
    }
    total += l == 0 ? s : 2.0 * s;
  }
  const double value = std::exp(-2.0 * lambda) * total;
  const double round_rel =
      (3.0 * static_cast<double>(terms + 1) + static_cast<double>(lmax) + 2.0 * lambda + 10.0) *
      kEps;
  return {value, value * round_rel};
}

GridScanResult grid_scan_q(double lo, double hi, double step, int terms, unsigned threads) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, "grid_scan_q: bad interval");
  require(std::isfinite(step) && step > 0.0, "grid_scan_q: step must be positive");
  // points = floor((hi-lo)/step) + 1, with a relative nudge so a quotient
  // landing a hair under an integer (pure rounding) is not dropped.
  const double quot = (hi - lo) / step;
  const long long points = static_cast<long long>(std::floor(quot * (1.0 + 8.0 * kEps))) + 1;

  struct Best {
    double value = std::numeric_limits<double>::infinity();
    long long r = -1;
  };
  auto scan_chunk = [&](long long r_begin, long long r_end, Best& out) {
    Best b;
    for (long long r = r_begin; r < r_end; ++r) {
      const double lam = lo + static_cast<double>(r) * step;
      const double v = q_truncated(lam, terms).value;
      if (v < b.value) {
        b.value = v;
        b.r = r;
      }
    }
    out = b;
  };

  unsigned nthreads = threads == 0 ? 1 : threads;
  if (static_cast<long long>(nthreads) > points) nthreads = static_cast<unsigned>(points);
  std::vector<Best> partial(nthreads);
  if (nthreads <= 1) {
    scan_chunk(0, points, partial[0]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const long long chunk = (points + nthreads - 1) / nthreads;
    for (unsigned i = 0; i < nthreads; ++i) {
      const long long b = static_cast<long long>(i) * chunk;
      const long long e = std::min<long long>(points, b + chunk);
      pool.emplace_back(scan_chunk, b, e, std::ref(partial[i]));
    }
    for (auto& t : pool) t.join();
  }

  // Reduce by exact value, then by smaller argument: partition-independent.
  Best best;
  for (const Best& b : partial) {
    if (b.r < 0) continue;
    if (b.value < best.value || (b.value == best.value && b.r < best.r)) best = b;
  }
  GridScanResult res;
  res.step = step;
  res.lambda_star = lo + static_cast<double>(best.r) * step;
  res.min_value = best.value;
  res.truncation_k = terms;
  res.points = points;
  return res;
}

FigureTable figure_data(int which) {
  FigureTable t;
  switch (which) {
    case 1: {
      t.columns = {"n", "prob"};
      for (long long n = 8; n <= 629; ++n) {
        const Breakpoint bp = breakpoint(n, BreakpointKind::Upper);
        t.rows.push_back({static_cast<double>(n), poisson_cdf(bp.lambda, n - 1).value});
      }
      return t;
    }
    case 2: {
      t.columns = {"n", "prob"};
      for (long long n = 3; n <= 579; ++n) {
        const Breakpoint bp = breakpoint(n, BreakpointKind::Lower);
        t.rows.push_back({static_cast<double>(n), poisson_cdf(bp.lambda, n).value});
      }
      return t;
    }
    case 3:
    case 4: {
      t.columns = {"lambda", "p_closed", "p_open"};
      const int denom = which == 3 ? 1000 : 100;
      const int last = which == 3 ? 499 : 999;
      for (int k = 1; k <= last; ++k) {
        const double lam = static_cast<double>(k) / denom;
        const SymPoisson f{lam};
        t.rows.push_back(
            {lam, concentration(f, Mode::Closed).value, concentration(f, Mode::Open).value});
      }
      return t;
    }
    default:
      throw std::domain_error("figure_data: figure id must be 1..4");
  }
}

}  // namespace idconc
