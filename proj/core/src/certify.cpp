#include "idconc/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>

namespace idconc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kBerryEsseenC = 0.7656;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}
void ensure(bool ok, const char* msg) {
  if (!ok) throw std::logic_error(msg);
}

double floor4(double v) { return std::floor(v * 1e4) / 1e4; }
double ceil4(double v) { return std::ceil(v * 1e4) / 1e4; }
double round4(double v) { return std::round(v * 1e4) / 1e4; }
double round2(double v) { return std::round(v * 1e2) / 1e2; }
double floor5(double v) { return std::floor(v * 1e5) / 1e5; }
double ceil5(double v) { return std::ceil(v * 1e5) / 1e5; }

}  // namespace

BoundedValue normal_cdf(double x) {
  require(std::isfinite(x), "normal_cdf: non-finite argument");
  const double ax = std::fabs(x);
  const double phi = kInvSqrt2Pi * std::exp(-0.5 * ax * ax);
  double upper_value;  // Phi(ax)
  if (ax <= 3.0) {
    // Phi(a) = 1/2 + phi(a) * sum_{k>=0} a^{2k+1} / (1*3*...*(2k+1)),
    // all terms positive.
    double term = ax;
    double sum = ax;
    for (int k = 1; k < 200; ++k) {
      term *= ax * ax / static_cast<double>(2 * k + 1);
      sum += term;
      if (term <= sum * 1e-18) break;
    }
    upper_value = 0.5 + phi * sum;
  } else {
    // Mills-ratio continued fraction for the upper tail:
    // 1 - Phi(a) = phi(a) / (a + 1/(a + 2/(a + 3/(...)))).
    double d = ax;
    for (int k = 100; k >= 1; --k) d = ax + static_cast<double>(k) / d;
    upper_value = 1.0 - phi / d;
  }
  const double value = x >= 0.0 ? upper_value : 1.0 - upper_value;
  return {value, 1e-14};
}

double rho_poisson1() { return 1.0 + 2.0 * std::exp(-1.0); }

BeBand be_band(long long n, double t, double rho, double C) {
  require(n >= 1, "be_band: n must be positive");
  require(std::isfinite(t), "be_band: non-finite t");
  require(std::isfinite(rho) && rho > 0.0, "be_band: rho must be positive");
  require(std::isfinite(C) && C > 0.0, "be_band: C must be positive");
  const double center = normal_cdf(t).value;
  const double half = C * rho / std::sqrt(static_cast<double>(n));
  BeBand b;
  b.n = n;
  b.t = t;
  b.lower = std::fmax(0.0, center - half);
  b.upper = std::fmin(1.0, center + half);
  b.C = C;
  b.rho = rho;
  return b;
}

namespace {

double be_penalty(long long n, double rho, double C) {
  return C * rho / std::sqrt(static_cast<double>(n));
}

double k2_lower(long long n, double rho, double C) {
  const double nd = static_cast<double>(n);
  const double t = (std::sqrt(nd) - 1.0) / std::sqrt(nd + 1.0);
  return be_band(n + 1, t, rho, C).lower;
}

double k4_upper(long long n, double rho, double C) {
  const double nd = static_cast<double>(n);
  const double t = (1.0 - std::sqrt(nd + 1.0)) / std::sqrt(nd);
  return be_band(n, t, rho, C).upper;
}

}  // namespace

ThresholdCheck be_threshold_check(Mode mode) {
  const double C = kBerryEsseenC;
  const double rho = rho_poisson1();
  const long long n = mode == Mode::Closed ? 604 : 108;
  const double nd = static_cast<double>(n);

  ThresholdCheck tc;
  tc.mode = mode;
  tc.n_threshold = n;
  tc.target = mode == Mode::Closed ? 1.5 * std::exp(-1.0) : std::exp(-1.0);

  const double t2 = (std::sqrt(nd) - 1.0) / std::sqrt(nd + 1.0);
  const double t4 = (1.0 - std::sqrt(nd + 1.0)) / std::sqrt(nd);
  const BeBand k1 = be_band(n, 1.0, rho, C);
  const BeBand k2 = be_band(n + 1, t2, rho, C);
  const BeBand k3 = be_band(n, -1.0, rho, C);
  const BeBand k4 = be_band(n, t4, rho, C);
  tc.bands = {k1, k2, k3, k4};

  // Integer lambda is covered by the t=+-1 bands, fractional lambda by the
  // shifted ones; the proved bounds are the worse of each pair.
  tc.computed_lower = std::fmin(k1.lower, k2.lower);
  tc.computed_upper = std::fmax(k3.upper, k4.upper);

  // The shifted-band expressions must be monotone in n for the threshold
  // argument to cover all lambda >= n.
  tc.monotone_ok = k2_lower(n, rho, C) < k2_lower(n + 1, rho, C) &&
                   k4_upper(n, rho, C) > k4_upper(n + 1, rho, C) &&
                   k1.lower < be_band(n + 1, 1.0, rho, C).lower &&
                   k3.upper > be_band(n + 1, -1.0, rho, C).upper;

  const double pen_n = be_penalty(n, rho, C);
  const double pen_n1 = be_penalty(n + 1, rho, C);
  if (mode == Mode::Closed) {
    // Printed chain at n=604 reproduces with directed 4-decimal rounding.
    const double r3 = floor4(normal_cdf(floor4(t2)).value) - ceil4(pen_n1);
    const double r4 = ceil4(normal_cdf(round2(t4)).value + ceil4(pen_n));
    tc.replays = {
        {"integer-lower", 0.7872, k1.lower, floor4(k1.lower), true},
        {"integer-upper", 0.2128, k3.upper, ceil4(k3.upper), true},
        {"interval-lower", 0.7769, k2.lower, r3, true},
        {"interval-upper", 0.2227, k4.upper, r4, true},
        {"conclusion", 0.5542, tc.computed_lower - tc.computed_upper, r3 - r4, true},
    };
    tc.quoted_margin = 0.5542 - tc.target;
  } else {
    // Printed chain at n=108 additionally rounded the cdf arguments to two
    // decimals (z-table lookup); that direction is not conservative, so the
    // honest bands are the certified ones and the replay only documents the
    // printed digits.
    const double r3 = round4(normal_cdf(round2(t2)).value) - ceil4(pen_n1);
    const double r4 = round4(normal_cdf(round2(t4)).value) + ceil4(pen_n);
    tc.replays = {
        {"integer-lower", 0.7134, k1.lower, floor4(k1.lower), true},
        {"integer-upper", 0.2866, k3.upper, ceil4(k3.upper), true},
        {"interval-lower", 0.6886, k2.lower, r3, false},
        {"interval-upper", 0.3093, k4.upper, r4, false},
        {"conclusion", 0.3793, tc.computed_lower - tc.computed_upper, r3 - r4, false},
    };
    tc.quoted_margin = 0.3793 - tc.target;
  }
  tc.computed_margin = (tc.computed_lower - tc.computed_upper) - tc.target;
  tc.pass = tc.monotone_ok && tc.computed_margin > 0.0;
  ensure(tc.pass, "be_threshold_check: threshold argument failed");
  return tc;
}

double piece_value(const PieceReport& piece, double lambda) {
  if (piece.k_lo < 0) throw std::invalid_argument("piece_value: piece has no lattice formula");
  double t = std::exp(-lambda);
  for (long long k = 1; k <= piece.k_lo; ++k) t *= lambda / static_cast<double>(k);
  double sum = t;
  for (long long k = piece.k_lo + 1; k <= piece.k_hi; ++k) {
    t *= lambda / static_cast<double>(k);
    sum += t;
  }
  return sum;
}

namespace {

// Verify piece_inf and the monotonicity label on a 100-point probe.
void probe_piece(const PieceReport& piece, const std::function<double(double)>& eval) {
  constexpr int kProbes = 100;
  constexpr double kTol = 1e-12;
  const double lo = piece.interval.lo;
  const double hi = piece.interval.hi;
  std::vector<double> vals(kProbes);
  if (lo == hi) {
    std::fill(vals.begin(), vals.end(), eval(lo));
  } else {
    const double nudge = (hi - lo) * 1e-9;
    for (int i = 0; i < kProbes; ++i) {
      double x = lo + (hi - lo) * static_cast<double>(i) / (kProbes - 1);
      if (i == 0 && !piece.interval.lo_closed) x += nudge;
      if (i == kProbes - 1 && !piece.interval.hi_closed) x -= nudge;
      vals[i] = eval(x);
    }
  }
  for (double v : vals) {
    ensure(piece.piece_inf <= v + kTol, "piece probe: sampled value below piece_inf");
  }
  switch (piece.monotonicity) {
    case Monotonicity::Increasing:
      for (int i = 1; i < kProbes; ++i)
        ensure(vals[i] >= vals[i - 1] - kTol, "piece probe: not increasing");
      break;
    case Monotonicity::Decreasing:
      for (int i = 1; i < kProbes; ++i)
        ensure(vals[i] <= vals[i - 1] + kTol, "piece probe: not decreasing");
      break;
    case Monotonicity::Unimodal: {
      const int imax = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
      for (int i = 1; i <= imax; ++i)
        ensure(vals[i] >= vals[i - 1] - kTol, "piece probe: not increasing before the mode");
      for (int i = imax + 1; i < kProbes; ++i)
        ensure(vals[i] <= vals[i - 1] + kTol, "piece probe: not decreasing after the mode");
      break;
    }
  }
}

PieceReport make_poisson_piece(const std::string& case_id, PieceInterval iv, long long k0,
                               long long k1, double quoted) {
  PieceReport p;
  p.case_id = case_id;
  p.interval = iv;
  p.k_lo = k0;
  p.k_hi = k1;
  {
    char buf[96];
    std::snprintf(buf, sizeof buf, "exp(-x)*sum(x^k/k!, k=%lld..%lld)", k0, k1);
    p.formula = buf;
  }
  p.quoted = quoted;

  // d/dx [e^{-x} sum_{k0..k1} x^k/k!] = e^{-x} (x^{k0-1}/(k0-1)! - x^{k1}/k1!),
  // so the only stationary point is (k1!/(k0-1)!)^{1/(k1-k0+1)}.
  if (iv.lo == iv.hi) {
    p.monotonicity = Monotonicity::Decreasing;  // vacuous on a point
  } else if (k0 == 0) {
    p.monotonicity = Monotonicity::Decreasing;
  } else {
    const double root = std::exp((log_factorial(k1) - log_factorial(k0 - 1)) /
                                 static_cast<double>(k1 - k0 + 1));
    if (root <= iv.lo) {
      p.monotonicity = Monotonicity::Decreasing;
    } else if (root >= iv.hi) {
      p.monotonicity = Monotonicity::Increasing;
    } else {
      p.monotonicity = Monotonicity::Unimodal;
      p.stationary = root;
    }
  }

  const double f_lo = piece_value(p, iv.lo);
  const double f_hi = piece_value(p, iv.hi);
  bool at_lo;
  if (iv.lo == iv.hi) {
    at_lo = true;
  } else if (p.monotonicity == Monotonicity::Increasing) {
    at_lo = true;
  } else if (p.monotonicity == Monotonicity::Decreasing) {
    at_lo = false;
  } else {
    at_lo = f_lo <= f_hi;  // unimodal maximum => infimum at an endpoint
  }
  p.piece_inf = at_lo ? f_lo : f_hi;
  p.inf_at = at_lo ? iv.lo : iv.hi;
  const bool attained = at_lo ? iv.lo_closed : iv.hi_closed;
  p.inf_kind = attained ? (at_lo ? InfKind::Left : InfKind::Right) : InfKind::Limit;

  probe_piece(p, [&](double x) { return piece_value(p, x); });
  return p;
}

}  // namespace

std::vector<PieceReport> poisson_case_table(Mode mode) {
  const double b1 = (3.0 - std::sqrt(5.0)) / 2.0;
  const double b2 = (7.0 - std::sqrt(13.0)) / 2.0;
  const double b3 = (9.0 - std::sqrt(17.0)) / 2.0;
  const double b4 = (3.0 + std::sqrt(5.0)) / 2.0;
  const double b5 = (11.0 - std::sqrt(21.0)) / 2.0;
  const double b6 = (15.0 - std::sqrt(29.0)) / 2.0;

  struct Row {
    const char* id;
    PieceInterval iv;
    long long k0, k1;
    double quoted;
  };
  std::vector<Row> rows;
  if (mode == Mode::Closed) {
    rows = {
        {"poisson-closed/(i)", {0.0, b1, false, false}, 0, 0, 0.68252},
        {"poisson-closed/(ii)", {b1, 1.0, true, false}, 0, 1, 0.73576},
        {"poisson-closed/(iii)", {1.0, 1.0, true, true}, 0, 2, 0.9197},
        {"poisson-closed/(iv)", {1.0, b2, false, false}, 1, 2, 0.55182},
        {"poisson-closed/(v)", {b2, b3, true, false}, 1, 3, 0.68335},
        {"poisson-closed/(vi)", {b3, b4, true, true}, 1, 4, 0.80191},
        {"poisson-closed/(vii)", {b4, b5, false, false}, 2, 4, 0.60899},
        {"poisson-closed/(viii)", {b5, 4.0, true, false}, 2, 5, 0.69355},
        {"poisson-closed/(ix)", {4.0, 4.0, true, true}, 2, 6, 0.79774},
        {"poisson-closed/(x)", {4.0, b6, false, false}, 3, 6, 0.64792},
    };
  } else {
    rows = {
        {"poisson-open/(i)", {0.0, b1, false, true}, 0, 0, 0.68252},
        {"poisson-open/(ii)", {b1, 1.0, false, false}, 0, 1, 0.73576},
        {"poisson-open/(iii)", {1.0, 1.0, true, true}, 1, 1, 0.36788},
        {"poisson-open/(iv)", {1.0, b2, false, true}, 1, 2, 0.55182},
        {"poisson-open/(v)", {b2, b3, false, true}, 1, 3, 0.68335},
        {"poisson-open/(vi)", {b3, b4, false, false}, 1, 4, 0.80191},
        {"poisson-open/(vii)", {b4, b5, true, true}, 2, 4, 0.60899},
        {"poisson-open/(viii)", {b5, 4.0, false, false}, 2, 5, 0.69355},
        {"poisson-open/(ix)", {4.0, 4.0, true, true}, 3, 5, 0.547},
        {"poisson-open/(x)", {4.0, b6, false, true}, 3, 6, 0.64792},
    };
  }

  std::vector<PieceReport> out;
  out.reserve(rows.size());
  for (const Row& r : rows) out.push_back(make_poisson_piece(r.id, r.iv, r.k0, r.k1, r.quoted));
  return out;
}

BoundedValue skellam_be_lower(double lambda) {
  require(std::isfinite(lambda) && lambda >= 200.0, "skellam_be_lower: lambda must be >= 200");
  const double m = std::floor(lambda);
  const double rho_bar = 5.31 * lambda / m;
  const double denom = std::pow(2.0 * lambda / m, 1.5) * std::sqrt(m);
  const double span = normal_cdf(1.0).value - normal_cdf(-1.0).value;
  const double value = span - 2.0 * kBerryEsseenC * rho_bar / denom;
  return {value, 1e-13};
}

double lipschitz_bound(int n) {
  require(n >= 2 && n <= 20, "lipschitz_bound: n must lie in [2,20]");
  return -2.0 * (2.0 * static_cast<double>(n) - 1.0);
}

namespace {

DerivativeEvidence step1_evidence() {
  DerivativeEvidence ev;
  // Closing bound of the derivative chain on (0,1/2):
  // -1 + 1/2 + (1/2)^3/2 + (1/2)^2 e^{1/2}.
  const double v = -1.0 + 0.5 + 0.125 / 2.0 + 0.25 * std::exp(0.5);
  ev.bound_value = {v, 8.0 * kEps};
  const double h = 1e-5;
  double max_slope = -std::numeric_limits<double>::infinity();
  long long probes = 0;
  for (int i = 1; i <= 24; ++i) {
    const double lam = 0.02 * static_cast<double>(i);  // 0.02 .. 0.48
    const double s = (skellam_pmf(lam + h, 0).value - skellam_pmf(lam - h, 0).value) / (2.0 * h);
    max_slope = std::fmax(max_slope, s);
    ++probes;
  }
  ev.max_fd_slope = max_slope;
  ev.probes = probes;
  return ev;
}

}  // namespace

BoundedValue step1_derivative_check() {
  const DerivativeEvidence ev = step1_evidence();
  ensure(ev.bound_value.value < 0.0, "step1: closing bound is not negative");
  ensure(ev.max_fd_slope < 0.0, "step1: probed slope is not negative");
  const double p01 = skellam_pmf(0.1, 0).value;
  const double p03 = skellam_pmf(0.3, 0).value;
  const double p049 = skellam_pmf(0.49, 0).value;
  ensure(p01 > p03 && p03 > p049, "step1: values not decreasing on (0,1/2)");
  return ev.bound_value;
}

LipschitzGridBound certify_interval_0p5_200(const GridScanResult& scan) {
  LipschitzGridBound b;
  b.grid_min = scan.min_value;
  b.lipschitz_const = kLipschitzGlobal;
  b.step = scan.step;
  b.penalty = b.lipschitz_const * b.step;
  b.bound_raw = b.grid_min - b.penalty;
  b.bound = floor5(b.bound_raw);
  return b;
}

LipschitzGridBound certify_interval_0p5_200() {
  GridScanResult published;
  published.step = 0.0005;
  published.lambda_star = 1.9995;
  published.min_value = 0.564565;
  published.truncation_k = 250;
  published.points = 399001;
  return certify_interval_0p5_200(published);
}

ExactConst exact_const(ExactTag tag) {
  switch (tag) {
    case ExactTag::ThreeQuarters:
      return {tag, 0.75};
    case ExactTag::Sqrt3Over3:
      return {tag, std::sqrt(3.0) / 3.0};
    case ExactTag::ThreeHalvesOverE:
      return {tag, 1.5 * std::exp(-1.0)};
    case ExactTag::OneOverE:
      return {tag, std::exp(-1.0)};
    case ExactTag::BesselSeriesOverE: {
      // e^{-1} sum_k 1/(4^k (k!)^2), summed to convergence.
      double term = 1.0;
      double sum = 1.0;
      for (int k = 1; k < 40; ++k) {
        term /= 4.0 * static_cast<double>(k) * static_cast<double>(k);
        sum += term;
        if (term < 1e-20) break;
      }
      return {tag, std::exp(-1.0) * sum};
    }
  }
  throw std::domain_error("exact_const: unknown tag");
}

std::string exact_const_name(ExactTag tag) {
  switch (tag) {
    case ExactTag::ThreeQuarters:
      return "3/4";
    case ExactTag::Sqrt3Over3:
      return "sqrt(3)/3";
    case ExactTag::ThreeHalvesOverE:
      return "1.5/e";
    case ExactTag::OneOverE:
      return "1/e";
    case ExactTag::BesselSeriesOverE:
      return "(1/e)*sum(1/(4^k*(k!)^2))";
  }
  return "?";
}

std::string exact_tag_string(ExactTag tag) {
  switch (tag) {
    case ExactTag::ThreeQuarters:
      return "ThreeQuarters";
    case ExactTag::Sqrt3Over3:
      return "Sqrt3Over3";
    case ExactTag::ThreeHalvesOverE:
      return "ThreeHalvesOverE";
    case ExactTag::OneOverE:
      return "OneOverE";
    case ExactTag::BesselSeriesOverE:
      return "BesselSeriesOverE";
  }
  return "?";
}

namespace {

PieceReport make_family_piece(const std::string& case_id, PieceInterval iv,
                              const std::string& formula,
                              const std::function<double(double)>& eval, double inf,
                              double quoted) {
  PieceReport p;
  p.case_id = case_id;
  p.interval = iv;
  p.formula = formula;
  p.k_lo = -1;
  p.k_hi = -1;
  p.monotonicity = Monotonicity::Increasing;
  p.piece_inf = inf;
  p.inf_at = iv.lo;
  p.inf_kind = iv.lo_closed ? InfKind::Left : InfKind::Limit;
  p.quoted = quoted;
  probe_piece(p, eval);
  return p;
}

PieceReport make_step1_piece(Mode mode, double inf) {
  PieceReport p;
  p.case_id = "sym-poisson/step-1";
  p.interval = {0.0, 0.5, false, mode == Mode::Open};
  p.formula = "exp(-2x)*sum(x^(2k)/(k!)^2)";
  p.k_lo = -1;
  p.k_hi = -1;
  p.monotonicity = Monotonicity::Decreasing;
  p.piece_inf = inf;
  p.inf_at = 0.5;
  p.inf_kind = mode == Mode::Open ? InfKind::Right : InfKind::Limit;
  p.quoted = 0.46576;
  probe_piece(p, [](double lam) { return skellam_pmf(lam, 0).value; });
  return p;
}

ScanResult scan_sequence_min(const std::function<double(long long)>& f, long long n_lo,
                             long long n_hi) {
  ScanResult r;
  r.direction = ScanDirection::Min;
  r.range_lo = static_cast<double>(n_lo);
  r.range_hi = static_cast<double>(n_hi);
  r.samples = n_hi - n_lo + 1;
  bool first = true;
  for (long long n = n_lo; n <= n_hi; ++n) {
    const double v = f(n);
    if (first || v < r.extremum) {
      r.extremum = v;
      r.arg = static_cast<double>(n);
      first = false;
    }
  }
  return r;
}

void validate_certificate(const Certificate& cert) {
  int witnesses = 0;
  for (const EvidenceItem& e : cert.evidence) {
    if (e.witness) {
      ++witnesses;
      continue;
    }
    if (e.lower_bound > 0.0) {
      ensure(e.lower_bound > cert.inf_decimal,
             "certificate: evidence lower bound does not dominate the infimum");
    }
  }
  ensure(witnesses == 1, "certificate: expected exactly one witness item");
  if (cert.attained) {
    ensure(cert.attained_at.has_value(), "certificate: attained without attained_at");
  }
}

Certificate certificate_geometric(Mode mode) {
  Certificate c;
  c.family_kind = "geometric";
  c.mode = mode;
  c.inf_exact = exact_const(ExactTag::ThreeQuarters);
  c.inf_decimal = c.inf_exact.decimal;
  c.attained = mode == Mode::Open;
  if (c.attained) c.attained_at = 0.75;

  PieceInterval iv{0.75, 1.0, mode == Mode::Open, false};
  PieceReport first = make_family_piece(
      mode == Mode::Open ? "geometric-open/(i)" : "geometric-closed/(i)", iv, "p",
      [&](double p) { return geometric_closed_form(p, mode).value; }, 0.75, 0.75);
  c.evidence.push_back({first.case_id, 0.75, true, first});

  SequenceScanEvidence seq;
  seq.scan = scan_sequence_min(geometric_piece_inf, 2, 10000);
  seq.quoted_lower = 0.80247;
  seq.note = "floor-formula segment (p <= 3/4): per-piece infima a_n, minimum at n=2";
  c.evidence.push_back({"geometric/piece-sequence", seq.scan.extremum, false, seq});

  if (c.attained) {
    const double at = concentration_over(Geometric{0.75}, SupportRange{0, 0}).value;
    ensure(std::fabs(at - c.inf_decimal) <= 1e-12, "geometric: witness value mismatch");
  }
  validate_certificate(c);
  return c;
}

Certificate certificate_sym_geometric(Mode mode) {
  Certificate c;
  c.family_kind = "sym-geometric";
  c.mode = mode;
  c.inf_exact = exact_const(ExactTag::Sqrt3Over3);
  c.inf_decimal = c.inf_exact.decimal;
  c.attained = mode == Mode::Open;
  const double threshold = std::sqrt(3.0) - 1.0;
  if (c.attained) c.attained_at = threshold;

  PieceInterval iv{threshold, 1.0, mode == Mode::Open, false};
  PieceReport first = make_family_piece(
      mode == Mode::Open ? "sym-geometric-open/(i)" : "sym-geometric-closed/(i)", iv, "p/(2-p)",
      [&](double p) { return sym_geometric_closed_form(p, mode).value; },
      threshold / (2.0 - threshold), 0.57735);
  c.evidence.push_back({first.case_id, first.piece_inf, true, first});

  SequenceScanEvidence seq;
  seq.scan = scan_sequence_min(sym_geometric_piece_inf, 2, 10000);
  seq.quoted_lower = 0.67584;
  seq.note =
      "per-piece infima a_n; the minimum 2/3 at n=2 sits below the quoted uniform bound "
      "0.67584, which holds from n=3 on; the certificate uses the true minimum";
  c.evidence.push_back({"sym-geometric/piece-sequence", seq.scan.extremum, false, seq});

  if (c.attained) {
    const double at = concentration_over(SymGeometric{threshold}, SupportRange{0, 0}).value;
    ensure(std::fabs(at - c.inf_decimal) <= 1e-12, "sym-geometric: witness value mismatch");
  }
  validate_certificate(c);
  return c;
}

Certificate certificate_poisson(Mode mode) {
  Certificate c;
  c.family_kind = "poisson";
  c.mode = mode;
  c.inf_exact =
      exact_const(mode == Mode::Closed ? ExactTag::ThreeHalvesOverE : ExactTag::OneOverE);
  c.inf_decimal = c.inf_exact.decimal;
  c.attained = mode == Mode::Open;
  if (c.attained) c.attained_at = 1.0;

  const char* witness_id =
      mode == Mode::Closed ? "poisson-closed/(iv)" : "poisson-open/(iii)";
  for (PieceReport& p : poisson_case_table(mode)) {
    const bool w = p.case_id == witness_id;
    c.evidence.push_back({p.case_id, p.piece_inf, w, std::move(p)});
  }

  ScanPairEvidence seg;
  if (mode == Mode::Closed) {
    seg.g1_min = scan_g1(8, 629);
    seg.g2_max = scan_g2(3, 579);
  } else {
    seg.g1_min = scan_g1(8, 119);
    seg.g2_max = scan_g2(3, 97);
  }
  seg.g2_left = g2_left_endpoint();
  seg.quoted_g1 = floor5(seg.g1_min.extremum);
  seg.quoted_g2 = ceil5(std::fmax(seg.g2_max.extremum, seg.g2_left.value));
  seg.segment_bound = seg.quoted_g1 - seg.quoted_g2;
  seg.computed_bound = seg.g1_min.extremum - std::fmax(seg.g2_max.extremum, seg.g2_left.value);
  c.evidence.push_back({mode == Mode::Closed ? "poisson-closed/scan-segment"
                                             : "poisson-open/scan-segment",
                        seg.segment_bound, false, seg});

  ThresholdCheck tc = be_threshold_check(mode);
  const double tc_bound = tc.computed_lower - tc.computed_upper;
  c.evidence.push_back({mode == Mode::Closed ? "poisson-closed/be-tail" : "poisson-open/be-tail",
                        tc_bound, false, std::move(tc)});

  if (c.attained) {
    const double at = concentration_over(Poisson{1.0}, SupportRange{1, 1}).value;
    ensure(std::fabs(at - c.inf_decimal) <= 1e-12, "poisson: witness value mismatch");
  }
  validate_certificate(c);
  return c;
}

Certificate certificate_sym_poisson(Mode mode, const LipschitzGridBound& grid) {
  Certificate c;
  c.family_kind = "sym-poisson";
  c.mode = mode;
  c.inf_exact = exact_const(ExactTag::BesselSeriesOverE);
  c.inf_decimal = c.inf_exact.decimal;
  c.attained = mode == Mode::Open;
  if (c.attained) c.attained_at = 0.5;

  PieceReport step1 = make_step1_piece(mode, c.inf_decimal);
  c.evidence.push_back({step1.case_id, c.inf_decimal, true, step1});

  DerivativeEvidence dev = step1_evidence();
  ensure(dev.bound_value.value < 0.0 && dev.max_fd_slope < 0.0,
         "sym-poisson: step-1 derivative evidence failed");
  c.evidence.push_back({"sym-poisson/step-1-derivative", 0.0, false, dev});

  c.evidence.push_back({"sym-poisson/step-3-grid", grid.bound, false, grid});

  BeLowerEvidence tail;
  tail.bound = skellam_be_lower(200.0);
  tail.quoted = 0.4793;
  ensure(tail.bound.value > tail.quoted, "sym-poisson: step-2 bound below the quoted value");
  c.evidence.push_back({"sym-poisson/step-2-tail", tail.quoted, false, tail});

  if (c.attained) {
    const double at = concentration_over(SymPoisson{0.5}, SupportRange{0, 0}).value;
    ensure(std::fabs(at - c.inf_decimal) <= 1e-12, "sym-poisson: witness value mismatch");
  }
  validate_certificate(c);
  return c;
}

Certificate make_certificate(const std::string& family_kind, Mode mode,
                             const LipschitzGridBound* grid) {
  if (family_kind == "geometric") return certificate_geometric(mode);
  if (family_kind == "sym-geometric") return certificate_sym_geometric(mode);
  if (family_kind == "poisson") return certificate_poisson(mode);
  if (family_kind == "sym-poisson") {
    return certificate_sym_poisson(mode, grid ? *grid : certify_interval_0p5_200());
  }
  throw std::domain_error("infimum_certificate: unknown family kind");
}

}  // namespace

Certificate infimum_certificate(const std::string& family_kind, Mode mode) {
  return make_certificate(family_kind, mode, nullptr);
}

Certificate infimum_certificate(const std::string& family_kind, Mode mode,
                                const GridScanResult& grid) {
  const LipschitzGridBound b = certify_interval_0p5_200(grid);
  return make_certificate(family_kind, mode, &b);
}

// ---------------------------------------------------------------------------
// JSON emission. Hand-rolled so decimals are printed with exactly 17
// significant digits and field order is stable.

namespace {

struct Json {
  std::string out;
  int depth = 0;

  void indent() { out.append(static_cast<std::size_t>(depth) * 2, ' '); }
  void raw(const char* s) { out += s; }
  void key(const char* k) {
    indent();
    out += '"';
    out += k;
    out += "\": ";
  }
  void num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  }
  void field_num(const char* k, double v, bool comma = true) {
    key(k);
    num(v);
    out += comma ? ",\n" : "\n";
  }
  void field_int(const char* k, long long v, bool comma = true) {
    key(k);
    out += std::to_string(v);
    out += comma ? ",\n" : "\n";
  }
  void field_bool(const char* k, bool v, bool comma = true) {
    key(k);
    out += v ? "true" : "false";
    out += comma ? ",\n" : "\n";
  }
  void field_str(const char* k, const std::string& v, bool comma = true) {
    key(k);
    out += '"';
    out += v;  // payload strings contain no characters needing escapes
    out += '"';
    out += comma ? ",\n" : "\n";
  }
  void field_null(const char* k, bool comma = true) {
    key(k);
    out += "null";
    out += comma ? ",\n" : "\n";
  }
  void open(const char* brace = "{") {
    indent();
    out += brace;
    out += '\n';
    ++depth;
  }
  void open_field(const char* k, const char* brace = "{") {
    key(k);
    out += brace;
    out += '\n';
    ++depth;
  }
  void close(const char* brace = "}", bool comma = false) {
    --depth;
    indent();
    out += brace;
    out += comma ? ",\n" : "\n";
  }
};

const char* mode_string(Mode m) { return m == Mode::Closed ? "closed" : "open"; }

const char* monotonicity_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::Increasing:
      return "increasing";
    case Monotonicity::Decreasing:
      return "decreasing";
    case Monotonicity::Unimodal:
      return "unimodal";
  }
  return "?";
}

const char* inf_kind_string(InfKind k) {
  switch (k) {
    case InfKind::Left:
      return "left";
    case InfKind::Right:
      return "right";
    case InfKind::Interior:
      return "interior";
    case InfKind::Limit:
      return "limit";
  }
  return "?";
}

void emit_scan(Json& j, const char* name, const ScanResult& s, bool comma) {
  j.open_field(name);
  j.field_str("direction", s.direction == ScanDirection::Min ? "min" : "max");
  j.field_num("arg", s.arg);
  j.field_num("extremum", s.extremum);
  j.field_num("range_lo", s.range_lo);
  j.field_num("range_hi", s.range_hi);
  j.field_int("samples", s.samples, false);
  j.close("}", comma);
}

void emit_piece(Json& j, const PieceReport& p) {
  j.field_str("type", "piece");
  j.open_field("interval");
  j.field_num("lo", p.interval.lo);
  j.field_num("hi", p.interval.hi);
  j.field_bool("lo_closed", p.interval.lo_closed);
  j.field_bool("hi_closed", p.interval.hi_closed, false);
  j.close("}", true);
  j.field_str("formula", p.formula);
  j.field_str("monotonicity", monotonicity_string(p.monotonicity));
  if (p.stationary) {
    j.field_num("stationary", *p.stationary);
  } else {
    j.field_null("stationary");
  }
  j.field_num("piece_inf", p.piece_inf);
  j.field_str("inf_kind", inf_kind_string(p.inf_kind));
  j.field_num("inf_at", p.inf_at);
  j.field_num("quoted", p.quoted, false);
}

void emit_threshold(Json& j, const ThresholdCheck& t) {
  j.field_str("type", "be_chain");
  j.field_int("n_threshold", t.n_threshold);
  j.open_field("bands", "[");
  for (std::size_t i = 0; i < t.bands.size(); ++i) {
    const BeBand& b = t.bands[i];
    j.open();
    j.field_int("n", b.n);
    j.field_num("t", b.t);
    j.field_num("lower", b.lower);
    j.field_num("upper", b.upper);
    j.field_num("C", b.C);
    j.field_num("rho", b.rho, false);
    j.close("}", i + 1 < t.bands.size());
  }
  j.close("]", true);
  j.open_field("replays", "[");
  for (std::size_t i = 0; i < t.replays.size(); ++i) {
    const QuotedReplay& r = t.replays[i];
    j.open();
    j.field_str("label", r.label);
    j.field_num("quoted", r.quoted);
    j.field_num("computed", r.computed);
    j.field_num("as_printed", r.as_printed);
    j.field_bool("rounding_valid", r.rounding_valid, false);
    j.close("}", i + 1 < t.replays.size());
  }
  j.close("]", true);
  j.field_num("target", t.target);
  j.field_num("computed_lower", t.computed_lower);
  j.field_num("computed_upper", t.computed_upper);
  j.field_num("computed_margin", t.computed_margin);
  j.field_num("quoted_margin", t.quoted_margin);
  j.field_bool("monotone_ok", t.monotone_ok);
  j.field_bool("pass", t.pass, false);
}

}  // namespace

std::string certificate_to_json(const Certificate& cert) {
  Json j;
  j.open();
  j.field_str("family", cert.family_kind);
  j.field_str("mode", mode_string(cert.mode));
  j.open_field("inf_exact");
  j.field_str("tag", exact_tag_string(cert.inf_exact.tag));
  j.field_num("decimal", cert.inf_exact.decimal, false);
  j.close("}", true);
  j.field_bool("attained", cert.attained);
  if (cert.attained_at) {
    j.field_num("attained_at", *cert.attained_at);
  } else {
    j.field_null("attained_at");
  }
  j.open_field("evidence", "[");
  for (std::size_t i = 0; i < cert.evidence.size(); ++i) {
    const EvidenceItem& e = cert.evidence[i];
    j.open();
    j.field_str("label", e.label);
    if (e.lower_bound > 0.0) {
      j.field_num("lower_bound", e.lower_bound);
    } else {
      j.field_null("lower_bound");
    }
    j.field_bool("witness", e.witness);
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, PieceReport>) {
            emit_piece(j, d);
          } else if constexpr (std::is_same_v<T, SequenceScanEvidence>) {
            j.field_str("type", "sequence_scan");
            emit_scan(j, "scan", d.scan, true);
            j.field_num("quoted_lower", d.quoted_lower);
            j.field_str("note", d.note, false);
          } else if constexpr (std::is_same_v<T, ScanPairEvidence>) {
            j.field_str("type", "scan_pair");
            emit_scan(j, "g1_min", d.g1_min, true);
            emit_scan(j, "g2_max", d.g2_max, true);
            j.open_field("g2_left");
            j.field_num("value", d.g2_left.value);
            j.field_num("abs_err", d.g2_left.abs_err, false);
            j.close("}", true);
            j.field_num("quoted_g1", d.quoted_g1);
            j.field_num("quoted_g2", d.quoted_g2);
            j.field_num("segment_bound", d.segment_bound);
            j.field_num("computed_bound", d.computed_bound, false);
          } else if constexpr (std::is_same_v<T, ThresholdCheck>) {
            emit_threshold(j, d);
          } else if constexpr (std::is_same_v<T, LipschitzGridBound>) {
            j.field_str("type", "lipschitz_grid");
            j.field_num("grid_min", d.grid_min);
            j.field_num("lipschitz_const", d.lipschitz_const);
            j.field_num("step", d.step);
            j.field_num("penalty", d.penalty);
            j.field_num("bound_raw", d.bound_raw);
            j.field_num("bound", d.bound, false);
          } else if constexpr (std::is_same_v<T, DerivativeEvidence>) {
            j.field_str("type", "derivative_check");
            j.open_field("bound_value");
            j.field_num("value", d.bound_value.value);
            j.field_num("abs_err", d.bound_value.abs_err, false);
            j.close("}", true);
            j.field_num("max_fd_slope", d.max_fd_slope);
            j.field_int("probes", d.probes, false);
          } else if constexpr (std::is_same_v<T, BeLowerEvidence>) {
            j.field_str("type", "be_lower");
            j.open_field("bound");
            j.field_num("value", d.bound.value);
            j.field_num("abs_err", d.bound.abs_err, false);
            j.close("}", true);
            j.field_num("quoted", d.quoted, false);
          }
        },
        e.detail);
    j.close("}", i + 1 < cert.evidence.size());
  }
  j.close("]", false);
  j.close("}", false);
  return j.out;
}

}  // namespace idconc
