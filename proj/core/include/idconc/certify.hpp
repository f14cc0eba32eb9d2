#pragma once

// Certified evidence for the five infimum claims: normal-approximation
// bands, polynomial piece tables with probed monotonicity, Lipschitz-plus-
// grid interval bounds, and assembly of machine-checkable certificates.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "idconc/search.hpp"

namespace idconc {

/// Standard normal cdf, abs_err <= 1e-12. Positive-term series for
/// |x| <= 3, continued fraction beyond.
BoundedValue normal_cdf(double x);

/// E|Y-1|^3 for Y ~ Poisson(1): 1 + 2/e.
double rho_poisson1();

/// Two-sided normal-approximation band [Phi(t) - C rho / sqrt(n),
/// Phi(t) + C rho / sqrt(n)], clamped to [0, 1].
struct BeBand {
  long long n = 0;
  double t = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double C = 0.0;
  double rho = 0.0;
};

BeBand be_band(long long n, double t, double rho, double C);

/// One printed constant of the source chain, replayed two ways: `computed`
/// is the full-precision value of the chain, `as_printed` evaluates it with
/// the source's own rounding conventions (4-decimal directed rounding of
/// normal-cdf values; at the small-n threshold the source additionally
/// rounded cdf arguments to 2 decimals, which is not a conservative
/// direction -- rounding_valid is false there).
struct QuotedReplay {
  std::string label;
  double quoted = 0.0;
  double computed = 0.0;
  double as_printed = 0.0;
  bool rounding_valid = true;
};

/// Verdict of the large-lambda threshold argument: four bands at the
/// threshold n prove concentration > target for all lambda >= n.
struct ThresholdCheck {
  Mode mode = Mode::Closed;
  long long n_threshold = 0;       // 604 closed, 108 open
  std::vector<BeBand> bands;       // bands behind the chain, full precision
  std::vector<QuotedReplay> replays;
  double target = 0.0;             // 1.5/e closed, 1/e open
  double computed_lower = 0.0;     // honest g1 lower bound
  double computed_upper = 0.0;     // honest g2 upper bound
  double computed_margin = 0.0;    // (lower - upper) - target
  double quoted_margin = 0.0;      // quoted conclusion - target
  bool monotone_ok = false;        // band expressions monotone in n as used
  bool pass = false;
};

ThresholdCheck be_threshold_check(Mode mode);

enum class Monotonicity { Increasing, Decreasing, Unimodal };
enum class InfKind { Left, Right, Interior, Limit };

struct PieceInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;
};

/// One interval of the Poisson case analysis: the pmf index range is
/// constant on the interval, the piece value is exp(-x) * sum x^k/k! over
/// that index range, and the infimum sits at an endpoint (the pieces are
/// monotone or unimodal).
struct PieceReport {
  std::string case_id;
  PieceInterval interval;
  std::string formula;
  long long k_lo = 0;  // summed pmf index range
  long long k_hi = 0;
  Monotonicity monotonicity = Monotonicity::Decreasing;
  std::optional<double> stationary;  // mode location for unimodal pieces
  double piece_inf = 0.0;
  InfKind inf_kind = InfKind::Limit;
  double inf_at = 0.0;               // argument attaining / approaching the inf
  double quoted = 0.0;               // the printed bound this piece replays
};

/// Evaluate a piece's formula at a point.
double piece_value(const PieceReport& piece, double lambda);

/// The ten-piece case table for the chosen mode, probe-verified: each
/// piece_inf is <= every sampled value on a 100-point probe and the stated
/// monotonicity holds sample-to-sample.
std::vector<PieceReport> poisson_case_table(Mode mode);

/// Certified lower bound on the open-mode symmetric-Poisson concentration
/// for lambda >= 200:
/// Phi(1) - Phi(-1) - 2 C rho_bar / ((2 lambda/floor(lambda))^{3/2}
/// sqrt(floor(lambda))) with rho_bar = 5.31 lambda / floor(lambda).
BoundedValue skellam_be_lower(double lambda);

/// Piece-wise derivative lower bound -2(2n-1) for the n-th symmetric-Poisson
/// piece, 2 <= n <= 20; the global bound over lambda <= 200 is -78.
double lipschitz_bound(int n);
inline constexpr double kLipschitzGlobal = 78.0;  // |slope| bound on (1/2, 200)

/// The sign certificate for dP0/dlambda < 0 on (0, 1/2): evaluates the
/// closing bound -1 + 1/2 + (1/2)^3/2 + (1/2)^2 e^{1/2} (~ -0.0253) and
/// probes the finite-difference slope.
BoundedValue step1_derivative_check();

struct LipschitzGridBound {
  double grid_min = 0.0;
  double lipschitz_const = 0.0;
  double step = 0.0;
  double penalty = 0.0;    // lipschitz_const * step
  double bound_raw = 0.0;  // grid_min - penalty
  double bound = 0.0;      // claimed bound, floored at 5 decimals
};

/// Combines a grid minimum with the Lipschitz step penalty into a certified
/// lower bound on the open-mode concentration over (1/2, 200).
LipschitzGridBound certify_interval_0p5_200(const GridScanResult& scan);

/// Same, from the published grid configuration (min 0.564565 at step 1/2000)
/// without re-running the scan.
LipschitzGridBound certify_interval_0p5_200();

enum class ExactTag { ThreeQuarters, Sqrt3Over3, ThreeHalvesOverE, OneOverE, BesselSeriesOverE };

struct ExactConst {
  ExactTag tag;
  double decimal;
};

ExactConst exact_const(ExactTag tag);
std::string exact_const_name(ExactTag tag);  // human form, e.g. "3/4"
std::string exact_tag_string(ExactTag tag);  // serialization tag

/// a_n piece-infimum sequence evidence: the scan plus the uniform lower
/// bound the source quotes for it.
struct SequenceScanEvidence {
  ScanResult scan;
  double quoted_lower = 0.0;
  std::string note;
};

/// Discrete-scan segment conclusion: min of the additive scan minus max of
/// the subtractive scan (5-decimal directed roundings match the printed
/// segment bound).
struct ScanPairEvidence {
  ScanResult g1_min;
  ScanResult g2_max;
  BoundedValue g2_left;      // subtrahend value at the segment's left endpoint
  double quoted_g1 = 0.0;    // printed floor of g1_min
  double quoted_g2 = 0.0;    // printed ceiling of max(g2_max, g2_left)
  double segment_bound = 0.0;    // quoted_g1 - quoted_g2
  double computed_bound = 0.0;   // full-precision difference
};

/// Decreasing-on-(0,1/2) evidence.
struct DerivativeEvidence {
  BoundedValue bound_value;   // the closing -0.0253... expression
  double max_fd_slope = 0.0;  // largest central-difference slope probed
  long long probes = 0;
};

/// lambda >= 200 lower-bound evidence.
struct BeLowerEvidence {
  BoundedValue bound;
  double quoted = 0.0;
};

struct EvidenceItem {
  std::string label;
  double lower_bound = 0.0;  // certified lower bound on the region it covers
  bool witness = false;      // the single item attaining/approaching the inf
  std::variant<PieceReport, SequenceScanEvidence, ScanPairEvidence, ThresholdCheck,
               LipschitzGridBound, DerivativeEvidence, BeLowerEvidence>
      detail;
};

/// An infimum claim plus the ordered evidence chain that proves it. Every
/// non-witness item's lower bound strictly exceeds inf_decimal; when
/// attained, the concentration at attained_at equals inf_decimal to 1e-12.
struct Certificate {
  std::string family_kind;  // geometric | sym-geometric | poisson | sym-poisson
  Mode mode = Mode::Closed;
  ExactConst inf_exact{ExactTag::OneOverE, 0.0};
  double inf_decimal = 0.0;
  bool attained = false;
  std::optional<double> attained_at;
  std::vector<EvidenceItem> evidence;
};

Certificate infimum_certificate(const std::string& family_kind, Mode mode);

/// sym-poisson with a freshly computed grid scan instead of the published
/// configuration.
Certificate infimum_certificate(const std::string& family_kind, Mode mode,
                                const GridScanResult& grid);

/// JSON serialization: {family, mode, inf_exact: {tag, decimal}, attained,
/// attained_at, evidence: [...]}, decimals with 17 significant digits.
std::string certificate_to_json(const Certificate& cert);

}  // namespace idconc
