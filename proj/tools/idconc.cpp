// Command-line surface: evaluation, infima, scans, the grid search,
// certification, figure-data emission, oracle verification, and a one-shot
// reproduction of every reference number.

#include <CLI11.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "idconc/certify.hpp"
#include "idconc/oracle.hpp"

namespace {

using namespace idconc;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Family make_family(const std::string& kind, double param) {
  if (kind == "geometric") return Geometric{param};
  if (kind == "sym-geometric") return SymGeometric{param};
  if (kind == "poisson") return Poisson{param};
  if (kind == "sym-poisson") return SymPoisson{param};
  throw std::domain_error("unknown family: " + kind);
}

Mode make_mode(const std::string& mode) {
  if (mode == "closed") return Mode::Closed;
  if (mode == "open") return Mode::Open;
  throw std::domain_error("unknown mode: " + mode);
}

unsigned default_threads() {
  if (const char* env = std::getenv("IDCONC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void write_csv(const std::string& path, const FigureTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << fmt17(row[i]);
    }
    out << "\n";
  }
}

int run_eval(const std::string& family, double param, const std::string& mode, bool json) {
  const Family fam = make_family(family, param);
  const BoundedValue v = concentration(fam, make_mode(mode));
  if (json) {
    std::printf(
        "{\"family\": \"%s\", \"param\": %s, \"mode\": \"%s\", \"value\": %s, \"abs_err\": %s}\n",
        family.c_str(), fmt17(param).c_str(), mode.c_str(), fmt17(v.value).c_str(),
        fmt17(v.abs_err).c_str());
  } else {
    std::printf("%s ± %.3g\n", fmt17(v.value).c_str(), v.abs_err);
  }
  return 0;
}

int run_inf(const std::string& family, const std::string& mode) {
  const Certificate cert = infimum_certificate(family, make_mode(mode));
  if (cert.attained) {
    std::printf("%s (%s), attained at %s\n", exact_const_name(cert.inf_exact.tag).c_str(),
                fmt17(cert.inf_decimal).c_str(), fmt17(*cert.attained_at).c_str());
  } else {
    std::printf("%s (%s), not attained\n", exact_const_name(cert.inf_exact.tag).c_str(),
                fmt17(cert.inf_decimal).c_str());
  }
  return 0;
}

int run_scan(const std::string& which, long long from, long long to, const std::string& csv) {
  const bool g1 = which == "g1";
  const ScanResult r = g1 ? scan_g1(from, to) : scan_g2(from, to);
  std::printf("%s %.15g at n=%lld\n", g1 ? "min" : "max", r.extremum,
              static_cast<long long>(r.arg));
  if (!csv.empty()) {
    FigureTable t;
    t.columns = {"n", "prob"};
    for (long long n = from; n <= to; ++n) {
      const Breakpoint bp = breakpoint(n, g1 ? BreakpointKind::Upper : BreakpointKind::Lower);
      t.rows.push_back({static_cast<double>(n), poisson_cdf(bp.lambda, g1 ? n - 1 : n).value});
    }
    write_csv(csv, t);
  }
  return 0;
}

int run_grid(double from, double to, double step, int terms, unsigned threads,
             const std::string& csv) {
  const GridScanResult g = grid_scan_q(from, to, step, terms, threads);
  std::printf("min %s at lambda=%s (points=%lld, K=%d)\n", fmt17(g.min_value).c_str(),
              fmt17(g.lambda_star).c_str(), g.points, g.truncation_k);
  if (!csv.empty()) {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + csv);
    out << "lambda,q\n";
    for (long long r = 0; r < g.points; ++r) {
      const double lam = from + static_cast<double>(r) * step;
      out << fmt17(lam) << "," << fmt17(q_truncated(lam, terms).value) << "\n";
    }
  }
  return 0;
}

int run_certify(const std::string& family, const std::string& mode, const std::string& out_path,
                bool with_grid, double step, unsigned threads) {
  Certificate cert;
  if (family == "sym-poisson" && with_grid) {
    const GridScanResult g = grid_scan_q(0.5, 200.0, step, 250, threads);
    cert = infimum_certificate(family, make_mode(mode), g);
  } else {
    cert = infimum_certificate(family, make_mode(mode));
  }
  const std::string json = certificate_to_json(cert);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << json << "\n";
  std::printf("wrote %s: inf %s (%s), %s\n", out_path.c_str(),
              exact_const_name(cert.inf_exact.tag).c_str(), fmt17(cert.inf_decimal).c_str(),
              cert.attained ? "attained" : "not attained");
  return 0;
}

int run_figure(int which, const std::string& csv) {
  write_csv(csv, figure_data(which));
  std::printf("wrote %s\n", csv.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// verify: oracle cross-check table.

struct CheckTable {
  int failures = 0;

  void row(const std::string& label, bool ok, double diff, double budget) {
    std::printf("[%s] %-58s diff=%-12.3g budget=%.3g\n", ok ? "PASS" : "FAIL", label.c_str(),
                diff, budget);
    if (!ok) ++failures;
  }
  void check_bounded(const std::string& label, const BoundedValue& v, const BigReal& oracle) {
    const double diff = std::fabs(static_cast<double>(BigReal(v.value) - oracle));
    row(label, diff <= v.abs_err, diff, v.abs_err);
  }
  void check_near(const std::string& label, double a, double b, double tol) {
    const double diff = std::fabs(a - b);
    row(label, diff <= tol, diff, tol);
  }
  void check_true(const std::string& label, bool ok) { row(label, ok, 0.0, 0.0); }
};

int run_verify(unsigned digits) {
  oracle_set_precision(digits);
  CheckTable t;

  const BigReal lam8 = (BigReal(17) - sqrt(BigReal(33))) / 2;
  const BigReal lam3 = (BigReal(7) + sqrt(BigReal(13))) / 2;

  t.check_bounded("poisson_pmf(4,6) vs oracle", poisson_pmf(4.0, 6),
                  oracle_poisson_cdf(BigReal(4), 6) - oracle_poisson_cdf(BigReal(4), 5));
  t.check_bounded("poisson_cdf(1,2) vs 2.5/e", poisson_cdf(1.0, 2),
                  BigReal("2.5") * exp(-BigReal(1)));
  t.check_bounded("poisson_cdf(lam_8,7) vs oracle",
                  poisson_cdf((17.0 - std::sqrt(33.0)) / 2.0, 7), oracle_poisson_cdf(lam8, 7));
  t.check_bounded("poisson_cdf(lam_3,3) vs oracle",
                  poisson_cdf((7.0 + std::sqrt(13.0)) / 2.0, 3), oracle_poisson_cdf(lam3, 3));
  t.check_bounded("skellam_pmf(0.5,0) vs convolution oracle", skellam_pmf(0.5, 0),
                  oracle_skellam_pmf(BigReal(1) / 2, 0));
  t.check_bounded("skellam_pmf(1,1) vs convolution oracle", skellam_pmf(1.0, 1),
                  oracle_skellam_pmf(BigReal(1), 1));
  t.check_bounded("skellam_pmf(20,7) vs convolution oracle", skellam_pmf(20.0, 7),
                  oracle_skellam_pmf(BigReal(20), 7));

  for (double x : {-3.5, -1.0, -0.96, 0.0, 0.8996, 0.9585, 1.0, 2.0, 3.0, 5.0}) {
    t.check_bounded("normal_cdf(" + fmt17(x) + ") vs oracle", normal_cdf(x),
                    oracle_normal_cdf(BigReal(x)));
  }

  const double gap200 = static_cast<double>(oracle_q_truncation_gap(200.0, 250));
  const double gap100 = static_cast<double>(oracle_q_truncation_gap(100.0, 250));
  const double gap05 = static_cast<double>(oracle_q_truncation_gap(0.5, 250));
  t.check_near("q truncation gap at lambda=200, K=250 (< 1e-6)", gap200, 0.0, 1e-6);
  t.check_near("q truncation gap at lambda=0.5, K=250 (< 1e-30)", gap05, 0.0, 1e-30);
  t.check_true("q truncation gap monotone: gap(100) <= gap(200)", gap100 <= gap200);

  t.check_near("moments(poisson{2}).third vs oracle", *moments(Poisson{2.0}).third_raw,
               static_cast<double>(oracle_moment(Poisson{2.0}, 3)), 1e-10);
  t.check_near("moments(poisson{1}).fourth vs oracle", *moments(Poisson{1.0}).fourth_raw,
               static_cast<double>(oracle_moment(Poisson{1.0}, 4)), 1e-10);
  t.check_near("moments(geometric{0.3}).mean vs oracle", moments(Geometric{0.3}).mean,
               static_cast<double>(oracle_moment(Geometric{0.3}, 1)), 1e-10);

  // Exact-form constants against 50-digit evaluation.
  t.check_near("exact 3/4", exact_const(ExactTag::ThreeQuarters).decimal, 0.75, 0.0);
  t.check_near("exact sqrt(3)/3", exact_const(ExactTag::Sqrt3Over3).decimal,
               static_cast<double>(sqrt(BigReal(3)) / 3), 1e-14);
  t.check_near("exact 1.5/e", exact_const(ExactTag::ThreeHalvesOverE).decimal,
               static_cast<double>(BigReal(3) / 2 * exp(-BigReal(1))), 1e-14);
  t.check_near("exact 1/e", exact_const(ExactTag::OneOverE).decimal,
               static_cast<double>(exp(-BigReal(1))), 1e-14);
  {
    BigReal term = 1, sum = 1;
    for (int k = 1; k <= 60; ++k) {
      term /= BigReal(4) * k * k;
      sum += term;
    }
    t.check_near("exact (1/e)*I-series", exact_const(ExactTag::BesselSeriesOverE).decimal,
                 static_cast<double>(exp(-BigReal(1)) * sum), 1e-14);
  }

  // Randomized concentration triples against the oracle.
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> up(0.011, 0.989);
  std::uniform_real_distribution<double> ul(0.01, 50.0);
  int bad = 0;
  const int n_triples = 80;
  for (int i = 0; i < n_triples; ++i) {
    Family fam;
    switch (i % 4) {
      case 0: fam = Geometric{up(rng)}; break;
      case 1: fam = SymGeometric{up(rng)}; break;
      case 2: fam = Poisson{ul(rng)}; break;
      default: fam = SymPoisson{ul(rng)}; break;
    }
    const Mode mode = (i / 4) % 2 == 0 ? Mode::Closed : Mode::Open;
    const BoundedValue v = concentration(fam, mode);
    const double o = static_cast<double>(oracle_concentration(fam, mode));
    if (std::fabs(v.value - o) > v.abs_err) ++bad;
  }
  t.check_true("randomized concentration vs oracle (" + std::to_string(n_triples) + " triples)",
               bad == 0);

  std::printf("%d check(s) failed\n", t.failures);
  return t.failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// reproduce-all

int run_reproduce(const std::string& out_dir, double grid_step, unsigned threads) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  CheckTable t;

  // Certificates for every family and mode.
  const char* families[] = {"geometric", "sym-geometric", "poisson", "sym-poisson"};
  for (const char* fam : families) {
    for (Mode mode : {Mode::Closed, Mode::Open}) {
      const Certificate cert = infimum_certificate(fam, mode);
      const std::string name = std::string("certificate_") + fam + "_" +
                               (mode == Mode::Closed ? "closed" : "open") + ".json";
      std::ofstream out(out_dir + "/" + name, std::ios::binary);
      out << certificate_to_json(cert) << "\n";
    }
  }
  std::printf("wrote 8 certificates to %s\n", out_dir.c_str());

  for (int f = 1; f <= 4; ++f) {
    write_csv(out_dir + "/figure" + std::to_string(f) + ".csv", figure_data(f));
  }
  std::printf("wrote figure1..figure4 CSVs\n");

  const ScanResult g1 = scan_g1(8, 629);
  const ScanResult g2 = scan_g2(3, 579);
  {
    FigureTable s1 = figure_data(1);
    write_csv(out_dir + "/scan_g1.csv", s1);
    FigureTable s2 = figure_data(2);
    write_csv(out_dir + "/scan_g2.csv", s2);
  }
  std::printf("scan g1: min %.15g at n=%lld\n", g1.extremum, static_cast<long long>(g1.arg));
  std::printf("scan g2: max %.15g at n=%lld\n", g2.extremum, static_cast<long long>(g2.arg));

  const GridScanResult grid = grid_scan_q(0.5, 200.0, grid_step, 250, threads);
  std::printf("grid: min %s at lambda=%s (points=%lld)\n", fmt17(grid.min_value).c_str(),
              fmt17(grid.lambda_star).c_str(), grid.points);

  // Summary table of the five infima.
  {
    std::ofstream out(out_dir + "/summary.csv", std::ios::binary);
    out << "family,mode,exact,decimal,attained,attained_at\n";
    struct Row {
      const char* fam;
      Mode mode;
    } rows[] = {{"geometric", Mode::Closed},
                {"sym-geometric", Mode::Closed},
                {"poisson", Mode::Closed},
                {"poisson", Mode::Open},
                {"sym-poisson", Mode::Open}};
    for (const Row& r : rows) {
      const Certificate c = infimum_certificate(r.fam, r.mode);
      out << r.fam << "," << (r.mode == Mode::Closed ? "closed" : "open") << ","
          << exact_const_name(c.inf_exact.tag) << "," << fmt17(c.inf_decimal) << ","
          << (c.attained ? "true" : "false") << ","
          << (c.attained_at ? fmt17(*c.attained_at) : std::string("")) << "\n";
    }
  }

  // Internal comparisons against the reference values.
  t.check_near("inf geometric = 0.75", infimum_certificate("geometric", Mode::Closed).inf_decimal,
               0.75, 1e-12);
  t.check_near("inf sym-geometric = sqrt(3)/3",
               infimum_certificate("sym-geometric", Mode::Closed).inf_decimal,
               0.5773502691896258, 1e-12);
  t.check_near("inf poisson closed = 1.5/e",
               infimum_certificate("poisson", Mode::Closed).inf_decimal, 0.5518191617571635,
               1e-12);
  t.check_near("inf poisson open = 1/e", infimum_certificate("poisson", Mode::Open).inf_decimal,
               0.36787944117144233, 1e-12);
  t.check_near("inf sym-poisson = (1/e)*I-series",
               infimum_certificate("sym-poisson", Mode::Open).inf_decimal, 0.4657596075936404,
               1e-12);
  t.check_near("scan g1 min", g1.extremum, 0.793450747058153, 1e-10);
  t.check_true("scan g1 argmin = 8", static_cast<long long>(g1.arg) == 8);
  t.check_near("scan g2 max", g2.extremum, 0.225065994481669, 1e-10);
  t.check_true("scan g2 argmax = 3", static_cast<long long>(g2.arg) == 3);
  if (grid_step == 0.0005) {
    t.check_near("grid min vs 0.564565", grid.min_value, 0.564565, 5e-7);
    t.check_true("grid points = 399001", grid.points == 399001);
  } else {
    const LipschitzGridBound lb = certify_interval_0p5_200(grid);
    t.check_true("coarse grid Lipschitz bound computed", lb.bound_raw == grid.min_value - lb.penalty);
  }
  {
    const std::vector<PieceReport> table = poisson_case_table(Mode::Closed);
    for (const PieceReport& p : table) {
      t.check_near("replay " + p.case_id, p.piece_inf, p.quoted, 5e-5);
    }
    const ThresholdCheck closed = be_threshold_check(Mode::Closed);
    for (const QuotedReplay& r : closed.replays) {
      t.check_near("replay poisson-closed/be/" + r.label, r.as_printed, r.quoted, 5e-5);
    }
    const ThresholdCheck open = be_threshold_check(Mode::Open);
    for (const QuotedReplay& r : open.replays) {
      t.check_near("replay poisson-open/be/" + r.label, r.as_printed, r.quoted, 5e-5);
    }
    t.check_true("be threshold closed pass", closed.pass);
    t.check_true("be threshold open pass", open.pass);
  }
  {
    const LipschitzGridBound lb = certify_interval_0p5_200();
    t.check_near("step-3 bound 0.52556", lb.bound, 0.52556, 1e-12);
    t.check_true("step-2 bound > 0.4793", skellam_be_lower(200.0).value > 0.4793);
    t.check_true("step-1 expression negative", step1_derivative_check().value < 0.0);
  }

  std::printf("%d comparison(s) failed\n", t.failures);
  return t.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-standard-deviation concentration probabilities for four infinitely divisible "
               "lattice families, with machine-checkable certificates"};
  app.require_subcommand(1);

  std::string family, mode = "closed", csv, out_path = "cert.json", scan_which;
  double param = 1.0;
  bool json = false;

  auto* eval = app.add_subcommand("eval", "evaluate a concentration probability");
  eval->add_option("--family", family, "geometric|sym-geometric|poisson|sym-poisson")->required();
  eval->add_option("--param", param, "family parameter (p or lambda)")->required();
  eval->add_option("--mode", mode, "closed|open");
  eval->add_flag("--json", json, "emit JSON");

  auto* inf = app.add_subcommand("inf", "report the infimum over the family");
  inf->add_option("--family", family)->required();
  inf->add_option("--mode", mode);

  long long from = 8, to = 629;
  auto* scan = app.add_subcommand("scan", "discrete breakpoint scans");
  scan->add_option("which", scan_which, "g1|g2")->required()->check(CLI::IsMember({"g1", "g2"}));
  scan->add_option("--from", from, "first index")->required();
  scan->add_option("--to", to, "last index")->required();
  scan->add_option("--csv", csv, "write scanned rows to CSV");

  double gfrom = 0.5, gto = 200.0, gstep = 0.0005;
  int gterms = 250;
  unsigned threads = default_threads();
  auto* grid = app.add_subcommand("grid", "grid scan of the truncated symmetric-Poisson sum");
  grid->add_option("--from", gfrom);
  grid->add_option("--to", gto);
  grid->add_option("--step", gstep);
  grid->add_option("--terms", gterms);
  grid->add_option("--threads", threads);
  grid->add_option("--csv", csv, "write all grid rows to CSV");

  bool with_grid = false;
  auto* certify = app.add_subcommand("certify", "write an infimum certificate as JSON");
  certify->add_option("--family", family)->required();
  certify->add_option("--mode", mode);
  certify->add_option("--out", out_path);
  certify->add_flag("--run-grid", with_grid, "recompute the grid scan instead of the published one");
  certify->add_option("--step", gstep);
  certify->add_option("--threads", threads);

  int fig = 1;
  auto* figure = app.add_subcommand("figure", "emit figure data as CSV");
  figure->add_option("which", fig, "1|2|3|4")->required();
  figure->add_option("--csv", csv, "output path")->required();

  unsigned digits = 50;
  auto* verify = app.add_subcommand("verify", "oracle cross-check table");
  verify->add_option("--digits", digits, "oracle precision (>= 50)");

  std::string out_dir = "reproduction";
  auto* repro = app.add_subcommand("reproduce-all", "emit certificates, figures, scans, summary");
  repro->add_option("--out", out_dir)->required();
  repro->add_option("--step", gstep);
  repro->add_option("--threads", threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(eval)) return run_eval(family, param, mode, json);
    if (app.got_subcommand(inf)) return run_inf(family, mode);
    if (app.got_subcommand(scan)) return run_scan(scan_which, from, to, csv);
    if (app.got_subcommand(grid)) return run_grid(gfrom, gto, gstep, gterms, threads, csv);
    if (app.got_subcommand(certify))
      return run_certify(family, mode, out_path, with_grid, gstep, threads);
    if (app.got_subcommand(figure)) return run_figure(fig, csv);
    if (app.got_subcommand(verify)) return run_verify(digits);
    if (app.got_subcommand(repro)) return run_reproduce(out_dir, gstep, threads);
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
