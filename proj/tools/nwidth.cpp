// nwidth command-line tool: generate point sets, estimate n-width and
// covering curves, eigenvalue tails, dimension fits and constrained-KRR
// risk curves.  Uses only the public C API of libnwidth.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nwidth.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

[[noreturn]] void die(const std::string& msg) {
  std::cerr << "nwidth: " << msg << "\n";
  std::exit(kExitFailure);
}

void check(nw_status st, const char* what) {
  if (st != NW_OK)
    die(std::string(what) + ": " + nw_status_name(st) + " (" + nw_last_error() + ")");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct OutFile {
  std::ofstream stream;
  explicit OutFile(const std::string& path) : stream(path) {
    if (!stream) die("cannot open for writing: " + path);
  }
};

// Every output file starts with the tool version and the fully resolved
// configuration, so re-running the header line reproduces the body.
void write_header(std::ostream& out, const std::string& resolved,
                  const std::string& columns) {
  out << "# nwidth " << nw_version() << " | " << resolved << "\n";
  if (!columns.empty()) out << "# columns: " << columns << "\n";
}

struct Handle {
  nw_points* pts = nullptr;
  ~Handle() { nw_points_free(pts); }
};

struct KernelHandle {
  nw_kernel* k = nullptr;
  ~KernelHandle() { nw_kernel_free(k); }
};

nw_kernel* parse_kernel(const std::string& spec) {
  nw_kernel* k = nullptr;
  check(nw_kernel_parse(spec.c_str(), &k), "kernel");
  return k;
}

std::string canonical_kernel(nw_kernel* k) {
  char buf[256];
  check(nw_kernel_format(k, buf, sizeof buf), "kernel format");
  return buf;
}

void save_points_with_config(nw_points* pts, const std::string& path,
                             const std::string& resolved) {
  OutFile f(path);
  int64_t n = nw_points_count(pts);
  int64_t d = nw_points_dim(pts);
  write_header(f.stream, resolved, "");
  f.stream << "# dim=" << d << " label=" << nw_points_label(pts) << "\n";
  std::vector<double> data(n * d);
  check(nw_points_data(pts, data.data()), "points data");
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < d; ++j) {
      if (j) f.stream << ',';
      f.stream << fmt(data[i * d + j]);
    }
    f.stream << '\n';
  }
}

// Two-column CSV reader for widths/cover/risk curves; '#' lines skipped,
// but a "# columns: ..." line is captured so the caller can tell curve
// kinds apart.
void read_curve(const std::string& path, std::vector<double>& xs,
                std::vector<double>& ys, std::string& columns) {
  std::istream* in;
  std::ifstream file;
  if (path == "-") {
    in = &std::cin;
  } else {
    file.open(path);
    if (!file) die("cannot open: " + path);
    in = &file;
  }
  std::string line;
  int64_t lineno = 0;
  while (std::getline(*in, line)) {
    ++lineno;
    if (line.rfind("# columns: ", 0) == 0) columns = line.substr(11);
    if (line.empty() || line[0] == '#') continue;
    if (!line.empty() && !std::isdigit(static_cast<unsigned char>(line[0])) &&
        line[0] != '-' && line[0] != '+' && line[0] != '.')
      continue;  // column header line
    double a, b;
    char* end = nullptr;
    a = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) die(path + ": line " + std::to_string(lineno) + ": bad number");
    while (*end == ',' || *end == ' ' || *end == '\t') ++end;
    const char* second = end;
    b = std::strtod(second, &end);
    if (end == second) die(path + ": line " + std::to_string(lineno) + ": need two columns");
    xs.push_back(a);
    ys.push_back(b);
  }
  if (xs.size() < 2) die(path + ": fewer than two data rows");
}

std::vector<int64_t> parse_sizes(const std::string& text) {
  std::vector<int64_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    char* end = nullptr;
    int64_t v = std::strtoll(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0' || v < 1)
      die("--sizes: bad entry '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) die("--sizes: empty list");
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"empirical Kolmogorov n-widths and intrinsic dimensions of point sets"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expanded help for all subcommands");

  int threads = -1;
  app.add_option("--threads", threads, "thread cap for parallel sections (0 = auto)");

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate a point set and write it as CSV");
  gen->require_subcommand(1);
  struct GenArgs {
    int level = 4;
    int64_t n = 1000;
    int d = 3;
    uint64_t seed = 0;
    double a = -1.0;
    int b = 7;
    int terms = -1;
    double dt = 0.005;
    int64_t burn_in = 10000;
    std::vector<double> init{1.0, 1.0, 1.0};
    std::string out;
  } g;
  auto* gen_cantor = gen->add_subcommand("cantor", "middle-thirds Cantor set endpoints");
  gen_cantor->add_option("--level", g.level, "construction depth (2^level points)")->required();
  auto* gen_weier = gen->add_subcommand("weierstrass", "Weierstrass function graph");
  gen_weier->add_option("--n", g.n, "number of points")->required();
  gen_weier->add_option("--a", g.a, "amplitude base in (0,1); default b^-1/2");
  gen_weier->add_option("--b", g.b, "frequency base (integer >= 2)");
  gen_weier->add_option("--terms", g.terms, "series terms; default chosen so a^terms < 1e-12");
  auto* gen_carpet = gen->add_subcommand("carpet", "Sierpinski carpet corners");
  gen_carpet->add_option("--level", g.level, "subdivision depth (8^level points)")->required();
  auto* gen_menger = gen->add_subcommand("menger", "Menger sponge corners");
  gen_menger->add_option("--level", g.level, "subdivision depth (20^level points)")->required();
  auto* gen_sphere = gen->add_subcommand("sphere", "uniform sample of S^{d-1}");
  gen_sphere->add_option("--n", g.n, "number of points")->required();
  gen_sphere->add_option("--d", g.d, "ambient dimension");
  gen_sphere->add_option("--seed", g.seed, "rng seed");
  auto* gen_lorenz = gen->add_subcommand("lorenz", "Lorenz attractor trajectory (rescaled)");
  gen_lorenz->add_option("--n", g.n, "number of recorded states")->required();
  gen_lorenz->add_option("--dt", g.dt, "RK4 step (<= 0.02)");
  gen_lorenz->add_option("--burn-in", g.burn_in, "discarded initial steps");
  gen_lorenz->add_option("--init", g.init, "initial state (3 values)")->expected(3);
  for (auto* sc : {gen_cantor, gen_weier, gen_carpet, gen_menger, gen_sphere, gen_lorenz})
    sc->add_option("--out", g.out, "output CSV path")->required();

  // ---- widths ----
  auto* widths = app.add_subcommand(
      "widths", "greedy n-width upper bounds (or, with --cover, the covering curve)");
  struct WidthArgs {
    std::string kernel;
    std::string points;
    int64_t budget = 0;
    double pivot_tol = -1.0;
    double cover_eps = -1.0;
    int64_t cover_max = -1;
    std::string out;
    std::string plot;
  } w;
  widths->add_option("--kernel", w.kernel, "kernel spec, e.g. 'family=exp gamma=1 a=1'")->required();
  widths->add_option("--points", w.points, "input points CSV")->required();
  widths->add_option("-T,--budget", w.budget, "number of greedy steps");
  widths->add_option("--pivot-tol", w.pivot_tol, "width-scale stop tolerance (default 1e-6 w0)");
  widths->add_option("--cover", w.cover_eps, "run the greedy metric cover down to this radius instead");
  widths->add_option("--cover-max", w.cover_max, "cap on cover centers (enables cover mode)");
  widths->add_option("--out", w.out, "output CSV path")->required();
  widths->add_option("--plot-data", w.plot, "also write gnuplot-ready log-log data here");

  // ---- spectrum ----
  auto* spectrum = app.add_subcommand("spectrum",
                                      "eigenvalues of the normalized Gram matrix and tail lower bounds");
  struct SpecArgs {
    std::string kernel;
    std::string points;
    int64_t nmax = -1;
    std::string out;
    std::string plot;
  } s;
  spectrum->add_option("--kernel", s.kernel, "kernel spec")->required();
  spectrum->add_option("--points", s.points, "input points CSV")->required();
  spectrum->add_option("--nmax", s.nmax, "largest n for the tail bounds (default M-1)");
  spectrum->add_option("--out", s.out, "output CSV path")->required();
  spectrum->add_option("--plot-data", s.plot, "also write gnuplot-ready log-log data here");

  // ---- dim ----
  auto* dim = app.add_subcommand("dim", "log-log slope fit and dimension estimate for a curve");
  struct DimArgs {
    std::string widths_file;
    std::string cover_file;
    std::string window;
    std::string method = "ransac";
    uint64_t seed = 0;
    int iters = 1000;
    double threshold = 0.05;
    std::string out;
  } di;
  auto* dw = dim->add_option("--widths", di.widths_file,
                             "widths CSV (t,w_t,...); '-' reads stdin");
  auto* dc = dim->add_option("--cover", di.cover_file, "cover CSV (n,eps_n,...)");
  dw->excludes(dc);
  dim->add_option("--window", di.window, "inclusive index window A:B into the curve");
  dim->add_option("--method", di.method, "ransac|ols")
      ->check(CLI::IsMember({"ransac", "ols"}));
  dim->add_option("--seed", di.seed, "RANSAC seed");
  dim->add_option("--ransac-iters", di.iters, "RANSAC hypotheses");
  dim->add_option("--ransac-threshold", di.threshold, "RANSAC inlier band (log units)");
  dim->add_option("--out", di.out, "also write the JSON report here");

  // ---- krr ----
  auto* krr = app.add_subcommand("krr", "constrained-KRR excess-risk decay experiment");
  struct KrrArgs {
    std::string kernel;
    int d = 2;
    std::string sizes = "32,64,128,256,512,1024,2048";
    int64_t trials = 10;
    int64_t ntest = 2000;
    double noise = 0.2;
    uint64_t seed = 0;
    std::string out;
    std::string plot;
  } kr;
  krr->add_option("--kernel", kr.kernel, "kernel spec")->required();
  krr->add_option("--d", kr.d, "sphere ambient dimension")->required();
  krr->add_option("--sizes", kr.sizes, "comma-separated training sizes");
  krr->add_option("--trials", kr.trials, "independent trials per size");
  krr->add_option("--ntest", kr.ntest, "test points per trial");
  krr->add_option("--noise", kr.noise, "noise amplitude (Y ~ noise*U[-1,1])");
  krr->add_option("--seed", kr.seed, "base seed");
  krr->add_option("--out", kr.out, "output CSV path")->required();
  krr->add_option("--plot-data", kr.plot, "also write gnuplot-ready log-log data here");

  // ---- verify ----
  auto* verify = app.add_subcommand("verify", "run the cross-module invariant suite on a preset");
  std::string preset = "sphere-laplace-small";
  verify->add_option("--preset", preset,
                     "sphere-laplace-small | sphere-gaussian-small | sphere-ntk-small | "
                     "cantor-laplace-small");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (threads < 0) {
    if (const char* env = std::getenv("NWIDTH_THREADS")) threads = std::atoi(env);
  }
  if (threads >= 0) nw_set_threads(threads);
  int resolved_threads = threads < 0 ? 0 : threads;

  if (gen->parsed()) {
    Handle h;
    std::ostringstream cfg;
    if (gen_cantor->parsed()) {
      check(nw_points_cantor(g.level, &h.pts), "gen cantor");
      cfg << "gen cantor level=" << g.level;
    } else if (gen_weier->parsed()) {
      double a = g.a > 0.0 ? g.a : 1.0 / std::sqrt(static_cast<double>(g.b));
      int terms = g.terms > 0
                      ? g.terms
                      : std::max(1, static_cast<int>(std::ceil(std::log(1e12) / std::log(1.0 / a))));
      check(nw_points_weierstrass(g.n, a, g.b, terms, &h.pts), "gen weierstrass");
      cfg << "gen weierstrass n=" << g.n << " a=" << fmt(a) << " b=" << g.b
          << " terms=" << terms;
    } else if (gen_carpet->parsed()) {
      check(nw_points_carpet(g.level, &h.pts), "gen carpet");
      cfg << "gen carpet level=" << g.level;
    } else if (gen_menger->parsed()) {
      check(nw_points_menger(g.level, &h.pts), "gen menger");
      cfg << "gen menger level=" << g.level;
    } else if (gen_sphere->parsed()) {
      check(nw_points_sphere(g.n, g.d, g.seed, &h.pts), "gen sphere");
      cfg << "gen sphere n=" << g.n << " d=" << g.d << " seed=" << g.seed;
    } else {
      double init[3] = {g.init[0], g.init[1], g.init[2]};
      check(nw_points_lorenz(g.n, g.dt, g.burn_in, init, &h.pts), "gen lorenz");
      cfg << "gen lorenz n=" << g.n << " dt=" << fmt(g.dt) << " burn-in=" << g.burn_in
          << " init=" << fmt(init[0]) << "," << fmt(init[1]) << "," << fmt(init[2]);
    }
    cfg << " threads=" << resolved_threads << " out=" << g.out;
    save_points_with_config(h.pts, g.out, cfg.str());
    std::cerr << "wrote " << nw_points_count(h.pts) << " points (dim "
              << nw_points_dim(h.pts) << ") to " << g.out << "\n";
    return kExitOk;
  }

  if (widths->parsed()) {
    KernelHandle kh;
    kh.k = parse_kernel(w.kernel);
    Handle h;
    check(nw_points_load(w.points.c_str(), &h.pts), "load points");
    bool cover_mode = w.cover_eps >= 0.0 || w.cover_max > 0;
    std::ostringstream cfg;
    if (cover_mode) {
      double eps = w.cover_eps >= 0.0 ? w.cover_eps : 0.0;
      nw_cover* cover = nullptr;
      check(nw_greedy_cover(kh.k, h.pts, eps, w.cover_max, &cover), "greedy cover");
      int64_t n = nw_cover_count(cover);
      std::vector<int64_t> centers(n);
      std::vector<double> radii(n);
      nw_cover_centers(cover, centers.data());
      nw_cover_radius_curve(cover, radii.data());
      cfg << "widths --cover kernel=\"" << canonical_kernel(kh.k) << "\" points=" << w.points
          << " epsilon=" << fmt(eps) << " max-centers=" << w.cover_max
          << " threads=" << resolved_threads << " out=" << w.out;
      OutFile f(w.out);
      write_header(f.stream, cfg.str(), "n,eps_n,center_index");
      for (int64_t i = 0; i < n; ++i)
        f.stream << (i + 1) << ',' << fmt(radii[i]) << ',' << centers[i] << '\n';
      if (!w.plot.empty()) {
        OutFile p(w.plot);
        write_header(p.stream, cfg.str(), "log(1/eps_n) log(n)");
        for (int64_t i = 0; i < n; ++i)
          if (radii[i] > 0.0)
            p.stream << fmt(std::log(1.0 / radii[i])) << ' '
                     << fmt(std::log(static_cast<double>(i + 1))) << '\n';
      }
      std::cerr << "cover: " << n << " centers, radius " << nw_cover_radius(cover) << "\n";
      nw_cover_free(cover);
      return kExitOk;
    }
    if (w.budget <= 0) die("widths: -T/--budget is required");
    nw_greedy_run* run = nullptr;
    check(nw_greedy_widths(kh.k, h.pts, w.budget, w.pivot_tol, &run), "greedy widths");
    int64_t steps = nw_greedy_count(run);
    std::vector<double> wt(steps);
    std::vector<int64_t> sel(steps);
    nw_greedy_widths_data(run, wt.data());
    nw_greedy_selected(run, sel.data());
    cfg << "widths kernel=\"" << canonical_kernel(kh.k) << "\" points=" << w.points
        << " T=" << w.budget << " pivot-tol=" << fmt(w.pivot_tol)
        << " threads=" << resolved_threads << " out=" << w.out;
    OutFile f(w.out);
    write_header(f.stream, cfg.str(), "t,w_t,selected_index");
    int64_t trunc = nw_greedy_truncated_at(run);
    if (trunc >= 0) f.stream << "# truncated_at=" << trunc << "\n";
    for (int64_t t = 0; t < steps; ++t)
      f.stream << t << ',' << fmt(wt[t]) << ',' << sel[t] << '\n';
    if (!w.plot.empty()) {
      OutFile p(w.plot);
      write_header(p.stream, cfg.str(), "log(t) -log(w_t)");
      for (int64_t t = 1; t < steps; ++t)
        if (wt[t] > 0.0)
          p.stream << fmt(std::log(static_cast<double>(t))) << ' '
                   << fmt(-std::log(wt[t])) << '\n';
    }
    std::cerr << "widths: " << steps << " steps";
    if (trunc >= 0) std::cerr << " (truncated at " << trunc << ")";
    std::cerr << "\n";
    nw_greedy_free(run);
    return kExitOk;
  }

  if (spectrum->parsed()) {
    KernelHandle kh;
    kh.k = parse_kernel(s.kernel);
    Handle h;
    check(nw_points_load(s.points.c_str(), &h.pts), "load points");
    nw_spectrum* sp = nullptr;
    check(nw_gram_eigenvalues(kh.k, h.pts, &sp), "gram eigenvalues");
    int64_t m = nw_spectrum_size(sp);
    int64_t nmax = s.nmax >= 0 ? std::min(s.nmax, m - 1) : m - 1;
    std::vector<double> ev(m), wl(nmax + 1);
    nw_spectrum_data(sp, ev.data());
    check(nw_ismagilov_bounds(sp, nmax, wl.data()), "ismagilov bounds");
    std::ostringstream cfg;
    cfg << "spectrum kernel=\"" << canonical_kernel(kh.k) << "\" points=" << s.points
        << " nmax=" << nmax << " threads=" << resolved_threads << " out=" << s.out;
    OutFile f(s.out);
    write_header(f.stream, cfg.str(), "i,lambda_i,wL_i");
    f.stream << "# negatives_clipped=" << nw_spectrum_negatives_clipped(sp)
             << " trace=" << fmt(nw_spectrum_trace(sp)) << "\n";
    for (int64_t i = 0; i < m; ++i) {
      f.stream << i << ',' << fmt(ev[i]);
      if (i <= nmax) f.stream << ',' << fmt(wl[i]);
      f.stream << '\n';
    }
    if (!s.plot.empty()) {
      OutFile p(s.plot);
      write_header(p.stream, cfg.str(), "log(n) -log(wL_n)");
      for (int64_t i = 1; i <= nmax; ++i)
        if (wl[i] > 0.0)
          p.stream << fmt(std::log(static_cast<double>(i))) << ' '
                   << fmt(-std::log(wl[i])) << '\n';
    }
    nw_spectrum_free(sp);
    return kExitOk;
  }

  if (dim->parsed()) {
    bool from_cover = !di.cover_file.empty();
    if (di.widths_file.empty() && di.cover_file.empty())
      die("dim: one of --widths or --cover is required");
    std::vector<double> xs, ys;
    std::string columns;
    read_curve(from_cover ? di.cover_file : di.widths_file, xs, ys, columns);
    int64_t lo = -1, hi = -1;
    if (!di.window.empty()) {
      if (std::sscanf(di.window.c_str(), "%" SCNd64 ":%" SCNd64, &lo, &hi) != 2)
        die("dim: --window must be A:B");
    } else if (!from_cover && !columns.empty() && columns.rfind("t,w_t", 0) != 0) {
      // Not a widths curve (e.g. a krr risk curve): fit the whole range
      // instead of the width-curve default window.
      lo = 0;
      hi = static_cast<int64_t>(xs.size()) - 1;
    }
    nw_fit_params params = nw_fit_params_default();
    params.iterations = di.iters;
    params.residual_threshold = di.threshold;
    params.seed = di.seed;
    nw_fit_method method = di.method == "ols" ? NW_FIT_OLS : NW_FIT_RANSAC;
    nw_fit_result fit{};
    double dimension = 0.0;
    if (from_cover) {
      check(nw_metric_dimension(xs.data(), ys.data(), static_cast<int64_t>(xs.size()),
                                lo, hi, method, &params, &dimension, &fit),
            "metric dimension");
    } else {
      check(nw_effective_dimension_curve(xs.data(), ys.data(),
                                         static_cast<int64_t>(xs.size()), lo, hi,
                                         method, &params, &dimension, &fit),
            "effective dimension");
    }
    json out;
    out["source"] = from_cover ? "cover" : "widths";
    out["slope"] = fit.slope;
    out["intercept"] = fit.intercept;
    if (std::isfinite(dimension)) out["dimension"] = dimension;
    else out["dimension"] = nullptr;
    out["window"] = {fit.window_lo, fit.window_hi};
    out["method"] = di.method;
    out["inliers"] = fit.inliers;
    out["used"] = fit.used;
    out["dropped"] = fit.dropped;
    if (method == NW_FIT_RANSAC) {
      out["seed"] = di.seed;
      out["iterations"] = di.iters;
      out["residual_threshold"] = di.threshold;
    }
    std::string text = out.dump(2);
    std::cout << text << "\n";
    if (!di.out.empty()) {
      OutFile f(di.out);
      f.stream << text << "\n";
    }
    return kExitOk;
  }

  if (krr->parsed()) {
    KernelHandle kh;
    kh.k = parse_kernel(kr.kernel);
    std::vector<int64_t> sizes = parse_sizes(kr.sizes);
    std::vector<nw_risk_row> rows(sizes.size());
    int64_t failed = 0;
    check(nw_excess_risk_experiment(kh.k, kr.d, sizes.data(),
                                    static_cast<int64_t>(sizes.size()), kr.trials,
                                    kr.ntest, kr.noise, kr.seed, rows.data(), &failed),
          "excess risk experiment");
    std::ostringstream cfg;
    cfg << "krr kernel=\"" << canonical_kernel(kh.k) << "\" d=" << kr.d
        << " sizes=" << kr.sizes << " trials=" << kr.trials << " ntest=" << kr.ntest
        << " noise=" << fmt(kr.noise) << " seed=" << kr.seed
        << " threads=" << resolved_threads << " out=" << kr.out;
    OutFile f(kr.out);
    write_header(f.stream, cfg.str(), "n,mean_excess,std_excess,trials");
    if (failed > 0) f.stream << "# failed_trials=" << failed << "\n";
    for (const auto& r : rows)
      f.stream << r.n << ',' << fmt(r.mean_excess) << ',' << fmt(r.std_excess) << ','
               << r.trials << '\n';
    if (!kr.plot.empty()) {
      OutFile p(kr.plot);
      write_header(p.stream, cfg.str(), "log(n) log(mean_excess)");
      for (const auto& r : rows)
        if (r.mean_excess > 0.0)
          p.stream << fmt(std::log(static_cast<double>(r.n))) << ' '
                   << fmt(std::log(r.mean_excess)) << '\n';
    }
    if (failed > 0) std::cerr << "warning: " << failed << " trial(s) failed\n";
    return kExitOk;
  }

  if (verify->parsed()) {
    char* report = nullptr;
    int failures = 0;
    check(nw_verify_preset(preset.c_str(), &report, &failures), "verify");
    std::cout << report;
    nw_string_free(report);
    if (failures > 0) {
      std::cerr << failures << " check(s) failed\n";
      return kExitFailure;
    }
    std::cout << "all checks passed\n";
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
