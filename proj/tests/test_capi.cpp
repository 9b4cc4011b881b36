// Exercises the shared library surface end to end: handles, error codes,
// buffer contracts.

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "nwidth.h"

TEST_CASE("version and status names") {
  CHECK(std::string(nw_version()).size() > 0);
  CHECK(std::string(nw_status_name(NW_OK)) == "ok");
  CHECK(std::string(nw_status_name(NW_ERR_PARSE)) == "parse error");
}

TEST_CASE("kernel parse/format/eval/distance through the C API") {
  nw_kernel* k = nullptr;
  REQUIRE(nw_kernel_parse("family=exp gamma=1 a=1", &k) == NW_OK);
  char buf[128];
  REQUIRE(nw_kernel_format(k, buf, sizeof buf) == NW_OK);
  CHECK(std::string(buf).find("family=exp") == 0);
  char tiny[4];
  CHECK(nw_kernel_format(k, tiny, sizeof tiny) == NW_ERR_INVALID_ARGUMENT);

  double x = 0.0, y = std::log(2.0), out = 0.0;
  REQUIRE(nw_kernel_eval(k, &x, &y, 1, &out) == NW_OK);
  CHECK(out == doctest::Approx(0.5));
  REQUIRE(nw_kernel_distance(k, &x, &y, 1, &out) == NW_OK);
  CHECK(out == doctest::Approx(1.0));
  nw_kernel_free(k);

  nw_kernel* bad = nullptr;
  CHECK(nw_kernel_parse("family=nope", &bad) == NW_ERR_PARSE);
  CHECK(std::string(nw_last_error()).find("family") != std::string::npos);
}

TEST_CASE("null pointers are reported, not dereferenced") {
  CHECK(nw_kernel_parse(nullptr, nullptr) == NW_ERR_NULL_POINTER);
  CHECK(nw_points_cantor(3, nullptr) == NW_ERR_NULL_POINTER);
  CHECK(std::string(nw_last_error()).find("null") != std::string::npos);
}

TEST_CASE("point generation, save/load, subset") {
  nw_points* pts = nullptr;
  REQUIRE(nw_points_cantor(4, &pts) == NW_OK);
  CHECK(nw_points_count(pts) == 16);
  CHECK(nw_points_dim(pts) == 1);
  CHECK(std::string(nw_points_label(pts)) == "cantor-4");

  auto path = (std::filesystem::temp_directory_path() / "nw_capi.csv").string();
  REQUIRE(nw_points_save(pts, path.c_str()) == NW_OK);
  nw_points* loaded = nullptr;
  REQUIRE(nw_points_load(path.c_str(), &loaded) == NW_OK);
  CHECK(nw_points_count(loaded) == 16);
  std::vector<double> a(16), b(16);
  nw_points_data(pts, a.data());
  nw_points_data(loaded, b.data());
  for (int i = 0; i < 16; ++i) CHECK(a[i] == b[i]);
  std::filesystem::remove(path);

  int64_t idx[3] = {0, 5, 15};
  nw_points* sub = nullptr;
  REQUIRE(nw_points_subset(pts, idx, 3, &sub) == NW_OK);
  CHECK(nw_points_count(sub) == 3);
  nw_points_free(sub);
  nw_points_free(loaded);
  nw_points_free(pts);

  CHECK(nw_points_cantor(99, &pts) == NW_ERR_INVALID_ARGUMENT);
  CHECK(nw_points_load("/no/such/file.csv", &loaded) == NW_ERR_IO);
}

TEST_CASE("gram blocks and arrays through the C API") {
  nw_kernel* k = nullptr;
  REQUIRE(nw_kernel_parse("family=exp gamma=1 a=1", &k) == NW_OK);
  double data[6] = {0.0, 0.0, 1.0, 0.0, 0.0, 2.0};
  nw_points* pts = nullptr;
  REQUIRE(nw_points_from_array(data, 3, 2, "triple", &pts) == NW_OK);
  CHECK(nw_points_count(pts) == 3);
  CHECK(nw_points_dim(pts) == 2);
  CHECK(std::string(nw_points_label(pts)) == "triple");

  double g[9];
  REQUIRE(nw_kernel_gram(k, pts, nullptr, g) == NW_OK);
  for (int i = 0; i < 3; ++i) {
    CHECK(g[i * 3 + i] == doctest::Approx(1.0));
    for (int j = 0; j < 3; ++j) CHECK(g[i * 3 + j] == g[j * 3 + i]);
  }
  double cross[9];
  REQUIRE(nw_kernel_gram(k, pts, pts, cross) == NW_OK);
  for (int i = 0; i < 9; ++i) CHECK(cross[i] == doctest::Approx(g[i]));

  double one[2] = {3.0, 4.0};
  nw_points* single = nullptr;
  REQUIRE(nw_points_from_array(one, 1, 2, nullptr, &single) == NW_OK);
  double row[3];
  REQUIRE(nw_kernel_gram(k, single, pts, row) == NW_OK);
  double v = 0.0;
  REQUIRE(nw_kernel_eval(k, one, data, 2, &v) == NW_OK);
  CHECK(row[0] == doctest::Approx(v));
  nw_points_free(single);
  nw_points_free(pts);
  nw_kernel_free(k);
}

TEST_CASE("zonal kernel rejects off-sphere points with the right code") {
  nw_kernel* k = nullptr;
  REQUIRE(nw_kernel_parse("family=ntk-relu", &k) == NW_OK);
  double x[3] = {1, 1, 1};
  double y[3] = {1, 0, 0};
  double out;
  CHECK(nw_kernel_eval(k, x, y, 3, &out) == NW_ERR_NOT_UNIT_NORM);
  nw_kernel_free(k);
}

TEST_CASE("greedy run accessors and residual query") {
  nw_kernel* k = nullptr;
  nw_points* pts = nullptr;
  REQUIRE(nw_kernel_parse("family=exp gamma=1 a=1", &k) == NW_OK);
  REQUIRE(nw_points_sphere(120, 3, 6, &pts) == NW_OK);
  nw_greedy_run* run = nullptr;
  REQUIRE(nw_greedy_widths(k, pts, 20, -1.0, &run) == NW_OK);
  int64_t steps = nw_greedy_count(run);
  REQUIRE(steps == 20);
  CHECK(nw_greedy_truncated_at(run) == -1);
  std::vector<double> w(steps);
  std::vector<int64_t> sel(steps);
  std::vector<double> res(120);
  REQUIRE(nw_greedy_widths_data(run, w.data()) == NW_OK);
  REQUIRE(nw_greedy_selected(run, sel.data()) == NW_OK);
  REQUIRE(nw_greedy_residual_diag(run, res.data()) == NW_OK);
  CHECK(w[0] == doctest::Approx(1.0));
  for (int64_t t = 1; t < steps; ++t) CHECK(w[t] <= w[t - 1] + 1e-12);
  std::vector<double> row(steps);
  REQUIRE(nw_greedy_chol_row(run, steps - 1, row.data()) == NW_OK);
  CHECK(row[steps - 1] == doctest::Approx(w[steps - 1]));
  CHECK(nw_greedy_chol_row(run, steps, row.data()) == NW_ERR_INVALID_ARGUMENT);

  std::vector<double> coords(120 * 3);
  nw_points_data(pts, coords.data());
  double s0 = 0.0;
  REQUIRE(nw_residual_at(run, k, pts, 0, coords.data(), 3, &s0) == NW_OK);
  CHECK(s0 == doctest::Approx(1.0));

  // sandwich against the spectrum of the same set
  nw_spectrum* sp = nullptr;
  REQUIRE(nw_gram_eigenvalues(k, pts, &sp) == NW_OK);
  CHECK(nw_spectrum_size(sp) == 120);
  std::vector<double> ev(120), wl(20);
  REQUIRE(nw_spectrum_data(sp, ev.data()) == NW_OK);
  REQUIRE(nw_ismagilov_bounds(sp, 19, wl.data()) == NW_OK);
  double total = 0.0;
  for (double v : ev) total += v;
  CHECK(wl[0] == doctest::Approx(std::sqrt(total)));
  nw_sandwich_result sand{};
  REQUIRE(nw_sandwich_report(sp, run, &sand) == NW_OK);
  CHECK(sand.max_violation_eigen <= 1e-8);
  CHECK(sand.max_violation_tail <= 1e-8);
  nw_spectrum_free(sp);
  nw_greedy_free(run);

  CHECK(nw_greedy_widths(k, pts, 0, -1.0, &run) == NW_ERR_INVALID_ARGUMENT);
  nw_points_free(pts);
  nw_kernel_free(k);
}

TEST_CASE("cover and net radius through the C API") {
  nw_kernel* k = nullptr;
  nw_points* pts = nullptr;
  REQUIRE(nw_kernel_parse("family=exp gamma=1 a=1", &k) == NW_OK);
  REQUIRE(nw_points_sphere(200, 3, 14, &pts) == NW_OK);
  nw_cover* cover = nullptr;
  REQUIRE(nw_greedy_cover(k, pts, 0.5, -1, &cover) == NW_OK);
  int64_t n = nw_cover_count(cover);
  REQUIRE(n >= 2);
  CHECK(nw_cover_radius(cover) <= 0.5);
  std::vector<int64_t> centers(n);
  std::vector<double> radii(n);
  REQUIRE(nw_cover_centers(cover, centers.data()) == NW_OK);
  REQUIRE(nw_cover_radius_curve(cover, radii.data()) == NW_OK);
  double r = 0.0;
  REQUIRE(nw_net_radius(k, pts, pts, centers.data(), n, &r) == NW_OK);
  CHECK(r == doctest::Approx(nw_cover_radius(cover)));
  nw_cover_free(cover);
  nw_points_free(pts);
  nw_kernel_free(k);
}

TEST_CASE("slope fits through the C API") {
  std::vector<double> xs(50), ys(50);
  for (int i = 0; i < 50; ++i) {
    xs[i] = i + 1.0;
    ys[i] = std::pow(xs[i], -2.0);
  }
  nw_fit_params params = nw_fit_params_default();
  CHECK(params.iterations == 1000);
  nw_fit_result fit{};
  REQUIRE(nw_fit_loglog(xs.data(), ys.data(), 50, -1, -1, NW_FIT_OLS, &params, &fit,
                        nullptr) == NW_OK);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-10));

  double dim = 0.0;
  REQUIRE(nw_effective_dimension_curve(xs.data(), ys.data(), 50, -1, -1, NW_FIT_OLS,
                                       &params, &dim, &fit) == NW_OK);
  CHECK(dim == doctest::Approx(0.5).epsilon(1e-9));

  std::vector<double> eps(50);
  for (int i = 0; i < 50; ++i) eps[i] = std::pow(xs[i], -0.5);
  REQUIRE(nw_metric_dimension(xs.data(), eps.data(), 50, -1, -1, NW_FIT_OLS, &params,
                              &dim, &fit) == NW_OK);
  CHECK(dim == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("krr through the C API") {
  nw_kernel* k = nullptr;
  nw_points* x = nullptr;
  REQUIRE(nw_kernel_parse("family=exp gamma=1 a=1", &k) == NW_OK);
  REQUIRE(nw_points_sphere(60, 3, 3, &x) == NW_OK);
  std::vector<double> y(60);
  for (int i = 0; i < 60; ++i) y[i] = 0.2 * std::sin(i * 0.7);

  nw_krr_model* m = nullptr;
  REQUIRE(nw_krr_fit_constrained(k, x, y.data(), nullptr, &m) == NW_OK);
  CHECK(nw_krr_size(m) == 60);
  if (!nw_krr_sub_unit(m)) CHECK(std::fabs(nw_krr_rkhs_norm(m) - 1.0) <= 1e-3);
  CHECK(nw_krr_lambda(m) > 0.0);
  std::vector<double> alpha(60), pred(60);
  REQUIRE(nw_krr_alpha(m, alpha.data()) == NW_OK);
  REQUIRE(nw_krr_predict(m, x, pred.data()) == NW_OK);
  nw_krr_free(m);

  int64_t sizes[2] = {16, 32};
  nw_risk_row rows[2];
  int64_t failed = -1;
  REQUIRE(nw_excess_risk_experiment(k, 2, sizes, 2, 2, 64, 0.2, 7, rows, &failed) ==
          NW_OK);
  CHECK(failed == 0);
  CHECK(rows[0].n == 16);
  CHECK(rows[0].trials == 2);
  CHECK(rows[0].mean_excess >= 0.0);
  nw_points_free(x);
  nw_kernel_free(k);
}

TEST_CASE("verify preset through the C API") {
  char* report = nullptr;
  int failures = -1;
  REQUIRE(nw_verify_preset("sphere-laplace-small", &report, &failures) == NW_OK);
  REQUIRE(report != nullptr);
  CHECK(failures == 0);
  CHECK(std::string(report).find("ok") != std::string::npos);
  nw_string_free(report);
  CHECK(nw_verify_preset("no-such-preset", &report, &failures) ==
        NW_ERR_INVALID_ARGUMENT);
}

TEST_CASE("thread cap round trip") {
  nw_set_threads(2);
  CHECK(nw_get_threads() == 2);
  nw_set_threads(0);
  CHECK(nw_get_threads() == 0);
}
