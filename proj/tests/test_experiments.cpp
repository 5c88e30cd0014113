#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "dispersal/experiments.hpp"
#include "dispersal/io.hpp"
#include "dispersal/kernels.hpp"
#include "dispersal/model.hpp"

using namespace dispersal;

namespace {

McConfig base_config() {
    McConfig cfg;
    cfg.base = ModelParams{200.0, 1.0, 1.0, 1.0};
    cfg.model = make_beta23_model();
    cfg.kernel = paper_kernel();
    cfg.replicates = 50;
    cfg.master_seed = 7;
    cfg.threads = 2;
    return cfg;
}

const McResultRow& row_of(const std::vector<McResultRow>& rows,
                          const std::string& est, double tau) {
    for (const auto& r : rows)
        if (r.estimator == est && std::abs(r.tau - tau) < 1e-12) return r;
    REQUIRE(false);
    return rows.front();
}

}  // namespace

TEST_CASE("rate function: frozen values and validation") {
    CHECK(rate_fn({1.0, 1000.0, 1.0}) ==
          doctest::Approx(0.251188643150958).epsilon(1e-12));
    // sigma = 0.01 sits in the sigma*sqrt(n) window at n = 1000, s = 1
    CHECK(rate_fn({1.0, 1000.0, 0.01}) ==
          doctest::Approx(0.01 * std::sqrt(1000.0)).epsilon(1e-12));
    // deep microscopic regime: classical rate, sigma-free
    CHECK(rate_fn({2.0, 1000.0, 1e-5}) ==
          doctest::Approx(std::pow(1000.0, -0.4)).epsilon(1e-12));

    CHECK_THROWS_AS(rate_fn({0.0, 1000.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(rate_fn({1.0, 0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(rate_fn({1.0, 1000.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(rate_fn({1.0, 1000.0, 1.5}), std::invalid_argument);
}

TEST_CASE("rate function is continuous across regime boundaries") {
    for (double s : {1.0, 2.0}) {
        const double n = 1000.0;
        const double b1 = 1.0 / n;
        const double b2 = std::pow(n, -(2.0 * s + 1.0) / (2.0 * s + 2.0));
        const double b3 = std::pow(n, -(4.0 * s + 3.0) / (6.0 * s + 6.0));
        for (double b : {b1, b2, b3}) {
            const double lo = rate_fn({s, n, b * (1.0 - 1e-9)});
            const double hi = rate_fn({s, n, b * (1.0 + 1e-9)});
            CHECK(lo == doctest::Approx(hi).epsilon(1e-7));
        }
    }
}

TEST_CASE("slope fitting: exact lines and validation") {
    CHECK(fit_slope_xy({0.0, 1.0, 2.0}, {3.0, 2.5, 2.0}) ==
          doctest::Approx(-0.5).epsilon(1e-13));
    CHECK_THROWS_AS(fit_slope_xy({0.0, 1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_slope_xy({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}),
                    std::invalid_argument);

    std::vector<McResultRow> rows;
    for (double n : {100.0, 200.0, 400.0, 800.0}) {
        McResultRow r;
        r.n = n;
        r.sigma = 0.25;
        r.rmse = std::pow(n, -0.5);
        rows.push_back(r);
    }
    CHECK(fit_slope(rows, SlopeCovariate::n) == doctest::Approx(-0.5).epsilon(1e-12));

    std::vector<McResultRow> srows;
    for (double sg : {0.1, 0.2, 0.4}) {
        McResultRow r;
        r.n = 500.0;
        r.sigma = sg;
        r.rmse = sg;
        srows.push_back(r);
    }
    CHECK(fit_slope(srows, SlopeCovariate::sigma) ==
          doctest::Approx(1.0).epsilon(1e-12));

    srows.resize(2);
    CHECK_THROWS_AS(fit_slope(srows, SlopeCovariate::sigma), std::invalid_argument);
    rows[1].rmse = 0.0;
    CHECK_THROWS_AS(fit_slope(rows, SlopeCovariate::n), std::invalid_argument);
}

TEST_CASE("sweep configuration validation") {
    McConfig cfg = base_config();
    cfg.taus = {-1.0};
    cfg.replicates = 1;
    CHECK_THROWS_AS(run_mc(cfg), std::invalid_argument);

    cfg = base_config();
    CHECK_THROWS_AS(run_mc(cfg), std::invalid_argument);  // no grid at all

    cfg = base_config();
    cfg.taus = {-1.0};
    cfg.sigmas = {0.1};
    CHECK_THROWS_AS(run_mc(cfg), std::invalid_argument);

    cfg = base_config();
    cfg.taus = {-1.0};
    cfg.estimators = {"f1", "nope"};
    CHECK_THROWS_AS(run_mc(cfg), std::invalid_argument);
}

TEST_CASE("sweep rows satisfy the aggregation identity") {
    McConfig cfg = base_config();
    cfg.taus = {-1.0, -0.5};
    cfg.estimators = {"f1", "f2", "dec", "int"};
    const std::vector<McResultRow> rows = run_mc(cfg);
    REQUIRE(rows.size() == 8);
    for (const auto& r : rows) {
        CHECK(r.replicates == 50);
        CHECK(r.seed == 7);
        CHECK(r.n == 200.0);
        CHECK(r.sigma == doctest::Approx(std::pow(200.0, r.tau)).epsilon(1e-12));
        if (r.flag == "ok") {
            CHECK(std::isfinite(r.mean));
            const double want = r.bias * r.bias + r.variance;
            CHECK(r.rmse * r.rmse ==
                  doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("precondition violations surface as flags, not aborts") {
    McConfig cfg = base_config();
    cfg.base.n = 1000.0;
    cfg.taus = {0.0};  // sigma = 1 is outside the interaction estimator domain
    cfg.estimators = {"f2"};
    const std::vector<McResultRow> rows = run_mc(cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].flag == "sigma_out_of_domain");
    CHECK(std::isnan(rows[0].mean));
    CHECK(std::isnan(rows[0].rmse));

    McConfig warn = base_config();
    warn.base.n = 100.0;
    warn.sigmas = {0.001};  // h1 rule lands below 1/(sigma n)
    warn.estimators = {"f1"};
    const std::vector<McResultRow> wrows = run_mc(warn);
    REQUIRE(wrows.size() == 1);
    CHECK(wrows[0].flag == "h1_below_theory_range");
    CHECK(std::isfinite(wrows[0].mean));
    CHECK(std::isfinite(wrows[0].rmse));
}

TEST_CASE("results CSV: header, row count, round-trippable numbers") {
    McConfig cfg = base_config();
    cfg.taus = {-1.0, -0.6};
    const std::vector<McResultRow> rows = run_mc(cfg);
    const std::string csv = results_csv(rows);
    const std::string header =
        "estimator,n,lambda,mu,sigma,tau,z0,h1,h2,replicates,mean,bias,"
        "variance,rmse,flag,seed";
    CHECK(csv.rfind(header + "\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : csv) lines += (ch == '\n');
    CHECK(lines == rows.size() + 1);
    CHECK(csv.find(io::format_double(rows[0].rmse)) != std::string::npos);
}

TEST_CASE("sweep output is byte-identical across worker counts and reruns") {
    McConfig cfg = base_config();
    cfg.taus = {-1.2, -0.8, -0.4};
    cfg.estimators = {"f1", "f2", "dec", "int"};
    cfg.replicates = 30;
    std::vector<std::string> outputs;
    for (std::size_t threads : {1u, 2u, 8u}) {
        cfg.threads = threads;
        outputs.push_back(results_csv(run_mc(cfg)));
    }
    CHECK(outputs[0] == outputs[1]);
    CHECK(outputs[0] == outputs[2]);
    cfg.threads = 2;
    CHECK(results_csv(run_mc(cfg)) == outputs[0]);
}

TEST_CASE("interaction wins deep in the microscopic regime, joint wins shallow") {
    McConfig cfg = base_config();
    cfg.base.n = 1000.0;
    cfg.taus = {-1.2, -0.4};
    cfg.replicates = 100;
    cfg.master_seed = 99;
    const std::vector<McResultRow> rows = run_mc(cfg);
    const McResultRow& f1_deep = row_of(rows, "f1", -1.2);
    const McResultRow& f2_deep = row_of(rows, "f2", -1.2);
    const McResultRow& f1_shallow = row_of(rows, "f1", -0.4);
    const McResultRow& f2_shallow = row_of(rows, "f2", -0.4);
    CHECK(f2_deep.rmse < f1_deep.rmse);
    CHECK(f1_shallow.rmse < f2_shallow.rmse);
    // both estimators aim at f(0) = 1.5 where they are in-domain
    CHECK(std::abs(f2_deep.mean - 1.5) < 0.5);
    CHECK(std::abs(f1_shallow.mean - 1.5) < 0.5);
}

TEST_CASE("SVG report holds one polyline per estimator plus the reference") {
    McConfig cfg = base_config();
    cfg.base.n = 1000.0;
    cfg.taus = {-1.0, -0.5, 0.0};  // f2 is flagged at tau = 0 and skipped
    cfg.replicates = 20;
    const std::vector<McResultRow> rows = run_mc(cfg);
    const std::string svg = results_svg(rows, cfg.base.n, cfg.s);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1))
        ++polylines;
    CHECK(polylines == 3);
}

TEST_CASE("worker-count resolution honors the environment cap") {
    setenv("DISPERSAL_THREADS", "3", 1);
    CHECK(resolve_threads(0) == 3);
    CHECK(resolve_threads(8) == 3);
    CHECK(resolve_threads(2) == 2);
    unsetenv("DISPERSAL_THREADS");
    CHECK(resolve_threads(5) == 5);
    CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("parallel map fills every slot and propagates exceptions") {
    std::vector<std::size_t> slots(1000, 0);
    parallel_for(slots.size(), 4, [&](std::size_t i) { slots[i] = i * i; });
    for (std::size_t i = 0; i < slots.size(); ++i) CHECK(slots[i] == i * i);

    std::atomic<int> done{0};
    CHECK_THROWS_AS(parallel_for(64, 4,
                                 [&](std::size_t i) {
                                     if (i == 17)
                                         throw std::runtime_error("boom");
                                     done.fetch_add(1);
                                 }),
                    std::runtime_error);
}
