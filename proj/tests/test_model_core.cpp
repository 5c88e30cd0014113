#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dispersal/io.hpp"
#include "dispersal/model.hpp"

using namespace dispersal;

TEST_CASE("interval basics") {
    const Interval a{0.2, 0.7};
    CHECK(a.valid());
    CHECK(a.length() == doctest::Approx(0.5));
    CHECK(a.contains(0.2));
    CHECK(a.contains(0.7));
    CHECK_FALSE(a.contains(0.71));
    CHECK(a.overlaps({0.6, 0.9}));
    CHECK_FALSE(a.overlaps({0.71, 0.9}));
    const Interval backwards{0.5, 0.4};
    CHECK_FALSE(backwards.valid());
}

TEST_CASE("parameter validation") {
    auto check = [](double n, double lambda, double mu, double sigma) {
        ModelParams{n, lambda, mu, sigma}.validate();
    };
    CHECK_NOTHROW(check(1.0, 0.5, 2.0, 1.0));
    CHECK_THROWS_AS(check(0.5, 1.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(check(10.0, 0.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(check(10.0, 1.0, -1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(check(10.0, 1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(check(10.0, 1.0, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("evaluation points know the support interior") {
    CHECK(make_eval_point(0.0).interior);
    CHECK(make_eval_point(0.49).interior);
    CHECK_FALSE(make_eval_point(0.5).interior);
    CHECK_FALSE(make_eval_point(-0.7).interior);
    CHECK_NOTHROW(validate_eval_point(make_eval_point(0.3)));
    const EvalPoint bad{std::nan(""), true};
    CHECK_THROWS_AS(validate_eval_point(bad), std::invalid_argument);
}

TEST_CASE("shifted Beta(2,3) closed forms") {
    const DispersalModel m = make_beta23_model();
    CHECK(m.density(0.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(m.density(-0.5) == doctest::Approx(0.0));
    CHECK(m.density(0.5) == doctest::Approx(0.0));
    CHECK(m.density(0.6) == 0.0);
    CHECK(m.density(-0.6) == 0.0);
    // mode at -1/6 with value 16/9
    CHECK(m.density(-1.0 / 6.0) == doctest::Approx(16.0 / 9.0).epsilon(1e-14));
    CHECK(m.density(-1.0 / 6.0 + 1e-4) < m.density(-1.0 / 6.0));
    CHECK(m.density(-1.0 / 6.0 - 1e-4) < m.density(-1.0 / 6.0));

    CHECK(m.cdf(-0.5) == doctest::Approx(0.0));
    CHECK(m.cdf(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.cdf(0.0) == doctest::Approx(0.6875).epsilon(1e-15));
    CHECK(m.cdf(-0.25) == doctest::Approx(0.26171875).epsilon(1e-14));
    CHECK(m.cdf(0.25) == doctest::Approx(0.94921875).epsilon(1e-14));
    CHECK(m.cdf(-1.0) == 0.0);
    CHECK(m.cdf(1.0) == 1.0);

    // CDF derivative matches the density.
    for (double z : {-0.4, -0.2, 0.0, 0.1, 0.3, 0.45}) {
        const double fd = (m.cdf(z + 1e-6) - m.cdf(z - 1e-6)) / 2e-6;
        CHECK(fd == doctest::Approx(m.density(z)).epsilon(1e-7));
    }
}

TEST_CASE("beta23 sampler hits the analytic mean") {
    const DispersalModel m = make_beta23_model();
    rng::Stream stream({77, 0});
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = m.sampler(stream);
        REQUIRE(d >= -0.5);
        REQUIRE(d <= 0.5);
        sum += d;
    }
    // mean -0.1, sd 0.2
    const double se = 0.2 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum / n + 0.1) < 4.0 * se);
}

TEST_CASE("model self-validation passes and catches a broken density") {
    const ModelDiagnostics good = validate_model(make_beta23_model());
    CHECK(good.ok());
    CHECK(good.density_integral == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(good.quadrature_mean == doctest::Approx(-0.1).epsilon(1e-7));

    DispersalModel broken = make_beta23_model();
    broken.density = [](double z) {
        return 24.0 * (0.5 + z) * (0.5 - z) * (0.5 - z) * (z >= -0.5 && z <= 0.5);
    };
    const ModelDiagnostics bad = validate_model(broken);
    CHECK_FALSE(bad.ok());
}

TEST_CASE("point cloud construction sorts and remaps parentage") {
    // parents 0.9,0.1,0.5 -> sorted 0.1,0.5,0.9 (old index 1,2,0)
    // offspring 0.7(parent 0.9), 0.2(parent 0.1) -> sorted 0.2,0.7
    const PointClouds c = make_point_clouds({0.9, 0.1, 0.5}, {0.7, 0.2},
                                            std::vector<std::size_t>{0, 1});
    REQUIRE(c.parents.size() == 3);
    CHECK(c.parents[0] == 0.1);
    CHECK(c.parents[1] == 0.5);
    CHECK(c.parents[2] == 0.9);
    REQUIRE(c.offspring.size() == 2);
    CHECK(c.offspring[0] == 0.2);
    CHECK(c.offspring[1] == 0.7);
    REQUIRE(c.parentage.has_value());
    CHECK((*c.parentage)[0] == 0);  // 0.2 came from parent 0.1
    CHECK((*c.parentage)[1] == 2);  // 0.7 came from parent 0.9
    CHECK_NOTHROW(validate_clouds(c));
}

TEST_CASE("cloud validation rejects corruption") {
    PointClouds c = make_point_clouds({0.1, 0.5}, {0.2}, std::vector<std::size_t>{0});
    CHECK_NOTHROW(validate_clouds(c));

    PointClouds unsorted = c;
    unsorted.parents = {0.5, 0.1};
    CHECK_THROWS_AS(validate_clouds(unsorted), std::invalid_argument);

    PointClouds nonfinite = c;
    nonfinite.offspring = {std::nan("")};
    CHECK_THROWS_AS(validate_clouds(nonfinite), std::invalid_argument);

    PointClouds badparent = c;
    (*badparent.parentage)[0] = 5;
    CHECK_THROWS_AS(validate_clouds(badparent), std::invalid_argument);

    PointClouds badsize = c;
    badparent.parentage = std::vector<std::size_t>{0, 1};
    CHECK_THROWS_AS(validate_clouds(badparent), std::invalid_argument);
    (void)badsize;
}

TEST_CASE("doubles survive the shortest round-trip") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -7.25, 0.0, 123456.789,
                     5e-324, 1.7976931348623157e308}) {
        const std::string s = io::format_double(v);
        CHECK(io::parse_double(s) == v);
    }
}

TEST_CASE("clouds CSV round-trips byte for byte") {
    const PointClouds c =
        make_point_clouds({0.1, 0.2, 1.0 / 3.0}, {0.05, 0.9999999999999999});
    const std::string csv = io::clouds_csv(c);
    CHECK(csv.substr(0, 14) == "kind,position\n");
    const PointClouds back = io::parse_clouds_csv(csv);
    CHECK(back.parents == c.parents);
    CHECK(back.offspring == c.offspring);
    CHECK(io::clouds_csv(back) == csv);
}

TEST_CASE("cloud files carry their sidecar metadata") {
    const std::string path = "/tmp/dispersal_test_clouds.csv";
    const PointClouds c = make_point_clouds({0.25, 0.75}, {0.3});
    io::CloudsMeta meta;
    meta.params = {100.0, 1.0, 2.0, 0.05};
    meta.variant = "one2one";
    meta.seed = {42, 3};
    io::write_clouds(c, meta, path);

    const auto [back, meta2] = io::read_clouds(path);
    CHECK(back.parents == c.parents);
    CHECK(back.offspring == c.offspring);
    CHECK(meta2.params.n == 100.0);
    CHECK(meta2.params.mu == 2.0);
    CHECK(meta2.params.sigma == 0.05);
    CHECK(meta2.variant == "one2one");
    CHECK(meta2.seed.master == 42);
    CHECK(meta2.seed.stream == 3);
    CHECK_FALSE(meta2.created_at.empty());
    std::remove(path.c_str());
    std::remove(io::sidecar_path_for(path).c_str());

    CHECK_THROWS_AS(io::read_clouds("/tmp/definitely_missing_clouds_file.csv"),
                    std::runtime_error);
}

TEST_CASE("sidecar path replaces the extension") {
    CHECK(io::sidecar_path_for("a/b/run.csv") == "a/b/run.json");
    CHECK(io::sidecar_path_for("noext") == "noext.json");
    CHECK(io::sidecar_path_for("dir.v2/noext") == "dir.v2/noext.json");
}
