#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dispersal/model.hpp"
#include "dispersal/simulate.hpp"

using namespace dispersal;

namespace {

const DispersalModel& beta23() {
    static const DispersalModel m = make_beta23_model();
    return m;
}

// Upper 0.999 chi-square quantiles, df = index.
double chi2_999(int df) {
    static const double q[] = {0.0,    10.828, 13.816, 16.266, 18.467,
                               20.515, 22.458, 24.322, 26.125, 27.877,
                               29.588, 31.264, 32.909, 34.528};
    REQUIRE(df >= 1);
    REQUIRE(df <= 13);
    return q[df];
}

}  // namespace

TEST_CASE("cox sampling is reproducible and respects bounds") {
    const ModelParams p{200.0, 1.0, 1.5, 0.08};
    const PointClouds a = sample_cox(p, beta23(), {99, 4});
    const PointClouds b = sample_cox(p, beta23(), {99, 4});
    CHECK(a.parents == b.parents);
    CHECK(a.offspring == b.offspring);
    REQUIRE(a.parentage.has_value());
    CHECK(*a.parentage == *b.parentage);
    CHECK_NOTHROW(validate_clouds(a));

    for (double x : a.parents) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
    for (double y : a.offspring) {
        CHECK(y >= -p.sigma / 2.0);
        CHECK(y <= 1.0 + p.sigma / 2.0);
    }
    CHECK(a.parentage->size() == a.offspring.size());
    for (std::size_t pi : *a.parentage) CHECK(pi < a.parents.size());

    const PointClouds c = sample_cox(p, beta23(), {99, 5});
    CHECK(a.parents != c.parents);
}

TEST_CASE("offspring sit at parent plus scaled displacement") {
    const ModelParams p{100.0, 1.0, 2.0, 0.3};
    const PointClouds c = sample_cox(p, beta23(), {7, 0});
    REQUIRE(c.parentage.has_value());
    for (std::size_t j = 0; j < c.offspring.size(); ++j) {
        const double d = (c.offspring[j] - c.parents[(*c.parentage)[j]]) / p.sigma;
        CHECK(d >= -0.5);
        CHECK(d <= 0.5);
    }
}

TEST_CASE("same seed couples clouds across sigma") {
    const ModelParams p1{150.0, 1.0, 1.0, 0.2};
    ModelParams p2 = p1;
    p2.sigma = 0.01;
    const PointClouds a = sample_cox(p1, beta23(), {1234, 8});
    const PointClouds b = sample_cox(p2, beta23(), {1234, 8});
    CHECK(a.parents == b.parents);
    REQUIRE(a.offspring.size() == b.offspring.size());

    // Identical displacement draws, only rescaled: compare multisets of
    // (parent index, displacement).
    auto displacements = [](const PointClouds& c, double sigma) {
        std::vector<std::pair<std::size_t, double>> d;
        for (std::size_t j = 0; j < c.offspring.size(); ++j)
            d.emplace_back((*c.parentage)[j],
                           (c.offspring[j] - c.parents[(*c.parentage)[j]]) / sigma);
        std::sort(d.begin(), d.end());
        return d;
    };
    const auto da = displacements(a, p1.sigma);
    const auto db = displacements(b, p2.sigma);
    REQUIRE(da.size() == db.size());
    for (std::size_t i = 0; i < da.size(); ++i) {
        CHECK(da[i].first == db[i].first);
        CHECK(da[i].second == doctest::Approx(db[i].second).epsilon(1e-9));
    }
}

TEST_CASE("degenerate parameters produce degenerate clouds") {
    ModelParams p{10.0, 0.0, 1.0, 0.1};
    const PointClouds empty = sample_cox(p, beta23(), {3, 0});
    CHECK(empty.parents.empty());
    CHECK(empty.offspring.empty());

    ModelParams zero_sigma{50.0, 1.0, 1.0, 0.0};
    const PointClouds stacked = sample_one_to_one(zero_sigma, beta23(), {3, 1});
    CHECK(stacked.parents == stacked.offspring);
}

TEST_CASE("parent counts are Poisson(n lambda)") {
    const ModelParams p{5.0, 1.0, 1.0, 0.1};
    const double mean = 5.0;
    const int reps = 10000;
    // bins 0..11, last bin open
    std::vector<double> observed(13, 0.0);
    for (int r = 0; r < reps; ++r) {
        const PointClouds c = sample_cox(p, beta23(), {555, static_cast<std::uint64_t>(r)});
        const std::size_t m = c.parents.size();
        observed[std::min<std::size_t>(m, 12)] += 1.0;
    }
    std::vector<double> expected(13, 0.0);
    double pmf = std::exp(-mean), cum = 0.0;
    for (int k = 0; k < 12; ++k) {
        expected[k] = reps * pmf;
        cum += pmf;
        pmf *= mean / (k + 1);
    }
    expected[12] = reps * (1.0 - cum);
    double chi2 = 0.0;
    for (int k = 0; k < 13; ++k)
        chi2 += (observed[k] - expected[k]) * (observed[k] - expected[k]) / expected[k];
    CHECK(chi2 < chi2_999(12));
}

TEST_CASE("per-parent brood counts are Poisson(mu)") {
    const ModelParams p{5.0, 1.0, 1.0, 0.1};
    const int reps = 10000;
    std::vector<double> observed(6, 0.0);  // 0..4, 5+
    double parents_total = 0.0;
    for (int r = 0; r < reps; ++r) {
        const PointClouds c =
            sample_cox(p, beta23(), {777, static_cast<std::uint64_t>(r)});
        std::vector<std::size_t> brood(c.parents.size(), 0);
        for (std::size_t pi : *c.parentage) brood[pi] += 1;
        for (std::size_t b : brood) observed[std::min<std::size_t>(b, 5)] += 1.0;
        parents_total += static_cast<double>(c.parents.size());
    }
    std::vector<double> expected(6, 0.0);
    double pmf = std::exp(-1.0), cum = 0.0;
    for (int k = 0; k < 5; ++k) {
        expected[k] = parents_total * pmf;
        cum += pmf;
        pmf /= (k + 1);
    }
    expected[5] = parents_total * (1.0 - cum);
    double chi2 = 0.0;
    for (int k = 0; k < 6; ++k)
        chi2 += (observed[k] - expected[k]) * (observed[k] - expected[k]) / expected[k];
    CHECK(chi2 < chi2_999(5));
}

TEST_CASE("one-to-one sampling pairs every parent with one child") {
    const ModelParams p{80.0, 1.0, 3.0, 0.05};  // mu ignored
    const PointClouds c = sample_one_to_one(p, beta23(), {11, 0});
    CHECK(c.parents.size() == c.offspring.size());
    REQUIRE(c.parentage.has_value());
    std::vector<bool> used(c.parents.size(), false);
    for (std::size_t pi : *c.parentage) {
        CHECK_FALSE(used[pi]);
        used[pi] = true;
    }
}

TEST_CASE("iid pairs follow the dispersal law (DKW)") {
    const ModelParams p{100000.0, 1.0, 1.0, 0.03};
    const PointClouds c = sample_iid_pairs(p, beta23(), {2718, 0});
    REQUIRE(c.offspring.size() == 100000);
    std::vector<double> d(c.offspring.size());
    for (std::size_t j = 0; j < d.size(); ++j)
        d[j] = (c.offspring[j] - c.parents[(*c.parentage)[j]]) / p.sigma;
    std::sort(d.begin(), d.end());
    double sup = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        const double F = beta23().cdf(d[j]);
        const double lo = static_cast<double>(j) / d.size();
        const double hi = static_cast<double>(j + 1) / d.size();
        sup = std::max({sup, std::abs(F - lo), std::abs(F - hi)});
    }
    CHECK(sup < 0.01);
}

TEST_CASE("count_in matches brute force") {
    const std::vector<double> xs = {0.1, 0.2, 0.2, 0.5, 0.9};
    CHECK(count_in(xs, {0.2, 0.5}) == 3);
    CHECK(count_in(xs, {0.0, 1.0}) == 5);
    CHECK(count_in(xs, {0.21, 0.49}) == 0);
    CHECK(count_in(xs, {0.9, 0.9}) == 1);
}

TEST_CASE("expected counts: closed cases") {
    const ModelParams p{50.0, 1.0, 2.0, 0.1};
    // the full offspring range carries all the mass
    const Interval full{-0.05, 1.05};
    CHECK(expected_N(p, beta23(), full) ==
          doctest::Approx(p.n * p.lambda * p.mu).epsilon(1e-9));
    // expected_MN with A = [0,1] reduces to (n lambda)^2 mu Q + n lambda mu Q
    const Interval unit{0.0, 1.0};
    const double q_full = expected_N(p, beta23(), full) / (p.n * p.lambda * p.mu);
    CHECK(q_full == doctest::Approx(1.0).epsilon(1e-9));
    const double mn = expected_MN(p, beta23(), {unit, full});
    CHECK(mn == doctest::Approx(p.n * p.lambda * p.mu * (p.n * p.lambda + 1.0))
                    .epsilon(1e-8));
    // overlapping product intervals are rejected
    CHECK_THROWS_AS(expected_NN(p, beta23(), {0.1, 0.5}, {0.4, 0.8}),
                    std::invalid_argument);
}

TEST_CASE("expected counts match Monte Carlo") {
    const ModelParams p{50.0, 1.0, 1.0, 0.1};
    const Interval A{0.0, 0.5};
    const Interval B{0.25, 0.75};
    const Interval B2{0.8, 1.0};
    const int reps = 20000;
    double s_mn = 0.0, q_mn = 0.0, s_n = 0.0, q_n = 0.0, s_nn = 0.0, q_nn = 0.0;
    for (int r = 0; r < reps; ++r) {
        const PointClouds c =
            sample_cox(p, beta23(), {31415, static_cast<std::uint64_t>(r)});
        const double m_a = static_cast<double>(count_in(c.parents, A));
        const double n_b = static_cast<double>(count_in(c.offspring, B));
        const double n_b2 = static_cast<double>(count_in(c.offspring, B2));
        s_mn += m_a * n_b;
        q_mn += m_a * n_b * m_a * n_b;
        s_n += n_b;
        q_n += n_b * n_b;
        s_nn += n_b * n_b2;
        q_nn += n_b * n_b2 * n_b * n_b2;
    }
    auto within4se = [&](double analytic, double sum, double sumsq) {
        const double mean = sum / reps;
        const double var = (sumsq - sum * sum / reps) / (reps - 1.0);
        const double se = std::sqrt(var / reps);
        return std::abs(mean - analytic) < 4.0 * se;
    };
    CHECK(within4se(expected_MN(p, beta23(), {A, B}), s_mn, q_mn));
    CHECK(within4se(expected_N(p, beta23(), B), s_n, q_n));
    CHECK(within4se(expected_NN(p, beta23(), B, B2), s_nn, q_nn));
}
