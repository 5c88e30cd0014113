#include "dispersal/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dispersal/quadrature.hpp"

namespace dispersal {

namespace {

void check_sampler_params(const ModelParams& params, const DispersalModel& model) {
    if (!model.sampler)
        throw std::invalid_argument("sampler: dispersal model has no sampler hook");
    if (!(params.n >= 0.0) || !(params.lambda >= 0.0) || !(params.mu >= 0.0))
        throw std::invalid_argument("sampler: n, lambda, mu must be nonnegative");
    if (!(params.sigma >= 0.0) || !(params.sigma <= 1.0))
        throw std::invalid_argument("sampler: sigma must be in [0, 1]");
}

}  // namespace

PointClouds sample_cox(const ModelParams& params, const DispersalModel& model,
                       rng::SeedSpec seed) {
    return sample_cox(params, model, seed,
                      [](rng::Stream& s) { return s.uniform01(); });
}

PointClouds sample_cox(const ModelParams& params, const DispersalModel& model,
                       rng::SeedSpec seed,
                       const std::function<double(rng::Stream&)>& parent_sampler) {
    check_sampler_params(params, model);
    rng::Stream stream(seed);

    const std::uint64_t parent_count = stream.poisson(params.n * params.lambda);
    std::vector<double> parents(parent_count);
    for (auto& x : parents) x = parent_sampler(stream);

    std::vector<std::uint64_t> broods(parent_count);
    for (auto& c : broods) c = stream.poisson(params.mu);

    std::vector<double> offspring;
    std::vector<std::size_t> parentage;
    for (std::size_t i = 0; i < parent_count; ++i) {
        for (std::uint64_t c = 0; c < broods[i]; ++c) {
            const double displacement = model.sampler(stream);
            offspring.push_back(parents[i] + params.sigma * displacement);
            parentage.push_back(i);
        }
    }
    return make_point_clouds(std::move(parents), std::move(offspring),
                             std::move(parentage));
}

PointClouds sample_one_to_one(const ModelParams& params, const DispersalModel& model,
                              rng::SeedSpec seed) {
    check_sampler_params(params, model);
    rng::Stream stream(seed);

    const std::uint64_t parent_count = stream.poisson(params.n * params.lambda);
    std::vector<double> parents(parent_count);
    for (auto& x : parents) x = stream.uniform01();

    std::vector<double> offspring(parent_count);
    std::vector<std::size_t> parentage(parent_count);
    for (std::size_t i = 0; i < parent_count; ++i) {
        offspring[i] = parents[i] + params.sigma * model.sampler(stream);
        parentage[i] = i;
    }
    return make_point_clouds(std::move(parents), std::move(offspring),
                             std::move(parentage));
}

PointClouds sample_iid_pairs(const ModelParams& params, const DispersalModel& model,
                             rng::SeedSpec seed) {
    check_sampler_params(params, model);
    rng::Stream stream(seed);

    const auto pairs = static_cast<std::size_t>(std::llround(params.n));
    std::vector<double> parents(pairs);
    std::vector<double> offspring(pairs);
    std::vector<std::size_t> parentage(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
        parents[i] = stream.uniform01();
        offspring[i] = parents[i] + params.sigma * model.sampler(stream);
        parentage[i] = i;
    }
    return make_point_clouds(std::move(parents), std::move(offspring),
                             std::move(parentage));
}

namespace {

// Q(A, B) = int_A [F((B.hi - x)/sigma) - F((B.lo - x)/sigma)] dx. The inner
// offspring integral is the model CDF in closed form; the outer integral is
// split where the CDF arguments cross the dispersal support edges.
double q_integral(const ModelParams& params, const DispersalModel& model,
                  const Interval& A, const Interval& B, const char* context) {
    const double sigma = params.sigma;
    const auto inner = [&](double x) {
        return model.cdf((B.hi - x) / sigma) - model.cdf((B.lo - x) / sigma);
    };
    const std::vector<double> cuts = {B.hi - 0.5 * sigma, B.hi + 0.5 * sigma,
                                      B.lo - 0.5 * sigma, B.lo + 0.5 * sigma};
    return quad::integrate_or_throw(inner, A.lo, A.hi, cuts, 1e-11, context);
}

void check_query(const Interval& A, const Interval& B) {
    if (!A.valid() || A.lo < 0.0 || A.hi > 1.0)
        throw std::invalid_argument("moment query: A must be an interval inside [0,1]");
    if (!B.valid())
        throw std::invalid_argument("moment query: B must be a bounded interval");
}

void check_moment_params(const ModelParams& params, const DispersalModel& model) {
    params.validate();
    if (!model.cdf)
        throw std::invalid_argument("moment query: dispersal model has no cdf hook");
}

}  // namespace

double expected_MN(const ModelParams& params, const DispersalModel& model,
                   const MomentQuery& query) {
    check_moment_params(params, model);
    check_query(query.A, query.B);
    const double nl = params.n * params.lambda;
    const double q_full = q_integral(params, model, {0.0, 1.0}, query.B,
                                     "expected_MN: Q([0,1],B)");
    const double q_ab = q_integral(params, model, query.A, query.B,
                                   "expected_MN: Q(A,B)");
    return nl * nl * params.mu * query.A.length() * q_full + nl * params.mu * q_ab;
}

double expected_N(const ModelParams& params, const DispersalModel& model,
                  const Interval& B) {
    check_moment_params(params, model);
    check_query({0.0, 1.0}, B);
    return params.n * params.lambda * params.mu *
           q_integral(params, model, {0.0, 1.0}, B, "expected_N: Q([0,1],B)");
}

double expected_NN(const ModelParams& params, const DispersalModel& model,
                   const Interval& B1, const Interval& B2) {
    check_moment_params(params, model);
    check_query({0.0, 1.0}, B1);
    check_query({0.0, 1.0}, B2);
    if (B1.overlaps(B2))
        throw std::invalid_argument("expected_NN: B1 and B2 must be disjoint");

    const double sigma = params.sigma;
    const auto band = [&](const Interval& B, double x) {
        return model.cdf((B.hi - x) / sigma) - model.cdf((B.lo - x) / sigma);
    };
    std::vector<double> cuts;
    for (const Interval* B : {&B1, &B2}) {
        cuts.push_back(B->hi - 0.5 * sigma);
        cuts.push_back(B->hi + 0.5 * sigma);
        cuts.push_back(B->lo - 0.5 * sigma);
        cuts.push_back(B->lo + 0.5 * sigma);
    }
    const double q2 = quad::integrate_or_throw(
        [&](double x) { return band(B1, x) * band(B2, x); }, 0.0, 1.0, cuts,
        1e-11, "expected_NN: Q2([0,1],B1,B2)");

    return expected_N(params, model, B1) * expected_N(params, model, B2) +
           params.n * params.lambda * params.mu * params.mu * q2;
}

std::size_t count_in(const std::vector<double>& sorted_positions, const Interval& where) {
    const auto lo = std::lower_bound(sorted_positions.begin(), sorted_positions.end(),
                                     where.lo);
    const auto hi = std::upper_bound(lo, sorted_positions.end(), where.hi);
    return static_cast<std::size_t>(hi - lo);
}

}  // namespace dispersal
