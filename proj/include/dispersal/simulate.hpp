#pragma once

#include <functional>

#include "dispersal/model.hpp"
#include "dispersal/rng.hpp"

namespace dispersal {

// Cross-moment query: A must lie in [0,1] (the parent window), B is any
// bounded interval.
struct MomentQuery {
    Interval A;
    Interval B;
};

// Parent process: Poisson(n*lambda) points, positions from `parent_sampler`
// (uniform on [0,1] by default). Offspring: each parent independently gets a
// Poisson(mu) brood at X_i + sigma * D with D from the dispersal model.
//
// Draw order is fixed as (parent count, parent positions, per-parent brood
// counts, displacements) and none of those draws depends on sigma, so two
// calls with the same seed and different sigma are coupled: identical parents
// and displacements, offspring rescaled. Degenerate diagnostics are allowed
// (n*lambda == 0 yields empty clouds; sigma == 0 stacks offspring on
// parents); strict parameter validation is the caller's concern.
PointClouds sample_cox(const ModelParams& params, const DispersalModel& model,
                       rng::SeedSpec seed);
PointClouds sample_cox(const ModelParams& params, const DispersalModel& model,
                       rng::SeedSpec seed,
                       const std::function<double(rng::Stream&)>& parent_sampler);

// Poisson(n*lambda) parents, exactly one offspring per parent.
PointClouds sample_one_to_one(const ModelParams& params, const DispersalModel& model,
                              rng::SeedSpec seed);

// round(n) i.i.d. pairs (X_i, X_i + sigma D_i); X_i uniform on [0,1].
PointClouds sample_iid_pairs(const ModelParams& params, const DispersalModel& model,
                             rng::SeedSpec seed);

// E[M(A) N(B)] for the Cox model with uniform parents:
//   (n lambda)^2 mu |A| Q(A = [0,1], B) + n lambda mu Q(A, B)
// where Q(A, B) = int_A int_B f_sigma(y - x) dy dx is evaluated with the
// model CDF and adaptive quadrature (absolute tolerance 1e-9), clipped to the
// support of f_sigma. Throws on invalid queries or non-convergence.
double expected_MN(const ModelParams& params, const DispersalModel& model,
                   const MomentQuery& query);

// E[N(B)] = n lambda mu Q([0,1], B).
double expected_N(const ModelParams& params, const DispersalModel& model,
                  const Interval& B);

// E[N(B1) N(B2)] = E[N(B1)] E[N(B2)] + n lambda mu^2 Q2([0,1], B1, B2) for
// disjoint B1, B2, with Q2 the second-order offspring moment integral.
// Throws std::invalid_argument when the intervals overlap.
double expected_NN(const ModelParams& params, const DispersalModel& model,
                   const Interval& B1, const Interval& B2);

// Number of positions inside the closed interval; positions must be sorted.
std::size_t count_in(const std::vector<double>& sorted_positions, const Interval& where);

}  // namespace dispersal
