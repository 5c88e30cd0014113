#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dispersal/rng.hpp"

namespace dispersal {

// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool valid() const;
    bool overlaps(const Interval& other) const;
};

// Scale parameters of the parent/offspring point process. `n` is the
// sample-size parameter (parents arrive at intensity n*lambda on [0,1]);
// `mu` is the mean offspring count per parent; `sigma` the dispersal scale.
struct ModelParams {
    double n = 1.0;
    double lambda = 1.0;
    double mu = 1.0;
    double sigma = 1.0;

    // Throws std::invalid_argument unless n >= 1, lambda > 0, mu > 0 and
    // 0 < sigma <= 1.
    void validate() const;
};

// Evaluation abscissa for density estimators. `interior` records whether z0
// lies strictly inside the dispersal support (-1/2, 1/2).
struct EvalPoint {
    double z0 = 0.0;
    bool interior = true;
};

EvalPoint make_eval_point(double z0);
void validate_eval_point(const EvalPoint& p);

// Dispersal density on [-1/2, 1/2] with the hooks the estimators need.
// `char_fn` is optional and used for diagnostics only.
struct DispersalModel {
    std::string name;
    std::function<double(double)> density;
    std::function<double(double)> cdf;
    std::function<double(rng::Stream&)> sampler;
    std::function<std::complex<double>(double)> char_fn;
};

// Shifted Beta(2,3): f(z) = 12 (1/2 + z)(1/2 - z)^2 on [-1/2, 1/2], with
// closed-form CDF and inverse-CDF bisection sampling.
DispersalModel make_beta23_model();

struct ModelDiagnostics {
    double density_integral = 0.0;
    double quadrature_mean = 0.0;
    double sampler_mean = 0.0;
    double sampler_se = 0.0;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

// Checks that the density integrates to one (quadrature, 1e-9), is supported
// in [-1/2, 1/2], that the CDF is consistent with the density, and that the
// sampler mean over 1e5 draws agrees with the quadrature mean within three
// standard errors. Violations are reported, not thrown.
ModelDiagnostics validate_model(const DispersalModel& model,
                                rng::SeedSpec seed = {0x5EED5EED5EED5EEDULL, 0});

// Sorted parent and offspring positions. `parentage`, when present, maps each
// offspring index to the index of its parent in `parents`.
struct PointClouds {
    std::vector<double> parents;
    std::vector<double> offspring;
    std::optional<std::vector<std::size_t>> parentage;
};

// Sorts both clouds (ascending) and permutes/remaps parentage accordingly.
PointClouds make_point_clouds(std::vector<double> parents,
                              std::vector<double> offspring,
                              std::optional<std::vector<std::size_t>> parentage =
                                  std::nullopt);

// Throws std::invalid_argument if a cloud is unsorted, a position is not
// finite, or parentage is inconsistent.
void validate_clouds(const PointClouds& clouds);

}  // namespace dispersal
