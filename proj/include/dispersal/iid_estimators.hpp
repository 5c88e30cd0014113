#pragma once

#include <vector>

#include "dispersal/kernels.hpp"
#include "dispersal/model.hpp"

namespace dispersal {

// Per-offspring nearest parent: index into the sorted parent array and the
// sigma-scaled absolute distance. Ties break toward the smallest index.
struct NearestMatch {
    std::vector<std::size_t> parent_index;
    std::vector<double> distance_scaled;
};

// Throws std::invalid_argument on empty parents or sigma <= 0.
NearestMatch nearest_match(const PointClouds& clouds, double sigma);

// Right-continuous empirical CDF of a sample.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> sample);
    double operator()(double z) const;
    std::size_t size() const { return sorted_.size(); }

private:
    std::vector<double> sorted_;
};

// Lattice-folded CDF estimator for the dispersal CDF at z0:
//   (1/n) sum_i sum_{l >= 0} K_{sigma h}(sigma z0 - l - Y_i),
// n = |offspring|. Requires a kernel supported in [-1/2, 1/2].
double dutch_cdf(const PointClouds& clouds, double sigma, const Kernel& kernel,
                 double z0, double h);

// Kernel density estimate from signed nearest-parent displacements:
//   (1/n) sum_i K_h(z0 - (Y_i - X_(i))/sigma).
double nearest_parent_density(const PointClouds& clouds, double sigma,
                              const Kernel& kernel, double z0, double h);

// CDF estimator of |D| from scaled nearest-parent distances E_i:
//   G_n(z0) = 1 - (1 - 2 sigma z0)^(-n+1) (1 - H_n(z0)),
// valid for z0 in [0, 1/(2 sigma)); outside that it throws std::domain_error.
double brown_cdf(const std::vector<double>& scaled_distances, double sigma,
                 double z0);
double brown_cdf(const PointClouds& clouds, double sigma, double z0);

// Pair-counting CDF estimator of |D|:
//   (1/n) sum_{i,j} 1{|X_j - Y_i| <= sigma z0} - 2 sigma (n-1) z0.
// Requires matched cloud sizes (|X| == |Y| == n) and z0 >= 0.
double counting_cdf(const PointClouds& clouds, double sigma, double z0,
                    bool naive = false);

// Pair-counting density estimator of |D|:
//   (1/n) sum_{i,j} K_h(z0 - |X_j - Y_i|/sigma) - 2 sigma (n-1).
// An empty kernel window yields exactly the background term.
double counting_density(const PointClouds& clouds, double sigma,
                        const Kernel& kernel, double z0, double h,
                        bool naive = false);

}  // namespace dispersal
