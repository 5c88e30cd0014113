#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dispersal/kernels.hpp"
#include "dispersal/model.hpp"
#include "dispersal/point_estimators.hpp"
#include "dispersal/rng.hpp"

namespace dispersal {

struct RateParams {
    double s = 1.0;
    double n = 1.0;
    double sigma = 1.0;
};

// Four-regime minimax rate in (n, sigma):
//   sigma <= 1/n                          : n^(-s/(2s+1))
//   1/n <= sigma < n^(-(2s+1)/(2s+2))     : sigma^(s/(2s+1))
//   ... <= sigma < n^(-(4s+3)/(6s+6))     : sigma sqrt(n)
//   ... <= sigma <= 1                     : (n sigma)^(-s/(2s+3))
// Continuous across the three boundaries.
double rate_fn(const RateParams& rp);

struct McConfig {
    ModelParams base;                   // n, lambda, mu (sigma comes from the grid)
    DispersalModel model;
    Kernel kernel;
    std::vector<double> taus;           // sigma = n^tau; filled from sigmas if empty
    std::vector<double> sigmas;         // alternative direct grid
    double z0 = 0.0;
    std::size_t replicates = 500;
    std::uint64_t master_seed = 0;
    std::vector<std::string> estimators = {"f1", "f2"};
    double s = 2.0;                     // smoothness driving bandwidth_rule
    double c = 0.7;                     // bandwidth constant
    std::size_t threads = 0;            // 0: DISPERSAL_THREADS or hardware
};

struct McResultRow {
    std::string estimator;
    double n = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double tau = 0.0;
    double z0 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    std::size_t replicates = 0;
    double mean = 0.0;
    double bias = 0.0;
    double variance = 0.0;
    double rmse = 0.0;
    std::string flag = "ok";
    std::uint64_t seed = 0;
};

// Monte Carlo sweep over the sigma grid. Per replicate r the stream id is r,
// shared across the whole grid (common random numbers: identical parent
// draws, displacements rescaled per sigma). Cells evaluate in parallel;
// aggregation runs in fixed order, so rows are bit-identical for any worker
// count. Estimator precondition violations become flagged rows, not aborts.
std::vector<McResultRow> run_mc(const McConfig& config);

// Least-squares slope of log(rmse) against log(n) or log(sigma).
enum class SlopeCovariate { n, sigma };
double fit_slope(const std::vector<McResultRow>& rows, SlopeCovariate covariate);
double fit_slope_xy(const std::vector<double>& xs, const std::vector<double>& ys);

// Results CSV with the fixed header
// estimator,n,lambda,mu,sigma,tau,z0,h1,h2,replicates,mean,bias,variance,rmse,flag,seed
std::string results_csv(const std::vector<McResultRow>& rows);

// Polyline plot of log_n(rmse) against tau = log_n(sigma), one polyline per
// estimator plus the rate_fn reference curve.
std::string results_svg(const std::vector<McResultRow>& rows, double n, double s);

// Worker count: `requested` if positive, else DISPERSAL_THREADS, else
// hardware concurrency; DISPERSAL_THREADS additionally caps the result.
std::size_t resolve_threads(std::size_t requested);

// Deterministic parallel map: body(i) for i in [0, count); results must land
// in preallocated slots.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace dispersal
