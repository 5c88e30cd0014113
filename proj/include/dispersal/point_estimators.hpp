#pragma once

#include <optional>
#include <string>

#include "dispersal/kernels.hpp"
#include "dispersal/model.hpp"

namespace dispersal {

struct Bandwidths {
    double h1 = 0.0;
    double h2 = 0.0;
};

// Estimator output with a soft diagnostic flag ("ok" unless a theory-range
// precondition is merely advisory, e.g. h1 outside [(sigma n)^-1, 1]).
struct Estimate {
    double value = 0.0;
    std::string flag = "ok";
};

// Summation strategy for the double sums. `windowed` prunes with binary
// searches on the sorted clouds using the kernel supports; `naive` is the
// literal double loop. Both must agree to 1e-12 relative.
enum class SumPolicy { windowed, naive };

// Joint smoothing statistic
//   (1 / (n lambda mu sigma h1)) sum_{i,j} K'(z0/h1 - Y_j/(sigma h1))
//                                          K(z0/h2 - (Y_j - X_i)/(sigma h2)).
double joint_statistic(const PointClouds& clouds, const ModelParams& params,
                       const Kernel& kernel, double z0, const Bandwidths& bw,
                       SumPolicy policy = SumPolicy::windowed);

// The same double sum normalized as (1/(n lambda mu)) sum psi1 psi2, i.e.
// joint_statistic / (h1 h2); its expectation is bias_oracle's
// expected_statistic.
double joint_statistic_normalized(const PointClouds& clouds, const ModelParams& params,
                                  const Kernel& kernel, double z0, const Bandwidths& bw,
                                  SumPolicy policy = SumPolicy::windowed);

// Deconvolution-regime density estimate: joint statistic at h2 = 8/sigma,
// scaled by 1/(n lambda h1). Valid bandwidths are h1 in [(sigma n)^-1, 1];
// values outside produce a warning flag, not an error.
Estimate f_hat_1(const PointClouds& clouds, const ModelParams& params,
                 const Kernel& kernel, double z0, double h1,
                 SumPolicy policy = SumPolicy::windowed);

// Choice of the auxiliary h1 for f_hat_2: 1/(2 sigma) is the analyzed value;
// the practical default is max(4, 1/sigma - 1.1 h2).
enum class H1Mode { theoretical, practical };

double f2_auxiliary_h1(const ModelParams& params, double h2, H1Mode mode);

// Interaction-regime density estimate: joint statistic at h1 chosen by
// `mode`, scaled by 1/h2, minus the sigma n lambda background. Requires
// sigma < 1/8 (hard error). Empty clouds yield exactly -sigma n lambda.
Estimate f_hat_2(const PointClouds& clouds, const ModelParams& params,
                 const Kernel& kernel, double z0, double h2,
                 H1Mode mode = H1Mode::practical,
                 SumPolicy policy = SumPolicy::windowed);

// Derivative-kernel estimate normalized by the offspring count:
//   (1/|Y|) sum_j (1/(sigma h1^2)) K'(z0/h1 - Y_j/(sigma h1)).
// Throws std::invalid_argument when there are no offspring.
Estimate f_hat_dec(const PointClouds& clouds, const ModelParams& params,
                   const Kernel& kernel, double z0, double h1);

// Pair-interaction estimate normalized by the offspring count:
//   (1/|Y|) sum_{i,j} (1/h2) K(z0/h2 - (Y_j - X_i)/(sigma h2)).
// Throws std::invalid_argument when there are no offspring.
Estimate f_hat_int(const PointClouds& clouds, const ModelParams& params,
                   const Kernel& kernel, double z0, double h2,
                   SumPolicy policy = SumPolicy::windowed);

// Exact expectation decomposition of the normalized joint statistic:
//   E[(1/(n lambda mu)) sum psi1 psi2] = sigma n lambda * u_sigma + v_sigma.
// u_sigma integrates psi1 (psi2 * 1_{[0,1/sigma]}) against the offspring
// intensity density; v_sigma integrates (psi1 * 1_{[-1,0]})(sigma .) psi2 f.
// When a closed-form regime applies, its reference value is reported too:
//   u: sigma h2 >= 8 & h1 <= h2/8  ->  f(z0)/(sigma h2)   (leading order)
//      4 <= h1 < 1/sigma & sigma < 1/4 & h1 + h2 <= 1/sigma, h2 <= h1/4
//                                   ->  1/h1              (exact)
//   v: h2 <= h1/4 & h1 + h2 < 1/sigma -> f(z0)/h1         (leading order)
struct BiasOracle {
    double u_sigma = 0.0;
    double v_sigma = 0.0;
    double expected_statistic = 0.0;
    std::optional<double> u_reference;
    std::optional<double> v_reference;
    std::string u_regime;  // "deconvolution", "interaction" or ""
    std::string v_regime;  // "kernel" or ""
};

BiasOracle bias_oracle(const ModelParams& params, const DispersalModel& model,
                       const Kernel& kernel, double z0, const Bandwidths& bw,
                       double abs_tol = 1e-8);

// Rate-optimal bandwidth rules with constant c and smoothness s:
//   "f1", "dec": c (n sigma)^(-1/(2s+3))
//   "f2", "int": c min(n, 1/sigma)^(-1/(2s+1))
double bandwidth_rule(const std::string& estimator, double n, double sigma,
                      double s, double c);

}  // namespace dispersal
