#include "dispersal/point_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dispersal/quadrature.hpp"

namespace dispersal {

namespace {

void check_common(const PointClouds& clouds, const ModelParams& params,
                  const Kernel& kernel, const Bandwidths& bw) {
    if (!(params.sigma > 0.0))
        throw std::invalid_argument("estimator: sigma must be > 0");
    if (!(params.n > 0.0) || !(params.lambda > 0.0) || !(params.mu > 0.0))
        throw std::invalid_argument("estimator: n, lambda, mu must be > 0");
    if (!(bw.h1 > 0.0) || !(bw.h2 > 0.0))
        throw std::invalid_argument("estimator: bandwidths must be > 0");
    if (!kernel.value || !kernel.derivative)
        throw std::invalid_argument("estimator: kernel needs value and derivative hooks");
    if (!std::isfinite(kernel.support_radius))
        throw std::invalid_argument("estimator: kernel must have compact support");
    (void)clouds;
}

// Inner sum over parents of K(z0/h2 - (Y - X_i)/(sigma h2)). Only parents
// with X_i within sigma*h2*R of (Y - sigma*z0) can contribute; the window is
// padded so borderline terms (which evaluate to exactly 0) stay harmless.
double inner_parent_sum(const std::vector<double>& parents, const Kernel& kernel,
                        double y, double z0, double sigma, double h2,
                        SumPolicy policy) {
    const double center = y - sigma * z0;
    const double radius = sigma * h2 * kernel.support_radius;
    double sum = 0.0;
    if (policy == SumPolicy::windowed) {
        const double pad = 1e-9 * radius;
        const auto lo = std::lower_bound(parents.begin(), parents.end(),
                                         center - radius - pad);
        const auto hi = std::upper_bound(lo, parents.end(), center + radius + pad);
        for (auto it = lo; it != hi; ++it)
            sum += kernel.value((center - *it) / (sigma * h2));
    } else {
        for (double x : parents) sum += kernel.value((center - x) / (sigma * h2));
    }
    return sum;
}

// Raw double sum  sum_j K'((sigma z0 - Y_j)/(sigma h1)) * inner(Y_j).
double raw_joint_sum(const PointClouds& clouds, const Kernel& kernel, double z0,
                     double sigma, const Bandwidths& bw, SumPolicy policy) {
    const std::vector<double>& offspring = clouds.offspring;
    double sum = 0.0;
    if (policy == SumPolicy::windowed) {
        const double center = sigma * z0;
        const double radius = sigma * bw.h1 * kernel.support_radius;
        const double pad = 1e-9 * radius;
        const auto lo = std::lower_bound(offspring.begin(), offspring.end(),
                                         center - radius - pad);
        const auto hi = std::upper_bound(lo, offspring.end(), center + radius + pad);
        for (auto it = lo; it != hi; ++it) {
            const double w1 =
                kernel.derivative((center - *it) / (sigma * bw.h1));
            if (w1 == 0.0) continue;
            sum += w1 * inner_parent_sum(clouds.parents, kernel, *it, z0, sigma,
                                         bw.h2, policy);
        }
    } else {
        for (double y : offspring) {
            const double w1 =
                kernel.derivative((sigma * z0 - y) / (sigma * bw.h1));
            sum += w1 * inner_parent_sum(clouds.parents, kernel, y, z0, sigma,
                                         bw.h2, policy);
        }
    }
    return sum;
}

}  // namespace

double joint_statistic(const PointClouds& clouds, const ModelParams& params,
                       const Kernel& kernel, double z0, const Bandwidths& bw,
                       SumPolicy policy) {
    check_common(clouds, params, kernel, bw);
    const double raw = raw_joint_sum(clouds, kernel, z0, params.sigma, bw, policy);
    return raw / (params.n * params.lambda * params.mu * params.sigma * bw.h1);
}

double joint_statistic_normalized(const PointClouds& clouds, const ModelParams& params,
                                  const Kernel& kernel, double z0, const Bandwidths& bw,
                                  SumPolicy policy) {
    return joint_statistic(clouds, params, kernel, z0, bw, policy) / (bw.h1 * bw.h2);
}

Estimate f_hat_1(const PointClouds& clouds, const ModelParams& params,
                 const Kernel& kernel, double z0, double h1, SumPolicy policy) {
    const Bandwidths bw{h1, 8.0 / params.sigma};
    Estimate out;
    out.value = joint_statistic(clouds, params, kernel, z0, bw, policy) /
                (params.n * params.lambda * h1);
    const double lo = 1.0 / (params.sigma * params.n);
    if (h1 < lo)
        out.flag = "h1_below_theory_range";
    else if (h1 > 1.0)
        out.flag = "h1_above_theory_range";
    return out;
}

double f2_auxiliary_h1(const ModelParams& params, double h2, H1Mode mode) {
    return mode == H1Mode::theoretical
               ? 1.0 / (2.0 * params.sigma)
               : std::max(4.0, 1.0 / params.sigma - 1.1 * h2);
}

Estimate f_hat_2(const PointClouds& clouds, const ModelParams& params,
                 const Kernel& kernel, double z0, double h2, H1Mode mode,
                 SumPolicy policy) {
    if (!(params.sigma < 0.125))
        throw std::domain_error("f_hat_2: requires sigma < 1/8");
    const double h1 = f2_auxiliary_h1(params, h2, mode);
    const Bandwidths bw{h1, h2};
    Estimate out;
    out.value = joint_statistic(clouds, params, kernel, z0, bw, policy) / h2 -
                params.sigma * params.n * params.lambda;
    if (!(h2 <= 1.0)) out.flag = "h2_above_theory_range";
    return out;
}

Estimate f_hat_dec(const PointClouds& clouds, const ModelParams& params,
                   const Kernel& kernel, double z0, double h1) {
    if (clouds.offspring.empty())
        throw std::invalid_argument("f_hat_dec: no offspring to normalize by");
    if (!(params.sigma > 0.0) || !(h1 > 0.0))
        throw std::invalid_argument("f_hat_dec: sigma and h1 must be > 0");
    const double sigma = params.sigma;
    double sum = 0.0;
    for (double y : clouds.offspring)
        sum += kernel.derivative((sigma * z0 - y) / (sigma * h1));
    Estimate out;
    out.value = sum / (clouds.offspring.size() * sigma * h1 * h1);
    return out;
}

Estimate f_hat_int(const PointClouds& clouds, const ModelParams& params,
                   const Kernel& kernel, double z0, double h2, SumPolicy policy) {
    if (clouds.offspring.empty())
        throw std::invalid_argument("f_hat_int: no offspring to normalize by");
    if (!(params.sigma > 0.0) || !(h2 > 0.0))
        throw std::invalid_argument("f_hat_int: sigma and h2 must be > 0");
    double sum = 0.0;
    for (double y : clouds.offspring)
        sum += inner_parent_sum(clouds.parents, kernel, y, z0, params.sigma, h2,
                                policy);
    Estimate out;
    out.value = sum / (clouds.offspring.size() * h2);
    return out;
}

namespace {

void append_shifted(std::vector<double>& cuts, const std::vector<double>& junctions,
                    double center, double scale) {
    for (double j : junctions) cuts.push_back(center + scale * j);
}

}  // namespace

BiasOracle bias_oracle(const ModelParams& params, const DispersalModel& model,
                       const Kernel& kernel, double z0, const Bandwidths& bw,
                       double abs_tol) {
    if (!(params.sigma > 0.0))
        throw std::invalid_argument("bias_oracle: sigma must be > 0");
    if (!(bw.h1 > 0.0) || !(bw.h2 > 0.0))
        throw std::invalid_argument("bias_oracle: bandwidths must be > 0");
    if (!kernel.value || !kernel.derivative || !kernel.antiderivative)
        throw std::invalid_argument(
            "bias_oracle: kernel needs value, derivative and antiderivative hooks");
    if (!std::isfinite(kernel.support_radius))
        throw std::invalid_argument("bias_oracle: kernel must have compact support");
    if (!model.density || !model.cdf)
        throw std::invalid_argument("bias_oracle: model needs density and cdf hooks");

    const double sigma = params.sigma;
    const double h1 = bw.h1;
    const double h2 = bw.h2;
    const double R = kernel.support_radius;
    const double quad_tol = abs_tol * 0.01;

    // u term. psi1(y) = K'((sigma z0 - y)/(sigma h1)) / (sigma h1^2); the
    // convolution (psi2 * 1_{[0,1/sigma]})(y/sigma) telescopes into the
    // kernel antiderivative, and the offspring intensity density is
    // F(y/sigma) - F((y-1)/sigma).
    const auto psi1 = [&](double y) {
        return kernel.derivative((sigma * z0 - y) / (sigma * h1)) /
               (sigma * h1 * h1);
    };
    const auto window = [&](double y) {
        const double w = y / sigma;
        return kernel.antiderivative((w - z0) / h2) -
               kernel.antiderivative((w - z0 - 1.0 / sigma) / h2);
    };
    const auto intensity = [&](double y) {
        return model.cdf(y / sigma) - model.cdf((y - 1.0) / sigma);
    };

    double u_lo = sigma * (z0 - h1 * R);
    double u_hi = sigma * (z0 + h1 * R);
    u_lo = std::max(u_lo, -0.5 * sigma);
    u_hi = std::min(u_hi, 1.0 + 0.5 * sigma);

    BiasOracle out;
    if (u_lo < u_hi) {
        std::vector<double> cuts;
        append_shifted(cuts, kernel.junctions, sigma * z0, -sigma * h1);
        append_shifted(cuts, kernel.junctions, sigma * z0, sigma * h2);
        append_shifted(cuts, kernel.junctions, sigma * z0 + 1.0, sigma * h2);
        for (double c : {-0.5 * sigma, 0.5 * sigma, 1.0 - 0.5 * sigma, 1.0 + 0.5 * sigma})
            cuts.push_back(c);
        out.u_sigma = quad::integrate_or_throw(
            [&](double y) { return psi1(y) * window(y) * intensity(y); }, u_lo,
            u_hi, cuts, quad_tol, "bias_oracle: u integral");
    }

    // v term. (psi1 * 1_{[-1,0]})(sigma z) telescopes into kernel values.
    const auto psi1_box = [&](double z) {
        const double a = (z0 - z) / h1;
        return (kernel.value(a) - kernel.value(a - 1.0 / (sigma * h1))) / h1;
    };
    const auto psi2 = [&](double z) { return kernel.value((z0 - z) / h2) / h2; };

    double v_lo = std::max(z0 - h2 * R, -0.5);
    double v_hi = std::min(z0 + h2 * R, 0.5);
    if (v_lo < v_hi) {
        std::vector<double> cuts;
        append_shifted(cuts, kernel.junctions, z0, -h2);
        append_shifted(cuts, kernel.junctions, z0, -h1);
        append_shifted(cuts, kernel.junctions, z0 - 1.0 / sigma, -h1);
        out.v_sigma = quad::integrate_or_throw(
            [&](double z) { return psi1_box(z) * psi2(z) * model.density(z); },
            v_lo, v_hi, cuts, quad_tol, "bias_oracle: v integral");
    }

    out.expected_statistic =
        sigma * params.n * params.lambda * out.u_sigma + out.v_sigma;

    if (sigma * h2 >= 8.0 && h1 <= h2 / 8.0) {
        out.u_regime = "deconvolution";
        out.u_reference = model.density(z0) / (sigma * h2);
    } else if (h1 >= 4.0 && h1 < 1.0 / sigma && sigma < 0.25 &&
               h1 + h2 <= 1.0 / sigma && h2 <= h1 / 4.0) {
        out.u_regime = "interaction";
        out.u_reference = 1.0 / h1;
    }
    if (h2 <= h1 / 4.0 && h1 + h2 < 1.0 / sigma) {
        out.v_regime = "kernel";
        out.v_reference = model.density(z0) / h1;
    }
    return out;
}

double bandwidth_rule(const std::string& estimator, double n, double sigma,
                      double s, double c) {
    if (!(n >= 1.0) || !(sigma > 0.0) || !(s > 0.0) || !(c > 0.0))
        throw std::invalid_argument(
            "bandwidth_rule: need n >= 1, sigma > 0, s > 0, c > 0");
    if (estimator == "f1" || estimator == "dec")
        return c * std::pow(n * sigma, -1.0 / (2.0 * s + 3.0));
    if (estimator == "f2" || estimator == "int")
        return c * std::pow(std::min(n, 1.0 / sigma), -1.0 / (2.0 * s + 1.0));
    throw std::invalid_argument("bandwidth_rule: unknown estimator id '" +
                                estimator + "'");
}

}  // namespace dispersal
