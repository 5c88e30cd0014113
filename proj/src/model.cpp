#include "dispersal/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dispersal/quadrature.hpp"

namespace dispersal {

bool Interval::valid() const {
    return std::isfinite(lo) && std::isfinite(hi) && lo <= hi;
}

bool Interval::overlaps(const Interval& other) const {
    return lo <= other.hi && other.lo <= hi;
}

void ModelParams::validate() const {
    if (!(n >= 1.0) || !std::isfinite(n))
        throw std::invalid_argument("ModelParams: n must be finite and >= 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("ModelParams: lambda must be finite and > 0");
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("ModelParams: mu must be finite and > 0");
    if (!(sigma > 0.0 && sigma <= 1.0))
        throw std::invalid_argument("ModelParams: sigma must be in (0, 1]");
}

EvalPoint make_eval_point(double z0) {
    if (!std::isfinite(z0))
        throw std::invalid_argument("EvalPoint: z0 must be finite");
    return {z0, std::abs(z0) < 0.5};
}

void validate_eval_point(const EvalPoint& p) {
    if (!std::isfinite(p.z0))
        throw std::invalid_argument("EvalPoint: z0 must be finite");
    if (p.interior != (std::abs(p.z0) < 0.5))
        throw std::invalid_argument(
            "EvalPoint: interior flag inconsistent with z0");
}

namespace {

double beta23_density(double z) {
    if (z < -0.5 || z > 0.5) return 0.0;
    const double a = 0.5 + z;
    const double b = 0.5 - z;
    return 12.0 * a * b * b;
}

// CDF of the shifted Beta(2,3): with x = z + 1/2 in [0, 1],
// F = 6x^2 - 8x^3 + 3x^4.
double beta23_cdf(double z) {
    if (z <= -0.5) return 0.0;
    if (z >= 0.5) return 1.0;
    const double x = z + 0.5;
    return x * x * (6.0 + x * (-8.0 + 3.0 * x));
}

double beta23_sample(rng::Stream& stream) {
    const double u = stream.uniform01();
    // Monotone bisection for F(z) = u; 48 halvings shrink the bracket to
    // 2^-48 < 1e-12.
    double lo = -0.5;
    double hi = 0.5;
    for (int i = 0; i < 48; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (beta23_cdf(mid) < u)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::complex<double> beta23_char_fn(double u) {
    if (u == 0.0) return {1.0, 0.0};
    // Diagnostics-only hook; Gauss-Kronrod on the compact support is exact to
    // tolerance for this polynomial-times-oscillation integrand.
    const auto re = quad::integrate(
        [u](double z) { return std::cos(u * z) * beta23_density(z); }, -0.5,
        0.5, 1e-12);
    const auto im = quad::integrate(
        [u](double z) { return std::sin(u * z) * beta23_density(z); }, -0.5,
        0.5, 1e-12);
    return {re.value, im.value};
}

}  // namespace

DispersalModel make_beta23_model() {
    DispersalModel model;
    model.name = "beta23";
    model.density = beta23_density;
    model.cdf = beta23_cdf;
    model.sampler = beta23_sample;
    model.char_fn = beta23_char_fn;
    return model;
}

ModelDiagnostics validate_model(const DispersalModel& model,
                                rng::SeedSpec seed) {
    ModelDiagnostics diag;
    if (!model.density || !model.cdf || !model.sampler) {
        diag.violations.push_back("model is missing a density, cdf or sampler hook");
        return diag;
    }

    const auto mass = quad::integrate(model.density, -0.5, 0.5, 1e-11);
    diag.density_integral = mass.value;
    if (!mass.converged)
        diag.violations.push_back("density mass quadrature did not converge");
    if (std::abs(mass.value - 1.0) > 1e-9)
        diag.violations.push_back("density does not integrate to 1 within 1e-9");

    for (double z : {-2.0, -1.0, -0.50001, 0.50001, 1.0, 2.0})
        if (model.density(z) != 0.0) {
            diag.violations.push_back("density is nonzero outside [-1/2, 1/2]");
            break;
        }

    if (std::abs(model.cdf(-0.5)) > 1e-12 || std::abs(model.cdf(0.5) - 1.0) > 1e-12)
        diag.violations.push_back("cdf endpoints differ from 0 and 1");
    bool cdf_consistent = true;
    double prev = model.cdf(-0.5);
    for (int i = 1; i <= 40; ++i) {
        const double z = -0.5 + i / 40.0;
        const double cur = model.cdf(z);
        if (cur < prev - 1e-12) cdf_consistent = false;
        const double inc = quad::integrate(model.density, z - 1.0 / 40.0, z, 1e-11).value;
        if (std::abs(cur - prev - inc) > 1e-8) cdf_consistent = false;
        prev = cur;
    }
    if (!cdf_consistent)
        diag.violations.push_back("cdf is not the monotone integral of the density");

    diag.quadrature_mean = quad::integrate(
        [&](double z) { return z * model.density(z); }, -0.5, 0.5, 1e-11).value;

    const std::size_t draws = 100000;
    rng::Stream stream(seed);
    double sum = 0.0;
    double sumsq = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double z = model.sampler(stream);
        if (z < -0.5 - 1e-9 || z > 0.5 + 1e-9) {
            diag.violations.push_back("sampler produced a draw outside the support");
            return diag;
        }
        sum += z;
        sumsq += z * z;
    }
    diag.sampler_mean = sum / draws;
    const double var = sumsq / draws - diag.sampler_mean * diag.sampler_mean;
    diag.sampler_se = std::sqrt(std::max(var, 0.0) / draws);
    if (std::abs(diag.sampler_mean - diag.quadrature_mean) > 3.0 * diag.sampler_se)
        diag.violations.push_back(
            "sampler mean deviates from quadrature mean by more than 3 SE");
    return diag;
}

PointClouds make_point_clouds(std::vector<double> parents,
                              std::vector<double> offspring,
                              std::optional<std::vector<std::size_t>> parentage) {
    PointClouds clouds;

    // Sort parents via argsort so parentage indices can be remapped.
    std::vector<std::size_t> order(parents.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return parents[a] < parents[b]; });
    std::vector<std::size_t> rank(parents.size());
    clouds.parents.resize(parents.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        clouds.parents[i] = parents[order[i]];
        rank[order[i]] = i;
    }

    std::vector<std::size_t> off_order(offspring.size());
    std::iota(off_order.begin(), off_order.end(), 0);
    std::stable_sort(off_order.begin(), off_order.end(), [&](std::size_t a, std::size_t b) {
        return offspring[a] < offspring[b];
    });
    clouds.offspring.resize(offspring.size());
    for (std::size_t j = 0; j < off_order.size(); ++j)
        clouds.offspring[j] = offspring[off_order[j]];

    if (parentage) {
        if (parentage->size() != offspring.size())
            throw std::invalid_argument(
                "PointClouds: parentage size differs from offspring count");
        std::vector<std::size_t> mapped(offspring.size());
        for (std::size_t j = 0; j < off_order.size(); ++j) {
            const std::size_t original = (*parentage)[off_order[j]];
            if (original >= parents.size())
                throw std::invalid_argument("PointClouds: parentage index out of range");
            mapped[j] = rank[original];
        }
        clouds.parentage = std::move(mapped);
    }

    validate_clouds(clouds);
    return clouds;
}

void validate_clouds(const PointClouds& clouds) {
    auto check_sorted = [](const std::vector<double>& xs, const char* what) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!std::isfinite(xs[i]))
                throw std::invalid_argument(std::string("PointClouds: non-finite ") + what);
            if (i > 0 && xs[i] < xs[i - 1])
                throw std::invalid_argument(std::string("PointClouds: unsorted ") + what);
        }
    };
    check_sorted(clouds.parents, "parent positions");
    check_sorted(clouds.offspring, "offspring positions");
    if (clouds.parentage) {
        if (clouds.parentage->size() != clouds.offspring.size())
            throw std::invalid_argument(
                "PointClouds: parentage size differs from offspring count");
        for (std::size_t idx : *clouds.parentage)
            if (idx >= clouds.parents.size())
                throw std::invalid_argument("PointClouds: parentage index out of range");
    }
}

}  // namespace dispersal
