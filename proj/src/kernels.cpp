#include "dispersal/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dispersal/quadrature.hpp"

namespace dispersal {

namespace {

constexpr double kFlat = 0.25;         // plateau half-width
constexpr double kEdge = 23.0 / 32.0;  // support radius
constexpr double kSlope = 32.0 / 15.0; // taper variable u = kSlope (|z| - 1/4)

double plateau_value(double z) {
    const double a = std::abs(z);
    if (a <= kFlat) return 1.0;
    if (a > kEdge) return 0.0;
    const double u = kSlope * (a - kFlat);
    const double w = u * u - 1.0;
    return w * w;
}

double plateau_derivative(double z) {
    const double a = std::abs(z);
    if (a <= kFlat || a > kEdge) return 0.0;
    const double u = kSlope * (a - kFlat);
    const double d = 4.0 * kSlope * u * (u * u - 1.0);
    return z > 0.0 ? d : -d;
}

// Antiderivative of the taper in the variable u: integral of (u^2-1)^2 du,
// rescaled by dz/du = 15/32. P(0) = 0, P(1) = 1/4.
double taper_mass(double u) {
    return (15.0 / 32.0) * (u * u * u * u * u / 5.0 - 2.0 * u * u * u / 3.0 + u);
}

double plateau_antiderivative(double z) {
    if (z <= -kEdge) return 0.0;
    if (z < -kFlat) return 0.25 - taper_mass(kSlope * (-z - kFlat));
    if (z <= kFlat) return 0.5 + z;
    if (z <= kEdge) return 0.75 + taper_mass(kSlope * (z - kFlat));
    return 1.0;
}

// j3(x)/x^3 and j4(x)/x^3, with power series below |x| = 0.5 where the
// closed forms lose precision to cancellation.
double j3_over_x3(double x) {
    const double ax = std::abs(x);
    if (ax < 0.5) {
        const double q = x * x;
        return 1.0 / 105.0 +
               q * (-1.0 / 1890.0 +
                    q * (1.0 / 83160.0 +
                         q * (-1.0 / 6486480.0 +
                              q * (1.0 / 778377600.0 - q / 132324192000.0))));
    }
    const double s = std::sin(ax);
    const double c = std::cos(ax);
    const double inv = 1.0 / ax;
    const double inv2 = inv * inv;
    const double j3 = (15.0 * inv2 * inv2 - 6.0 * inv2) * s -
                      (15.0 * inv2 * inv - inv) * c;
    return j3 * inv2 * inv;
}

double j4_over_x4(double x) {
    const double ax = std::abs(x);
    if (ax < 0.5) {
        const double q = x * x;
        return 1.0 / 945.0 +
               q * (-1.0 / 20790.0 +
                    q * (1.0 / 1081080.0 +
                         q * (-1.0 / 97297200.0 + q / 13232419200.0)));
    }
    const double s = std::sin(ax);
    const double c = std::cos(ax);
    const double inv = 1.0 / ax;
    const double inv2 = inv * inv;
    const double j4 = (105.0 * inv2 * inv2 * inv - 45.0 * inv2 * inv + inv) * s -
                      (105.0 * inv2 * inv2 - 10.0 * inv2) * c;
    return j4 * inv2 * inv2;
}

double bandlimited_value(double x) {
    return (48.0 / std::numbers::pi) * j3_over_x3(x);
}

// d/dx [x^-3 j3(x)] = -x^-3 j4(x).
double bandlimited_derivative(double x) {
    return -(48.0 / std::numbers::pi) * x * j4_over_x4(x);
}

double bandlimited_antiderivative(double x) {
    // Rarely used hook; panel quadrature from 0, one panel per oscillation.
    if (x <= -600.0) return 0.0;
    if (x >= 600.0) return 1.0;
    std::vector<double> cuts;
    const double lo = std::min(0.0, x);
    const double hi = std::max(0.0, x);
    for (double c = std::ceil(lo / 4.0) * 4.0; c < hi; c += 4.0) cuts.push_back(c);
    const double mass = quad::integrate(bandlimited_value, 0.0, x, cuts, 1e-10).value;
    return 0.5 + mass;
}

double bandlimited_fourier(double u) {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return w * w * w;
}

}  // namespace

Kernel paper_kernel() {
    Kernel k;
    k.name = "paper";
    k.order = 1;
    k.support_radius = kEdge;
    k.value = plateau_value;
    k.derivative = plateau_derivative;
    k.antiderivative = plateau_antiderivative;
    k.junctions = {-kEdge, -kFlat, kFlat, kEdge};
    return k;
}

Kernel rect_kernel() {
    Kernel k;
    k.name = "rect";
    k.order = 1;
    k.support_radius = 0.5;
    k.value = [](double z) { return std::abs(z) <= 0.5 ? 1.0 : 0.0; };
    k.derivative = [](double) { return 0.0; };
    k.antiderivative = [](double z) {
        if (z <= -0.5) return 0.0;
        if (z >= 0.5) return 1.0;
        return z + 0.5;
    };
    k.junctions = {-0.5, 0.5};
    return k;
}

Kernel bandlimited_kernel() {
    Kernel k;
    k.name = "bandlimited";
    k.order = 1;
    k.support_radius = std::numeric_limits<double>::infinity();
    k.value = bandlimited_value;
    k.derivative = bandlimited_derivative;
    k.antiderivative = bandlimited_antiderivative;
    k.fourier = bandlimited_fourier;
    k.fourier_support = 1.0;
    return k;
}

KernelOrderReport verify_order(const Kernel& kernel, double tolerance) {
    if (!kernel.value) throw std::runtime_error("verify_order: kernel has no value hook");
    if (kernel.order < 0) throw std::runtime_error("verify_order: negative order");

    const bool compact = std::isfinite(kernel.support_radius);
    // |K| <= 15.3 x^-4 for the band-limited kernel, so the tail beyond 3000
    // is below 4e-10.
    const double radius = compact ? kernel.support_radius : 3000.0;
    std::vector<double> cuts = kernel.junctions;
    if (!compact)
        for (double c = -radius; c <= radius; c += 2.0) cuts.push_back(c);

    KernelOrderReport report;
    report.tolerance = tolerance;
    for (int ell = 0; ell <= kernel.order; ++ell) {
        const auto r = quad::integrate(
            [&, ell](double z) { return std::pow(z, ell) * kernel.value(z); },
            -radius, radius, cuts, std::min(tolerance * 0.01, 1e-10));
        report.moments.push_back(r.value);
        const double target = ell == 0 ? 1.0 : 0.0;
        if (std::abs(r.value - target) > tolerance)
            throw std::runtime_error("verify_order: moment " + std::to_string(ell) +
                                     " equals " + std::to_string(r.value) +
                                     " but should be " + std::to_string(target));
    }
    return report;
}

double smoothed_density_value(const Kernel& kernel, const DispersalModel& model,
                              double h, double z0, double abs_tol) {
    if (!(h > 0.0)) throw std::invalid_argument("smoothed_density_value: h must be > 0");
    double lo = -0.5;
    double hi = 0.5;
    if (std::isfinite(kernel.support_radius)) {
        lo = std::max(lo, z0 - h * kernel.support_radius);
        hi = std::min(hi, z0 + h * kernel.support_radius);
    }
    if (lo >= hi) return 0.0;
    std::vector<double> cuts;
    for (double j : kernel.junctions) cuts.push_back(z0 - h * j);
    return quad::integrate(
               [&](double z) { return kernel.value((z0 - z) / h) * model.density(z); },
               lo, hi, cuts, abs_tol)
               .value /
           h;
}

}  // namespace dispersal
