#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dispersal/model.hpp"

namespace dispersal {

// Symmetric kernel with the hooks the estimators and oracles need.
// `order`: moments 1..order vanish while the mass is one.
// `support_radius`: value(x) == 0 for |x| > support_radius (infinity for the
// band-limited kernel).
// `antiderivative`: x -> integral of the kernel over (-inf, x].
// `fourier`: FK(u) = int e^{iux} K(x) dx; only set when FK has compact
// support [-fourier_support, fourier_support].
// `junctions`: abscissae where the kernel is only C^1 / piecewise-defined;
// quadrature consumers split integrals there.
struct Kernel {
    std::string name;
    int order = 0;
    double support_radius = 0.0;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::function<double(double)> antiderivative;
    std::function<double(double)> fourier;
    double fourier_support = 0.0;
    std::vector<double> junctions;
};

// Plateau kernel: 1 on [-1/4, 1/4], ((32/15 (|z|-1/4))^2 - 1)^2 on
// (1/4, 23/32], 0 beyond. C^1, order 1, unit mass.
Kernel paper_kernel();

// Indicator of [-1/2, 1/2]; order 1. The derivative hook returns 0
// everywhere (the jumps are not differentiable points).
Kernel rect_kernel();

// Band-limited kernel with FK(u) = (1 - u^2)^3 on [-1, 1]; order 1,
// K(x) = (48/pi) j3(x) / x^3 with j3 the spherical Bessel function.
Kernel bandlimited_kernel();

struct KernelOrderReport {
    std::vector<double> moments;  // moments 0..order
    double tolerance = 0.0;
};

// Quadrature check that moment 0 equals 1 and moments 1..order vanish.
// Throws std::runtime_error naming the offending moment on violation.
KernelOrderReport verify_order(const Kernel& kernel, double tolerance = 1e-8);

// (K_h * f)(z0) by quadrature over the intersection of the kernel window and
// the dispersal support, split at kernel junctions.
double smoothed_density_value(const Kernel& kernel, const DispersalModel& model,
                              double h, double z0, double abs_tol = 1e-10);

}  // namespace dispersal
