#pragma once

#include <complex>
#include <functional>
#include <string>

#include "dispersal/kernels.hpp"
#include "dispersal/model.hpp"
#include "dispersal/rng.hpp"

namespace dispersal {

// How fast the parent characteristic function decays: polynomially of degree
// t (mild), or like exp(-gamma |u|^beta) (severe).
struct Illposedness {
    enum class Kind { mild, severe };
    Kind kind = Kind::mild;
    double t = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
};

// Parent location distribution with a nowhere-vanishing characteristic
// function. The sampler hook lets the simulator place parents accordingly in
// tests; `density` may be null for the identity diagnostic.
struct ParentDistribution {
    std::string name;
    std::function<double(double)> density;
    std::function<std::complex<double>(double)> char_fn;
    Illposedness ill;
    std::function<double(rng::Stream&)> sampler;
};

// Laplace(location, scale): |char fn| ~ (b u)^-2, mild with t = 2.
ParentDistribution laplace_parent(double location, double scale);

// Normal(location, scale): severe with gamma = scale^2/2, beta = 2.
ParentDistribution gaussian_parent(double location, double scale);

// Point mass at 0 (char fn identically 1); diagnostic parent under which the
// deconvolution estimator degenerates to plain kernel smoothing.
ParentDistribution identity_parent();

// Parses "laplace:m=0.5,b=0.1", "gauss:m=0,s=1" or "identity". "uniform" is
// rejected with an explanation (its characteristic function has zeros).
ParentDistribution parse_parent(const std::string& text);

struct SpectralConfig {
    std::size_t quadrature_nodes = 4096;   // trapezoid nodes, must be >= 64
    double min_charfn_modulus = 1e-12;
};

// Frequency-domain deconvolution estimate
//   (1/(n lambda mu)) sum_j w(z0 - Y_j / sigma),
// with w the inverse transform of FK(h1 u) / phi_p(u / sigma) over the
// kernel band, evaluated by a trapezoid rule whose weights are computed once
// per call and shared across offspring. Requires a band-limited kernel.
// Throws when |phi_p| dips below config.min_charfn_modulus (naming the
// frequency) or when the result has a relative imaginary part above 1e-8.
double spectral_deconv(const PointClouds& clouds, const ModelParams& params,
                       const Kernel& kernel, const ParentDistribution& parent,
                       double z0, double h1, const SpectralConfig& config = {});

// The deconvolution weight function x -> w(x) on the same trapezoid grid
// (for diagnostics; it integrates to FK(0)/phi_p(0) = 1).
std::function<double(double)> spectral_weight(const Kernel& kernel,
                                              const ParentDistribution& parent,
                                              double sigma, double h1,
                                              const SpectralConfig& config = {});

// Rate-optimal bandwidth:
//   mild:   h1 = (n sigma^(2t-1))^(-1/(2s+2t+1))
//   severe: h1 = sigma^-1 ((1/(4 gamma)) log n)^(-1/beta)
double spectral_bandwidth(const Illposedness& ill, double s, double n, double sigma);

}  // namespace dispersal
