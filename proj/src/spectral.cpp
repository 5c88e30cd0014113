#include "dispersal/spectral.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dispersal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Trapezoid weights on the kernel band [-U, U], folded with 1/phi_p(u/sigma)
// and the 1/(2 pi) of the inverse transform. This is the cached
// frequency-domain representation of the deconvolution weight function.
struct WeightTable {
    std::vector<double> u;
    std::vector<std::complex<double>> g;
    double du = 0.0;
};

WeightTable build_weight_table(const Kernel& kernel, const ParentDistribution& parent,
                               double sigma, double h1, const SpectralConfig& config) {
    if (!(h1 > 0.0)) throw std::invalid_argument("spectral: h1 must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("spectral: sigma must be > 0");
    if (!kernel.fourier || !(kernel.fourier_support > 0.0))
        throw std::invalid_argument("spectral: kernel must be band-limited");
    if (!parent.char_fn)
        throw std::invalid_argument("spectral: parent has no characteristic function");
    if (config.quadrature_nodes < 64)
        throw std::invalid_argument("spectral: quadrature_nodes must be >= 64");

    const double U = kernel.fourier_support / h1;
    const std::size_t m = config.quadrature_nodes;
    WeightTable table;
    table.du = 2.0 * U / static_cast<double>(m - 1);
    table.u.resize(m);
    table.g.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double u = -U + table.du * static_cast<double>(k);
        const std::complex<double> phi = parent.char_fn(u / sigma);
        if (std::abs(phi) < config.min_charfn_modulus)
            throw std::runtime_error(
                "spectral: parent characteristic function modulus " +
                std::to_string(std::abs(phi)) + " at frequency u = " +
                std::to_string(u / sigma) + " is below the configured minimum");
        const double trap = (k == 0 || k == m - 1) ? 0.5 : 1.0;
        table.u[k] = u;
        table.g[k] = kernel.fourier(h1 * u) / phi * (trap * table.du / kTwoPi);
    }
    return table;
}

// w(x) = Re sum_k g_k e^{-i u_k x}.
double weight_at(const WeightTable& table, double x) {
    std::complex<double> acc = 0.0;
    const std::complex<double> step(std::cos(table.du * x), -std::sin(table.du * x));
    std::complex<double> phase(std::cos(table.u.front() * x),
                               -std::sin(table.u.front() * x));
    for (std::size_t k = 0; k < table.u.size(); ++k) {
        acc += table.g[k] * phase;
        phase *= step;
    }
    return acc.real();
}

}  // namespace

double spectral_deconv(const PointClouds& clouds, const ModelParams& params,
                       const Kernel& kernel, const ParentDistribution& parent,
                       double z0, double h1, const SpectralConfig& config) {
    if (!(params.n > 0.0) || !(params.lambda > 0.0) || !(params.mu > 0.0))
        throw std::invalid_argument("spectral_deconv: n, lambda, mu must be > 0");
    const WeightTable table = build_weight_table(kernel, parent, params.sigma, h1, config);

    // Accumulate the empirical characteristic sum per frequency node, using a
    // phase recurrence per offspring (one trig pair per point, multiplies
    // otherwise). Drift is ~nodes * eps, far below the 1e-8 imag budget.
    const std::size_t m = table.u.size();
    std::vector<std::complex<double>> emp(m, 0.0);
    for (double y : clouds.offspring) {
        const double arg = y / params.sigma;
        const std::complex<double> step(std::cos(table.du * arg),
                                        std::sin(table.du * arg));
        std::complex<double> phase(std::cos(table.u.front() * arg),
                                   std::sin(table.u.front() * arg));
        for (std::size_t k = 0; k < m; ++k) {
            emp[k] += phase;
            phase *= step;
        }
    }

    std::complex<double> total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const std::complex<double> shift(std::cos(table.u[k] * z0),
                                         -std::sin(table.u[k] * z0));
        total += table.g[k] * shift * emp[k];
    }
    total /= params.n * params.lambda * params.mu;

    const double scale = std::max(std::abs(total.real()), 1e-12);
    if (std::abs(total.imag()) > 1e-8 * scale)
        throw std::runtime_error(
            "spectral_deconv: imaginary part " + std::to_string(total.imag()) +
            " exceeds 1e-8 relative to " + std::to_string(total.real()));
    return total.real();
}

std::function<double(double)> spectral_weight(const Kernel& kernel,
                                              const ParentDistribution& parent,
                                              double sigma, double h1,
                                              const SpectralConfig& config) {
    auto table = std::make_shared<WeightTable>(
        build_weight_table(kernel, parent, sigma, h1, config));
    return [table](double x) { return weight_at(*table, x); };
}

namespace {

ParentDistribution make_parent(std::string name, Illposedness ill,
                               std::function<double(double)> density,
                               std::function<std::complex<double>(double)> char_fn,
                               std::function<double(rng::Stream&)> sampler) {
    ParentDistribution p;
    p.name = std::move(name);
    p.ill = ill;
    p.density = std::move(density);
    p.char_fn = std::move(char_fn);
    p.sampler = std::move(sampler);
    return p;
}

}  // namespace

ParentDistribution laplace_parent(double location, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("laplace_parent: scale must be > 0");
    Illposedness ill;
    ill.kind = Illposedness::Kind::mild;
    ill.t = 2.0;
    return make_parent(
        "laplace", ill,
        [location, scale](double x) {
            return 0.5 / scale * std::exp(-std::abs(x - location) / scale);
        },
        [location, scale](double u) {
            const std::complex<double> rot(std::cos(u * location), std::sin(u * location));
            return rot / (1.0 + scale * scale * u * u);
        },
        [location, scale](rng::Stream& s) {
            const double v = s.uniform01() - 0.5;
            const double mag = -std::log1p(-2.0 * std::abs(v));
            return location + (v >= 0.0 ? scale * mag : -scale * mag);
        });
}

ParentDistribution gaussian_parent(double location, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("gaussian_parent: scale must be > 0");
    Illposedness ill;
    ill.kind = Illposedness::Kind::severe;
    ill.gamma = 0.5 * scale * scale;
    ill.beta = 2.0;
    return make_parent(
        "gauss", ill,
        [location, scale](double x) {
            const double z = (x - location) / scale;
            return std::exp(-0.5 * z * z) / (scale * std::sqrt(kTwoPi));
        },
        [location, scale](double u) {
            const std::complex<double> rot(std::cos(u * location), std::sin(u * location));
            return rot * std::exp(-0.5 * scale * scale * u * u);
        },
        [location, scale](rng::Stream& s) { return location + scale * s.normal01(); });
}

ParentDistribution identity_parent() {
    Illposedness ill;
    ill.kind = Illposedness::Kind::mild;
    ill.t = 0.0;
    return make_parent(
        "identity", ill, nullptr,
        [](double) { return std::complex<double>(1.0, 0.0); },
        [](rng::Stream&) { return 0.0; });
}

namespace {

double parse_field(const std::string& args, const std::string& key, double fallback) {
    std::size_t pos = 0;
    while (pos < args.size()) {
        const std::size_t end = args.find(',', pos);
        const std::string item = args.substr(pos, end == std::string::npos ? end : end - pos);
        const std::size_t eq = item.find('=');
        if (eq != std::string::npos && item.substr(0, eq) == key)
            return std::stod(item.substr(eq + 1));
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    return fallback;
}

}  // namespace

ParentDistribution parse_parent(const std::string& text) {
    const std::size_t colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (name == "laplace")
        return laplace_parent(parse_field(args, "m", 0.0), parse_field(args, "b", 0.1));
    if (name == "gauss" || name == "gaussian")
        return gaussian_parent(parse_field(args, "m", 0.0), parse_field(args, "s", 1.0));
    if (name == "identity") return identity_parent();
    if (name == "uniform")
        throw std::invalid_argument(
            "parse_parent: the uniform parent is not deconvolvable; its "
            "characteristic function vanishes at every frequency u = 2 pi k "
            "(k != 0), so 1/phi_p blows up inside the kernel band");
    throw std::invalid_argument("parse_parent: unknown parent '" + name + "'");
}

double spectral_bandwidth(const Illposedness& ill, double s, double n, double sigma) {
    if (!(s > 0.0) || !(n > 1.0) || !(sigma > 0.0))
        throw std::invalid_argument("spectral_bandwidth: need s > 0, n > 1, sigma > 0");
    if (ill.kind == Illposedness::Kind::mild) {
        if (!(ill.t >= 0.0))
            throw std::invalid_argument("spectral_bandwidth: mild case needs t >= 0");
        return std::pow(n * std::pow(sigma, 2.0 * ill.t - 1.0),
                        -1.0 / (2.0 * s + 2.0 * ill.t + 1.0));
    }
    if (!(ill.gamma > 0.0) || !(ill.beta > 0.0))
        throw std::invalid_argument(
            "spectral_bandwidth: severe case needs gamma > 0 and beta > 0");
    return std::pow(std::log(n) / (4.0 * ill.gamma), -1.0 / ill.beta) / sigma;
}

}  // namespace dispersal
