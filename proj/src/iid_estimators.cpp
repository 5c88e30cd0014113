#include "dispersal/iid_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dispersal {

NearestMatch nearest_match(const PointClouds& clouds, double sigma) {
    if (clouds.parents.empty())
        throw std::invalid_argument("nearest_match: no parents to match against");
    if (!(sigma > 0.0))
        throw std::invalid_argument("nearest_match: sigma must be > 0");

    const std::vector<double>& X = clouds.parents;
    NearestMatch out;
    out.parent_index.reserve(clouds.offspring.size());
    out.distance_scaled.reserve(clouds.offspring.size());
    for (double y : clouds.offspring) {
        const auto it = std::lower_bound(X.begin(), X.end(), y);
        std::size_t idx;
        if (it == X.begin()) {
            idx = 0;
        } else if (it == X.end()) {
            idx = X.size() - 1;
        } else {
            // Equidistant neighbors resolve to the left one (smaller index).
            const std::size_t right = static_cast<std::size_t>(it - X.begin());
            const std::size_t left = right - 1;
            idx = (y - X[left] <= X[right] - y) ? left : right;
        }
        // Duplicate positions share the distance; report the first of them.
        idx = static_cast<std::size_t>(
            std::lower_bound(X.begin(), X.end(), X[idx]) - X.begin());
        out.parent_index.push_back(idx);
        out.distance_scaled.push_back(std::abs(y - X[idx]) / sigma);
    }
    return out;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> sample) : sorted_(std::move(sample)) {
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double z) const {
    if (sorted_.empty())
        throw std::logic_error("EmpiricalCdf: empty sample");
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), z);
    return static_cast<double>(it - sorted_.begin()) /
           static_cast<double>(sorted_.size());
}

double dutch_cdf(const PointClouds& clouds, double sigma, const Kernel& kernel,
                 double z0, double h) {
    if (clouds.offspring.empty())
        throw std::invalid_argument("dutch_cdf: no offspring");
    if (!(sigma > 0.0) || !(h > 0.0))
        throw std::invalid_argument("dutch_cdf: sigma and h must be > 0");
    if (!std::isfinite(kernel.support_radius) || kernel.support_radius > 0.5)
        throw std::invalid_argument(
            "dutch_cdf: kernel must be supported inside [-1/2, 1/2]");

    const double b = sigma * h;  // bandwidth of the folded kernel
    const double reach = b * kernel.support_radius;
    double sum = 0.0;
    for (double y : clouds.offspring) {
        const double target = sigma * z0 - y;
        // Only lattice shifts with |target - l| <= reach contribute.
        const long l_lo = std::max(0L, static_cast<long>(std::ceil(target - reach)));
        const long l_hi = static_cast<long>(std::floor(target + reach));
        for (long l = l_lo; l <= l_hi; ++l)
            sum += kernel.value((target - static_cast<double>(l)) / b) / b;
    }
    return sum / static_cast<double>(clouds.offspring.size());
}

double nearest_parent_density(const PointClouds& clouds, double sigma,
                              const Kernel& kernel, double z0, double h) {
    if (clouds.offspring.empty())
        throw std::invalid_argument("nearest_parent_density: no offspring");
    if (!(h > 0.0))
        throw std::invalid_argument("nearest_parent_density: h must be > 0");
    const NearestMatch match = nearest_match(clouds, sigma);
    double sum = 0.0;
    for (std::size_t i = 0; i < clouds.offspring.size(); ++i) {
        const double signed_scaled =
            (clouds.offspring[i] - clouds.parents[match.parent_index[i]]) / sigma;
        sum += kernel.value((z0 - signed_scaled) / h) / h;
    }
    return sum / static_cast<double>(clouds.offspring.size());
}

double brown_cdf(const std::vector<double>& scaled_distances, double sigma,
                 double z0) {
    if (scaled_distances.empty())
        throw std::invalid_argument("brown_cdf: empty sample");
    if (!(sigma > 0.0))
        throw std::invalid_argument("brown_cdf: sigma must be > 0");
    if (!(z0 >= 0.0) || !(z0 < 0.5 / sigma))
        throw std::domain_error("brown_cdf: z0 must lie in [0, 1/(2 sigma))");

    const double n = static_cast<double>(scaled_distances.size());
    double below = 0.0;
    for (double e : scaled_distances)
        if (e <= z0) below += 1.0;
    const double survival = 1.0 - below / n;
    const double inflation = std::pow(1.0 - 2.0 * sigma * z0, -(n - 1.0));
    return 1.0 - inflation * survival;
}

double brown_cdf(const PointClouds& clouds, double sigma, double z0) {
    return brown_cdf(nearest_match(clouds, sigma).distance_scaled, sigma, z0);
}

namespace {

void check_matched(const PointClouds& clouds, const char* who) {
    if (clouds.parents.size() != clouds.offspring.size())
        throw std::invalid_argument(std::string(who) +
                                    ": parent and offspring counts must match");
    if (clouds.offspring.empty())
        throw std::invalid_argument(std::string(who) + ": empty clouds");
}

}  // namespace

double counting_cdf(const PointClouds& clouds, double sigma, double z0, bool naive) {
    check_matched(clouds, "counting_cdf");
    if (!(sigma > 0.0) || !(z0 >= 0.0))
        throw std::invalid_argument("counting_cdf: need sigma > 0 and z0 >= 0");

    const std::vector<double>& X = clouds.parents;
    const double radius = sigma * z0;
    const double n = static_cast<double>(X.size());
    double pairs = 0.0;
    if (naive) {
        for (double y : clouds.offspring)
            for (double x : X)
                if (std::abs(x - y) <= radius) pairs += 1.0;
    } else {
        // The window is padded and the naive predicate re-applied inside, so
        // the two policies agree bit-for-bit on borderline pairs.
        const double pad = 1e-9 * radius + 1e-12;
        for (double y : clouds.offspring) {
            const auto lo = std::lower_bound(X.begin(), X.end(), y - radius - pad);
            const auto hi = std::upper_bound(lo, X.end(), y + radius + pad);
            for (auto it = lo; it != hi; ++it)
                if (std::abs(*it - y) <= radius) pairs += 1.0;
        }
    }
    return pairs / n - 2.0 * sigma * (n - 1.0) * z0;
}

double counting_density(const PointClouds& clouds, double sigma,
                        const Kernel& kernel, double z0, double h, bool naive) {
    check_matched(clouds, "counting_density");
    if (!(sigma > 0.0) || !(h > 0.0) || !(z0 >= 0.0))
        throw std::invalid_argument(
            "counting_density: need sigma > 0, h > 0 and z0 >= 0");
    if (!std::isfinite(kernel.support_radius))
        throw std::invalid_argument("counting_density: kernel must have compact support");

    const std::vector<double>& X = clouds.parents;
    const double n = static_cast<double>(X.size());
    double sum = 0.0;
    if (naive) {
        for (double y : clouds.offspring)
            for (double x : X)
                sum += kernel.value((z0 - std::abs(x - y) / sigma) / h) / h;
    } else {
        // K_h(z0 - |x-y|/sigma) is nonzero only when |x-y| lies in the band
        // sigma [z0 - hR, z0 + hR]; that is two symmetric windows around y.
        const double far = sigma * (z0 + h * kernel.support_radius);
        const double near = std::max(0.0, sigma * (z0 - h * kernel.support_radius));
        const double pad = 1e-9 * sigma;
        for (double y : clouds.offspring) {
            const auto add = [&](double lo, double hi) {
                const auto first = std::lower_bound(X.begin(), X.end(), lo);
                const auto last = std::upper_bound(first, X.end(), hi);
                for (auto it = first; it != last; ++it)
                    sum += kernel.value((z0 - std::abs(*it - y) / sigma) / h) / h;
            };
            if (near <= pad) {
                add(y - far - pad, y + far + pad);
            } else {
                add(y - far - pad, y - near + pad);
                add(y + near - pad, y + far + pad);
            }
        }
    }
    return sum / n - 2.0 * sigma * (n - 1.0);
}

}  // namespace dispersal
