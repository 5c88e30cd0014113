#include "dispersal/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dispersal/io.hpp"
#include "dispersal/simulate.hpp"

namespace dispersal {

double rate_fn(const RateParams& rp) {
    if (!(rp.s > 0.0)) throw std::invalid_argument("rate_fn: s must be > 0");
    if (!(rp.n >= 1.0)) throw std::invalid_argument("rate_fn: n must be >= 1");
    if (!(rp.sigma > 0.0) || !(rp.sigma <= 1.0))
        throw std::invalid_argument("rate_fn: sigma must be in (0, 1]");
    const double s = rp.s, n = rp.n, sigma = rp.sigma;
    const double b1 = 1.0 / n;
    const double b2 = std::pow(n, -(2.0 * s + 1.0) / (2.0 * s + 2.0));
    const double b3 = std::pow(n, -(4.0 * s + 3.0) / (6.0 * s + 6.0));
    if (sigma <= b1) return std::pow(n, -s / (2.0 * s + 1.0));
    if (sigma <= b2) return std::pow(sigma, s / (2.0 * s + 1.0));
    if (sigma <= b3) return sigma * std::sqrt(n);
    return std::pow(n * sigma, -s / (2.0 * s + 3.0));
}

std::size_t resolve_threads(std::size_t requested) {
    std::size_t cap = 0;
    if (const char* env = std::getenv("DISPERSAL_THREADS")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) cap = static_cast<std::size_t>(v);
    }
    std::size_t t = requested;
    if (t == 0) {
        if (cap > 0) return cap;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? hw : 1;
    }
    if (cap > 0) t = std::min(t, cap);
    return std::max<std::size_t>(1, t);
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 0; t + 1 < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct Cell {
    std::string estimator;
    double tau = 0.0;
    double sigma = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    std::string static_flag;  // parameter-level violation, empty when clean
};

bool known_estimator(const std::string& id) {
    return id == "f1" || id == "f2" || id == "dec" || id == "int";
}

}  // namespace

std::vector<McResultRow> run_mc(const McConfig& config) {
    if (config.replicates < 2)
        throw std::invalid_argument("run_mc: replicates must be >= 2");
    if (config.taus.empty() && config.sigmas.empty())
        throw std::invalid_argument("run_mc: sigma grid is empty");
    if (!config.taus.empty() && !config.sigmas.empty())
        throw std::invalid_argument("run_mc: provide taus or sigmas, not both");
    if (config.estimators.empty())
        throw std::invalid_argument("run_mc: no estimators selected");
    for (const auto& id : config.estimators)
        if (!known_estimator(id))
            throw std::invalid_argument("run_mc: unknown estimator '" + id + "'");

    const double n = config.base.n;
    std::vector<std::pair<double, double>> grid;  // (tau, sigma)
    if (!config.taus.empty()) {
        for (double tau : config.taus) grid.emplace_back(tau, std::pow(n, tau));
    } else {
        const double ln_n = std::log(n);
        for (double sigma : config.sigmas)
            grid.emplace_back(ln_n > 0.0 ? std::log(sigma) / ln_n : 0.0, sigma);
    }

    std::vector<Cell> cells;
    for (const auto& id : config.estimators) {
        for (const auto& [tau, sigma] : grid) {
            ModelParams params = config.base;
            params.sigma = sigma;
            params.validate();
            Cell cell;
            cell.estimator = id;
            cell.tau = tau;
            cell.sigma = sigma;
            if (id == "f1") {
                cell.h1 = bandwidth_rule("f1", n, sigma, config.s, config.c);
                cell.h2 = 8.0 / sigma;
            } else if (id == "f2") {
                cell.h2 = bandwidth_rule("f2", n, sigma, config.s, config.c);
                cell.h1 = f2_auxiliary_h1(params, cell.h2, H1Mode::practical);
                if (!(sigma < 0.125)) cell.static_flag = "sigma_out_of_domain";
            } else if (id == "dec") {
                cell.h1 = bandwidth_rule("dec", n, sigma, config.s, config.c);
            } else {
                cell.h2 = bandwidth_rule("int", n, sigma, config.s, config.c);
            }
            cells.push_back(std::move(cell));
        }
    }

    const std::size_t reps = config.replicates;
    const std::size_t tasks = cells.size() * reps;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> values(tasks, nan);
    std::vector<std::string> rep_flags(tasks);

    auto body = [&](std::size_t t) {
        const Cell& cell = cells[t / reps];
        const std::size_t r = t % reps;
        if (!cell.static_flag.empty()) return;
        ModelParams params = config.base;
        params.sigma = cell.sigma;
        const PointClouds clouds =
            sample_cox(params, config.model, {config.master_seed, r});
        if (clouds.offspring.empty() &&
            (cell.estimator == "dec" || cell.estimator == "int")) {
            rep_flags[t] = "empty_offspring";
            return;
        }
        try {
            Estimate est;
            if (cell.estimator == "f1")
                est = f_hat_1(clouds, params, config.kernel, config.z0, cell.h1);
            else if (cell.estimator == "f2")
                est = f_hat_2(clouds, params, config.kernel, config.z0, cell.h2);
            else if (cell.estimator == "dec")
                est = f_hat_dec(clouds, params, config.kernel, config.z0, cell.h1);
            else
                est = f_hat_int(clouds, params, config.kernel, config.z0, cell.h2);
            values[t] = est.value;
            if (est.flag != "ok") rep_flags[t] = est.flag;
        } catch (const std::exception&) {
            rep_flags[t] = "estimator_error";
        }
    };
    parallel_for(tasks, resolve_threads(config.threads), body);

    const double target = config.model.density(config.z0);
    std::vector<McResultRow> rows;
    rows.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const Cell& cell = cells[c];
        McResultRow row;
        row.estimator = cell.estimator;
        row.n = config.base.n;
        row.lambda = config.base.lambda;
        row.mu = config.base.mu;
        row.sigma = cell.sigma;
        row.tau = cell.tau;
        row.z0 = config.z0;
        row.h1 = cell.h1;
        row.h2 = cell.h2;
        row.replicates = reps;
        row.seed = config.master_seed;
        row.flag = cell.static_flag;
        if (row.flag.empty()) {
            for (std::size_t r = 0; r < reps && row.flag.empty(); ++r)
                row.flag = rep_flags[c * reps + r];
        }
        if (row.flag.empty()) row.flag = "ok";
        double sum = 0.0;
        for (std::size_t r = 0; r < reps; ++r) sum += values[c * reps + r];
        row.mean = sum / static_cast<double>(reps);
        row.bias = row.mean - target;
        double ss = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const double d = values[c * reps + r] - row.mean;
            ss += d * d;
        }
        row.variance = ss / static_cast<double>(reps);
        row.rmse = std::sqrt(row.bias * row.bias + row.variance);
        rows.push_back(std::move(row));
    }
    return rows;
}

double fit_slope_xy(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("fit_slope: mismatched sample sizes");
    if (xs.size() < 2)
        throw std::invalid_argument("fit_slope: need at least 2 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
            throw std::invalid_argument("fit_slope: non-finite input");
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        scale += xs[i] * xs[i];
    }
    if (sxx <= 1e-12 * std::max(1.0, scale))
        throw std::invalid_argument("fit_slope: covariate is constant (degenerate design)");
    return sxy / sxx;
}

double fit_slope(const std::vector<McResultRow>& rows, SlopeCovariate covariate) {
    if (rows.size() < 3)
        throw std::invalid_argument("fit_slope: need at least 3 rows");
    std::vector<double> xs, ys;
    xs.reserve(rows.size());
    ys.reserve(rows.size());
    for (const auto& row : rows) {
        if (!(row.rmse > 0.0) || !std::isfinite(row.rmse))
            throw std::invalid_argument("fit_slope: rmse must be positive and finite");
        xs.push_back(std::log(covariate == SlopeCovariate::n ? row.n : row.sigma));
        ys.push_back(std::log(row.rmse));
    }
    return fit_slope_xy(xs, ys);
}

std::string results_csv(const std::vector<McResultRow>& rows) {
    std::string out =
        "estimator,n,lambda,mu,sigma,tau,z0,h1,h2,replicates,mean,bias,variance,"
        "rmse,flag,seed\n";
    for (const auto& r : rows) {
        out += r.estimator;
        out += ',';
        out += io::format_double(r.n);
        out += ',';
        out += io::format_double(r.lambda);
        out += ',';
        out += io::format_double(r.mu);
        out += ',';
        out += io::format_double(r.sigma);
        out += ',';
        out += io::format_double(r.tau);
        out += ',';
        out += io::format_double(r.z0);
        out += ',';
        out += io::format_double(r.h1);
        out += ',';
        out += io::format_double(r.h2);
        out += ',';
        out += std::to_string(r.replicates);
        out += ',';
        out += io::format_double(r.mean);
        out += ',';
        out += io::format_double(r.bias);
        out += ',';
        out += io::format_double(r.variance);
        out += ',';
        out += io::format_double(r.rmse);
        out += ',';
        out += r.flag;
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

namespace {

std::string svg_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

std::string results_svg(const std::vector<McResultRow>& rows, double n, double s) {
    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> pts;  // (tau, log_n rmse)
    };
    const double ln_n = std::log(std::max(n, std::nextafter(1.0, 2.0)));
    std::vector<Series> series;
    double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
    bool any = false;
    for (const auto& row : rows) {
        if (!std::isfinite(row.rmse) || !(row.rmse > 0.0)) continue;
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const Series& sr) { return sr.name == row.estimator; });
        if (it == series.end()) {
            series.push_back({row.estimator, {}});
            it = series.end() - 1;
        }
        const double y = std::log(row.rmse) / ln_n;
        it->pts.emplace_back(row.tau, y);
        if (!any) {
            x_lo = x_hi = row.tau;
            y_lo = y_hi = y;
            any = true;
        } else {
            x_lo = std::min(x_lo, row.tau);
            x_hi = std::max(x_hi, row.tau);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (!any) {
        x_lo = -2.0;
        x_hi = 0.0;
    }
    if (x_hi - x_lo < 1e-9) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    for (auto& sr : series)
        std::sort(sr.pts.begin(), sr.pts.end());

    std::vector<std::pair<double, double>> reference;
    for (int i = 0; i <= 100; ++i) {
        const double tau = x_lo + (x_hi - x_lo) * i / 100.0;
        const double sigma = std::min(1.0, std::pow(n, tau));
        const double y = std::log(rate_fn({s, n, sigma})) / ln_n;
        reference.emplace_back(tau, y);
        if (!any && i == 0) {
            y_lo = y_hi = y;
            any = true;
        }
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    }
    if (y_hi - y_lo < 1e-9) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    const double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    const double W = 720.0, H = 480.0;
    const double L = 70.0, R = 20.0, T = 24.0, B = 52.0;
    auto mx = [&](double x) { return L + (x - x_lo) / (x_hi - x_lo) * (W - L - R); };
    auto my = [&](double y) { return H - B - (y - y_lo) / (y_hi - y_lo) * (H - T - B); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
           "viewBox=\"0 0 720 480\">\n";
    svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    svg += "<text x=\"" + svg_num(W / 2) + "\" y=\"16\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"13\">log_n rmse vs tau "
           "(sigma = n^tau)</text>\n";
    // axes
    svg += "<line x1=\"" + svg_num(L) + "\" y1=\"" + svg_num(H - B) + "\" x2=\"" +
           svg_num(W - R) + "\" y2=\"" + svg_num(H - B) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + svg_num(L) + "\" y1=\"" + svg_num(T) + "\" x2=\"" +
           svg_num(L) + "\" y2=\"" + svg_num(H - B) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
        const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
        svg += "<line x1=\"" + svg_num(mx(xv)) + "\" y1=\"" + svg_num(H - B) +
               "\" x2=\"" + svg_num(mx(xv)) + "\" y2=\"" + svg_num(H - B + 5) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + svg_num(mx(xv)) + "\" y=\"" + svg_num(H - B + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" + tick_label(xv) + "</text>\n";
        svg += "<line x1=\"" + svg_num(L - 5) + "\" y1=\"" + svg_num(my(yv)) +
               "\" x2=\"" + svg_num(L) + "\" y2=\"" + svg_num(my(yv)) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + svg_num(L - 8) + "\" y=\"" + svg_num(my(yv) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               tick_label(yv) + "</text>\n";
    }
    svg += "<text x=\"" + svg_num((L + W - R) / 2) + "\" y=\"" + svg_num(H - 14) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">tau</text>\n";
    svg += "<text x=\"16\" y=\"" + svg_num((T + H - B) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " + svg_num((T + H - B) / 2) +
           ")\">log_n rmse</text>\n";
    // reference rate curve
    svg += "<polyline fill=\"none\" stroke=\"#888888\" stroke-width=\"1.5\" "
           "stroke-dasharray=\"6 4\" points=\"";
    for (const auto& [xv, yv] : reference)
        svg += svg_num(mx(xv)) + "," + svg_num(my(yv)) + " ";
    svg += "\"/>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = palette[k % 6];
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"2\" points=\"";
        for (const auto& [xv, yv] : series[k].pts)
            svg += svg_num(mx(xv)) + "," + svg_num(my(yv)) + " ";
        svg += "\"/>\n";
        for (const auto& [xv, yv] : series[k].pts) {
            svg += "<circle cx=\"" + svg_num(mx(xv)) + "\" cy=\"" + svg_num(my(yv)) +
                   "\" r=\"3\" fill=\"";
            svg += color;
            svg += "\"/>\n";
        }
        svg += "<text x=\"" + svg_num(W - R - 8) + "\" y=\"" +
               svg_num(T + 16.0 + 16.0 * static_cast<double>(k)) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"";
        svg += color;
        svg += "\">" + series[k].name + "</text>\n";
    }
    svg += "<text x=\"" + svg_num(W - R - 8) + "\" y=\"" +
           svg_num(T + 16.0 + 16.0 * static_cast<double>(series.size())) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\"#888888\">rate reference</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace dispersal
