#include "dispersal/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dispersal/experiments.hpp"
#include "dispersal/iid_estimators.hpp"
#include "dispersal/io.hpp"
#include "dispersal/kernels.hpp"
#include "dispersal/model.hpp"
#include "dispersal/point_estimators.hpp"
#include "dispersal/simulate.hpp"
#include "dispersal/spectral.hpp"

namespace dispersal {

namespace {

using nlohmann::json;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

bool is_set(double v) { return !std::isnan(v); }

struct Options {
    double n = 100.0;
    double lambda = 1.0;
    double mu = 1.0;
    double sigma = 0.1;
    std::uint64_t seed = 0;
    double z0 = 0.0;
    std::string method = "f1";
    double h1 = kUnset;
    double h2 = kUnset;
    double s = 2.0;
    double c = 0.7;
    std::string model = "cox";
    std::string parent;
    std::string config;
    std::string out;
    std::string format = "csv";
    std::string clouds_path;
    // sweep / moment-check extras (mirror config keys)
    std::vector<double> taus;
    std::vector<double> sigmas;
    std::size_t replicates = 0;
    std::vector<std::string> estimators;
    std::size_t threads = 0;
    std::vector<double> rate_s{1.0};
    std::vector<double> rate_n{1000.0};
    std::vector<double> rate_sigma{1.0};
};

// Loads --config JSON and fills every option the user did not pass
// explicitly; flags always win. Unknown keys are rejected. Returns the set
// of keys supplied by either source (so sidecar metadata can stay the
// fallback of last resort).
std::set<std::string> merge_config(const CLI::App* sub, Options& opt) {
    std::set<std::string> provided;
    static const std::vector<std::string> known = {
        "n",      "lambda",     "mu",        "sigma",  "seed",   "z0",
        "method", "h1",         "h2",        "s",      "c",      "model",
        "parent", "out",        "format",    "clouds", "taus",   "sigmas",
        "replicates", "estimators", "threads"};
    auto taken = [&](const std::string& flag) {
        const CLI::Option* o = sub->get_option_no_throw("--" + flag);
        if (o == nullptr && flag == "clouds") o = sub->get_option_no_throw("clouds");
        return o != nullptr && o->count() > 0;
    };
    for (const auto& key : known)
        if (taken(key)) provided.insert(key);
    if (opt.config.empty()) return provided;
    const std::string text = io::read_text_file(opt.config);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::invalid_argument("config: unknown key '" + it.key() + "'");
    }
    try {
        auto want = [&](const char* key) {
            if (!j.contains(key)) return false;
            provided.insert(key);
            return !taken(key);
        };
        if (want("n")) opt.n = j["n"].get<double>();
        if (want("lambda")) opt.lambda = j["lambda"].get<double>();
        if (want("mu")) opt.mu = j["mu"].get<double>();
        if (want("sigma")) opt.sigma = j["sigma"].get<double>();
        if (want("seed")) opt.seed = j["seed"].get<std::uint64_t>();
        if (want("z0")) opt.z0 = j["z0"].get<double>();
        if (want("method")) opt.method = j["method"].get<std::string>();
        if (want("h1")) opt.h1 = j["h1"].get<double>();
        if (want("h2")) opt.h2 = j["h2"].get<double>();
        if (want("s")) opt.s = j["s"].get<double>();
        if (want("c")) opt.c = j["c"].get<double>();
        if (want("model")) opt.model = j["model"].get<std::string>();
        if (want("parent")) opt.parent = j["parent"].get<std::string>();
        if (want("out")) opt.out = j["out"].get<std::string>();
        if (want("format")) opt.format = j["format"].get<std::string>();
        if (want("clouds")) opt.clouds_path = j["clouds"].get<std::string>();
        if (want("taus")) opt.taus = j["taus"].get<std::vector<double>>();
        if (want("sigmas")) opt.sigmas = j["sigmas"].get<std::vector<double>>();
        if (want("replicates")) opt.replicates = j["replicates"].get<std::size_t>();
        if (want("estimators"))
            opt.estimators = j["estimators"].get<std::vector<std::string>>();
        if (want("threads")) opt.threads = j["threads"].get<std::size_t>();
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    return provided;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty())
        out << text;
    else
        io::write_text_file(path, text);
}

std::string replace_extension(const std::string& path, const std::string& ext) {
    const std::size_t slash = path.find_last_of('/');
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + ext;
    return path.substr(0, dot) + ext;
}

int cmd_simulate(const Options& opt, std::ostream&, std::ostream& err) {
    if (opt.out.empty())
        throw std::invalid_argument("simulate: --out is required");
    const ModelParams params{opt.n, opt.lambda, opt.mu, opt.sigma};
    params.validate();
    const DispersalModel model = make_beta23_model();
    const rng::SeedSpec seed{opt.seed, 0};
    PointClouds clouds;
    if (opt.model == "cox") {
        if (opt.parent.empty()) {
            clouds = sample_cox(params, model, seed);
        } else {
            const ParentDistribution parent = parse_parent(opt.parent);
            clouds = sample_cox(params, model, seed,
                                [&](rng::Stream& g) { return parent.sampler(g); });
        }
    } else if (opt.model == "one2one") {
        clouds = sample_one_to_one(params, model, seed);
    } else if (opt.model == "iid") {
        clouds = sample_iid_pairs(params, model, seed);
    } else {
        throw std::invalid_argument("simulate: unknown model '" + opt.model + "'");
    }
    io::CloudsMeta meta;
    meta.params = params;
    meta.variant = opt.model;
    meta.seed = seed;
    io::write_clouds(clouds, meta, opt.out);
    err << "seed: " << opt.seed << "\n";
    return 0;
}

int cmd_estimate(const Options& opt, const std::set<std::string>& provided,
                 std::ostream& out, std::ostream& err) {
    if (opt.clouds_path.empty())
        throw std::invalid_argument("estimate: clouds file argument is required");
    auto [clouds, meta] = io::read_clouds(opt.clouds_path);
    // Sidecar metadata is the fallback; flags/config override it.
    ModelParams params = meta.params;
    if (provided.count("n")) params.n = opt.n;
    if (provided.count("lambda")) params.lambda = opt.lambda;
    if (provided.count("mu")) params.mu = opt.mu;
    if (provided.count("sigma")) params.sigma = opt.sigma;
    params.validate();

    const std::string& m = opt.method;
    const bool cox_method =
        m == "f1" || m == "f2" || m == "dec" || m == "int" || m == "sd";
    const bool iid_method = m == "dutch" || m == "np" || m == "brown" ||
                            m == "counting" || m == "counting-density";
    if (!cox_method && !iid_method)
        throw std::invalid_argument("estimate: unknown method '" + m + "'");
    // The clouds sidecar records which sampling variant produced the file;
    // matched-pair methods need matched-pair data and vice versa.
    const bool iid_clouds = meta.variant == "iid" || meta.variant == "one2one";
    if (iid_clouds && !iid_method)
        throw std::invalid_argument("estimate: method '" + m +
                                    "' needs cox-sampled clouds, got '" +
                                    meta.variant + "'");
    if (!iid_clouds && iid_method)
        throw std::invalid_argument("estimate: method '" + m +
                                    "' needs matched-pair clouds, got '" +
                                    meta.variant + "'");

    const Kernel paper = paper_kernel();
    double value = 0.0;
    std::string flag = "ok";
    if (m == "f1") {
        const double h1 = is_set(opt.h1)
                              ? opt.h1
                              : bandwidth_rule("f1", params.n, params.sigma,
                                               opt.s, opt.c);
        const Estimate e = f_hat_1(clouds, params, paper, opt.z0, h1);
        value = e.value;
        flag = e.flag;
    } else if (m == "f2") {
        const double h2 = is_set(opt.h2)
                              ? opt.h2
                              : bandwidth_rule("f2", params.n, params.sigma,
                                               opt.s, opt.c);
        const Estimate e = f_hat_2(clouds, params, paper, opt.z0, h2);
        value = e.value;
        flag = e.flag;
    } else if (m == "dec") {
        const double h1 = is_set(opt.h1)
                              ? opt.h1
                              : bandwidth_rule("dec", params.n, params.sigma,
                                               opt.s, opt.c);
        const Estimate e = f_hat_dec(clouds, params, paper, opt.z0, h1);
        value = e.value;
        flag = e.flag;
    } else if (m == "int") {
        const double h2 = is_set(opt.h2)
                              ? opt.h2
                              : bandwidth_rule("int", params.n, params.sigma,
                                               opt.s, opt.c);
        const Estimate e = f_hat_int(clouds, params, paper, opt.z0, h2);
        value = e.value;
        flag = e.flag;
    } else if (m == "sd") {
        const ParentDistribution parent =
            parse_parent(opt.parent.empty() ? "laplace" : opt.parent);
        const double h1 = is_set(opt.h1)
                              ? opt.h1
                              : spectral_bandwidth(parent.ill, opt.s, params.n,
                                                   params.sigma);
        value = spectral_deconv(clouds, params, bandlimited_kernel(), parent,
                                opt.z0, h1);
    } else if (m == "dutch") {
        if (!is_set(opt.h1))
            throw std::invalid_argument("estimate: dutch needs --h1");
        value = dutch_cdf(clouds, params.sigma, rect_kernel(), opt.z0, opt.h1);
    } else if (m == "np") {
        if (!is_set(opt.h1))
            throw std::invalid_argument("estimate: np needs --h1");
        value = nearest_parent_density(clouds, params.sigma, paper, opt.z0, opt.h1);
    } else if (m == "brown") {
        value = brown_cdf(clouds, params.sigma, opt.z0);
    } else if (m == "counting") {
        value = counting_cdf(clouds, params.sigma, opt.z0);
    } else {  // counting-density
        if (!is_set(opt.h1))
            throw std::invalid_argument("estimate: counting-density needs --h1");
        value = counting_density(clouds, params.sigma, rect_kernel(), opt.z0,
                                 opt.h1);
    }

    std::string text;
    if (opt.format == "json") {
        json j;
        j["method"] = m;
        j["z0"] = opt.z0;
        j["value"] = value;
        j["flag"] = flag;
        text = j.dump(2) + "\n";
    } else {
        text = "method,z0,value,flag\n" + m + "," + io::format_double(opt.z0) +
               "," + io::format_double(value) + "," + flag + "\n";
    }
    out << text;
    if (!opt.out.empty()) io::write_text_file(opt.out, text);
    err << "seed: " << meta.seed.master << "\n";
    return 0;
}

int cmd_mc_sweep(const Options& opt, std::ostream& out, std::ostream& err) {
    McConfig mc;
    mc.base = ModelParams{opt.n, opt.lambda, opt.mu, 0.5};
    mc.model = make_beta23_model();
    mc.kernel = paper_kernel();
    mc.taus = opt.taus;
    mc.sigmas = opt.sigmas;
    mc.z0 = opt.z0;
    if (opt.replicates > 0) mc.replicates = opt.replicates;
    mc.master_seed = opt.seed;
    if (!opt.estimators.empty()) mc.estimators = opt.estimators;
    mc.s = opt.s;
    mc.c = opt.c;
    mc.threads = opt.threads;
    const std::vector<McResultRow> rows = run_mc(mc);
    const std::string csv = results_csv(rows);
    if (opt.format == "svg" && opt.out.empty())
        throw std::invalid_argument("mc-sweep: --format svg requires --out");
    emit(csv, opt.out, out);
    if (opt.format == "svg")
        io::write_text_file(replace_extension(opt.out, ".svg"),
                            results_svg(rows, opt.n, opt.s));
    err << "seed: " << opt.seed << "\n";
    return 0;
}

int cmd_rates(const Options& opt, std::ostream& out, std::ostream& err) {
    std::string csv = "s,n,sigma,rate\n";
    for (double s : opt.rate_s)
        for (double n : opt.rate_n)
            for (double sigma : opt.rate_sigma) {
                csv += io::format_double(s) + "," + io::format_double(n) + "," +
                       io::format_double(sigma) + "," +
                       io::format_double(rate_fn({s, n, sigma})) + "\n";
            }
    emit(csv, opt.out, out);
    err << "seed: " << opt.seed << "\n";
    return 0;
}

int cmd_moment_check(const Options& opt, std::ostream& out, std::ostream& err) {
    const ModelParams params{opt.n, opt.lambda, opt.mu, opt.sigma};
    params.validate();
    const DispersalModel model = make_beta23_model();
    const Interval A{0.0, 0.5};
    const Interval B{0.25, 0.75};
    const Interval B2{0.8, 1.0};
    const std::size_t reps = opt.replicates > 0 ? opt.replicates : 5000;

    const double a_mn = expected_MN(params, model, {A, B});
    const double a_n = expected_N(params, model, B);
    const double a_nn = expected_NN(params, model, B, B2);

    double s_mn = 0.0, q_mn = 0.0, s_n = 0.0, q_n = 0.0, s_nn = 0.0, q_nn = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        const PointClouds clouds = sample_cox(params, model, {opt.seed, r});
        const double mn = static_cast<double>(count_in(clouds.parents, A)) *
                          static_cast<double>(count_in(clouds.offspring, B));
        const double nb = static_cast<double>(count_in(clouds.offspring, B));
        const double nn = nb * static_cast<double>(count_in(clouds.offspring, B2));
        s_mn += mn;
        q_mn += mn * mn;
        s_n += nb;
        q_n += nb * nb;
        s_nn += nn;
        q_nn += nn * nn;
    }
    auto row = [&](const char* name, double analytic, double sum, double sumsq) {
        const double r = static_cast<double>(reps);
        const double mean = sum / r;
        const double var = std::max(0.0, (sumsq - sum * sum / r) / (r - 1.0));
        const double se = std::sqrt(var / r);
        const double z = se > 0.0 ? (mean - analytic) / se : 0.0;
        return std::string(name) + "," + io::format_double(analytic) + "," +
               io::format_double(mean) + "," + io::format_double(se) + "," +
               io::format_double(z) + "\n";
    };
    std::string csv = "moment,analytic,mc_mean,mc_se,z\n";
    csv += row("MN", a_mn, s_mn, q_mn);
    csv += row("N", a_n, s_n, q_n);
    csv += row("NN", a_nn, s_nn, q_nn);
    emit(csv, opt.out, out);
    err << "seed: " << opt.seed << "\n";
    return 0;
}

void add_common(CLI::App* sub, Options& opt) {
    sub->add_option("--n", opt.n, "Sample-size parameter n");
    sub->add_option("--lambda", opt.lambda, "Parent intensity factor lambda");
    sub->add_option("--mu", opt.mu, "Mean offspring per parent");
    sub->add_option("--sigma", opt.sigma, "Dispersal scale sigma");
    sub->add_option("--seed", opt.seed, "Master seed");
    sub->add_option("--z0", opt.z0, "Evaluation point");
    sub->add_option("--h1", opt.h1, "First bandwidth");
    sub->add_option("--h2", opt.h2, "Second bandwidth");
    sub->add_option("--s", opt.s, "Smoothness order for bandwidth rules");
    sub->add_option("--c", opt.c, "Bandwidth constant");
    sub->add_option("--parent", opt.parent,
                    "Parent distribution, e.g. laplace:m=0.5,b=0.1");
    sub->add_option("--config", opt.config, "JSON config mirroring the flags");
    sub->add_option("--out", opt.out, "Output path");
    sub->add_option("--format", opt.format, "Output format: csv|json|svg");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("dispersal");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"Spatial dispersal simulation and estimation toolkit"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* sim = app.add_subcommand(
        "simulate", "Sample point clouds and write CSV + JSON sidecar");
    add_common(sim, opt);
    sim->add_option("--model", opt.model, "cox|one2one|iid");

    CLI::App* est = app.add_subcommand(
        "estimate", "Read a clouds CSV and print one estimate row");
    add_common(est, opt);
    est->add_option("--model", opt.model, "cox|one2one|iid");
    est->add_option("--method", opt.method,
                    "f1|f2|dec|int|sd|dutch|np|brown|counting|counting-density");
    est->add_option("clouds", opt.clouds_path, "Input clouds CSV");

    CLI::App* sweep = app.add_subcommand(
        "mc-sweep", "Monte Carlo sweep over a sigma grid -> results CSV");
    add_common(sweep, opt);
    sweep->add_option("--taus", opt.taus, "Grid of tau exponents (sigma = n^tau)");
    sweep->add_option("--sigmas", opt.sigmas, "Direct sigma grid");
    sweep->add_option("--replicates", opt.replicates, "Replicates per cell");
    sweep->add_option("--estimators", opt.estimators, "Subset of f1 f2 dec int");
    sweep->add_option("--threads", opt.threads, "Worker threads (0 = auto)");

    CLI::App* rates = app.add_subcommand(
        "rates", "Tabulate the minimax rate over an (s, n, sigma) grid");
    rates->add_option("--s", opt.rate_s, "Smoothness values");
    rates->add_option("--n", opt.rate_n, "Sample sizes");
    rates->add_option("--sigma", opt.rate_sigma, "Dispersal scales");
    rates->add_option("--seed", opt.seed, "Unused; echoed for uniformity");
    rates->add_option("--config", opt.config, "JSON config mirroring the flags");
    rates->add_option("--out", opt.out, "Output path");
    rates->add_option("--format", opt.format, "Output format: csv");

    CLI::App* moments = app.add_subcommand(
        "moment-check", "Analytic vs Monte Carlo cross-moments");
    add_common(moments, opt);
    moments->add_option("--replicates", opt.replicates, "Monte Carlo replicates");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        const std::set<std::string> provided = merge_config(sub, opt);
        if (sub == sim) return cmd_simulate(opt, out, err);
        if (sub == est) return cmd_estimate(opt, provided, out, err);
        if (sub == sweep) return cmd_mc_sweep(opt, out, err);
        if (sub == rates) return cmd_rates(opt, out, err);
        return cmd_moment_check(opt, out, err);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace dispersal
