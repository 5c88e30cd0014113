#include "dispersal/io.hpp"

#include <charconv>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <nlohmann/json.hpp>

namespace dispersal::io {

std::string format_double(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw std::runtime_error("parse_double: malformed number '" + text + "'");
    return value;
}

std::string clouds_csv(const PointClouds& clouds) {
    std::string out = "kind,position\n";
    for (double x : clouds.parents) {
        out += "parent,";
        out += format_double(x);
        out += '\n';
    }
    for (double y : clouds.offspring) {
        out += "offspring,";
        out += format_double(y);
        out += '\n';
    }
    return out;
}

PointClouds parse_clouds_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "kind,position")
        throw std::runtime_error("clouds csv: expected header 'kind,position'");
    std::vector<double> parents;
    std::vector<double> offspring;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("clouds csv: missing comma on line " +
                                     std::to_string(lineno));
        const std::string kind = line.substr(0, comma);
        const double pos = parse_double(line.substr(comma + 1));
        if (kind == "parent")
            parents.push_back(pos);
        else if (kind == "offspring")
            offspring.push_back(pos);
        else
            throw std::runtime_error("clouds csv: unknown kind '" + kind +
                                     "' on line " + std::to_string(lineno));
    }
    return make_point_clouds(std::move(parents), std::move(offspring));
}

std::string sidecar_path_for(const std::string& csv_path) {
    const std::size_t slash = csv_path.find_last_of('/');
    const std::size_t dot = csv_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return csv_path + ".json";
    return csv_path.substr(0, dot) + ".json";
}

namespace {

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void write_clouds(const PointClouds& clouds, CloudsMeta meta,
                  const std::string& csv_path) {
    write_text_file(csv_path, clouds_csv(clouds));
    if (meta.created_at.empty()) meta.created_at = utc_now();
    nlohmann::json j;
    j["model"] = meta.model;
    j["variant"] = meta.variant;
    j["params"] = {{"n", meta.params.n},
                   {"lambda", meta.params.lambda},
                   {"mu", meta.params.mu},
                   {"sigma", meta.params.sigma}};
    j["seed"] = {{"master", meta.seed.master}, {"stream", meta.seed.stream}};
    j["created_at"] = meta.created_at;
    write_text_file(sidecar_path_for(csv_path), j.dump(2) + "\n");
}

std::pair<PointClouds, CloudsMeta> read_clouds(const std::string& csv_path) {
    PointClouds clouds = parse_clouds_csv(read_text_file(csv_path));
    const std::string sidecar = read_text_file(sidecar_path_for(csv_path));
    nlohmann::json j = nlohmann::json::parse(sidecar);
    CloudsMeta meta;
    meta.model = j.value("model", "beta23");
    meta.variant = j.value("variant", "cox");
    const auto& p = j.at("params");
    meta.params.n = p.at("n").get<double>();
    meta.params.lambda = p.at("lambda").get<double>();
    meta.params.mu = p.at("mu").get<double>();
    meta.params.sigma = p.at("sigma").get<double>();
    meta.seed.master = j.at("seed").at("master").get<std::uint64_t>();
    meta.seed.stream = j.at("seed").at("stream").get<std::uint64_t>();
    meta.created_at = j.value("created_at", "");
    return {std::move(clouds), std::move(meta)};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace dispersal::io
