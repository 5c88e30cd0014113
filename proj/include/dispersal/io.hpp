#pragma once

#include <string>
#include <utility>

#include "dispersal/model.hpp"
#include "dispersal/rng.hpp"

namespace dispersal::io {

// Shortest representation that parses back to the identical double.
std::string format_double(double value);
double parse_double(const std::string& text);

// Metadata stored in the JSON sidecar next to a point-cloud CSV. The
// timestamp lives here and only here; CSV payloads stay byte-reproducible.
struct CloudsMeta {
    ModelParams params;
    std::string model = "beta23";
    std::string variant = "cox";
    rng::SeedSpec seed;
    std::string created_at;
};

std::string clouds_csv(const PointClouds& clouds);
PointClouds parse_clouds_csv(const std::string& text);

std::string sidecar_path_for(const std::string& csv_path);

// Writes the CSV and its JSON sidecar (created_at filled from the clock when
// empty).
void write_clouds(const PointClouds& clouds, CloudsMeta meta,
                  const std::string& csv_path);

// Reads the CSV and its sidecar; throws std::runtime_error when either file
// is missing or malformed.
std::pair<PointClouds, CloudsMeta> read_clouds(const std::string& csv_path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace dispersal::io
