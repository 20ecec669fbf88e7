#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hermrand/experiments.hpp"

namespace hermrand {

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double v);

/// RFC 4180 field: quoted when it holds a comma, quote or line break.
std::string csv_field(std::string_view s);

/// Header shared by every experiment CSV.
inline constexpr std::string_view kReportCsvHeader =
    "series,abscissa,statistic,ci_lo,ci_hi,n_samples,seed,config_hash,version";

std::string report_csv(const FitReport& r);

/// Writes `content` to a temporary sibling and renames it into place.
void write_text_file(const std::filesystem::path& file, const std::string& content);

/// Output bookkeeping for one --out directory.
struct ManifestEntry {
  std::string name;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  double seconds = 0.0;
  int exit_code = 0;
};

/// Adds (or replaces, by name) an entry in DIR/manifest.json.
void update_manifest(const std::filesystem::path& dir, const ManifestEntry& entry);

}  // namespace hermrand
