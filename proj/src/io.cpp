#include "hermrand/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "hermrand/error.hpp"

namespace hermrand {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string report_csv(const FitReport& r) {
  std::string out(kReportCsvHeader);
  out += "\r\n";
  const std::string tail = "," + std::to_string(r.seed) + "," + csv_field(r.config_hash) + "," + csv_field(HERMRAND_VERSION);
  for (const auto& row : r.rows) {
    out += csv_field(row.series) + "," + format_number(row.abscissa) + "," + format_number(row.statistic) + "," +
           format_number(row.ci_lo) + "," + format_number(row.ci_hi) + "," + std::to_string(row.n_samples) + tail + "\r\n";
  }
  return out;
}

void write_text_file(const std::filesystem::path& file, const std::string& content) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kConfig, "cannot write '" + tmp + "'");
    out << content;
    if (!out) throw Error(ErrorCode::kConfig, "write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, file);
}

void update_manifest(const std::filesystem::path& dir, const ManifestEntry& entry) {
  const auto file = dir / "manifest.json";
  nlohmann::ordered_json m;
  if (std::ifstream in(file); in) {
    try {
      m = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception&) {
      m = nlohmann::ordered_json();
    }
  }
  if (!m.is_object()) m = nlohmann::ordered_json::object();
  m["version"] = HERMRAND_VERSION;
  if (!m.contains("runs") || !m["runs"].is_object()) m["runs"] = nlohmann::ordered_json::object();
  m["runs"][entry.name] = nlohmann::ordered_json{{"config_hash", entry.config_hash},
                                                 {"seed", entry.seed},
                                                 {"version", HERMRAND_VERSION},
                                                 {"outputs", entry.outputs},
                                                 {"exit_code", entry.exit_code},
                                                 {"wall_seconds", entry.seconds}};
  write_text_file(file, m.dump(2) + "\n");
}

}  // namespace hermrand
