#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pkstiff/orthoglide.hpp"

namespace pkstiff {

/// Everything the tools need to run: geometry plus link compliances.
/// File schema (JSON): keys L, r, d, variant ("puu"|"prpar"),
/// flags.axis_flexibility, k_ctr, and 6x6 row-major arrays foot, bar, axis,
/// act. Units fixed as mm/N and rad/(N*mm).
struct Config {
    orthoglide::Geometry geometry;
    orthoglide::LinkCompliances springs;
};

inline constexpr const char* kConfigSchema = "pkstiff-config-v1";
inline constexpr const char* kReportSchema = "pkstiff-report-v1";
inline constexpr const char* kMapSchema = "pkstiff-map-v1";

Config load_config(const std::string& path);
Config parse_config(const std::string& json_text, const std::string& origin = "<string>");
std::string dump_config(const Config& config);

/// Report as JSON (schema field included, full K_m row-major).
std::string report_to_json(const orthoglide::StiffnessReport& report);

/// Map CSV: '# schema' header line, then
/// x,y,z,k_tran,k_rot,rank_Km,status rows in grid order. Numbers use
/// 17-significant-digit scientific notation so golden files stay stable.
void write_map_csv(std::ostream& out, const std::vector<orthoglide::MapRow>& rows);

/// Sidecar JSON with the full matrices per reachable point.
std::string map_to_json(const std::vector<orthoglide::MapRow>& rows);

}  // namespace pkstiff
