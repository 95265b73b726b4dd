#include "pkstiff/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pkstiff/compliance.hpp"
#include "pkstiff/errors.hpp"

namespace pkstiff {

using nlohmann::json;
using orthoglide::Variant;

namespace {

Matrix6d matrix_from_json(const json& j, const std::string& key) {
    if (!j.contains(key)) throw DataError("config: missing matrix '" + key + "'");
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.size() != 36)
        throw DataError("config: matrix '" + key + "' must be a flat row-major array of 36");
    Matrix6d m;
    for (int i = 0; i < 36; ++i) m(i / 6, i % 6) = arr.at(static_cast<std::size_t>(i)).get<double>();
    return validate_compliance(m);
}

json matrix_to_json(const Matrix6d& m) {
    json arr = json::array();
    for (int i = 0; i < 36; ++i) arr.push_back(m(i / 6, i % 6));
    return arr;
}

}  // namespace

Config parse_config(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError(origin + ": JSON parse error: " + e.what());
    }
    try {
        Config cfg;
        cfg.geometry.L = j.at("L").get<double>();
        cfg.geometry.r = j.at("r").get<double>();
        cfg.geometry.d = j.at("d").get<double>();
        const std::string variant = j.value("variant", "prpar");
        if (variant == "puu")
            cfg.geometry.variant = Variant::PUU;
        else if (variant == "prpar")
            cfg.geometry.variant = Variant::PRPaR;
        else
            throw DataError(origin + ": unknown variant '" + variant + "'");
        cfg.geometry.axis_flexibility =
            j.contains("flags") ? j.at("flags").value("axis_flexibility", false) : false;
        cfg.geometry.validate();

        cfg.springs.k_ctr = j.at("k_ctr").get<double>();
        cfg.springs.k_foot = matrix_from_json(j, "foot");
        cfg.springs.k_bar = matrix_from_json(j, "bar");
        cfg.springs.k_axis = matrix_from_json(j, "axis");
        cfg.springs.k_act = matrix_from_json(j, "act");
        cfg.springs.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw DataError(origin + ": " + e.what());
    }
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string dump_config(const Config& config) {
    json j;
    j["schema"] = kConfigSchema;
    j["L"] = config.geometry.L;
    j["r"] = config.geometry.r;
    j["d"] = config.geometry.d;
    j["variant"] = config.geometry.variant == Variant::PUU ? "puu" : "prpar";
    j["flags"] = {{"axis_flexibility", config.geometry.axis_flexibility}};
    j["k_ctr"] = config.springs.k_ctr;
    j["foot"] = matrix_to_json(config.springs.k_foot);
    j["bar"] = matrix_to_json(config.springs.k_bar);
    j["axis"] = matrix_to_json(config.springs.k_axis);
    j["act"] = matrix_to_json(config.springs.k_act);
    return j.dump(2) + "\n";
}

std::string report_to_json(const orthoglide::StiffnessReport& report) {
    json j;
    j["schema"] = kReportSchema;
    j["point"] = {report.point.x(), report.point.y(), report.point.z()};
    j["K_m"] = matrix_to_json(report.K_m);
    json kt = json::array();
    for (int i = 0; i < 9; ++i) kt.push_back(report.K_tran(i / 3, i % 3));
    j["K_tran"] = kt;
    j["chain_ranks"] = report.chain_ranks;
    j["rank_K_m"] = report.rank_K_m;
    j["singular"] = report.singular;
    if (report.k_tran) j["k_tran"] = *report.k_tran;
    if (report.k_rot) j["k_rot"] = *report.k_rot;
    j["ik_warnings"] = report.ik_warnings;
    return j.dump(2) + "\n";
}

void write_map_csv(std::ostream& out, const std::vector<orthoglide::MapRow>& rows) {
    out << "# schema: " << kMapSchema << "\n";
    out << "x,y,z,k_tran,k_rot,rank_Km,status\n";
    out.precision(17);
    out << std::scientific;
    for (const auto& row : rows) {
        out << row.point.x() << ',' << row.point.y() << ',' << row.point.z() << ',';
        if (row.reachable && row.report && !row.report->singular) {
            out << *row.report->k_tran << ',' << *row.report->k_rot << ','
                << row.report->rank_K_m << ",ok\n";
        } else if (row.reachable && row.report) {
            out << "nan,nan," << row.report->rank_K_m << ",singular\n";
        } else {
            out << "nan,nan,0,unreachable\n";
        }
    }
}

std::string map_to_json(const std::vector<orthoglide::MapRow>& rows) {
    json j;
    j["schema"] = kMapSchema;
    json points = json::array();
    for (const auto& row : rows) {
        json p;
        p["point"] = {row.point.x(), row.point.y(), row.point.z()};
        p["reachable"] = row.reachable;
        if (row.report) {
            p["K_m"] = matrix_to_json(row.report->K_m);
            p["rank_K_m"] = row.report->rank_K_m;
            p["chain_ranks"] = row.report->chain_ranks;
            if (row.report->k_tran) p["k_tran"] = *row.report->k_tran;
            if (row.report->k_rot) p["k_rot"] = *row.report->k_rot;
        }
        points.push_back(std::move(p));
    }
    j["points"] = std::move(points);
    return j.dump(2) + "\n";
}

}  // namespace pkstiff
