#include "pkstiff/procrustes.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pkstiff/compliance.hpp"
#include "pkstiff/errors.hpp"
#include "pkstiff/se3.hpp"

namespace pkstiff {

Vector6d LoadCase::wrench() const {
    Vector6d w = Vector6d::Zero();
    w(column()) = magnitude;
    return w;
}

void DisplacementDataset::validate() const {
    if (nodes.size() < 3) throw DataError("DisplacementDataset: need at least 3 nodes");
    if (load.magnitude == 0.0) throw DataError("DisplacementDataset: zero load magnitude");
    if (load.axis < 0 || load.axis > 2) throw DataError("DisplacementDataset: bad load axis");
}

RigidFit fit_rigid_motion(const DisplacementDataset& ds) {
    ds.validate();
    const auto m = static_cast<double>(ds.nodes.size());
    Vector3d mean_g = Vector3d::Zero(), mean_gp = Vector3d::Zero();
    for (const auto& [p, d] : ds.nodes) {
        mean_g += p - ds.p0;
        mean_gp += p - ds.p0 + d;
    }
    mean_g /= m;
    mean_gp /= m;

    Matrix3d cross = Matrix3d::Zero();
    for (const auto& [p, d] : ds.nodes) {
        const Vector3d g = p - ds.p0 - mean_g;
        const Vector3d gp = p - ds.p0 + d - mean_gp;
        cross += g * gp.transpose();
    }
    Eigen::JacobiSVD<Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector3d sv = svd.singularValues();
    if (sv(2) < 1e-10 * sv(0))
        throw DataError("fit_rigid_motion: degenerate (collinear) node cloud");

    Matrix3d r = svd.matrixV() * svd.matrixU().transpose();
    if (r.determinant() < 0) {
        Matrix3d flip = Matrix3d::Identity();
        flip(2, 2) = -1.0;  // smallest-sigma column
        r = svd.matrixV() * flip * svd.matrixU().transpose();
    }
    RigidFit fit;
    fit.R = r;
    fit.t = mean_gp - r * mean_g;

    double ss = 0.0;
    for (const auto& [p, d] : ds.nodes) {
        const Vector3d g = p - ds.p0;
        ss += (g + d - r * g - fit.t).squaredNorm();
    }
    fit.residual_rms = std::sqrt(ss / m);
    return fit;
}

Vector3d small_angle_extract(const RigidFit& fit) {
    const double dist = (fit.R - Matrix3d::Identity()).norm();
    if (dist >= 1e-2)
        throw RegimeError("small_angle_extract: rotation too large (||R - I|| = " +
                          std::to_string(dist) + ")");
    return vee3((fit.R - fit.R.transpose()) / 2.0);
}

Matrix6d build_compliance(const std::array<DisplacementDataset, 6>& datasets) {
    bool seen[6] = {};
    Matrix6d raw = Matrix6d::Zero();
    for (const auto& ds : datasets) {
        ds.validate();
        const int col = ds.load.column();
        if (seen[col]) throw InputError("build_compliance: duplicate load case for column " +
                                        std::to_string(col));
        seen[col] = true;
        const RigidFit fit = fit_rigid_motion(ds);
        raw.block<3, 1>(0, col) = fit.t / ds.load.magnitude;
        raw.block<3, 1>(3, col) = small_angle_extract(fit) / ds.load.magnitude;
    }
    for (int i = 0; i < 6; ++i)
        if (!seen[i]) throw InputError("build_compliance: missing load case for column " +
                                       std::to_string(i));
    const double asym = symmetry_error(raw);
    if (asym > 0.10)
        throw DataError("build_compliance: raw matrix asymmetric by " + std::to_string(asym) +
                        " relative; displacement data quality insufficient");
    return validate_compliance(symmetric_part(raw), 1e-12, 1e-9);
}

DisplacementDataset synthesize_displacement_field(const Matrix6d& k, const LoadCase& load,
                                                  const std::vector<Vector3d>& node_positions,
                                                  const Vector3d& p0) {
    const Vector6d twist = k * load.wrench();
    const Vector3d dp = twist.head<3>();
    const Vector3d phi = twist.tail<3>();
    // exact rotation about the axis phi, not the linearization
    Matrix3d r = Matrix3d::Identity();
    const double angle = phi.norm();
    if (angle > 0) r = Eigen::AngleAxisd(angle, phi / angle).toRotationMatrix();

    DisplacementDataset ds;
    ds.p0 = p0;
    ds.load = load;
    ds.nodes.reserve(node_positions.size());
    for (const auto& p : node_positions) {
        const Vector3d g = p - p0;
        ds.nodes.emplace_back(p, r * g + dp - g);
    }
    return ds;
}

namespace {

LoadType parse_load_type(const std::string& s) {
    if (s == "force") return LoadType::Force;
    if (s == "torque") return LoadType::Torque;
    throw DataError("displacement CSV: unknown load type '" + s + "'");
}

int parse_axis(const std::string& s) {
    if (s == "x") return 0;
    if (s == "y") return 1;
    if (s == "z") return 2;
    throw DataError("displacement CSV: unknown axis '" + s + "'");
}

}  // namespace

DisplacementDataset read_displacement_csv(std::istream& in, const std::string& origin) {
    DisplacementDataset ds;
    ds.p0 = Vector3d::Zero();
    bool have_load = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (line.back() == '\r') line.pop_back();
        if (line[0] == '#') {
            std::istringstream hdr(line.substr(1));
            std::string key;
            hdr >> key;
            if (key == "load:") {
                std::string type, axis;
                double mag;
                if (!(hdr >> type >> axis >> mag))
                    throw DataError(origin + ": malformed load header");
                ds.load = {parse_load_type(type), parse_axis(axis), mag};
                have_load = true;
            } else if (key == "p0:") {
                if (!(hdr >> ds.p0.x() >> ds.p0.y() >> ds.p0.z()))
                    throw DataError(origin + ": malformed p0 header");
            }
            continue;
        }
        if (line.rfind("node_id", 0) == 0) continue;  // column header
        std::istringstream row(line);
        std::string cell;
        double v[7];
        for (int i = 0; i < 7; ++i) {
            if (!std::getline(row, cell, ','))
                throw DataError(origin + ": row with fewer than 7 columns: " + line);
            try {
                v[i] = std::stod(cell);
            } catch (const std::exception&) {
                throw DataError(origin + ": non-numeric cell '" + cell + "'");
            }
        }
        ds.nodes.emplace_back(Vector3d(v[1], v[2], v[3]), Vector3d(v[4], v[5], v[6]));
    }
    if (!have_load) throw DataError(origin + ": missing '# load:' header");
    ds.validate();
    return ds;
}

DisplacementDataset read_displacement_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open displacement CSV: " + path);
    return read_displacement_csv(in, path);
}

void write_displacement_csv(std::ostream& out, const DisplacementDataset& ds) {
    out << "# schema: pkstiff-displacement-v1\n";
    out << "# load: " << (ds.load.type == LoadType::Force ? "force" : "torque") << ' '
        << "xyz"[ds.load.axis] << ' ';
    out.precision(17);
    out << ds.load.magnitude << '\n';
    out << "# p0: " << ds.p0.x() << ' ' << ds.p0.y() << ' ' << ds.p0.z() << '\n';
    out << "node_id,px,py,pz,dx,dy,dz\n";
    for (std::size_t i = 0; i < ds.nodes.size(); ++i) {
        const auto& [p, d] = ds.nodes[i];
        out << i << ',' << p.x() << ',' << p.y() << ',' << p.z() << ',' << d.x() << ',' << d.y()
            << ',' << d.z() << '\n';
    }
}

}  // namespace pkstiff
