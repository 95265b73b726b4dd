#include <doctest.h>

#include <random>
#include <sstream>

#include "pkstiff/procrustes.hpp"
#include "pkstiff/errors.hpp"
#include "pkstiff/se3.hpp"
#include "test_support.hpp"

using namespace pkstiff;
namespace ts = pkstiff::testsupport;

namespace {

std::vector<Vector3d> random_cloud(std::mt19937_64& rng, int n, double scale = 40.0) {
    std::normal_distribution<double> g;
    std::vector<Vector3d> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pts.push_back(scale * Vector3d(g(rng), g(rng), g(rng)));
    return pts;
}

DisplacementDataset rigid_motion_dataset(const std::vector<Vector3d>& cloud,
                                         const Matrix3d& r, const Vector3d& t,
                                         const Vector3d& p0 = Vector3d::Zero()) {
    DisplacementDataset ds;
    ds.p0 = p0;
    ds.load = {LoadType::Force, 0, 1.0};
    for (const auto& p : cloud) {
        const Vector3d g = p - p0;
        ds.nodes.emplace_back(p, r * g + t - g);
    }
    return ds;
}

}  // namespace

TEST_CASE("pure translation is recovered exactly") {
    std::mt19937_64 rng(41);
    const auto ds = rigid_motion_dataset(random_cloud(rng, 20), Matrix3d::Identity(),
                                         Vector3d(0.1, 0, 0));
    const RigidFit fit = fit_rigid_motion(ds);
    CHECK((fit.t - Vector3d(0.1, 0, 0)).norm() < 1e-13);
    CHECK((fit.R - Matrix3d::Identity()).norm() < 1e-13);
    CHECK(fit.residual_rms < 1e-12);
}

TEST_CASE("small synthetic rotation is recovered to machine precision") {
    std::mt19937_64 rng(43);
    const double angle = 1e-4;
    const Matrix3d r = elem_transform(Axis::Z, MotionKind::Rotation, angle).rotation();
    const auto ds = rigid_motion_dataset(random_cloud(rng, 50), r, Vector3d::Zero());
    const RigidFit fit = fit_rigid_motion(ds);
    const Vector3d phi = small_angle_extract(fit);
    CHECK(std::abs(phi.z() - angle) < 1e-12);
    CHECK(std::abs(phi.x()) < 1e-14);
    CHECK(std::abs(phi.y()) < 1e-14);
}

TEST_CASE("rotation recovery is robust to zero-mean noise") {
    std::mt19937_64 rng(47);
    std::normal_distribution<double> g;
    const double angle = 1e-4;
    const Matrix3d r = elem_transform(Axis::Y, MotionKind::Rotation, angle).rotation();
    for (int trial = 0; trial < 100; ++trial) {
        auto ds = rigid_motion_dataset(random_cloud(rng, 40), r, Vector3d(1e-4, 0, -2e-4));
        for (auto& [p, d] : ds.nodes)
            d += 1e-6 * Vector3d(g(rng), g(rng), g(rng));
        const Vector3d phi = small_angle_extract(fit_rigid_motion(ds));
        CHECK(std::abs(phi.y() - angle) < 1e-7);
    }
}

TEST_CASE("degenerate clouds are rejected") {
    DisplacementDataset ds;
    ds.p0 = Vector3d::Zero();
    ds.load = {LoadType::Force, 0, 1.0};
    for (int i = 0; i < 5; ++i)
        ds.nodes.emplace_back(Vector3d(i, 0, 0), Vector3d(0.01, 0, 0));  // collinear
    CHECK_THROWS_AS(fit_rigid_motion(ds), DataError);

    DisplacementDataset two;
    two.p0 = Vector3d::Zero();
    two.load = {LoadType::Force, 0, 1.0};
    two.nodes.emplace_back(Vector3d(1, 0, 0), Vector3d::Zero());
    two.nodes.emplace_back(Vector3d(0, 1, 0), Vector3d::Zero());
    CHECK_THROWS_AS(fit_rigid_motion(two), DataError);
}

TEST_CASE("the fit minimizes the residual") {
    std::mt19937_64 rng(53);
    std::normal_distribution<double> g;
    auto ds = rigid_motion_dataset(
        random_cloud(rng, 30),
        elem_transform(Axis::X, MotionKind::Rotation, 3e-4).rotation(), Vector3d(0.2, -0.1, 0));
    for (auto& [p, d] : ds.nodes) d += 1e-5 * Vector3d(g(rng), g(rng), g(rng));
    const RigidFit fit = fit_rigid_motion(ds);

    auto residual = [&](const Matrix3d& r, const Vector3d& t) {
        double ss = 0;
        for (const auto& [p, d] : ds.nodes) {
            const Vector3d gk = p - ds.p0;
            ss += (gk + d - r * gk - t).squaredNorm();
        }
        return ss;
    };
    const double best = residual(fit.R, fit.t);
    for (int i = 0; i < 20; ++i) {
        const Vector3d dphi = 1e-4 * Vector3d(g(rng), g(rng), g(rng));
        Matrix3d rp = fit.R;
        const double a = dphi.norm();
        if (a > 0) rp = Eigen::AngleAxisd(a, dphi / a).toRotationMatrix() * fit.R;
        const Vector3d tp = fit.t + 1e-5 * Vector3d(g(rng), g(rng), g(rng));
        CHECK(residual(rp, tp) >= best);
    }
}

TEST_CASE("small_angle_extract") {
    const RigidFit id{Vector3d::Zero(), Matrix3d::Identity(), 0.0};
    CHECK(small_angle_extract(id).norm() == 0.0);

    RigidFit rx{Vector3d::Zero(),
                elem_transform(Axis::X, MotionKind::Rotation, 1e-5).rotation(), 0.0};
    CHECK((small_angle_extract(rx) - Vector3d(1e-5, 0, 0)).norm() < 1e-12);

    const double a = 2e-4, b = -3e-4;
    RigidFit rxy{Vector3d::Zero(),
                 (elem_transform(Axis::X, MotionKind::Rotation, a) *
                  elem_transform(Axis::Y, MotionKind::Rotation, b)).rotation(),
                 0.0};
    const Vector3d phi = small_angle_extract(rxy);
    CHECK(std::abs(phi.x() - a) < std::abs(a * b));
    CHECK(std::abs(phi.y() - b) < std::abs(a * b));

    RigidFit big{Vector3d::Zero(),
                 elem_transform(Axis::Z, MotionKind::Rotation, 0.5).rotation(), 0.0};
    CHECK_THROWS_AS(small_angle_extract(big), RegimeError);
}

namespace {

std::array<DisplacementDataset, 6> six_datasets(const Matrix6d& k,
                                                const std::vector<Vector3d>& cloud,
                                                double f_mag = 1.0, double m_mag = 1.0) {
    std::array<DisplacementDataset, 6> out;
    for (int a = 0; a < 3; ++a) {
        out[static_cast<std::size_t>(a)] =
            synthesize_displacement_field(k, {LoadType::Force, a, f_mag}, cloud,
                                          Vector3d::Zero());
        out[static_cast<std::size_t>(a + 3)] =
            synthesize_displacement_field(k, {LoadType::Torque, a, m_mag}, cloud,
                                          Vector3d::Zero());
    }
    return out;
}

}  // namespace

TEST_CASE("build_compliance round-trips") {
    std::mt19937_64 rng(59);
    const auto cloud = random_cloud(rng, 60);

    SUBCASE("random SPD matrix") {
        const Matrix6d k = ts::random_spd6(rng, 1e-6);
        const Matrix6d rec = build_compliance(six_datasets(k, cloud, 1.0, 1.0));
        CHECK(relative_error(rec, k) < 1e-9);
    }

    SUBCASE("diagonal matrix gives vanishing off-diagonals") {
        Matrix6d k = Matrix6d::Zero();
        k.diagonal() << 2e-4, 3e-4, 1.5e-3, 2e-7, 2e-7, 1.7e-7;
        const Matrix6d rec = build_compliance(six_datasets(k, cloud));
        Matrix6d off = rec;
        off.diagonal().setZero();
        CHECK(off.cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("the case-study foot matrix is re-emitted from its own fields") {
        const Matrix6d k = ts::k_foot_data();
        const Matrix6d rec = build_compliance(six_datasets(k, cloud));
        CHECK(relative_error(rec, k) < 1e-9);
    }

    SUBCASE("invariant under the node-cloud choice") {
        const Matrix6d k = ts::k_foot_data();
        const Matrix6d rec1 = build_compliance(six_datasets(k, cloud));
        const Matrix6d rec2 = build_compliance(six_datasets(k, random_cloud(rng, 25, 90.0)));
        CHECK(relative_error(rec1, rec2) < 1e-9);
    }
}

TEST_CASE("build_compliance input validation") {
    std::mt19937_64 rng(61);
    const auto cloud = random_cloud(rng, 20);
    const Matrix6d k = ts::k_foot_data();
    auto sets = six_datasets(k, cloud);

    SUBCASE("duplicate load case") {
        sets[1] = sets[0];
        CHECK_THROWS_AS(build_compliance(sets), InputError);
    }

    SUBCASE("collinear nodes in one dataset") {
        std::vector<Vector3d> line;
        for (int i = 0; i < 10; ++i) line.emplace_back(i * 5.0, 0, 0);
        sets[2] = synthesize_displacement_field(k, {LoadType::Force, 2, 100.0}, line,
                                                Vector3d::Zero());
        CHECK_THROWS_AS(build_compliance(sets), DataError);
    }

    SUBCASE("asymmetric displacement data is a data-quality error") {
        Matrix6d skewed = k;
        skewed(0, 1) += 0.8 * k.norm();  // forward model no longer reciprocal
        CHECK_THROWS_AS(build_compliance(six_datasets(skewed, cloud)), DataError);
    }
}

TEST_CASE("displacement CSV round trip") {
    std::mt19937_64 rng(67);
    const auto ds = synthesize_displacement_field(
        ts::k_foot_data(), {LoadType::Torque, 1, 5e3}, random_cloud(rng, 12),
        Vector3d(1.0, -2.0, 3.0));
    std::stringstream buf;
    write_displacement_csv(buf, ds);
    const DisplacementDataset back = read_displacement_csv(buf, "<memory>");
    CHECK(back.nodes.size() == ds.nodes.size());
    CHECK((back.p0 - ds.p0).norm() == 0.0);
    CHECK(back.load.type == ds.load.type);
    CHECK(back.load.axis == ds.load.axis);
    CHECK(back.load.magnitude == ds.load.magnitude);
    for (std::size_t i = 0; i < ds.nodes.size(); ++i) {
        CHECK((back.nodes[i].first - ds.nodes[i].first).norm() == 0.0);
        CHECK((back.nodes[i].second - ds.nodes[i].second).norm() == 0.0);
    }

    std::stringstream bad("node_id,px,py,pz,dx,dy,dz\n0,1,2,3,0,0,0\n");
    CHECK_THROWS_AS(read_displacement_csv(bad, "<memory>"), DataError);
}
