#include <doctest.h>

#include <cmath>
#include <random>

#include "pkstiff/config_io.hpp"
#include "pkstiff/errors.hpp"
#include "pkstiff/orthoglide.hpp"
#include "test_support.hpp"

using namespace pkstiff;
using namespace pkstiff::orthoglide;
namespace ts = pkstiff::testsupport;

namespace {

const LinkCompliances& springs() {
    static const LinkCompliances s = ts::case_study_springs();
    return s;
}

}  // namespace

TEST_CASE("chain base transforms follow the cyclic permutation") {
    const auto geom = ts::case_study_geometry(Variant::PUU);
    const ChainSpec cx = build_chain(geom, springs(), ChainId::X);
    const auto& base_x = std::get<RigidTransform>(cx.elements().front()).T;
    CHECK((base_x.translation() - Vector3d(-geom.L - geom.r, 0, 0)).norm() == 0.0);
    CHECK((base_x.rotation() - Matrix3d::Identity()).norm() == 0.0);

    const ChainSpec cy = build_chain(geom, springs(), ChainId::Y);
    const auto& base_y = std::get<RigidTransform>(cy.elements().front()).T;
    CHECK((base_y.translation() - Vector3d(0, -geom.L - geom.r, 0)).norm() == 0.0);
    Matrix3d perm;
    perm << 0, 0, 1, 1, 0, 0, 0, 1, 0;
    CHECK((base_y.rotation() - perm).norm() == 0.0);

    const ChainSpec cz = build_chain(geom, springs(), ChainId::Z);
    const auto& base_z = std::get<RigidTransform>(cz.elements().front()).T;
    CHECK((base_z.translation() - Vector3d(0, 0, -geom.L - geom.r)).norm() == 0.0);
    CHECK((base_z.rotation() - perm.transpose()).norm() == 0.0);
}

TEST_CASE("inverse kinematics") {
    const auto geom = ts::case_study_geometry(Variant::PUU);

    SUBCASE("isotropic posture has all coordinates zero") {
        const auto ik = inverse_kinematics(geom, Vector3d::Zero());
        for (const auto& c : ik) {
            CHECK(c.q0 == doctest::Approx(0.0).epsilon(1e-14));
            CHECK(c.q.norm() < 1e-14);
        }
    }

    SUBCASE("legs are mutually orthogonal at the isotropic posture") {
        const auto ik = inverse_kinematics(geom, Vector3d::Zero());
        Matrix3d base_rots[3];
        base_rots[0] = Matrix3d::Identity();
        base_rots[1] << 0, 0, 1, 1, 0, 0, 0, 1, 0;
        base_rots[2] = base_rots[1].transpose();
        Matrix3d legs;
        for (int c = 0; c < 3; ++c) {
            // leg direction in chain-local coordinates from the U-joint angles
            const double q1 = ik[c].q(0), q2 = ik[c].q(1);
            const Vector3d local(std::cos(q1) * std::cos(q2), std::sin(q1) * std::cos(q2),
                                 -std::sin(q2));
            legs.col(c) = base_rots[c] * local;
        }
        CHECK(std::abs(legs.col(0).dot(legs.col(1))) < 1e-12);
        CHECK(std::abs(legs.col(1).dot(legs.col(2))) < 1e-12);
        CHECK(std::abs(legs.col(2).dot(legs.col(0))) < 1e-12);
    }

    SUBCASE("forward kinematics reproduces the prescribed point") {
        std::mt19937_64 rng(71);
        std::uniform_real_distribution<double> u(-73.65, 126.35);
        int tested = 0;
        for (int i = 0; i < 1000; ++i) {
            const Vector3d p(u(rng), u(rng), u(rng));
            std::array<ChainIk, 3> ik;
            try {
                ik = inverse_kinematics(geom, p);
            } catch (const WorkspaceError&) {
                continue;
            }
            ++tested;
            for (int c = 0; c < 3; ++c) {
                const ChainSpec spec = build_chain(geom, springs(), static_cast<ChainId>(c));
                const ChainConfig cfg = ChainConfig::rigid(spec, ik[c].q0, ik[c].q);
                const HomTransform pose = forward_kinematics(spec, cfg);
                CHECK((pose.translation() - p).norm() < 1e-9);
                CHECK((pose.rotation() - Matrix3d::Identity()).norm() < 1e-12);
            }
        }
        CHECK(tested > 900);
    }

    SUBCASE("the flat point is reached by all three chains simultaneously") {
        const double c = -geom.L / std::sqrt(6.0);
        const auto ik = inverse_kinematics(geom, Vector3d::Constant(c));
        // cyclic symmetry: identical joint values in chain-local coordinates
        for (int i = 1; i < 3; ++i) {
            CHECK(ik[i].q0 == doctest::Approx(ik[0].q0));
            CHECK((ik[i].q - ik[0].q).norm() < 1e-12);
        }
    }

    SUBCASE("unreachable points raise a workspace error") {
        CHECK_THROWS_AS(inverse_kinematics(geom, Vector3d(0, geom.L + 1.0, geom.L + 1.0)),
                        WorkspaceError);
    }
}

TEST_CASE("stiffness at the isotropic point") {
    const auto geom_p = ts::case_study_geometry(Variant::PRPaR);
    const auto geom_u = ts::case_study_geometry(Variant::PUU);
    const auto rep_p = evaluate_stiffness(geom_p, springs(), kPointQ0);
    const auto rep_u = evaluate_stiffness(geom_u, springs(), kPointQ0);

    CHECK(*rep_p.k_tran == doctest::Approx(2.78e-4).epsilon(0.15));
    CHECK(*rep_p.k_rot == doctest::Approx(1.94e-7).epsilon(0.15));
    CHECK(*rep_u.k_tran == doctest::Approx(2.78e-4).epsilon(0.15));
    const double ratio = *rep_u.k_rot / *rep_p.k_rot;
    CHECK(ratio > 8.0);
    CHECK(ratio < 13.0);

    // isotropy: K_tran is a scalar multiple of the identity
    const Matrix3d kt = rep_u.K_tran;
    CHECK(relative_error(kt, kt(0, 0) * Matrix3d::Identity()) < 1e-9);

    // per-chain ranks follow 6 - rank(J_q)
    CHECK(rep_u.chain_ranks == std::array<int, 3>{2, 2, 2});
    CHECK(rep_p.chain_ranks == std::array<int, 3>{3, 3, 3});
    CHECK(rep_u.rank_K_m == 6);
    CHECK(rep_p.rank_K_m == 6);
}

TEST_CASE("cyclic symmetry on the diagonal") {
    const auto geom = ts::case_study_geometry(Variant::PRPaR);
    const auto rep = evaluate_stiffness(geom, springs(), Vector3d::Constant(40.0));
    Matrix3d perm;
    perm << 0, 0, 1, 1, 0, 0, 0, 1, 0;  // x -> y -> z -> x
    Matrix6d big = Matrix6d::Zero();
    big.topLeftCorner<3, 3>() = perm;
    big.bottomRightCorner<3, 3>() = perm;
    CHECK(relative_error(big * rep.K_m * big.transpose(), rep.K_m) < 1e-9);
}

TEST_CASE("singular postures reproduce the published structure") {
    for (const auto variant : {Variant::PUU, Variant::PRPaR}) {
        const auto geom = ts::case_study_geometry(variant);
        const auto configs = singular_configs(geom);
        REQUIRE(configs.size() == 2);
        CHECK(configs[0].first == "flat");
        CHECK(configs[1].first == "bar");

        const auto flat = evaluate_stiffness(geom, springs(), configs[0].second);
        Eigen::SelfAdjointEigenSolver<Matrix3d> ef(flat.K_tran);
        const int rank_flat =
            (ef.eigenvalues().array() > 1e-9 * ef.eigenvalues().maxCoeff()).count();
        CHECK(rank_flat == 2);
        // equal diagonal, off-diagonal = -diagonal/2
        CHECK(flat.K_tran(0, 0) == doctest::Approx(flat.K_tran(1, 1)).epsilon(1e-9));
        CHECK(flat.K_tran(0, 1) == doctest::Approx(-flat.K_tran(0, 0) / 2).epsilon(1e-6));
        // K_m itself loses rank too; the report flags it and omits the scalars
        CHECK(flat.singular);
        CHECK(!flat.k_tran.has_value());

        const auto bar = evaluate_stiffness(geom, springs(), configs[1].second);
        Eigen::SelfAdjointEigenSolver<Matrix3d> eb(bar.K_tran);
        const int rank_bar =
            (eb.eigenvalues().array() > 1e-9 * eb.eigenvalues().maxCoeff()).count();
        CHECK(rank_bar == 1);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(bar.K_tran(i, j) == doctest::Approx(bar.K_tran(0, 0)).epsilon(1e-6));
    }
}

TEST_CASE("fictitious stiffness invariance") {
    const auto geom = ts::case_study_geometry(Variant::PRPaR);
    const Vector3d p(-30.0, 44.0, 12.0);
    BuildOptions opts;
    opts.kappa_f = 1.0;
    const Matrix6d k1 = evaluate_stiffness(geom, springs(), p, opts).K_m;
    opts.kappa_f = 1e3;
    const Matrix6d k2 = evaluate_stiffness(geom, springs(), p, opts).K_m;
    opts.kappa_f = 1e6;
    const Matrix6d k3 = evaluate_stiffness(geom, springs(), p, opts).K_m;
    CHECK(relative_error(k2, k1) < 1e-7);
    CHECK(relative_error(k3, k1) < 1e-7);

    // the reduced 5-dof spring gives the same manipulator stiffness
    opts.plg_mode = PlgSpringMode::Reduce5Dof;
    const Matrix6d k4 = evaluate_stiffness(geom, springs(), p, opts).K_m;
    CHECK(relative_error(k4, k1) < 1e-7);
}

TEST_CASE("workspace map") {
    const auto geom = ts::case_study_geometry(Variant::PRPaR);

    SUBCASE("a single-point grid matches evaluate_stiffness") {
        GridSpec grid{kPointQ1, kPointQ1, {1, 1, 1}};
        const auto rows = workspace_map(geom, springs(), grid);
        REQUIRE(rows.size() == 1);
        REQUIRE(rows[0].reachable);
        const auto direct = evaluate_stiffness(geom, springs(), kPointQ1);
        CHECK(relative_error(rows[0].report->K_m, direct.K_m) == 0.0);
    }

    SUBCASE("the 200 mm cube is fully reachable on a 5^3 grid") {
        GridSpec grid{Vector3d::Constant(-73.65), Vector3d::Constant(126.35), {5, 5, 5}};
        const auto rows = workspace_map(geom, springs(), grid, {}, 4);
        CHECK(rows.size() == 125);
        for (const auto& row : rows) CHECK(row.reachable);
    }

    SUBCASE("translational compliance degrades from the centre toward both corners") {
        const double q0 = *evaluate_stiffness(geom, springs(), kPointQ0).k_tran;
        const double q1 = *evaluate_stiffness(geom, springs(), kPointQ1).k_tran;
        const double q2 = *evaluate_stiffness(geom, springs(), kPointQ2).k_tran;
        CHECK(q0 < q1);
        CHECK(q1 < q2);  // published trend: 9.86e-4 -> 21.2e-4
        // and monotone along the positive diagonal toward the bar singularity
        double prev = q0;
        for (const double c : {40.0, 80.0, 126.35}) {
            const double kt = *evaluate_stiffness(geom, springs(), Vector3d::Constant(c)).k_tran;
            CHECK(kt > prev);
            prev = kt;
        }
    }

    SUBCASE("empty grids are rejected") {
        GridSpec grid{Vector3d::Zero(), Vector3d::Zero(), {0, 1, 1}};
        CHECK_THROWS_AS(workspace_map(geom, springs(), grid), InputError);
    }
}

TEST_CASE("parallelogram constraint only adds rotational stiffness") {
    const auto geom_p = ts::case_study_geometry(Variant::PRPaR);
    const auto geom_u = ts::case_study_geometry(Variant::PUU);
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> u(-70.0, 120.0);
    for (int i = 0; i < 8; ++i) {
        const Vector3d p(u(rng), u(rng), u(rng));
        const auto rp = evaluate_stiffness(geom_p, springs(), p);
        const auto ru = evaluate_stiffness(geom_u, springs(), p);
        CHECK(*rp.k_rot <= *ru.k_rot * (1 + 1e-9));
    }
}

TEST_CASE("calibration recovers the case-study geometry from the published row") {
    const auto result = calibrate_geometry(springs());
    CHECK(result.geometry.L == doctest::Approx(309.49).epsilon(1e-3));
    CHECK(result.geometry.r == doctest::Approx(29.6).epsilon(0.05));
    CHECK(result.geometry.d == doctest::Approx(82.4).epsilon(0.05));
    CHECK(result.q0_residual < 0.15);
}

TEST_CASE("config file round trip") {
    Config cfg;
    cfg.geometry = ts::case_study_geometry(Variant::PRPaR);
    cfg.springs = springs();
    const std::string text = dump_config(cfg);
    const Config back = parse_config(text);
    CHECK(back.geometry.L == cfg.geometry.L);
    CHECK(back.geometry.variant == cfg.geometry.variant);
    CHECK(relative_error(back.springs.k_foot, cfg.springs.k_foot) == 0.0);
    CHECK(relative_error(back.springs.k_act, cfg.springs.k_act) < 1e-12);

    CHECK_THROWS_AS(parse_config("{not json"), DataError);
    CHECK_THROWS_AS(parse_config("{}"), DataError);

    // an intentionally asymmetric matrix fails the gate
    Config tampered = cfg;
    tampered.springs.k_foot(0, 1) += 0.5;
    CHECK_THROWS_AS(parse_config(dump_config(tampered)), DataError);
}
