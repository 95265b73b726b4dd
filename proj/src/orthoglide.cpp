#include "pkstiff/orthoglide.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "pkstiff/compliance.hpp"
#include "pkstiff/errors.hpp"

namespace pkstiff::orthoglide {

namespace {

// cyclic base rotations: chain-local x is the actuated world axis
Matrix3d base_rotation(ChainId id) {
    Matrix3d r;
    switch (id) {
        case ChainId::X: r = Matrix3d::Identity(); break;
        case ChainId::Y: r << 0, 0, 1, 1, 0, 0, 0, 1, 0; break;
        case ChainId::Z: r << 0, 1, 0, 0, 0, 1, 1, 0, 0; break;
    }
    return r;
}

Matrix3d tool_rotation(ChainId id) {
    // inverse cyclic permutation, so that base * tool = I
    return base_rotation(id).transpose();
}

}  // namespace

void Geometry::validate() const {
    if (!(L > 0.0) || !(r > 0.0) || !(L > r))
        throw InputError("Geometry: require L > r > 0");
    if (variant == Variant::PRPaR && !(d > 0.0))
        throw InputError("Geometry: require d > 0 for the PRPaR variant");
}

void LinkCompliances::validate() const {
    if (!(k_ctr > 0.0)) throw DataError("LinkCompliances: k_ctr must be positive");
    validate_compliance(k_act);
    validate_compliance(k_foot);
    validate_compliance(k_bar);
    validate_compliance(k_axis);
}

ChainSpec build_chain(const Geometry& geom, const LinkCompliances& springs, ChainId id,
                      double plg_angle, const BuildOptions& opts) {
    geom.validate();
    const Matrix3d rb = base_rotation(id);
    const HomTransform t_base =
        HomTransform::from_parts(rb, rb * Vector3d(-geom.L - geom.r, 0, 0));
    const HomTransform t_tool =
        HomTransform::from_parts(tool_rotation(id), Vector3d(geom.r, 0, 0));

    Spring leg_spring = [&] {
        if (geom.variant == Variant::PUU) return Spring::six_dof(springs.k_bar / 2);
        ParallelogramSpec plg{geom.L, geom.d, springs.k_bar, std::nullopt};
        if (geom.axis_flexibility) plg.k_axis = springs.k_axis;
        const ParallelogramStiffness k_plg =
            geom.axis_flexibility ? parallelogram_stiffness_numeric(plg_angle, plg)
                                  : parallelogram_stiffness_analytic(plg_angle, plg);
        return regularize_for_chain_use(k_plg, opts.plg_mode, opts.kappa_f);
    }();

    std::vector<ChainElement> els;
    els.push_back(RigidTransform{t_base});
    els.push_back(ActuatedJoint{Axis::X, MotionKind::Translation, springs.k_ctr});
    els.push_back(Spring::six_dof(springs.k_act));
    // T_Foot = I: the foot spring sits at the carriage
    els.push_back(Spring::six_dof(springs.k_foot));
    els.push_back(PassivePair{Axis::Z, Axis::Y});
    els.push_back(RigidTransform{elem_transform(Axis::X, MotionKind::Translation, geom.L)});
    els.push_back(std::move(leg_spring));
    els.push_back(PassivePair{Axis::Y, Axis::Z});
    els.push_back(RigidTransform{t_tool});

    ChainSpec spec{std::move(els)};
    if (geom.variant == Variant::PRPaR) {
        VectorXd relation = VectorXd::Zero(4);
        relation(1) = 1.0;  // q2 + q3 = 0: the parallelogram forbids independent q3
        relation(2) = 1.0;
        spec = constrain_passive(spec, {relation});
    }
    return spec;
}

std::array<ChainIk, 3> inverse_kinematics(const Geometry& geom, const Vector3d& p) {
    geom.validate();
    std::array<ChainIk, 3> out;
    for (int i = 0; i < 3; ++i) {
        const Matrix3d rb = base_rotation(static_cast<ChainId>(i));
        const Vector3d pl = rb.transpose() * p;  // chain-local coordinates
        const double disc = geom.L * geom.L - pl.y() * pl.y() - pl.z() * pl.z();
        if (disc < 0)
            throw WorkspaceError("inverse_kinematics: point unreachable for chain " +
                                 std::string(1, "xyz"[i]));
        const double w = std::sqrt(disc);
        ChainIk ik;
        ik.q0 = pl.x() + geom.L - w;  // branch with q0 = 0 at the origin
        const double q2 = std::asin(-pl.z() / geom.L);
        const double planar = std::hypot(w, pl.y());
        ik.near_singular = planar < 1e-6 * geom.L;
        const double q1 = ik.near_singular ? 0.0 : std::atan2(pl.y(), w);
        ik.q = {q1, q2, -q2, -q1};
        out[static_cast<std::size_t>(i)] = ik;
    }
    return out;
}

StiffnessReport evaluate_stiffness(const Geometry& geom, const LinkCompliances& springs,
                                   const Vector3d& p, const BuildOptions& opts) {
    const auto ik = inverse_kinematics(geom, p);
    std::vector<ChainStiffness> chains;
    chains.reserve(3);
    StiffnessReport report;
    report.point = p;
    for (int i = 0; i < 3; ++i) {
        const auto id = static_cast<ChainId>(i);
        const ChainSpec spec = build_chain(geom, springs, id, ik[i].q.y(), opts);
        const ChainConfig cfg = ChainConfig::rigid(spec, ik[i].q0, ik[i].q);

        const HomTransform pose = forward_kinematics(spec, cfg);
        const double closure = (pose.matrix() - HomTransform::from_parts(
                                                    Matrix3d::Identity(), p).matrix()).norm();
        if (closure > 1e-9 * std::max(1.0, p.norm()))
            throw NumericalError("evaluate_stiffness: loop closure failed for chain " +
                                 std::string(1, "xyz"[i]));

        const JacobianPair jac = jacobians(spec, cfg);
        const Matrix6d s = cartesian_spring_compliance(spec, jac);
        chains.push_back(chain_stiffness_svd(s, jac.J_q));
        report.chain_ranks[static_cast<std::size_t>(i)] = chains.back().rank;
        report.ik_warnings[static_cast<std::size_t>(i)] = ik[i].near_singular;
    }
    const ManipulatorStiffness agg = aggregate_manipulator(std::move(chains));
    report.K_m = agg.K_m;
    report.K_tran = agg.K_m.topLeftCorner<3, 3>();
    report.rank_K_m = agg.rank();
    report.singular = report.rank_K_m < 6;
    if (!report.singular) {
        const Matrix6d c = invert_spd(agg.K_m);
        report.k_tran = c.topLeftCorner<3, 3>().trace() / 3.0;
        report.k_rot = c.bottomRightCorner<3, 3>().trace() / 3.0;
    }
    return report;
}

std::vector<std::pair<std::string, Vector3d>> singular_configs(const Geometry& geom) {
    geom.validate();
    const double flat = -geom.L / std::sqrt(6.0);
    const double bar = geom.L / std::sqrt(3.0);
    return {{"flat", Vector3d::Constant(flat)}, {"bar", Vector3d::Constant(bar)}};
}

void GridSpec::validate() const {
    for (int i = 0; i < 3; ++i) {
        if (counts[static_cast<std::size_t>(i)] < 1)
            throw InputError("GridSpec: counts must be >= 1");
        if (min(i) > max(i)) throw InputError("GridSpec: min > max");
    }
    if (total() < 1) throw InputError("GridSpec: empty grid");
}

Vector3d GridSpec::point(int ix, int iy, int iz) const {
    Vector3d p;
    const int idx[3] = {ix, iy, iz};
    for (int a = 0; a < 3; ++a) {
        const int n = counts[static_cast<std::size_t>(a)];
        p(a) = n == 1 ? min(a) : min(a) + (max(a) - min(a)) * idx[a] / (n - 1);
    }
    return p;
}

std::vector<MapRow> workspace_map(const Geometry& geom, const LinkCompliances& springs,
                                  const GridSpec& grid, const BuildOptions& opts, int workers) {
    grid.validate();
    const int total = grid.total();
    std::vector<MapRow> rows(static_cast<std::size_t>(total));
    if (workers <= 0)
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, total);

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
            const int nx = grid.counts[0], ny = grid.counts[1];
            const int ix = idx % nx, iy = (idx / nx) % ny, iz = idx / (nx * ny);
            MapRow row;
            row.point = grid.point(ix, iy, iz);
            try {
                row.report = evaluate_stiffness(geom, springs, row.point, opts);
                row.reachable = true;
            } catch (const WorkspaceError&) {
                row.reachable = false;
            }
            rows[static_cast<std::size_t>(idx)] = std::move(row);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return rows;
}

namespace {

// 1-d minimizer (golden section); objectives here are smooth and unimodal
// over the bracketed ranges
double golden_minimize(const std::function<double(double)>& f, double a, double b,
                       double tol = 1e-10) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (std::abs(b - a) > tol * (std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2;
}

}  // namespace

CalibrationResult calibrate_geometry(const LinkCompliances& springs,
                                     const CalibrationTargets& targets,
                                     const BuildOptions& opts) {
    springs.validate();
    // transmission factor 2.0 at the far cube corner: 1 + 2c/sqrt(L^2 - 2c^2) = 2
    const double L = std::sqrt(6.0) * targets.cube_far_corner;
    const Vector3d q2_point = Vector3d::Constant(targets.cube_far_corner);

    Geometry geom{L, 0.1 * L, 0.25 * L, Variant::PRPaR, false};

    auto krot_q0 = [&](double d) {
        Geometry g = geom;
        g.d = d;
        return *evaluate_stiffness(g, springs, kPointQ0, opts).k_rot;
    };
    auto fit_d = [&] {
        geom.d = golden_minimize(
            [&](double d) { return std::pow(std::log(krot_q0(d) / targets.prpar_q0_krot), 2); },
            0.05 * L, 0.8 * L);
    };
    fit_d();

    // far-corner translational compliance pins r (both variants share it)
    geom.r = golden_minimize(
        [&](double r) {
            Geometry gp = geom;
            gp.r = r;
            Geometry gu = gp;
            gu.variant = Variant::PUU;
            const double ep =
                std::log(*evaluate_stiffness(gp, springs, q2_point, opts).k_tran /
                         targets.prpar_q2_ktran);
            const double eu = std::log(*evaluate_stiffness(gu, springs, q2_point, opts).k_tran /
                                       targets.puu_q2_ktran);
            return ep * ep + eu * eu;
        },
        1.0, 0.3 * L);
    fit_d();  // d re-fit at the final r

    CalibrationResult result;
    result.geometry = geom;
    double worst = 0.0;
    const auto rel = [](double v, double t) { return std::abs(v / t - 1.0); };
    Geometry gu = geom;
    gu.variant = Variant::PUU;
    const auto rep_p = evaluate_stiffness(geom, springs, kPointQ0, opts);
    const auto rep_u = evaluate_stiffness(gu, springs, kPointQ0, opts);
    worst = std::max({rel(*rep_p.k_tran, targets.prpar_q0_ktran),
                      rel(*rep_p.k_rot, targets.prpar_q0_krot),
                      rel(*rep_u.k_tran, targets.puu_q0_ktran),
                      rel(*rep_u.k_rot, targets.puu_q0_krot)});
    result.q0_residual = worst;
    return result;
}

}  // namespace pkstiff::orthoglide
