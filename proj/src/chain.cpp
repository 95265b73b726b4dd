#include "pkstiff/chain.hpp"

#include <algorithm>
#include <string>

#include "pkstiff/errors.hpp"

namespace pkstiff {

namespace {

constexpr std::pair<Axis, MotionKind> kSixDofOrder[6] = {
    {Axis::X, MotionKind::Translation}, {Axis::Y, MotionKind::Translation},
    {Axis::Z, MotionKind::Translation}, {Axis::X, MotionKind::Rotation},
    {Axis::Y, MotionKind::Rotation},    {Axis::Z, MotionKind::Rotation},
};

// One multiplicative factor of the chain product. Parameterized factors carry
// the coordinate index they differentiate against.
struct Factor {
    enum class Kind { Constant, Theta, Passive } kind;
    int coord = -1;
    Axis axis = Axis::X;
    MotionKind motion = MotionKind::Translation;
    Matrix4d value = Matrix4d::Identity();
};

std::vector<Factor> expand(const ChainSpec& spec, const ChainConfig& cfg) {
    std::vector<Factor> fs;
    int it = 0, iq = 0;
    for (const auto& el : spec.elements()) {
        if (const auto* rt = std::get_if<RigidTransform>(&el)) {
            fs.push_back({Factor::Kind::Constant, -1, Axis::X, MotionKind::Translation,
                          rt->T.matrix()});
        } else if (const auto* aj = std::get_if<ActuatedJoint>(&el)) {
            fs.push_back({Factor::Kind::Theta, it, aj->axis, aj->kind,
                          elem_transform(aj->axis, aj->kind, cfg.q0 + cfg.theta(it)).matrix()});
            ++it;
        } else if (const auto* sp = std::get_if<Spring>(&el)) {
            for (const auto& [axis, kind] : sp->coords) {
                fs.push_back({Factor::Kind::Theta, it, axis, kind,
                              elem_transform(axis, kind, cfg.theta(it)).matrix()});
                ++it;
            }
        } else if (const auto* pr = std::get_if<PassiveRotation>(&el)) {
            fs.push_back({Factor::Kind::Passive, iq, pr->axis, MotionKind::Rotation,
                          elem_transform(pr->axis, MotionKind::Rotation, cfg.q(iq)).matrix()});
            ++iq;
        } else if (const auto* pp = std::get_if<PassivePair>(&el)) {
            fs.push_back({Factor::Kind::Passive, iq, pp->first, MotionKind::Rotation,
                          elem_transform(pp->first, MotionKind::Rotation, cfg.q(iq)).matrix()});
            ++iq;
            fs.push_back({Factor::Kind::Passive, iq, pp->second, MotionKind::Rotation,
                          elem_transform(pp->second, MotionKind::Rotation, cfg.q(iq)).matrix()});
            ++iq;
        }
    }
    return fs;
}

void check_dimensions(const ChainSpec& spec, const ChainConfig& cfg) {
    if (cfg.q.size() != spec.num_passive())
        throw InputError("ChainConfig: q has length " + std::to_string(cfg.q.size()) +
                         ", chain declares " + std::to_string(spec.num_passive()));
    if (cfg.theta.size() != spec.num_theta())
        throw InputError("ChainConfig: theta has length " + std::to_string(cfg.theta.size()) +
                         ", chain declares " + std::to_string(spec.num_theta()));
}

}  // namespace

Spring Spring::six_dof(const Matrix6d& compliance6) {
    Spring s;
    s.coords.assign(std::begin(kSixDofOrder), std::end(kSixDofOrder));
    s.compliance = compliance6;
    return s;
}

Spring Spring::five_dof_no_tz(const Eigen::Matrix<double, 5, 5>& compliance5) {
    Spring s;
    for (int i = 0; i < 6; ++i) {
        if (i == 2) continue;  // drop Tz
        s.coords.push_back(kSixDofOrder[i]);
    }
    s.compliance = compliance5;
    return s;
}

ChainSpec::ChainSpec(std::vector<ChainElement> elements) : elements_(std::move(elements)) {
    for (const auto& el : elements_) {
        if (std::holds_alternative<ActuatedJoint>(el)) {
            if (has_actuated_)
                throw InputError("ChainSpec: at most one actuated joint is supported");
            has_actuated_ = true;
            ++num_theta_;
        } else if (const auto* sp = std::get_if<Spring>(&el)) {
            const auto n = static_cast<int>(sp->coords.size());
            if (sp->compliance.rows() != n || sp->compliance.cols() != n)
                throw InputError("Spring: compliance must be " + std::to_string(n) + "x" +
                                 std::to_string(n));
            num_theta_ += n;
        } else if (std::holds_alternative<PassiveRotation>(el)) {
            ++num_passive_;
        } else if (std::holds_alternative<PassivePair>(el)) {
            num_passive_ += 2;
        }
    }
}

int ChainSpec::num_passive_reduced() const {
    return reduction_ ? static_cast<int>(reduction_->cols()) : num_passive_;
}

std::vector<SpringBlock> ChainSpec::spring_blocks() const {
    std::vector<SpringBlock> blocks;
    int off = 0;
    for (const auto& el : elements_) {
        if (const auto* aj = std::get_if<ActuatedJoint>(&el)) {
            blocks.push_back({off, MatrixXd::Constant(1, 1, aj->k_ctr)});
            ++off;
        } else if (const auto* sp = std::get_if<Spring>(&el)) {
            blocks.push_back({off, sp->compliance});
            off += static_cast<int>(sp->coords.size());
        }
    }
    return blocks;
}

ChainConfig ChainConfig::rigid(const ChainSpec& spec, double q0, VectorXd q) {
    ChainConfig cfg;
    cfg.q0 = q0;
    cfg.q = std::move(q);
    cfg.theta = VectorXd::Zero(spec.num_theta());
    check_dimensions(spec, cfg);
    return cfg;
}

HomTransform forward_kinematics(const ChainSpec& spec, const ChainConfig& cfg) {
    check_dimensions(spec, cfg);
    Matrix4d m = Matrix4d::Identity();
    for (const auto& f : expand(spec, cfg)) m *= f.value;
    return HomTransform::from_parts(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

JacobianPair jacobians(const ChainSpec& spec, const ChainConfig& cfg) {
    check_dimensions(spec, cfg);
    if (cfg.theta.size() > 0 && cfg.theta.cwiseAbs().maxCoeff() != 0.0)
        throw InputError("jacobians: config must be at the rigid posture (theta = 0)");

    const auto fs = expand(spec, cfg);
    const auto n = fs.size();
    // prefix[i] = product of factors [0, i], suffix[i] = product of (i, n)
    std::vector<HomTransform> prefix(n), suffix(n + 1);
    Matrix4d acc = Matrix4d::Identity();
    for (std::size_t i = 0; i < n; ++i) {
        acc *= fs[i].value;
        prefix[i] = HomTransform::from_parts(acc.topLeftCorner<3, 3>(), acc.topRightCorner<3, 1>());
    }
    suffix[n] = HomTransform::identity();
    for (std::size_t i = n; i-- > 0;) {
        const Matrix4d m = fs[i].value * suffix[i + 1].matrix();
        suffix[i] = HomTransform::from_parts(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
    }

    JacobianPair jac;
    jac.J_theta = MatrixXd::Zero(6, spec.num_theta());
    jac.J_q = MatrixXd::Zero(6, spec.num_passive());
    for (std::size_t i = 0; i < n; ++i) {
        if (fs[i].kind == Factor::Kind::Constant) continue;
        // the nominal elementary transform commutes with its generator, so it
        // may be folded into the left factor
        const Twist6 col =
            chain_partial(prefix[i], elem_generator(fs[i].axis, fs[i].motion), suffix[i + 1]);
        if (fs[i].kind == Factor::Kind::Theta)
            jac.J_theta.col(fs[i].coord) = col;
        else
            jac.J_q.col(fs[i].coord) = col;
    }
    if (spec.passive_reduction()) jac.J_q = jac.J_q * (*spec.passive_reduction());
    return jac;
}

ChainSpec constrain_passive(const ChainSpec& spec, const std::vector<VectorXd>& relations) {
    if (relations.empty()) return spec;
    if (spec.passive_reduction())
        throw InputError("constrain_passive: spec already carries constraints");
    const int nq = spec.num_passive();
    MatrixXd rel(static_cast<int>(relations.size()), nq);
    for (std::size_t i = 0; i < relations.size(); ++i) {
        if (relations[i].size() != nq)
            throw InputError("constrain_passive: relation length must equal passive count");
        rel.row(static_cast<int>(i)) = relations[i].transpose();
    }

    // eliminate, per relation, the highest-index coordinate it touches
    std::vector<int> pivots;
    for (int r = 0; r < rel.rows(); ++r) {
        int pivot = -1;
        for (int c = nq - 1; c >= 0; --c) {
            if (std::abs(rel(r, c)) > 1e-12 &&
                std::find(pivots.begin(), pivots.end(), c) == pivots.end()) {
                pivot = c;
                break;
            }
        }
        if (pivot < 0)
            throw InputError("constrain_passive: relation " + std::to_string(r) +
                             " is degenerate or redundant");
        rel.row(r) /= rel(r, pivot);
        for (int r2 = 0; r2 < rel.rows(); ++r2)
            if (r2 != r) rel.row(r2) -= rel(r2, pivot) * rel.row(r);
        pivots.push_back(pivot);
    }

    // reduced directions: one per free coordinate, pivot coordinates follow
    MatrixXd reduction = MatrixXd::Zero(nq, nq - static_cast<int>(pivots.size()));
    int col = 0;
    for (int c = 0; c < nq; ++c) {
        if (std::find(pivots.begin(), pivots.end(), c) != pivots.end()) continue;
        reduction(c, col) = 1.0;
        for (std::size_t r = 0; r < pivots.size(); ++r)
            reduction(pivots[r], col) = -rel(static_cast<int>(r), c);
        ++col;
    }
    ChainSpec out = spec;
    out.reduction_ = reduction;
    return out;
}

}  // namespace pkstiff
