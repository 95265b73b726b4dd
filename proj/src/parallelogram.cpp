#include "pkstiff/parallelogram.hpp"

#include <cmath>
#include <numbers>

#include "pkstiff/compliance.hpp"
#include "pkstiff/errors.hpp"
#include "pkstiff/kinetostatics.hpp"

namespace pkstiff {

void ParallelogramSpec::validate() const {
    if (!(L > 0.0)) throw InputError("ParallelogramSpec: L must be positive");
    if (!(d > 0.0)) throw InputError("ParallelogramSpec: d must be positive");
}

int ParallelogramStiffness::rank(double tol) const {
    Eigen::SelfAdjointEigenSolver<Matrix6d> eig(K);
    const double emax = eig.eigenvalues().cwiseAbs().maxCoeff();
    int r = 0;
    for (int i = 0; i < 6; ++i)
        if (std::abs(eig.eigenvalues()(i)) > tol * emax) ++r;
    return r;
}

namespace {

void check_state(double q) {
    if (!(std::abs(q) < std::numbers::pi / 2))
        throw InputError("parallelogram: |q| must be < pi/2");
}

MatrixXd jq_chain(double q, double L, double dd) {
    const double c = std::cos(q), s = std::sin(q);
    MatrixXd j(6, 2);
    j.col(0) << -L * s + dd / 2, 0, -L * c, 0, 1, 0;
    j.col(1) << dd / 2, 0, 0, 0, 1, 0;
    return j;
}

Matrix6d jtheta_chain(double q, double dd) {
    // spring at the bar end: orientation Ry(q), offset (0, 0, dd/2) to output
    const Matrix3d r = elem_transform(Axis::Y, MotionKind::Rotation, q).rotation();
    const Vector3d offset(0, 0, dd / 2);
    Matrix6d j;
    j.topLeftCorner<3, 3>() = r;
    j.topRightCorner<3, 3>() = -skew3(offset) * r;
    j.bottomLeftCorner<3, 3>() = Matrix3d::Zero();
    j.bottomRightCorner<3, 3>() = r;
    return j;
}

Matrix6d rotate_to_bar_frame(const Matrix6d& k_base, double q) {
    const Matrix3d rt = elem_transform(Axis::Y, MotionKind::Rotation, q).rotation().transpose();
    Matrix6d b = Matrix6d::Zero();
    b.topLeftCorner<3, 3>() = rt;
    b.bottomRightCorner<3, 3>() = rt;
    return symmetric_part(b * k_base * b.transpose());
}

}  // namespace

ParallelogramJacobians parallelogram_jacobians(double q, double L, double d) {
    ParallelogramJacobians out;
    out.J_q_up = jq_chain(q, L, d);
    out.J_theta_up = jtheta_chain(q, d);
    out.J_q_dn = jq_chain(q, L, -d);
    out.J_theta_dn = jtheta_chain(q, -d);
    return out;
}

ParallelogramStiffness parallelogram_stiffness_analytic(double q, const ParallelogramSpec& spec) {
    spec.validate();
    check_state(q);
    const Matrix6d k_bar_stiff = invert_spd(spec.k_bar);  // throws on singular k_bar

    Matrix6d total = Matrix6d::Zero();
    const Matrix3d r = elem_transform(Axis::Y, MotionKind::Rotation, q).rotation();
    for (const double dd : {spec.d, -spec.d}) {
        // closed-form inverse of the spring adjoint
        const Vector3d offset(0, 0, dd / 2);
        Matrix6d jti;
        jti.topLeftCorner<3, 3>() = r.transpose();
        jti.topRightCorner<3, 3>() = r.transpose() * skew3(offset);
        jti.bottomLeftCorner<3, 3>() = Matrix3d::Zero();
        jti.bottomRightCorner<3, 3>() = r.transpose();
        const Matrix6d a = jti.transpose() * k_bar_stiff * jti;

        // relax over the two passive rotations: K = A - A J (J^T A J)^{-1} J^T A
        const MatrixXd j = jq_chain(q, spec.L, dd);
        const Eigen::Matrix2d m = j.transpose() * a * j;
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        Eigen::Matrix2d mi;
        mi << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
        mi /= det;
        total += a - a * j * mi * j.transpose() * a;
    }
    return {rotate_to_bar_frame(total, q)};
}

ParallelogramStiffness parallelogram_stiffness_numeric(double q, const ParallelogramSpec& spec) {
    spec.validate();
    check_state(q);
    Matrix6d total = Matrix6d::Zero();
    for (const double dd : {spec.d, -spec.d}) {
        std::vector<ChainElement> els;
        els.push_back(RigidTransform{elem_transform(Axis::Z, MotionKind::Translation, -dd / 2)});
        if (spec.k_axis)
            els.push_back(Spring::six_dof(*spec.k_axis / 2));  // half-axis segment
        els.push_back(PassiveRotation{Axis::Y});
        els.push_back(RigidTransform{elem_transform(Axis::X, MotionKind::Translation, spec.L)});
        els.push_back(Spring::six_dof(spec.k_bar));
        els.push_back(PassiveRotation{Axis::Y});
        els.push_back(RigidTransform{elem_transform(Axis::Z, MotionKind::Translation, dd / 2)});
        if (spec.k_axis)
            els.push_back(Spring::six_dof(*spec.k_axis / 2));

        const ChainSpec chain{std::move(els)};
        VectorXd qv(2);
        qv << q, -q;
        const ChainConfig cfg = ChainConfig::rigid(chain, 0.0, qv);
        const JacobianPair jac = jacobians(chain, cfg);
        const Matrix6d s = cartesian_spring_compliance(chain, jac);
        total += chain_stiffness_svd(s, jac.J_q).K;
    }
    return {rotate_to_bar_frame(total, q)};
}

Spring regularize_for_chain_use(const ParallelogramStiffness& K, PlgSpringMode mode,
                                double kappa_f) {
    if (mode == PlgSpringMode::Fictitious) {
        if (!(kappa_f > 0.0)) throw InputError("regularize_for_chain_use: kappa_f must be positive");
        Matrix6d k = K.K;
        k(2, 2) += kappa_f;
        return Spring::six_dof(invert_spd(k));
    }
    Eigen::Matrix<double, 5, 5> restricted;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            restricted(i, j) = K.K(kReduced5DofIndexMap[i], kReduced5DofIndexMap[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> eig(restricted);
    if (!(eig.eigenvalues().minCoeff() > 1e-14 * restricted.norm()))
        throw NumericalError("regularize_for_chain_use: 5x5 restriction not positive definite");
    const Eigen::Matrix<double, 5, 5> inv = eig.eigenvectors() *
                                            eig.eigenvalues().cwiseInverse().asDiagonal() *
                                            eig.eigenvectors().transpose();
    return Spring::five_dof_no_tz(inv);
}

}  // namespace pkstiff
