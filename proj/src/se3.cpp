#include "pkstiff/se3.hpp"

#include <cmath>
#include <string>

namespace pkstiff {

HomTransform HomTransform::from_matrix(const Matrix4d& m, double tol) {
    if (!m.allFinite()) throw InputError("HomTransform: non-finite entries");
    if (m.row(3) != Eigen::RowVector4d(0, 0, 0, 1))
        throw InputError("HomTransform: bottom row must be (0,0,0,1)");
    const Matrix3d r = m.topLeftCorner<3, 3>();
    const double ortho = (r.transpose() * r - Matrix3d::Identity()).norm();
    if (ortho >= tol)
        throw InputError("HomTransform: rotation block not orthonormal, ||R^T R - I|| = " +
                         std::to_string(ortho));
    if (r.determinant() <= 0) throw InputError("HomTransform: rotation block has det <= 0");
    HomTransform out;
    out.m_ = m;
    return out;
}

HomTransform HomTransform::from_parts(const Matrix3d& rotation, const Vector3d& translation) {
    HomTransform out;
    out.m_.topLeftCorner<3, 3>() = rotation;
    out.m_.topRightCorner<3, 1>() = translation;
    return out;
}

HomTransform HomTransform::inverse() const {
    const Matrix3d rt = rotation().transpose();
    return from_parts(rt, -rt * translation());
}

HomTransform elem_transform(Axis axis, MotionKind kind, double value) {
    if (!std::isfinite(value)) throw InputError("elem_transform: non-finite value");
    const int i = static_cast<int>(axis);
    Matrix4d m = Matrix4d::Identity();
    if (kind == MotionKind::Translation) {
        m(i, 3) = value;
    } else {
        const double c = std::cos(value), s = std::sin(value);
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        m(j, j) = c;
        m(k, k) = c;
        m(j, k) = -s;
        m(k, j) = s;
    }
    HomTransform out = HomTransform::from_parts(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
    return out;
}

namespace {

DerivativeGenerator make_generator(Axis axis, MotionKind kind) {
    const int i = static_cast<int>(axis);
    Matrix4d g = Matrix4d::Zero();
    if (kind == MotionKind::Translation) {
        g(i, 3) = 1.0;
    } else {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        g(j, k) = -1.0;
        g(k, j) = 1.0;
    }
    return {g, axis, kind};
}

}  // namespace

const DerivativeGenerator& elem_generator(Axis axis, MotionKind kind) {
    static const DerivativeGenerator table[6] = {
        make_generator(Axis::X, MotionKind::Translation),
        make_generator(Axis::Y, MotionKind::Translation),
        make_generator(Axis::Z, MotionKind::Translation),
        make_generator(Axis::X, MotionKind::Rotation),
        make_generator(Axis::Y, MotionKind::Rotation),
        make_generator(Axis::Z, MotionKind::Rotation),
    };
    const int idx = static_cast<int>(axis) + (kind == MotionKind::Rotation ? 3 : 0);
    return table[idx];
}

Twist6 twist_from_derivative(const Matrix4d& tprime, double skew_tol) {
    if (!tprime.allFinite()) throw InputError("twist_from_derivative: non-finite entries");
    if (tprime.row(3).cwiseAbs().maxCoeff() > skew_tol)
        throw InputError("twist_from_derivative: bottom row not zero");
    const Matrix3d w = tprime.topLeftCorner<3, 3>();
    const double scale = std::max(1.0, w.norm());
    if ((w + w.transpose()).norm() > skew_tol * scale)
        throw InputError("twist_from_derivative: rotation block not skew-symmetric");
    Twist6 t;
    t.head<3>() = tprime.topRightCorner<3, 1>();
    t.tail<3>() = vee3((w - w.transpose()) / 2.0);
    return t;
}

Twist6 chain_partial(const HomTransform& left, const DerivativeGenerator& generator,
                     const HomTransform& right) {
    const Matrix4d tprime = left.matrix() * generator.m * right.matrix();
    // Rotation variation in world axes: W = T'_33 * R0^T, exactly skew for a
    // valid generator regardless of the end-effector orientation R0.
    const Matrix3d r0 = left.rotation() * right.rotation();
    Matrix4d corrected = Matrix4d::Zero();
    corrected.topLeftCorner<3, 3>() = tprime.topLeftCorner<3, 3>() * r0.transpose();
    corrected.topRightCorner<3, 1>() = tprime.topRightCorner<3, 1>();
    return twist_from_derivative(corrected, 1e-8);
}

}  // namespace pkstiff
