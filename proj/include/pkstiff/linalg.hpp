#pragma once

#include <Eigen/Dense>

namespace pkstiff {

using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

inline Matrix3d skew3(const Vector3d& v) {
    Matrix3d m;
    m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return m;
}

inline Vector3d vee3(const Matrix3d& w) {
    return {w(2, 1), w(0, 2), w(1, 0)};
}

/// Frobenius distance scaled by the norm of the reference (0 if both are zero).
inline double relative_error(const MatrixXd& value, const MatrixXd& reference) {
    const double n = reference.norm();
    if (n == 0.0) return value.norm();
    return (value - reference).norm() / n;
}

inline double symmetry_error(const MatrixXd& m) {
    const double n = m.norm();
    if (n == 0.0) return 0.0;
    return (m - m.transpose()).norm() / n;
}

template <typename Derived>
auto symmetric_part(const Eigen::MatrixBase<Derived>& m) {
    return ((m + m.transpose()) / 2.0).eval();
}

}  // namespace pkstiff
