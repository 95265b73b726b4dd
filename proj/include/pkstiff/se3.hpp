#pragma once

#include "pkstiff/errors.hpp"
#include "pkstiff/linalg.hpp"

namespace pkstiff {

enum class Axis { X = 0, Y = 1, Z = 2 };
enum class MotionKind { Translation, Rotation };

/// 4x4 homogeneous transform. Lengths in mm, angles in rad.
///
/// Invariants: bottom row exactly (0,0,0,1); rotation block orthonormal
/// (||R^T R - I||_F < 1e-10, det > 0). Factory functions preserve them;
/// from_matrix() checks them on untrusted input.
class HomTransform {
public:
    HomTransform() : m_(Matrix4d::Identity()) {}

    static HomTransform identity() { return HomTransform(); }

    /// Validates structure; throws InputError on a non-rigid matrix.
    static HomTransform from_matrix(const Matrix4d& m, double tol = 1e-10);

    /// Trusted constructor from a rotation and a translation.
    static HomTransform from_parts(const Matrix3d& rotation, const Vector3d& translation);

    const Matrix4d& matrix() const { return m_; }
    Matrix3d rotation() const { return m_.topLeftCorner<3, 3>(); }
    Vector3d translation() const { return m_.topRightCorner<3, 1>(); }

    HomTransform operator*(const HomTransform& rhs) const {
        HomTransform out;
        out.m_ = m_ * rhs.m_;
        out.m_.row(3) << 0, 0, 0, 1;  // keep the bottom row exact
        return out;
    }

    /// Rigid inverse (R^T, -R^T t); never forms a general 4x4 inverse.
    HomTransform inverse() const;

private:
    Matrix4d m_;
};

/// One of the six constant derivative generators of the elementary transforms.
struct DerivativeGenerator {
    Matrix4d m;
    Axis axis;
    MotionKind kind;
};

/// End-effector variation: (dpx, dpy, dpz) mm, (dphx, dphy, dphz) rad.
using Twist6 = Vector6d;

/// Elementary translation or rotation about a coordinate axis.
/// Composition of inverse kinds yields identity: elem(a,k,v)*elem(a,k,-v) = I.
HomTransform elem_transform(Axis axis, MotionKind kind, double value);

/// Constant generator G with d/dv elem_transform(axis,kind,v) = elem(v)*G = G*elem(v).
/// Rotation generators use the conventional skew pattern (Rz' has +1 at (1,0)).
const DerivativeGenerator& elem_generator(Axis axis, MotionKind kind);

/// Extracts the twist from a pose-derivative matrix whose rotation block is
/// skew-symmetric (the case R0 = I). Angular part reads (W21, W02, W10), i.e.
/// phi'_z comes from T'(1,0); the printed transpose convention is not used --
/// this is the convention under which the result matches finite differences
/// of actual rotation products.
Twist6 twist_from_derivative(const Matrix4d& tprime, double skew_tol = 1e-8);

/// Jacobian column for the joint whose generator sits between left and right:
/// T' = left * G * right. Handles arbitrary end-effector orientation by
/// reading the angular part from T' R0^T (R0 = rotation of left*right).
Twist6 chain_partial(const HomTransform& left, const DerivativeGenerator& generator,
                     const HomTransform& right);

}  // namespace pkstiff
