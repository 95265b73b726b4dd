#include "pkstiff/compliance.hpp"

#include <array>
#include <string>
#include <utility>

#include "pkstiff/errors.hpp"

namespace pkstiff {

void BeamSection::validate() const {
    const double vals[] = {length,       area,          inertia_y, inertia_z,
                           polar_moment, young_modulus, shear_modulus};
    const char* names[] = {"length", "area", "inertia_y", "inertia_z",
                           "polar_moment", "young_modulus", "shear_modulus"};
    for (int i = 0; i < 7; ++i) {
        if (!(vals[i] > 0.0))
            throw InputError(std::string("BeamSection: ") + names[i] + " must be positive");
    }
}

Matrix6d beam_compliance(const BeamSection& s) {
    s.validate();
    const double L = s.length, E = s.young_modulus, G = s.shear_modulus;
    Matrix6d k = Matrix6d::Zero();
    k(0, 0) = L / (E * s.area);
    k(1, 1) = L * L * L / (3.0 * E * s.inertia_z);
    k(2, 2) = L * L * L / (3.0 * E * s.inertia_y);
    k(3, 3) = L / (G * s.polar_moment);
    k(4, 4) = L / (E * s.inertia_y);
    k(5, 5) = L / (E * s.inertia_z);
    k(2, 4) = k(4, 2) = -L * L / (2.0 * E * s.inertia_y);
    k(1, 5) = k(5, 1) = L * L / (2.0 * E * s.inertia_z);
    return k;
}

Matrix6d validate_compliance(const Matrix6d& k, double asym_tol, double psd_tol) {
    if (!k.allFinite()) throw DataError("compliance matrix has non-finite entries");
    const double asym = symmetry_error(k);
    if (asym > asym_tol)
        throw DataError("compliance matrix asymmetric beyond tolerance: " + std::to_string(asym));
    const Matrix6d sym = symmetric_part(k);
    Eigen::SelfAdjointEigenSolver<Matrix6d> eig(sym);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig < -psd_tol * sym.norm())
        throw DataError("compliance matrix not positive semi-definite, min eigenvalue = " +
                        std::to_string(min_eig));
    return sym;
}

namespace {

const std::array<std::pair<Axis, MotionKind>, 6> kSpringCoordOrder = {{
    {Axis::X, MotionKind::Translation},
    {Axis::Y, MotionKind::Translation},
    {Axis::Z, MotionKind::Translation},
    {Axis::X, MotionKind::Rotation},
    {Axis::Y, MotionKind::Rotation},
    {Axis::Z, MotionKind::Rotation},
}};

}  // namespace

Matrix6d serial_aggregate(const std::vector<std::pair<HomTransform, Matrix6d>>& segments) {
    if (segments.empty()) throw InputError("serial_aggregate: empty segment list");
    const std::size_t n = segments.size();
    // springs sit at zero deflection, so prefix/suffix products reduce to the
    // placement transforms
    std::vector<HomTransform> prefix(n);
    HomTransform acc;
    for (std::size_t i = 0; i < n; ++i) {
        acc = acc * segments[i].first;
        prefix[i] = acc;
    }
    std::vector<HomTransform> suffix(n);  // product of placements after spring i
    acc = HomTransform::identity();
    for (std::size_t i = n; i-- > 1;) {
        suffix[i - 1] = segments[i].first * acc;
        acc = suffix[i - 1];
    }
    suffix[n - 1] = HomTransform::identity();

    Matrix6d out = Matrix6d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        Matrix6d jac;  // the 6-dof spring Jacobian of segment i
        for (int j = 0; j < 6; ++j) {
            const auto& [axis, kind] = kSpringCoordOrder[j];
            jac.col(j) = chain_partial(prefix[i], elem_generator(axis, kind), suffix[i]);
        }
        out += jac * segments[i].second * jac.transpose();
    }
    return out;
}

Matrix6d invert_spd(const Matrix6d& m, double eig_tol) {
    Eigen::SelfAdjointEigenSolver<Matrix6d> eig(symmetric_part(m));
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(min_eig > eig_tol * m.norm()))
        throw NumericalError("invert_spd: matrix not positive definite, min eigenvalue = " +
                             std::to_string(min_eig));
    return eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

void SpringSet::validate() const {
    if (!(k_ctr > 0.0)) throw DataError("SpringSet: k_ctr must be positive");
    validate_compliance(k_act);
    validate_compliance(k_foot);
    validate_compliance(k_leg);
}

}  // namespace pkstiff
