#pragma once

#include <utility>
#include <vector>

#include "pkstiff/linalg.hpp"
#include "pkstiff/se3.hpp"

namespace pkstiff {

/// Euler-Bernoulli beam section. Lengths mm, areas mm^2, moments mm^4,
/// moduli N/mm^2.
struct BeamSection {
    double length;        ///< L
    double area;          ///< A
    double inertia_y;     ///< Iy
    double inertia_z;     ///< Iz
    double polar_moment;  ///< J
    double young_modulus; ///< E
    double shear_modulus; ///< G

    void validate() const;  // all strictly positive
};

/// 6x6 compliance of a cantilever beam, spring placed at the free end, x along
/// the beam. Nonzero entries:
///   k11 = L/EA            k22 = L^3/3EIz    k33 = L^3/3EIy
///   k44 = L/GJ            k55 = L/EIy       k66 = L/EIz
///   k35 = -L^2/2EIy       k26 = L^2/2EIz    (plus symmetric partners)
Matrix6d beam_compliance(const BeamSection& section);

/// Gate for externally supplied 6x6 compliance matrices. Symmetrizes when the
/// relative asymmetry is below asym_tol, then requires eigenvalues
/// >= -psd_tol * ||k||. Throws DataError otherwise.
Matrix6d validate_compliance(const Matrix6d& k, double asym_tol = 1e-6, double psd_tol = 1e-9);

/// Compliance at the end of a passive-joint-free serial chain of 6-dof
/// springs: chain = placement_1 * spring_1 * ... * placement_n * spring_n,
/// result = sum_i J_i k_i J_i^T with J_i the spring-to-output twist map.
Matrix6d serial_aggregate(const std::vector<std::pair<HomTransform, Matrix6d>>& segments);

/// Inverse of a symmetric positive definite matrix. Requires the smallest
/// eigenvalue > eig_tol * ||m||; throws NumericalError naming the offending
/// eigenvalue otherwise.
Matrix6d invert_spd(const Matrix6d& m, double eig_tol = 1e-14);

/// Per-chain spring data of the canonical model: scalar control-loop
/// compliance plus the actuator / foot / leg 6x6 compliance matrices.
struct SpringSet {
    double k_ctr;     ///< mm/N
    Matrix6d k_act;
    Matrix6d k_foot;
    Matrix6d k_leg;

    void validate() const;
};

}  // namespace pkstiff
