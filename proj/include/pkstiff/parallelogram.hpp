#pragma once

#include <optional>

#include "pkstiff/chain.hpp"
#include "pkstiff/linalg.hpp"

namespace pkstiff {

/// Parallelogram leg geometry: two bars of length L separated by d, single-bar
/// compliance k_bar with x along the bar. k_axis, when set, adds the
/// flexibility of the short axis links (the extended model); each of the two
/// chains then gains a half-axis spring at both Tz(+-d/2) links.
struct ParallelogramSpec {
    double L;
    double d;
    Matrix6d k_bar;
    std::optional<Matrix6d> k_axis;

    void validate() const;
};

/// 5-dof stiffness of the parallelogram at its output point, expressed in the
/// bar-aligned frame (x along the bars). Structural zero row/column 3: the
/// coupler translation normal to the bars is absorbed by the passive joints,
/// so there is no stiffness in that direction at any angle.
struct ParallelogramStiffness {
    Matrix6d K;

    int rank(double tol = 1e-9) const;
};

/// Jacobians of the upper/lower chains w.r.t. (dq1, dq2) and the six bar
/// spring coordinates, at the output point in the parallelogram base frame.
/// The lower chain differs in the sign of d only.
struct ParallelogramJacobians {
    MatrixXd J_q_up;      ///< 6x2
    Matrix6d J_theta_up;
    MatrixXd J_q_dn;
    Matrix6d J_theta_dn;
};

ParallelogramJacobians parallelogram_jacobians(double q, double L, double d);

/// Closed-form stiffness: per chain A = J_theta^{-T} K_bar J_theta^{-1}
/// relaxed over the passive directions (2x2 solve), summed over both chains
/// and rotated into the bar-aligned frame. Exact for arbitrary SPD bar
/// matrices; reduces to the textbook sparse pattern for beam-pattern bars.
/// Throws NumericalError when k_bar is singular.
ParallelogramStiffness parallelogram_stiffness_analytic(double q, const ParallelogramSpec& spec);

/// Oracle route: builds the two serial chains explicitly, runs each through
/// the generic chain/kinetostatics machinery (each has rank-4 stiffness), and
/// sums. Honors k_axis when present.
ParallelogramStiffness parallelogram_stiffness_numeric(double q, const ParallelogramSpec& spec);

enum class PlgSpringMode {
    Fictitious,  ///< insert kappa_f at the zero (3,3) entry; compensated downstream
    Reduce5Dof,  ///< drop the Tz spring coordinate, 5x5 compliance
};

/// Default fictitious stiffness (N/mm); manipulator-level results are
/// invariant to the value because the direction is absorbed by a passive joint.
inline constexpr double kDefaultFictitiousStiffness = 1e3;

/// Row/column indices of the 5x5 restriction within the 6x6 matrix.
inline constexpr int kReduced5DofIndexMap[5] = {0, 1, 3, 4, 5};

/// Converts the rank-5 parallelogram stiffness into a virtual-spring element
/// usable inside a chain: either a 6-dof spring with a fictitious (3,3)
/// stiffness or a 5-dof spring on the non-degenerate support.
Spring regularize_for_chain_use(const ParallelogramStiffness& K, PlgSpringMode mode,
                                double kappa_f = kDefaultFictitiousStiffness);

}  // namespace pkstiff
