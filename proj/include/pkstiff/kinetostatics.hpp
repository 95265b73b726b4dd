#pragma once

#include <vector>

#include "pkstiff/chain.hpp"
#include "pkstiff/compliance.hpp"
#include "pkstiff/linalg.hpp"

namespace pkstiff {

/// Relative singular-value threshold for rank decisions (sigma > tol * sigma_max).
inline constexpr double kDefaultSigmaTol = 1e-9;

/// Spring compliance seen at the end-effector:
///   S = sum over spring blocks of J_block * k_block * J_block^T.
/// Equals J_theta * K_theta^{-1} * J_theta^T without assembling the full
/// diagonal; 6x6 work only.
Matrix6d cartesian_spring_compliance(const MatrixXd& J_theta,
                                     const std::vector<SpringBlock>& blocks);

/// Canonical-chain overload: J_theta partitioned 1 + 6 + 6 + 6 for the
/// control-loop, actuator, foot and leg springs.
Matrix6d cartesian_spring_compliance(const JacobianPair& jac, const SpringSet& springs);

/// Convenience: blocks taken from the spec's spring elements.
Matrix6d cartesian_spring_compliance(const ChainSpec& spec, const JacobianPair& jac);

/// Stiffness of one kinematic chain. K maps end-effector twist to wrench;
/// rank(K) = 6 - rank(J_q), and K annihilates the passive-motion subspace.
struct ChainStiffness {
    Matrix6d K;
    int rank;              ///< 6 - rank(J_q)
    MatrixXd nullspace;    ///< 6 x rank(J_q): motions absorbed by passive joints
    int jq_rank;
};

/// SVD solution of the per-chain kinetostatic system, valid at any posture
/// including singular ones:
///   J_q = U Sigma V^T, U = [U_r | U_d],  K = U_d (U_d^T S U_d)^{-1} U_d^T.
/// Throws NumericalError (naming the deficient direction) when U_d^T S U_d is
/// not invertible; guaranteed invertible for positive definite S.
ChainStiffness chain_stiffness_svd(const Matrix6d& S, const MatrixXd& J_q,
                                   double sigma_tol = kDefaultSigmaTol);

/// Direct route: invert the (6+m) x (6+m) block matrix [[S, J_q],[J_q^T, 0]]
/// and extract the leading 6x6 block. Requires full-column-rank J_q; throws
/// SingularityError directing the caller to the SVD path otherwise.
Matrix6d chain_stiffness_blocksolve(const Matrix6d& S, const MatrixXd& J_q,
                                    double rank_tol = kDefaultSigmaTol);

/// Full per-chain solution for a prescribed end-effector displacement.
struct ChainSolution {
    Vector6d f;          ///< wrench sustaining dt (N, N*mm)
    VectorXd dq;         ///< passive displacements (reduced coordinates)
    VectorXd tau_theta;  ///< spring reactions J_theta^T f
    VectorXd dtheta;     ///< spring deflections, blockwise k * tau
    bool dq_unique;      ///< false at singular postures (least-norm dq reported)
};

/// Solves Eq-(10)-style equilibrium: f = K dt, then J_q dq = dt - S f with the
/// minimum-norm dq when the posture is singular.
ChainSolution solve_chain(const ChainSpec& spec, const JacobianPair& jac, const Twist6& dt,
                          double sigma_tol = kDefaultSigmaTol);

struct ManipulatorStiffness {
    Matrix6d K_m;
    std::vector<ChainStiffness> chains;

    int rank(double sigma_tol = kDefaultSigmaTol) const;
};

/// Superposition over chains computed at a common end-effector pose.
ManipulatorStiffness aggregate_manipulator(std::vector<ChainStiffness> chains);

}  // namespace pkstiff
