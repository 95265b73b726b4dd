#include "pkstiff/kinetostatics.hpp"

#include <string>

#include "pkstiff/errors.hpp"

namespace pkstiff {

Matrix6d cartesian_spring_compliance(const MatrixXd& J_theta,
                                     const std::vector<SpringBlock>& blocks) {
    if (J_theta.rows() != 6) throw InputError("cartesian_spring_compliance: J_theta must have 6 rows");
    Matrix6d s = Matrix6d::Zero();
    for (const auto& b : blocks) {
        const auto dim = b.compliance.rows();
        if (b.offset < 0 || b.offset + dim > J_theta.cols())
            throw InputError("cartesian_spring_compliance: spring block exceeds J_theta columns");
        const MatrixXd jb = J_theta.middleCols(b.offset, dim);
        s += jb * b.compliance * jb.transpose();
    }
    return symmetric_part(s);
}

Matrix6d cartesian_spring_compliance(const JacobianPair& jac, const SpringSet& springs) {
    if (jac.J_theta.cols() != 19)
        throw InputError("cartesian_spring_compliance: canonical chain needs 19 spring "
                         "coordinates (1 + 6 + 6 + 6), got " +
                         std::to_string(jac.J_theta.cols()));
    std::vector<SpringBlock> blocks;
    blocks.push_back({0, MatrixXd::Constant(1, 1, springs.k_ctr)});
    blocks.push_back({1, springs.k_act});
    blocks.push_back({7, springs.k_foot});
    blocks.push_back({13, springs.k_leg});
    return cartesian_spring_compliance(jac.J_theta, blocks);
}

Matrix6d cartesian_spring_compliance(const ChainSpec& spec, const JacobianPair& jac) {
    return cartesian_spring_compliance(jac.J_theta, spec.spring_blocks());
}

ChainStiffness chain_stiffness_svd(const Matrix6d& S, const MatrixXd& J_q, double sigma_tol) {
    if (J_q.rows() != 6) throw InputError("chain_stiffness_svd: J_q must have 6 rows");
    if (J_q.cols() > 6) throw InputError("chain_stiffness_svd: more than 6 passive directions");

    MatrixXd u_r(6, 0), u_d = MatrixXd::Identity(6, 6);
    int r = 0;
    if (J_q.cols() > 0) {
        Eigen::JacobiSVD<MatrixXd> svd(J_q, Eigen::ComputeFullU);
        const auto& sv = svd.singularValues();
        const double smax = sv.size() > 0 ? sv(0) : 0.0;
        for (int k = 0; k < sv.size(); ++k)
            if (sv(k) > sigma_tol * smax) ++r;
        u_r = svd.matrixU().leftCols(r);
        u_d = svd.matrixU().rightCols(6 - r);
    }

    ChainStiffness out;
    out.jq_rank = r;
    out.rank = 6 - r;
    out.nullspace = u_r;
    if (r == 6) {
        out.K = Matrix6d::Zero();
        return out;
    }
    const MatrixXd m = u_d.transpose() * S * u_d;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(symmetric_part(m));
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(min_eig > 1e-14 * std::max(1.0, m.norm()))) {
        const VectorXd dir = u_d * eig.eigenvectors().col(0);
        throw NumericalError(
            "chain_stiffness_svd: spring compliance degenerate along constrained direction (" +
            std::to_string(dir(0)) + ", " + std::to_string(dir(1)) + ", " + std::to_string(dir(2)) +
            ", " + std::to_string(dir(3)) + ", " + std::to_string(dir(4)) + ", " +
            std::to_string(dir(5)) + "), eigenvalue " + std::to_string(min_eig));
    }
    const MatrixXd m_inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                           eig.eigenvectors().transpose();
    out.K = symmetric_part(u_d * m_inv * u_d.transpose());
    return out;
}

Matrix6d chain_stiffness_blocksolve(const Matrix6d& S, const MatrixXd& J_q, double rank_tol) {
    if (J_q.rows() != 6) throw InputError("chain_stiffness_blocksolve: J_q must have 6 rows");
    const auto m = J_q.cols();
    if (m > 0) {
        Eigen::JacobiSVD<MatrixXd> svd(J_q);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= rank_tol * sv(0))
            throw SingularityError(
                "chain_stiffness_blocksolve: J_q is rank-deficient (singular posture); "
                "use chain_stiffness_svd");
    }
    MatrixXd block = MatrixXd::Zero(6 + m, 6 + m);
    block.topLeftCorner<6, 6>() = S;
    block.topRightCorner(6, m) = J_q;
    block.bottomLeftCorner(m, 6) = J_q.transpose();
    Eigen::FullPivLU<MatrixXd> lu(block);
    if (!lu.isInvertible())
        throw SingularityError("chain_stiffness_blocksolve: block system singular");
    const MatrixXd inv = lu.inverse();
    return symmetric_part(inv.topLeftCorner<6, 6>());
}

ChainSolution solve_chain(const ChainSpec& spec, const JacobianPair& jac, const Twist6& dt,
                          double sigma_tol) {
    const Matrix6d s = cartesian_spring_compliance(spec, jac);
    const ChainStiffness ks = chain_stiffness_svd(s, jac.J_q, sigma_tol);

    ChainSolution sol;
    sol.f = ks.K * dt;
    const auto m = jac.J_q.cols();
    sol.dq_unique = (ks.jq_rank == m);
    if (m > 0) {
        // dt - S f lies in range(J_q) by construction; least-norm solve
        Eigen::JacobiSVD<MatrixXd> svd(jac.J_q, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(sigma_tol);
        sol.dq = svd.solve(dt - s * sol.f);
    } else {
        sol.dq = VectorXd::Zero(0);
    }
    sol.tau_theta = jac.J_theta.transpose() * sol.f;
    sol.dtheta = VectorXd::Zero(jac.J_theta.cols());
    for (const auto& b : spec.spring_blocks()) {
        const auto dim = b.compliance.rows();
        sol.dtheta.segment(b.offset, dim) = b.compliance * sol.tau_theta.segment(b.offset, dim);
    }
    return sol;
}

int ManipulatorStiffness::rank(double sigma_tol) const {
    Eigen::SelfAdjointEigenSolver<Matrix6d> eig(K_m);
    const double emax = eig.eigenvalues().cwiseAbs().maxCoeff();
    int r = 0;
    for (int i = 0; i < 6; ++i)
        if (std::abs(eig.eigenvalues()(i)) > sigma_tol * emax) ++r;
    return r;
}

ManipulatorStiffness aggregate_manipulator(std::vector<ChainStiffness> chains) {
    if (chains.empty()) throw InputError("aggregate_manipulator: no chains");
    ManipulatorStiffness out;
    out.K_m = Matrix6d::Zero();
    for (const auto& c : chains) out.K_m += c.K;
    out.chains = std::move(chains);
    return out;
}

}  // namespace pkstiff
