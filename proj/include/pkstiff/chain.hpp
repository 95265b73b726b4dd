#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "pkstiff/linalg.hpp"
#include "pkstiff/se3.hpp"

namespace pkstiff {

/// Constant link transform.
struct RigidTransform {
    HomTransform T;
};

/// 1-dof actuated joint housing the actuated coordinate q0 and the
/// control-loop virtual spring theta0; their motions add along the same axis.
struct ActuatedJoint {
    Axis axis;
    MotionKind kind;
    double k_ctr = 1.0;  ///< control-loop compliance (mm/N or rad/(N*mm))
};

/// Multi-dof virtual spring: an ordered run of elementary coordinates with a
/// matching square compliance matrix. The canonical 6-dof spring uses the
/// order Tx Ty Tz Rx Ry Rz.
struct Spring {
    std::vector<std::pair<Axis, MotionKind>> coords;
    MatrixXd compliance;  ///< coords.size() x coords.size()

    static Spring six_dof(const Matrix6d& compliance6);
    /// 5-dof spring skipping the Tz coordinate (order Tx Ty Rx Ry Rz).
    static Spring five_dof_no_tz(const Eigen::Matrix<double, 5, 5>& compliance5);
};

/// Unactuated 1-dof rotation; houses one passive coordinate.
struct PassiveRotation {
    Axis axis;
};

/// U-joint: two successive passive rotations about the given axes.
struct PassivePair {
    Axis first;
    Axis second;
};

using ChainElement =
    std::variant<RigidTransform, ActuatedJoint, Spring, PassiveRotation, PassivePair>;

/// One spring block of the chain: its column offset into J_theta and its
/// compliance (1x1 for the actuated joint's control loop).
struct SpringBlock {
    int offset;
    MatrixXd compliance;
};

/// Declarative serial chain: the ordered element list of the geometric model.
/// Immutable after construction; evaluation functions are pure.
class ChainSpec {
public:
    explicit ChainSpec(std::vector<ChainElement> elements);

    const std::vector<ChainElement>& elements() const { return elements_; }
    int num_theta() const { return num_theta_; }
    /// Count of raw passive coordinates (before any linear constraints).
    int num_passive() const { return num_passive_; }
    /// Count of independent passive directions (columns of J_q).
    int num_passive_reduced() const;
    bool has_actuated_joint() const { return has_actuated_; }

    /// Maps reduced passive directions to raw passive coordinates; identity
    /// when no constraints are installed.
    const std::optional<MatrixXd>& passive_reduction() const { return reduction_; }

    std::vector<SpringBlock> spring_blocks() const;

private:
    friend ChainSpec constrain_passive(const ChainSpec&, const std::vector<VectorXd>&);

    std::vector<ChainElement> elements_;
    std::optional<MatrixXd> reduction_;
    int num_theta_ = 0;
    int num_passive_ = 0;
    bool has_actuated_ = false;
};

/// Chain coordinates. theta holds all virtual-spring coordinates including
/// theta0 (first when an actuated joint is present); q holds raw passive
/// coordinates in element order. The rigid posture has theta = 0.
struct ChainConfig {
    double q0 = 0.0;
    VectorXd q;
    VectorXd theta;

    /// Rigid posture (theta = 0) at the given actuated/passive values.
    static ChainConfig rigid(const ChainSpec& spec, double q0, VectorXd q);
};

/// Product of all element transforms in declared order.
HomTransform forward_kinematics(const ChainSpec& spec, const ChainConfig& cfg);

struct JacobianPair {
    MatrixXd J_theta;  ///< 6 x num_theta
    MatrixXd J_q;      ///< 6 x num_passive_reduced
};

/// Differential model at the rigid posture: J_theta columns are the spring
/// partials at theta = 0, J_q columns the passive partials around the nominal
/// q. Refuses configs with nonzero theta (linearizing off the rigid posture
/// would be silent otherwise). The actuated coordinate's derivative appears
/// as the first J_theta column via theta0, not in J_q.
JacobianPair jacobians(const ChainSpec& spec, const ChainConfig& cfg);

/// Installs homogeneous linear relations among the raw passive coordinates
/// (each relation: coefficients c with c . q = 0). J_q columns of the result
/// are the constrained combinations; for q2 + q3 = 0 the column kept for q2
/// becomes d/dq2 - d/dq3. Throws InputError on degenerate or redundant
/// relation sets.
ChainSpec constrain_passive(const ChainSpec& spec, const std::vector<VectorXd>& relations);

}  // namespace pkstiff
