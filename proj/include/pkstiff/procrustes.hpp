#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "pkstiff/linalg.hpp"

namespace pkstiff {

enum class LoadType { Force, Torque };

/// One canonical load applied to the reference body (N or N*mm).
struct LoadCase {
    LoadType type;
    int axis;          ///< 0..2
    double magnitude;  ///< nonzero

    /// Column index 0..5 in the compliance matrix (Fx Fy Fz Mx My Mz).
    int column() const { return axis + (type == LoadType::Torque ? 3 : 0); }
    Vector6d wrench() const;
};

/// Nodal displacement field of a loaded body: positions and displacements of
/// the reference-object nodes around the virtual spring centre p0.
struct DisplacementDataset {
    Vector3d p0;
    std::vector<std::pair<Vector3d, Vector3d>> nodes;  ///< (p_k, d_k), mm
    LoadCase load;

    /// >= 3 nodes, non-collinear checked downstream; magnitude nonzero.
    void validate() const;
};

/// Least-squares rigid motion d_k = R (p_k - p0) + t - (p_k - p0).
struct RigidFit {
    Vector3d t;
    Matrix3d R;
    double residual_rms;  ///< mm
};

/// Kabsch/Procrustes solution via SVD of the centered cross matrix, with the
/// det = -1 reflection corrected by flipping the smallest-sigma column.
/// Throws DataError on collinear/degenerate node clouds
/// (sigma_min/sigma_max < 1e-10).
RigidFit fit_rigid_motion(const DisplacementDataset& ds);

/// Rotation angles of a near-identity rotation, signs matching
/// elem_transform: extract(Rx(eps)) = (+eps, 0, 0). Requires
/// ||R - I||_F < 1e-2; throws RegimeError otherwise.
Vector3d small_angle_extract(const RigidFit& fit);

/// Assembles the 6x6 link compliance from six datasets covering each of
/// Fx..Mz exactly once: column j = (dp, dphi)/magnitude for load j, then
/// symmetrized and PSD-validated. Throws InputError on bad load coverage and
/// DataError when the raw matrix is asymmetric beyond 10%.
Matrix6d build_compliance(const std::array<DisplacementDataset, 6>& datasets);

/// Forward model used for round-trip validation: displacement field of a
/// rigid body on a 6-dof spring of compliance k under the given load.
DisplacementDataset synthesize_displacement_field(const Matrix6d& k, const LoadCase& load,
                                                  const std::vector<Vector3d>& node_positions,
                                                  const Vector3d& p0);

/// CSV with '#'-prefixed sidecar header lines (schema, load, p0) followed by
/// node_id,px,py,pz,dx,dy,dz rows.
DisplacementDataset read_displacement_csv(std::istream& in, const std::string& origin);
DisplacementDataset read_displacement_csv_file(const std::string& path);
void write_displacement_csv(std::ostream& out, const DisplacementDataset& ds);

}  // namespace pkstiff
