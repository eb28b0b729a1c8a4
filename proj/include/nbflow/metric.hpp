#pragma once

#include "nbflow/mass_system.hpp"
#include "nbflow/partition.hpp"

namespace nbflow {

/// Mass inner product <a,b> = sum_i m_i a_i . b_i on M.
double mass_inner(const MassSystem& sys, const Matrix& a, const Matrix& b);
double mass_norm(const MassSystem& sys, const Matrix& a);

/// External (cluster-barycenter) projection: row i is the barycenter of the
/// block containing particle i.  Idempotent and self-adjoint in the mass
/// metric; its image is the collision subspace of the partition.
Matrix project_external(const MassSystem& sys, const Partition& part, const Matrix& q);

/// Internal projection, the complement: q - external.
Matrix project_internal(const MassSystem& sys, const Partition& part, const Matrix& q);

/// Momentum-side cluster coordinates: external row i is (m_i/m_[i]) p_[i]
/// with p_C the total block momentum; internal is the remainder.  Together
/// with the position-side projections this is a symplectic change of
/// coordinates.
struct MomentumSplit {
    Matrix external;
    Matrix internal;
};
MomentumSplit project_momenta(const MassSystem& sys, const Partition& part, const Matrix& p);

/// Moment of inertia J = <q,q> and its external/internal split.
struct MomentSplit {
    double total;
    double external;
    double internal;
};
MomentSplit moment_split(const MassSystem& sys, const Partition& part, const Matrix& q);

/// Dimensions d(|C|-1) and d(n-|C|) of the external and internal subspaces.
struct SubspaceDims {
    int external;
    int internal;
};
SubspaceDims subspace_dims(const Partition& part, int dim);

/// Polar decomposition of the internal component: q_int = radius * direction
/// with the direction on the internal unit sphere of the mass metric.
struct InternalPolar {
    double radius;
    Matrix direction;
};
InternalPolar polar_internal(const MassSystem& sys, const Partition& part, const Matrix& q);

/// Both sides of the Jacobi-vector identity |q|^2 = mu1 |xi1|^2 + mu2 |xi2|^2
/// for a three-particle system with xi1 = q1-q2 and xi2 the vector from the
/// {1,2} barycenter to q3.
struct JacobiSides {
    double lhs;
    double rhs;
};
JacobiSides jacobi_check_3body(const MassSystem& sys, const Matrix& q);

}  // namespace nbflow
