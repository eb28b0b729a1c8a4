#pragma once

#include <vector>

#include "nbflow/mass_system.hpp"
#include "nbflow/partition.hpp"

namespace nbflow {

/// Homogeneous pair interaction Z / |z|^alpha.
double pair_potential(double coupling, double alpha, const Eigen::RowVectorXd& z);
double pair_potential(const MassSystem& sys, int i, int j, const Eigen::RowVectorXd& z);

/// U(q) = sum_{i<j} Z_ij / |q_i - q_j|^alpha.  Exactly coincident particles
/// raise; near-coincident ones just give large values — switching coordinate
/// charts near collisions is the caller's business.
double potential(const MassSystem& sys, const Matrix& q);

/// Gradient of U in the plain Euclidean metric on the ambient coordinates,
/// and in the mass metric (row i divided by m_i).
Matrix grad_potential_euclidean(const MassSystem& sys, const Matrix& q);
Matrix grad_potential_mass(const MassSystem& sys, const Matrix& q);

/// Cluster-split potentials: internal sums over pairs inside a block,
/// external over pairs straddling blocks.  U = internal + external.
double internal_potential(const MassSystem& sys, const Partition& part, const Matrix& q);
double external_potential(const MassSystem& sys, const Partition& part, const Matrix& q);
Matrix grad_internal_potential_euclidean(const MassSystem& sys, const Partition& part,
                                         const Matrix& q);
Matrix grad_internal_potential_mass(const MassSystem& sys, const Partition& part, const Matrix& q);

/// Kinetic, potential and Hamiltonian cluster splittings at a phase point
/// (q, p) with p the momentum array.
struct EnergyBreakdown {
    double kinetic_total;
    double kinetic_external;
    std::vector<double> kinetic_internal;      // per block
    double potential_total;
    double potential_external;
    std::vector<double> potential_internal;    // per block
    std::vector<double> hamiltonian_internal;  // K^I_C - U^I_C per block
    double hamiltonian_external;
};
EnergyBreakdown energy_breakdown(const MassSystem& sys, const Partition& part, const Matrix& q,
                                 const Matrix& p);

/// Boundary defining function: U^{-1/alpha} off the collision set, 0 on it.
/// Total (never throws), 1-homogeneous, Lipschitz across the seam.
double rho(const MassSystem& sys, const Matrix& q);

/// Collision-sphere potential W(Q) = U^I(Q) for a direction Q on the internal
/// unit sphere, together with its sphere gradient (the tangential part of the
/// mass-metric gradient of U^I).
struct SpherePotential {
    double value;
    Matrix sphere_gradient;
};
SpherePotential collision_sphere_potential(const MassSystem& sys, const Partition& part,
                                           const Matrix& direction);

}  // namespace nbflow
