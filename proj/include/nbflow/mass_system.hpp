#pragma once

#include <Eigen/Dense>
#include <vector>

namespace nbflow {

using Matrix = Eigen::MatrixXd;  // one row per particle, d columns
using Vector = Eigen::VectorXd;

// Shared numerical floors.
inline constexpr double eps_floor = 1e-300;  // absolute floor against division by zero
inline constexpr double eps_polar = 1e-14;   // internal component below this counts as zero
inline constexpr double com_tol = 1e-12;     // center-of-mass constraint tolerance

/// Physical constants of an n-body system: particle count n, space dimension
/// d, masses m_i > 0, symmetric pair couplings Z_{i,j} > 0 (diagonal unused)
/// and the homogeneity exponent alpha in (0,2) of the pair interaction
/// Z_{i,j} / |q_i - q_j|^alpha.
class MassSystem {
public:
    MassSystem(int dim, std::vector<double> masses, Matrix couplings, double alpha);

    /// Equal masses, one coupling constant for every pair.
    static MassSystem uniform(int n, int dim, double mass, double coupling, double alpha);

    int size() const { return static_cast<int>(masses_.size()); }
    int dim() const { return dim_; }
    double mass(int i) const { return masses_[i]; }
    const Vector& masses() const { return masses_; }
    double total_mass() const { return total_mass_; }
    double coupling(int i, int j) const { return couplings_(i, j); }
    double alpha() const { return alpha_; }

    double block_mass(const std::vector<int>& block) const;

private:
    int dim_;
    Vector masses_;
    Matrix couplings_;
    double alpha_;
    double total_mass_;
};

/// A point of the center-of-mass configuration space M, stored in the ambient
/// n x d coordinates.  The weighted column sums vanish: if the input violates
/// the constraint beyond com_tol it is re-centered and the fact recorded.
class Configuration {
public:
    Configuration(const MassSystem& sys, Matrix coords);

    const Matrix& coords() const { return coords_; }
    bool recentered() const { return recentered_; }

private:
    Matrix coords_;
    bool recentered_ = false;
};

}  // namespace nbflow
