#include "nbflow/mass_system.hpp"

#include <cmath>
#include <string>

#include "nbflow/errors.hpp"

namespace nbflow {

MassSystem::MassSystem(int dim, std::vector<double> masses, Matrix couplings, double alpha)
    : dim_(dim), alpha_(alpha) {
    const int n = static_cast<int>(masses.size());
    if (n < 2) throw DomainError("mass system: need at least 2 particles");
    if (dim < 1) throw DomainError("mass system: space dimension must be >= 1");
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError("mass system: alpha must lie in (0,2), got " + std::to_string(alpha));
    masses_ = Eigen::Map<Vector>(masses.data(), n);
    for (int i = 0; i < n; ++i)
        if (!(masses_[i] > 0.0))
            throw DomainError("mass system: mass of particle " + std::to_string(i + 1) +
                              " must be positive");
    if (couplings.rows() != n || couplings.cols() != n)
        throw DomainError("mass system: coupling table must be n x n");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double zij = couplings(i, j), zji = couplings(j, i);
            if (std::abs(zij - zji) > 1e-12 * std::max(std::abs(zij), std::abs(zji)))
                throw DomainError("mass system: couplings must be symmetric");
            if (!(zij > 0.0))
                throw DomainError("mass system: coupling Z(" + std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ") must be positive");
        }
    couplings_ = std::move(couplings);
    total_mass_ = masses_.sum();
}

MassSystem MassSystem::uniform(int n, int dim, double mass, double coupling, double alpha) {
    std::vector<double> m(n, mass);
    Matrix z = Matrix::Constant(n, n, coupling);
    return MassSystem(dim, std::move(m), std::move(z), alpha);
}

double MassSystem::block_mass(const std::vector<int>& block) const {
    double m = 0.0;
    for (int i : block) m += masses_[i];
    return m;
}

Configuration::Configuration(const MassSystem& sys, Matrix coords) {
    if (coords.rows() != sys.size() || coords.cols() != sys.dim())
        throw DomainError("configuration: expected " + std::to_string(sys.size()) + " x " +
                          std::to_string(sys.dim()) + " coordinates");
    Eigen::RowVectorXd weighted = sys.masses().transpose() * coords;  // sum_i m_i q_i
    double scale = 0.0;
    for (int i = 0; i < coords.rows(); ++i) scale += sys.mass(i) * coords.row(i).norm();
    if (weighted.norm() > com_tol * (scale + eps_floor)) {
        coords.rowwise() -= weighted / sys.total_mass();
        recentered_ = true;
    }
    coords_ = std::move(coords);
}

}  // namespace nbflow
