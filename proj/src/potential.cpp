#include "nbflow/potential.hpp"

#include <cmath>
#include <string>

#include "nbflow/errors.hpp"
#include "nbflow/metric.hpp"

namespace nbflow {

namespace {

void check_shape(const MassSystem& sys, const Matrix& m, const char* name) {
    if (m.rows() != sys.size() || m.cols() != sys.dim())
        throw DomainError(std::string(name) + ": expected " + std::to_string(sys.size()) + " x " +
                          std::to_string(sys.dim()) + " array");
}

[[noreturn]] void throw_coincident(int i, int j) {
    throw CollisionSingularityError("particles " + std::to_string(i + 1) + " and " +
                                    std::to_string(j + 1) + " coincide exactly");
}

}  // namespace

double pair_potential(double coupling, double alpha, const Eigen::RowVectorXd& z) {
    double r = z.norm();
    if (r == 0.0) throw CollisionSingularityError("pair separation is exactly zero");
    return coupling * std::pow(r, -alpha);
}

double pair_potential(const MassSystem& sys, int i, int j, const Eigen::RowVectorXd& z) {
    if (i == j || i < 0 || j < 0 || i >= sys.size() || j >= sys.size())
        throw DomainError("pair_potential: bad particle pair");
    return pair_potential(sys.coupling(i, j), sys.alpha(), z);
}

double potential(const MassSystem& sys, const Matrix& q) {
    check_shape(sys, q, "potential");
    const double alpha = sys.alpha();
    double u = 0.0;
    for (int i = 0; i < q.rows(); ++i)
        for (int j = i + 1; j < q.rows(); ++j) {
            double r = (q.row(i) - q.row(j)).norm();
            if (r == 0.0) throw_coincident(i, j);
            u += sys.coupling(i, j) * std::pow(r, -alpha);
        }
    return u;
}

Matrix grad_potential_euclidean(const MassSystem& sys, const Matrix& q) {
    check_shape(sys, q, "grad_potential");
    const double alpha = sys.alpha();
    Matrix g = Matrix::Zero(q.rows(), q.cols());
    for (int i = 0; i < q.rows(); ++i)
        for (int j = i + 1; j < q.rows(); ++j) {
            Eigen::RowVectorXd z = q.row(i) - q.row(j);
            double r = z.norm();
            if (r == 0.0) throw_coincident(i, j);
            // d/dq_i [Z r^-alpha] = -alpha Z z r^{-alpha-2}
            Eigen::RowVectorXd t = (-alpha * sys.coupling(i, j) * std::pow(r, -alpha - 2.0)) * z;
            g.row(i) += t;
            g.row(j) -= t;
        }
    return g;
}

Matrix grad_potential_mass(const MassSystem& sys, const Matrix& q) {
    Matrix g = grad_potential_euclidean(sys, q);
    for (int i = 0; i < g.rows(); ++i) g.row(i) /= sys.mass(i);
    return g;
}

double internal_potential(const MassSystem& sys, const Partition& part, const Matrix& q) {
    check_shape(sys, q, "internal_potential");
    if (part.size() != sys.size()) throw DomainError("internal_potential: partition size mismatch");
    const double alpha = sys.alpha();
    double u = 0.0;
    for (const auto& block : part.blocks())
        for (std::size_t a = 0; a < block.size(); ++a)
            for (std::size_t b = a + 1; b < block.size(); ++b) {
                int i = block[a], j = block[b];
                double r = (q.row(i) - q.row(j)).norm();
                if (r == 0.0) throw_coincident(i, j);
                u += sys.coupling(i, j) * std::pow(r, -alpha);
            }
    return u;
}

double external_potential(const MassSystem& sys, const Partition& part, const Matrix& q) {
    check_shape(sys, q, "external_potential");
    if (part.size() != sys.size()) throw DomainError("external_potential: partition size mismatch");
    const double alpha = sys.alpha();
    const auto& member = part.block_index();
    double u = 0.0;
    for (int i = 0; i < q.rows(); ++i)
        for (int j = i + 1; j < q.rows(); ++j) {
            if (member[i] == member[j]) continue;
            double r = (q.row(i) - q.row(j)).norm();
            if (r == 0.0) throw_coincident(i, j);
            u += sys.coupling(i, j) * std::pow(r, -alpha);
        }
    return u;
}

Matrix grad_internal_potential_euclidean(const MassSystem& sys, const Partition& part,
                                         const Matrix& q) {
    check_shape(sys, q, "grad_internal_potential");
    const double alpha = sys.alpha();
    Matrix g = Matrix::Zero(q.rows(), q.cols());
    for (const auto& block : part.blocks())
        for (std::size_t a = 0; a < block.size(); ++a)
            for (std::size_t b = a + 1; b < block.size(); ++b) {
                int i = block[a], j = block[b];
                Eigen::RowVectorXd z = q.row(i) - q.row(j);
                double r = z.norm();
                if (r == 0.0) throw_coincident(i, j);
                Eigen::RowVectorXd t =
                    (-alpha * sys.coupling(i, j) * std::pow(r, -alpha - 2.0)) * z;
                g.row(i) += t;
                g.row(j) -= t;
            }
    return g;
}

Matrix grad_internal_potential_mass(const MassSystem& sys, const Partition& part,
                                    const Matrix& q) {
    Matrix g = grad_internal_potential_euclidean(sys, part, q);
    for (int i = 0; i < g.rows(); ++i) g.row(i) /= sys.mass(i);
    return g;
}

EnergyBreakdown energy_breakdown(const MassSystem& sys, const Partition& part, const Matrix& q,
                                 const Matrix& p) {
    check_shape(sys, q, "energy_breakdown");
    check_shape(sys, p, "energy_breakdown");
    if (part.size() != sys.size()) throw DomainError("energy_breakdown: partition size mismatch");

    EnergyBreakdown eb;
    eb.kinetic_total = 0.0;
    for (int i = 0; i < p.rows(); ++i) eb.kinetic_total += p.row(i).squaredNorm() / (2.0 * sys.mass(i));

    MomentumSplit ps = project_momenta(sys, part, p);
    eb.kinetic_external = 0.0;
    for (const auto& block : part.blocks()) {
        Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(p.cols());
        for (int i : block) total += p.row(i);
        eb.kinetic_external += total.squaredNorm() / (2.0 * sys.block_mass(block));
    }

    const double alpha = sys.alpha();
    eb.potential_external = external_potential(sys, part, q);
    eb.potential_total = eb.potential_external;
    for (const auto& block : part.blocks()) {
        double ki = 0.0, ui = 0.0;
        for (std::size_t a = 0; a < block.size(); ++a) {
            int i = block[a];
            ki += ps.internal.row(i).squaredNorm() / (2.0 * sys.mass(i));
            for (std::size_t b = a + 1; b < block.size(); ++b) {
                int j = block[b];
                double r = (q.row(i) - q.row(j)).norm();
                if (r == 0.0)
                    throw CollisionSingularityError("particles " + std::to_string(i + 1) + " and " +
                                                    std::to_string(j + 1) + " coincide exactly");
                ui += sys.coupling(i, j) * std::pow(r, -alpha);
            }
        }
        eb.kinetic_internal.push_back(ki);
        eb.potential_internal.push_back(ui);
        eb.hamiltonian_internal.push_back(ki - ui);
        eb.potential_total += ui;
    }
    eb.hamiltonian_external = eb.kinetic_external - eb.potential_external;
    return eb;
}

double rho(const MassSystem& sys, const Matrix& q) {
    check_shape(sys, q, "rho");
    const double alpha = sys.alpha();
    double u = 0.0;
    for (int i = 0; i < q.rows(); ++i)
        for (int j = i + 1; j < q.rows(); ++j) {
            double r = (q.row(i) - q.row(j)).norm();
            if (r == 0.0) return 0.0;  // on the collision set by definition
            u += sys.coupling(i, j) * std::pow(r, -alpha);
        }
    return std::pow(u, -1.0 / alpha);
}

SpherePotential collision_sphere_potential(const MassSystem& sys, const Partition& part,
                                           const Matrix& direction) {
    check_shape(sys, direction, "collision_sphere_potential");
    if (part.size() != sys.size())
        throw DomainError("collision_sphere_potential: partition size mismatch");
    // Require the direction to miss the collision set of every refinement:
    // coincident members of a block belong to the chart of that finer partition.
    for (const auto& block : part.blocks())
        for (std::size_t a = 0; a < block.size(); ++a)
            for (std::size_t b = a + 1; b < block.size(); ++b)
                if ((direction.row(block[a]) - direction.row(block[b])).norm() == 0.0) {
                    std::vector<std::vector<int>> finer;
                    finer.push_back({block[a], block[b]});
                    for (int e = 0; e < part.size(); ++e)
                        if (e != block[a] && e != block[b]) finer.push_back({e});
                    throw CollisionSingularityError(
                        "direction lies on the internal collision set; use the chart of the finer "
                        "partition " +
                        Partition(part.size(), finer).str());
                }
    SpherePotential sp;
    sp.value = internal_potential(sys, part, direction);
    Matrix g = grad_internal_potential_mass(sys, part, direction);
    double radial = mass_inner(sys, g, direction);
    sp.sphere_gradient = g - radial * direction;
    return sp;
}

}  // namespace nbflow
