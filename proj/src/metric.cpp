#include "nbflow/metric.hpp"

#include <cmath>
#include <string>

#include "nbflow/errors.hpp"

namespace nbflow {

namespace {

void check_shape(const MassSystem& sys, const Matrix& m, const char* name) {
    if (m.rows() != sys.size() || m.cols() != sys.dim())
        throw DomainError(std::string(name) + ": expected " + std::to_string(sys.size()) + " x " +
                          std::to_string(sys.dim()) + " array, got " + std::to_string(m.rows()) +
                          " x " + std::to_string(m.cols()));
}

void check_partition(const MassSystem& sys, const Partition& part) {
    if (part.size() != sys.size())
        throw DomainError("partition of " + std::to_string(part.size()) +
                          " elements does not match system of " + std::to_string(sys.size()) +
                          " particles");
}

}  // namespace

double mass_inner(const MassSystem& sys, const Matrix& a, const Matrix& b) {
    check_shape(sys, a, "mass_inner");
    check_shape(sys, b, "mass_inner");
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i) s += sys.mass(i) * a.row(i).dot(b.row(i));
    return s;
}

double mass_norm(const MassSystem& sys, const Matrix& a) {
    return std::sqrt(mass_inner(sys, a, a));
}

Matrix project_external(const MassSystem& sys, const Partition& part, const Matrix& q) {
    check_shape(sys, q, "project_external");
    check_partition(sys, part);
    Matrix out(q.rows(), q.cols());
    for (const auto& block : part.blocks()) {
        Eigen::RowVectorXd bary = Eigen::RowVectorXd::Zero(q.cols());
        double m = 0.0;
        for (int i : block) {
            bary += sys.mass(i) * q.row(i);
            m += sys.mass(i);
        }
        bary /= m;
        for (int i : block) out.row(i) = bary;
    }
    return out;
}

Matrix project_internal(const MassSystem& sys, const Partition& part, const Matrix& q) {
    return q - project_external(sys, part, q);
}

MomentumSplit project_momenta(const MassSystem& sys, const Partition& part, const Matrix& p) {
    check_shape(sys, p, "project_momenta");
    check_partition(sys, part);
    MomentumSplit out;
    out.external.resize(p.rows(), p.cols());
    for (const auto& block : part.blocks()) {
        Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(p.cols());
        for (int i : block) total += p.row(i);
        double m = sys.block_mass(block);
        for (int i : block) out.external.row(i) = (sys.mass(i) / m) * total;
    }
    out.internal = p - out.external;
    return out;
}

MomentSplit moment_split(const MassSystem& sys, const Partition& part, const Matrix& q) {
    Matrix ext = project_external(sys, part, q);
    MomentSplit ms;
    ms.total = mass_inner(sys, q, q);
    ms.external = mass_inner(sys, ext, ext);
    Matrix internal = q - ext;
    ms.internal = mass_inner(sys, internal, internal);
    return ms;
}

SubspaceDims subspace_dims(const Partition& part, int dim) {
    SubspaceDims out;
    out.external = dim * (part.rank() - 1);
    out.internal = dim * (part.size() - part.rank());
    return out;
}

InternalPolar polar_internal(const MassSystem& sys, const Partition& part, const Matrix& q) {
    Matrix internal = project_internal(sys, part, q);
    double r = mass_norm(sys, internal);
    if (r <= eps_polar)
        throw DegeneratePolarError("polar_internal: internal component of " + part.str() +
                                   " vanishes (norm " + std::to_string(r) + ")");
    return InternalPolar{r, internal / r};
}

JacobiSides jacobi_check_3body(const MassSystem& sys, const Matrix& q) {
    if (sys.size() != 3) throw DomainError("jacobi_check_3body: needs exactly 3 particles");
    check_shape(sys, q, "jacobi_check_3body");
    const double m1 = sys.mass(0), m2 = sys.mass(1), m3 = sys.mass(2);
    Eigen::RowVectorXd xi1 = q.row(0) - q.row(1);
    Eigen::RowVectorXd xi2 = q.row(2) - (m1 * q.row(0) + m2 * q.row(1)) / (m1 + m2);
    const double mu1 = 1.0 / (1.0 / m1 + 1.0 / m2);
    const double mu2 = 1.0 / (1.0 / (m1 + m2) + 1.0 / m3);
    JacobiSides sides;
    sides.lhs = mass_inner(sys, q, q);
    sides.rhs = mu1 * xi1.squaredNorm() + mu2 * xi2.squaredNorm();
    return sides;
}

}  // namespace nbflow
