#include "nbflow/boundary.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nbflow/errors.hpp"
#include "nbflow/metric.hpp"
#include "nbflow/potential.hpp"

namespace nbflow {

namespace {

constexpr double pi = std::numbers::pi;

void check_shape(const MassSystem& sys, const Matrix& m, const char* name) {
    if (m.rows() != sys.size() || m.cols() != sys.dim())
        throw DomainError(std::string(name) + ": expected " + std::to_string(sys.size()) + " x " +
                          std::to_string(sys.dim()) + " array");
}

}  // namespace

Matrix internal_force_sphere(const MassSystem& sys, const Partition& part, const Matrix& Q) {
    SpherePotential sp = collision_sphere_potential(sys, part, Q);  // validates Q off the set
    Matrix g = grad_internal_potential_mass(sys, part, Q);
    return g / (2.0 * std::pow(sp.value, 1.0 + 1.0 / sys.alpha()));
}

Matrix reconstruct_internal_velocity(const MassSystem& sys, const CollisionChartState& s) {
    double w = internal_potential(sys, s.part, s.Q_int);
    return (s.v_int / std::sqrt(w)) * s.Q_int + s.X_int;
}

CollisionChartState make_collision_chart(const MassSystem& sys, Partition part, Matrix q_ext,
                                         Matrix Q_int, double v_int, Matrix X_int, Matrix w_ext) {
    if (part.size() != sys.size()) throw DomainError("collision chart: partition size mismatch");
    if (part == Partition::finest(sys.size()))
        throw DomainError("collision chart: the finest partition has no collision stratum");
    check_shape(sys, q_ext, "collision chart q_ext");
    check_shape(sys, Q_int, "collision chart Q_int");
    check_shape(sys, X_int, "collision chart X_int");
    check_shape(sys, w_ext, "collision chart w_ext");

    const double tol = 1e-10;
    // q_ext lives in the collision subspace: blocks sit at their barycenters,
    // and distinct blocks must not collide (that is a deeper stratum).
    Matrix q_int_part = project_internal(sys, part, q_ext);
    if (mass_norm(sys, q_int_part) > tol * (1.0 + mass_norm(sys, q_ext)))
        throw DomainError("collision chart: q_ext has a nonzero internal component");
    const auto& blocks = part.blocks();
    for (std::size_t a = 0; a < blocks.size(); ++a)
        for (std::size_t b = a + 1; b < blocks.size(); ++b)
            if ((q_ext.row(blocks[a].front()) - q_ext.row(blocks[b].front())).norm() == 0.0)
                throw DomainError(
                    "collision chart: block barycenters coincide (point belongs to a coarser "
                    "stratum)");

    if (mass_norm(sys, project_external(sys, part, Q_int)) > tol)
        throw DomainError("collision chart: Q_int is not internal");
    double ji = mass_inner(sys, Q_int, Q_int);
    if (std::abs(ji - 1.0) > tol)
        throw DomainError("collision chart: Q_int is not on the internal unit sphere (J^I = " +
                          std::to_string(ji) + ")");
    if (mass_norm(sys, project_external(sys, part, X_int)) > tol)
        throw DomainError("collision chart: X_int is not internal");
    if (std::abs(mass_inner(sys, X_int, Q_int)) > tol)
        throw DomainError("collision chart: X_int is not orthogonal to Q_int");
    if (mass_norm(sys, project_internal(sys, part, w_ext)) > tol)
        throw DomainError("collision chart: w_ext is not external");

    double w = internal_potential(sys, part, Q_int);  // throws on internal coincidence
    double closure = mass_inner(sys, w_ext, w_ext) + mass_inner(sys, X_int, X_int) +
                     v_int * v_int / w;
    if (std::abs(closure - 1.0) > 1e-9)
        throw DomainError("collision chart: norm closure |w_ext|^2 + |X_int|^2 + v_int^2/W = " +
                          std::to_string(closure) + " != 1");

    return CollisionChartState{std::move(part), std::move(q_ext), std::move(Q_int), v_int,
                               std::move(X_int), std::move(w_ext)};
}

CollisionChartDeriv collision_field(const MassSystem& sys, const CollisionChartState& s) {
    const double alpha = sys.alpha();
    const double w_val = internal_potential(sys, s.part, s.Q_int);
    if (w_val <= 0.0) throw CollisionSingularityError("collision_field: W must be positive");
    const double w_pow = std::pow(w_val, -1.0 / alpha);

    Matrix w_int = (s.v_int / std::sqrt(w_val)) * s.Q_int + s.X_int;
    Matrix fi = internal_force_sphere(sys, s.part, s.Q_int);

    CollisionChartDeriv d;
    d.r_dot = 0.0;
    d.q_ext_dot = Matrix::Zero(s.q_ext.rows(), s.q_ext.cols());
    d.Q_int_dot = w_pow * s.X_int;

    double wi2 = mass_inner(sys, w_int, w_int);
    double wiq = mass_inner(sys, w_int, s.Q_int);
    double we2 = mass_inner(sys, s.w_ext, s.w_ext);
    d.v_int_dot = std::pow(w_val, 0.5 - 1.0 / alpha) *
                  ((1.0 - alpha / 2.0) * (wi2 - wiq * wiq) - (alpha / 2.0) * we2);

    double fi_q = mass_inner(sys, fi, s.Q_int);
    double fi_wi = mass_inner(sys, fi, w_int);
    double x_wi = mass_inner(sys, s.X_int, w_int);
    d.X_int_dot = fi - fi_q * s.Q_int - (fi_wi + w_pow * wiq) * s.X_int - w_pow * x_wi * s.Q_int;

    d.w_ext_dot = -fi_wi * s.w_ext;
    return d;
}

InfinityChartDeriv infinity_field(const MassSystem& sys, const InfinityChartState& s,
                                  double energy) {
    check_shape(sys, s.Q, "infinity chart Q");
    check_shape(sys, s.w, "infinity chart w");
    if (s.z < 0.0) throw DomainError("infinity chart: z must be nonnegative");
    const double alpha = sys.alpha();
    const double uq = potential(sys, s.Q);  // throws if Q is on the collision set
    const double rho_q = std::pow(uq, -1.0 / alpha);

    // ratio = G_bar / z is regular down to z = 0.
    const double zu = s.z * uq;
    const double ratio = (energy + zu) / (1.0 + zu) * rho_q;
    const double g_bar = s.z * ratio;

    InfinityChartDeriv d;
    double qw = mass_inner(sys, s.Q, s.w);
    d.z_dot = -alpha * g_bar * qw;
    d.Q_dot = ratio * (s.w - qw * s.Q);
    Matrix f_bar =
        s.z * grad_potential_mass(sys, s.Q) / (2.0 * (1.0 + zu) * std::pow(uq, 1.0 / alpha));
    d.w_dot = f_bar - mass_inner(sys, f_bar, s.w) * s.w;
    return d;
}

ClusterInfinityDeriv cluster_infinity_field(const MassSystem& sys, const Partition& part,
                                            const Matrix& q_int, const Matrix& w_int,
                                            double energy) {
    check_shape(sys, q_int, "cluster infinity q_int");
    check_shape(sys, w_int, "cluster infinity w_int");
    if (part.size() != sys.size())
        throw DomainError("cluster_infinity_field: partition size mismatch");
    if (part == Partition::finest(sys.size()))
        throw DomainError("cluster_infinity_field: the finest partition has no internal potential");
    const double tol = 1e-10;
    if (mass_norm(sys, project_external(sys, part, q_int)) >
        tol * (1.0 + mass_norm(sys, q_int)))
        throw DomainError("cluster_infinity_field: q_int is not internal");

    const double alpha = sys.alpha();
    double ui = internal_potential(sys, part, q_int);  // throws on internal coincidence
    double denom = (1.0 + ui) * std::pow(ui, 1.0 / alpha);
    double gt = (energy + ui) / denom;
    Matrix force = grad_internal_potential_mass(sys, part, q_int) / (2.0 * denom);

    ClusterInfinityDeriv d;
    d.q_int_dot = gt * w_int;
    d.w_int_dot = force - mass_inner(sys, force, w_int) * w_int;
    return d;
}

Matrix hill_fiber_field(const MassSystem& sys, const Matrix& q0, const Matrix& w, double energy,
                        double eta_hill) {
    check_shape(sys, q0, "hill fiber q0");
    check_shape(sys, w, "hill fiber w");
    double u = potential(sys, q0);
    if (std::abs(u + energy) > eta_hill)
        throw DomainError("hill_fiber_field: U(q0) + E = " + std::to_string(u + energy) +
                          " — q0 is not on the Hill boundary");
    Matrix f = force_term(sys, q0);
    return f - mass_inner(sys, f, w) * w;
}

std::pair<Matrix, Matrix> hill_rest_directions(const MassSystem& sys, const Matrix& q0) {
    Matrix g = grad_potential_mass(sys, q0);
    double n = mass_norm(sys, g);
    if (n <= eps_floor) throw DomainError("hill_rest_directions: vanishing gradient");
    return {g / n, -g / n};
}

// --------------------------------------------------------------------------
// Two-body tori.

double twobody_psi_rate(TorusKind torus, double energy, double alpha) {
    switch (torus) {
        case TorusKind::Collision:
            return -(1.0 - alpha / 2.0);
        case TorusKind::Infinity:
            if (energy < 0.0) throw DomainError("infinity torus requires E >= 0");
            return -energy;
        case TorusKind::Hill: {
            if (energy >= 0.0) throw DomainError("hill torus requires E < 0");
            return (alpha / 2.0) / (1.0 + 1.0 / std::abs(energy));
        }
    }
    throw DomainError("unknown torus kind");
}

AngleDeriv twobody_torus_field(const TwoBodyTorusState& s) {
    const double sp = std::sin(s.w_theta - s.theta);
    switch (s.torus) {
        case TorusKind::Collision:
            return AngleDeriv{sp, (s.alpha / 2.0) * sp};
        case TorusKind::Infinity:
            if (s.energy < 0.0) throw DomainError("infinity torus requires E >= 0");
            return AngleDeriv{s.energy * sp, 0.0};
        case TorusKind::Hill:
            return AngleDeriv{0.0, twobody_psi_rate(TorusKind::Hill, s.energy, s.alpha) * sp};
    }
    throw DomainError("unknown torus kind");
}

namespace {
int check_branch(int branch) {
    if (branch != 1 && branch != -1) throw DomainError("branch must be +1 or -1");
    return branch;
}
}  // namespace

AnglePair twobody_collision_closed_form(double theta0, int branch, double alpha, double tau) {
    check_branch(branch);
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2)");
    const double k = 1.0 - alpha / 2.0;
    const double acot = std::atan(std::exp(-k * tau));  // = cot^{-1}(e^{k tau})
    AnglePair out;
    out.theta = theta0 + branch * (pi / 2.0 - 2.0 * acot) / k;
    out.w_theta = theta0 + branch * (pi / 2.0 - alpha * acot) / k;
    return out;
}

AnglePair twobody_infinity_closed_form(double theta0, int branch, double energy, double tau) {
    check_branch(branch);
    if (energy <= 0.0) throw DomainError("infinity closed form requires E > 0");
    AnglePair out;
    out.theta = theta0 + branch * (pi / 2.0 - 2.0 * std::atan(std::exp(-energy * tau)));
    out.w_theta = theta0 + branch * pi / 2.0;
    return out;
}

AnglePair twobody_hill_closed_form(double theta0, int branch, double energy, double alpha,
                                   double tau) {
    check_branch(branch);
    const double c = twobody_psi_rate(TorusKind::Hill, energy, alpha);
    AnglePair out;
    out.theta = theta0;
    // psi' = c sin(psi) with psi(0) = branch * pi/2 drives psi to branch * pi.
    out.w_theta = theta0 + branch * 2.0 * std::atan(std::exp(c * tau));
    return out;
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::AllRest: return "all-rest";
    }
    return "unknown";
}

std::vector<RestCircle> classify_rest_points(TorusKind torus, double energy, double alpha) {
    if (torus == TorusKind::Infinity && energy == 0.0)
        return {RestCircle{0.0, Stability::AllRest, 0.0}};  // the whole torus is at rest
    const double rate = twobody_psi_rate(torus, energy, alpha);
    std::vector<RestCircle> out;
    for (double psi : {0.0, pi}) {
        double eig = rate * std::cos(psi);  // psi' = rate sin(psi) linearized
        out.push_back(RestCircle{psi, eig < 0.0 ? Stability::Stable : Stability::Unstable, eig});
    }
    return out;
}

bool collision_regularizable(double alpha, double tol, int* m_out) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2)");
    double m = 2.0 / (2.0 - alpha);
    long nearest = std::lround(m);
    bool ok = nearest >= 2 && std::abs(m - static_cast<double>(nearest)) <= tol;
    if (m_out) *m_out = ok ? static_cast<int>(nearest) : 0;
    return ok;
}

// --------------------------------------------------------------------------
// Integration drivers.

namespace {

// Integrate dy = f(y) recording `samples`+1 states on a uniform tau grid.
template <class FieldFn, class Record>
void run_sampled(const FieldFn& f, Eigen::VectorXd y, double tau0, double tau1, int samples,
                 const ode::StepControls& controls, const ode::StepObserver& project,
                 const Record& record) {
    if (samples < 1) throw DomainError("samples must be >= 1");
    record(tau0, y);
    double tau = tau0;
    for (int k = 1; k <= samples; ++k) {
        double target = tau0 + (tau1 - tau0) * (static_cast<double>(k) / samples);
        auto res = ode::integrate_dopri5(f, y, tau, target, controls, project);
        y = res.y;
        tau = res.tau;
        record(tau, y);
    }
}

}  // namespace

std::vector<TorusSample> integrate_torus(const TwoBodyTorusState& initial, double tau0,
                                         double tau1, int samples,
                                         const ode::StepControls& controls) {
    TwoBodyTorusState s = initial;
    ode::Field f = [&s](const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        TwoBodyTorusState t = s;
        t.theta = y[0];
        t.w_theta = y[1];
        AngleDeriv d = twobody_torus_field(t);
        dy.resize(2);
        dy[0] = d.theta_dot;
        dy[1] = d.w_theta_dot;
    };
    std::vector<TorusSample> out;
    Eigen::VectorXd y0(2);
    y0 << initial.theta, initial.w_theta;
    run_sampled(f, y0, tau0, tau1, samples, controls, {},
                [&](double tau, const Eigen::VectorXd& y) {
                    out.push_back(TorusSample{tau, y[0], y[1]});
                });
    return out;
}

std::vector<CollisionChartSample> integrate_collision_chart(const MassSystem& sys,
                                                            const CollisionChartState& initial,
                                                            double tau0, double tau1, int samples,
                                                            const ode::StepControls& controls) {
    const int n = sys.size(), d = sys.dim(), nd = n * d;
    // Layout: [Q (nd), v, X (nd), w_ext (nd)].
    auto unpack = [&](const Eigen::VectorXd& y) {
        CollisionChartState s = initial;
        s.Q_int = Eigen::Map<const Matrix>(y.data(), n, d);
        s.v_int = y[nd];
        s.X_int = Eigen::Map<const Matrix>(y.data() + nd + 1, n, d);
        s.w_ext = Eigen::Map<const Matrix>(y.data() + 2 * nd + 1, n, d);
        return s;
    };
    ode::Field f = [&](const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        CollisionChartState s = unpack(y);
        CollisionChartDeriv der = collision_field(sys, s);
        dy.resize(y.size());
        dy.segment(0, nd) = Eigen::Map<const Eigen::VectorXd>(der.Q_int_dot.data(), nd);
        dy[nd] = der.v_int_dot;
        dy.segment(nd + 1, nd) = Eigen::Map<const Eigen::VectorXd>(der.X_int_dot.data(), nd);
        dy.segment(2 * nd + 1, nd) = Eigen::Map<const Eigen::VectorXd>(der.w_ext_dot.data(), nd);
    };
    // Keep Q on the internal unit sphere and X tangent to it.
    ode::StepObserver project = [&](double, Eigen::VectorXd& y) {
        Matrix q = Eigen::Map<const Matrix>(y.data(), n, d);
        Matrix x = Eigen::Map<const Matrix>(y.data() + nd + 1, n, d);
        q /= mass_norm(sys, q);
        x -= mass_inner(sys, x, q) * q;
        y.segment(0, nd) = Eigen::Map<const Eigen::VectorXd>(q.data(), nd);
        y.segment(nd + 1, nd) = Eigen::Map<const Eigen::VectorXd>(x.data(), nd);
        return true;
    };
    Eigen::VectorXd y0(3 * nd + 1);
    y0.segment(0, nd) = Eigen::Map<const Eigen::VectorXd>(initial.Q_int.data(), nd);
    y0[nd] = initial.v_int;
    y0.segment(nd + 1, nd) = Eigen::Map<const Eigen::VectorXd>(initial.X_int.data(), nd);
    y0.segment(2 * nd + 1, nd) = Eigen::Map<const Eigen::VectorXd>(initial.w_ext.data(), nd);

    std::vector<CollisionChartSample> out;
    run_sampled(f, y0, tau0, tau1, samples, controls, project,
                [&](double tau, const Eigen::VectorXd& y) {
                    out.push_back(CollisionChartSample{tau, unpack(y)});
                });
    return out;
}

std::vector<InfinityChartSample> integrate_infinity_chart(const MassSystem& sys,
                                                          const InfinityChartState& initial,
                                                          double energy, double tau0, double tau1,
                                                          int samples,
                                                          const ode::StepControls& controls) {
    const int n = sys.size(), d = sys.dim(), nd = n * d;
    auto unpack = [&](const Eigen::VectorXd& y) {
        InfinityChartState s;
        s.z = y[0];
        s.Q = Eigen::Map<const Matrix>(y.data() + 1, n, d);
        s.w = Eigen::Map<const Matrix>(y.data() + 1 + nd, n, d);
        return s;
    };
    ode::Field f = [&](const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        InfinityChartState s = unpack(y);
        if (s.z < 0.0) s.z = 0.0;  // trial points may dip below the boundary
        InfinityChartDeriv der = infinity_field(sys, s, energy);
        dy.resize(y.size());
        dy[0] = der.z_dot;
        dy.segment(1, nd) = Eigen::Map<const Eigen::VectorXd>(der.Q_dot.data(), nd);
        dy.segment(1 + nd, nd) = Eigen::Map<const Eigen::VectorXd>(der.w_dot.data(), nd);
    };
    ode::StepObserver project = [&](double, Eigen::VectorXd& y) {
        Matrix q = Eigen::Map<const Matrix>(y.data() + 1, n, d);
        Matrix w = Eigen::Map<const Matrix>(y.data() + 1 + nd, n, d);
        q /= mass_norm(sys, q);
        w /= mass_norm(sys, w);
        y.segment(1, nd) = Eigen::Map<const Eigen::VectorXd>(q.data(), nd);
        y.segment(1 + nd, nd) = Eigen::Map<const Eigen::VectorXd>(w.data(), nd);
        return true;
    };
    Eigen::VectorXd y0(1 + 2 * nd);
    y0[0] = initial.z;
    y0.segment(1, nd) = Eigen::Map<const Eigen::VectorXd>(initial.Q.data(), nd);
    y0.segment(1 + nd, nd) = Eigen::Map<const Eigen::VectorXd>(initial.w.data(), nd);

    std::vector<InfinityChartSample> out;
    run_sampled(f, y0, tau0, tau1, samples, controls, project,
                [&](double tau, const Eigen::VectorXd& y) {
                    out.push_back(InfinityChartSample{tau, unpack(y)});
                });
    return out;
}

std::vector<HillFiberSample> integrate_hill_fiber(const MassSystem& sys, const Matrix& q0,
                                                  const Matrix& w0, double energy, double tau0,
                                                  double tau1, int samples,
                                                  const ode::StepControls& controls) {
    const int n = sys.size(), d = sys.dim(), nd = n * d;
    // q is pinned at q0: the force only needs computing once.
    Matrix force = force_term(sys, q0);
    double u = potential(sys, q0);
    if (std::abs(u + energy) > 1e-10)
        throw DomainError("integrate_hill_fiber: q0 is not on the Hill boundary");
    ode::Field f = [&](const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        Matrix w = Eigen::Map<const Matrix>(y.data(), n, d);
        Matrix dw = force - mass_inner(sys, force, w) * w;
        dy.resize(y.size());
        dy = Eigen::Map<const Eigen::VectorXd>(dw.data(), nd);
    };
    ode::StepObserver project = [&](double, Eigen::VectorXd& y) {
        Matrix w = Eigen::Map<const Matrix>(y.data(), n, d);
        w /= mass_norm(sys, w);
        y = Eigen::Map<const Eigen::VectorXd>(w.data(), nd);
        return true;
    };
    Eigen::VectorXd y0 = Eigen::Map<const Eigen::VectorXd>(w0.data(), nd);
    std::vector<HillFiberSample> out;
    run_sampled(f, y0, tau0, tau1, samples, controls, project,
                [&](double tau, const Eigen::VectorXd& y) {
                    out.push_back(HillFiberSample{tau, Eigen::Map<const Matrix>(y.data(), n, d)});
                });
    return out;
}

}  // namespace nbflow
