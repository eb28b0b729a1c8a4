#include "nbflow/dynamics.hpp"

#include <cmath>
#include <string>

#include "nbflow/errors.hpp"
#include "nbflow/metric.hpp"
#include "nbflow/potential.hpp"

namespace nbflow {

double hamiltonian(const MassSystem& sys, const PhysicalState& s) {
    return 0.5 * mass_inner(sys, s.v, s.v) - potential(sys, s.q.coords());
}

double speed_scale(const MassSystem& sys, const Matrix& q, double energy) {
    double s = energy + potential(sys, q);
    if (s <= 0.0)
        throw HillBoundaryError("speed_scale: E + U = " + std::to_string(s) +
                                " is not positive (outside the Hill interior)");
    return 1.0 / std::sqrt(2.0 * s);
}

double time_scale(const MassSystem& sys, const Matrix& q, double energy) {
    double u = potential(sys, q);
    double s = energy + u;
    if (s < 0.0)
        throw HillBoundaryError("time_scale: E + U = " + std::to_string(s) +
                                " is negative (outside the Hill region)");
    return s / (1.0 + u) * std::pow(u, -1.0 / sys.alpha());
}

Matrix force_term(const MassSystem& sys, const Matrix& q) {
    double u = potential(sys, q);
    Matrix g = grad_potential_mass(sys, q);
    return g / (2.0 * (1.0 + u) * std::pow(u, 1.0 / sys.alpha()));
}

FieldQW rescaled_field(const MassSystem& sys, const RescaledState& s) {
    const Matrix& q = s.q.coords();
    FieldQW f;
    f.q_dot = time_scale(sys, q, s.energy) * s.w;
    Matrix force = force_term(sys, q);
    f.w_dot = force - mass_inner(sys, force, s.w) * s.w;
    return f;
}

FieldQV physical_field(const MassSystem& sys, const PhysicalState& s) {
    FieldQV f;
    f.q_dot = s.v;
    f.v_dot = grad_potential_mass(sys, s.q.coords());
    return f;
}

RescaledState to_rescaled(const MassSystem& sys, const PhysicalState& s, double energy) {
    double h = hamiltonian(sys, s);
    if (std::abs(h - energy) > 1e-9 * (1.0 + std::abs(energy)))
        throw ConsistencyError("to_rescaled: physical state has H = " + std::to_string(h) +
                               ", not the stated energy " + std::to_string(energy));
    Matrix w = speed_scale(sys, s.q.coords(), energy) * s.v;
    double nw = mass_norm(sys, w);
    if (nw <= eps_floor)
        throw HillBoundaryError("to_rescaled: zero velocity only occurs on the Hill boundary");
    return RescaledState{s.q, w / nw, energy};
}

PhysicalState from_rescaled(const MassSystem& sys, const RescaledState& s) {
    double g = speed_scale(sys, s.q.coords(), s.energy);  // throws on the Hill boundary
    return PhysicalState{s.q, s.w / g};
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::SpanEnd: return "span-end";
        case StopReason::CollisionEvent: return "collision-event";
        case StopReason::EscapeEvent: return "escape-event";
        case StopReason::HillEvent: return "hill-event";
        case StopReason::TimeTarget: return "time-target";
    }
    return "unknown";
}

Trajectory integrate(const MassSystem& sys, const RescaledState& initial, double tau0, double tau1,
                     const IntegratorControls& controls) {
    const int n = sys.size(), d = sys.dim(), nd = n * d;
    const double energy = initial.energy;
    const double alpha = sys.alpha();

    Trajectory traj;
    traj.stats.rho_switch = controls.rho_switch_factor * rho(sys, initial.q.coords());
    traj.stats.r_max = controls.r_max_factor * mass_norm(sys, initial.q.coords());

    // State layout: [q (n*d), w (n*d), t].
    Eigen::VectorXd y0(2 * nd + 1);
    y0.segment(0, nd) = Eigen::Map<const Eigen::VectorXd>(initial.q.coords().data(), nd);
    y0.segment(nd, nd) = Eigen::Map<const Eigen::VectorXd>(initial.w.data(), nd);
    y0[2 * nd] = 0.0;

    auto unpack_q = [&](const Eigen::VectorXd& y) {
        return Matrix(Eigen::Map<const Matrix>(y.data(), n, d));
    };
    auto unpack_w = [&](const Eigen::VectorXd& y) {
        return Matrix(Eigen::Map<const Matrix>(y.data() + nd, n, d));
    };

    ode::Field field = [&](const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        Matrix q = unpack_q(y), w = unpack_w(y);
        double u = potential(sys, q);
        double s = std::max(energy + u, 0.0);  // trial points may overshoot the Hill boundary
        double rho_q = std::pow(u, -1.0 / alpha);
        double gt = s / (1.0 + u) * rho_q;
        Matrix force = grad_potential_mass(sys, q) / (2.0 * (1.0 + u) * std::pow(u, 1.0 / alpha));
        Matrix dq = gt * w;
        Matrix dw = force - mass_inner(sys, force, w) * w;
        dy.resize(y.size());
        dy.segment(0, nd) = Eigen::Map<const Eigen::VectorXd>(dq.data(), nd);
        dy.segment(nd, nd) = Eigen::Map<const Eigen::VectorXd>(dw.data(), nd);
        dy[2 * nd] = std::sqrt(0.5 * s) * rho_q / (1.0 + u);  // dt/dtau
    };

    auto record = [&](double tau, const Eigen::VectorXd& y) {
        traj.samples.push_back(TrajectorySample{
            tau, RescaledState{Configuration(sys, unpack_q(y)), unpack_w(y), energy}, y[2 * nd]});
    };

    ode::StepObserver observer = [&](double tau, Eigen::VectorXd& y) {
        Matrix w = unpack_w(y);
        double nw = mass_norm(sys, w);
        traj.stats.max_w_drift = std::max(traj.stats.max_w_drift, std::abs(nw - 1.0));
        if (controls.renormalize_w && nw > eps_floor) {
            w /= nw;
            y.segment(nd, nd) = Eigen::Map<const Eigen::VectorXd>(w.data(), nd);
        }
        record(tau, y);
        Matrix q = unpack_q(y);
        double rho_q = rho(sys, q);
        if (rho_q < traj.stats.rho_switch) {
            traj.reason = StopReason::CollisionEvent;
            return false;
        }
        if (mass_norm(sys, q) > traj.stats.r_max) {
            traj.reason = StopReason::EscapeEvent;
            return false;
        }
        if (energy + potential(sys, q) < controls.eta_hill) {
            traj.reason = StopReason::HillEvent;
            return false;
        }
        if (y[2 * nd] >= controls.t_target) {
            traj.reason = StopReason::TimeTarget;
            return false;
        }
        return true;
    };

    ode::StepControls sc;
    sc.rel_tol = controls.rel_tol;
    sc.abs_tol = controls.abs_tol;
    sc.max_steps = controls.max_steps;
    sc.initial_step = controls.initial_step;

    record(tau0, y0);
    try {
        auto res = ode::integrate_dopri5(field, y0, tau0, tau1, sc, observer);
        traj.stats.accepted = res.accepted;
        traj.stats.rejected = res.rejected;
        traj.stats.last_step = res.last_step;
        if (!res.stopped_by_observer) traj.reason = StopReason::SpanEnd;
    } catch (const StiffnessError& e) {
        double t_reached = traj.samples.empty() ? 0.0 : traj.samples.back().t;
        throw StiffnessError(std::string(e.what()) + " (reached t=" + std::to_string(t_reached) +
                                 ", " + std::to_string(traj.samples.size()) + " samples kept)",
                             e.tau, t_reached);
    }
    return traj;
}

}  // namespace nbflow
