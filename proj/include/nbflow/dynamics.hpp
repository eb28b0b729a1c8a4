#pragma once

#include <limits>
#include <vector>

#include "nbflow/mass_system.hpp"
#include "nbflow/ode.hpp"
#include "nbflow/partition.hpp"

namespace nbflow {

/// Newtonian phase point: positions in M, velocities tangent to M.
struct PhysicalState {
    Configuration q;
    Matrix v;
};

/// Rescaled phase point on the unit velocity sphere of the mass metric,
/// together with the energy of the surface it lives on.
struct RescaledState {
    Configuration q;
    Matrix w;
    double energy;
};

/// Total energy H = |v|^2/2 - U(q) of a physical state.
double hamiltonian(const MassSystem& sys, const PhysicalState& s);

/// Velocity rescaling factor G_E = (2(E+U))^{-1/2}.  Requires E + U > 0.
double speed_scale(const MassSystem& sys, const Matrix& q, double energy);

/// Time rescaling factor (E+U)/(1+U) * U^{-1/alpha}.  Vanishes exactly on the
/// Hill boundary; requires q off the collision set and E + U >= 0.
double time_scale(const MassSystem& sys, const Matrix& q, double energy);

/// Force term F = M^{-1} grad U / (2 (1+U) U^{1/alpha}); bounded near
/// collisions and tangent to M.
Matrix force_term(const MassSystem& sys, const Matrix& q);

/// Rescaled equations of motion: q' = time_scale * w, w' = F - <F,w> w.
struct FieldQW {
    Matrix q_dot;
    Matrix w_dot;
};
FieldQW rescaled_field(const MassSystem& sys, const RescaledState& s);

/// Newton's equations q' = v, v' = grad U (mass-metric gradient).
struct FieldQV {
    Matrix q_dot;
    Matrix v_dot;
};
FieldQV physical_field(const MassSystem& sys, const PhysicalState& s);

/// Change of picture: w = G_E(q) v and back.  to_rescaled checks that the
/// physical state actually has the stated energy; from_rescaled needs the
/// strict Hill interior.
RescaledState to_rescaled(const MassSystem& sys, const PhysicalState& s, double energy);
PhysicalState from_rescaled(const MassSystem& sys, const RescaledState& s);

struct IntegratorControls {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 2'000'000;
    // Event thresholds, relative to the initial state where it makes sense.
    double rho_switch_factor = 1e-6;  // collision event at rho < factor * rho(q0)
    double r_max_factor = 1e6;        // escape event at |q| > factor * |q0|
    double eta_hill = 1e-10;          // Hill event at E + U < eta_hill
    double t_target = std::numeric_limits<double>::infinity();  // stop at physical time
    bool renormalize_w = true;  // project w back to the unit sphere each step
    double initial_step = 0.0;
};

enum class StopReason { SpanEnd, CollisionEvent, EscapeEvent, HillEvent, TimeTarget };
const char* to_string(StopReason r);

struct TrajectorySample {
    double tau;
    RescaledState state;
    double t;  // accumulated physical time
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    StopReason reason = StopReason::SpanEnd;
    struct Stats {
        long accepted = 0;
        long rejected = 0;
        double max_w_drift = 0.0;  // max ||w|-1| seen before renormalization
        double last_step = 0.0;
        double rho_switch = 0.0;
        double r_max = 0.0;
    } stats;
};

/// Integrate the rescaled flow over [tau0, tau1], accumulating physical time
/// via dt/dtau as an extra state component.  Samples every accepted step.
Trajectory integrate(const MassSystem& sys, const RescaledState& initial, double tau0, double tau1,
                     const IntegratorControls& controls = {});

}  // namespace nbflow
