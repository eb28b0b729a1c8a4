#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nbflow/mass_system.hpp"
#include "nbflow/ode.hpp"
#include "nbflow/partition.hpp"

namespace nbflow {

/// Chart coordinates on the collision-manifold boundary stratum of a
/// partition: frozen block barycenters q_ext, internal direction Q_int on the
/// internal unit sphere, rescaled radial velocity v_int, sphere-tangent
/// internal velocity X_int, and external velocity w_ext.  The radius is
/// pinned to zero; the missing unit-velocity constraint is the norm closure
///   |w_ext|^2 + |X_int|^2 + v_int^2 / W(Q_int) = 1.
struct CollisionChartState {
    Partition part;
    Matrix q_ext;
    Matrix Q_int;
    double v_int;
    Matrix X_int;
    Matrix w_ext;
};

/// Validate all chart invariants and return the state; throws DomainError
/// naming the violated invariant.
CollisionChartState make_collision_chart(const MassSystem& sys, Partition part, Matrix q_ext,
                                         Matrix Q_int, double v_int, Matrix X_int, Matrix w_ext);

/// Internal velocity reconstructed from the chart fields:
/// w_int = (v_int / sqrt(W)) Q_int + X_int.
Matrix reconstruct_internal_velocity(const MassSystem& sys, const CollisionChartState& s);

struct CollisionChartDeriv {
    double r_dot;  // identically zero: the stratum is invariant
    Matrix q_ext_dot;  // identically zero
    Matrix Q_int_dot;
    double v_int_dot;
    Matrix X_int_dot;
    Matrix w_ext_dot;
};

/// Restriction of the rescaled flow to the collision boundary stratum.
CollisionChartDeriv collision_field(const MassSystem& sys, const CollisionChartState& s);

/// Limit of the force term along q_0 + r Q as r -> 0: the mass-metric
/// gradient of the internal potential over 2 W^{1 + 1/alpha}.
Matrix internal_force_sphere(const MassSystem& sys, const Partition& part, const Matrix& Q);

/// Chart near spatial infinity with z = r^{-alpha}; z = 0 is the sphere at
/// infinity.  Q and w are unit arrays in the mass metric.
struct InfinityChartState {
    double z;
    Matrix Q;
    Matrix w;
};
struct InfinityChartDeriv {
    double z_dot;
    Matrix Q_dot;
    Matrix w_dot;
};
InfinityChartDeriv infinity_field(const MassSystem& sys, const InfinityChartState& s,
                                  double energy);

/// Flow at a cluster-at-infinity stratum: the blocks interact only through
/// the internal potential; the block-barycenter velocity is a constant of the
/// motion (not evolved here).
struct ClusterInfinityDeriv {
    Matrix q_int_dot;
    Matrix w_int_dot;
};
ClusterInfinityDeriv cluster_infinity_field(const MassSystem& sys, const Partition& part,
                                            const Matrix& q_int, const Matrix& w_int,
                                            double energy);

/// Flow on the fiber over a Hill-boundary point q0: q stays at q0 and
/// w' = F(q0) - <F(q0),w> w on the unit sphere.  Rest points are w parallel
/// and antiparallel to the potential gradient; generic orbits run from the
/// antiparallel one to the parallel one.
Matrix hill_fiber_field(const MassSystem& sys, const Matrix& q0, const Matrix& w, double energy,
                        double eta_hill = 1e-10);

/// The two rest directions on the fiber: +grad and -grad, unit mass norm.
std::pair<Matrix, Matrix> hill_rest_directions(const MassSystem& sys, const Matrix& q0);

// ---------------------------------------------------------------------------
// Two-body boundary tori.  For the reduced two-body system the three boundary
// components (collision, infinity, Hill) are tori with angles (theta, w_theta)
// and explicitly solvable flows; they serve as the oracle for the general
// fields above.

enum class TorusKind { Collision, Infinity, Hill };

struct TwoBodyTorusState {
    TorusKind torus;
    double theta;
    double w_theta;
    double energy;  // used by Infinity (E >= 0) and Hill (E < 0)
    double alpha;
};

struct AngleDeriv {
    double theta_dot;
    double w_theta_dot;
};

AngleDeriv twobody_torus_field(const TwoBodyTorusState& s);

struct AnglePair {
    double theta;
    double w_theta;
};

/// Heteroclinic solutions with w_theta(0) = theta(0) + branch * pi/2,
/// branch = +1 or -1.
AnglePair twobody_collision_closed_form(double theta0, int branch, double alpha, double tau);
AnglePair twobody_infinity_closed_form(double theta0, int branch, double energy, double tau);
AnglePair twobody_hill_closed_form(double theta0, int branch, double energy, double alpha,
                                   double tau);

/// Decay/growth rate of psi = w_theta - theta at a rest circle; the flow is
/// psi' = rate(torus) * sin(psi).
double twobody_psi_rate(TorusKind torus, double energy, double alpha);

enum class Stability { Stable, Unstable, AllRest };
const char* to_string(Stability s);

struct RestCircle {
    double psi;  // 0 or pi
    Stability stability;
    double eigenvalue;  // d(psi')/d(psi) at the circle
};

/// The rest circles {psi = 0} and {psi = pi} with their 1-D linearization.
/// An infinity torus at E = 0 consists entirely of rest points; that case is
/// reported as a single AllRest entry.
std::vector<RestCircle> classify_rest_points(TorusKind torus, double energy, double alpha);

/// True iff the two unstable orbits of a collision-torus rest point end at
/// the same stable rest point, i.e. 2/(2-alpha) is an integer m >= 2 (alpha
/// = 2(1-1/m)); only then the two-body collision regularizes uniquely.
bool collision_regularizable(double alpha, double tol = 1e-12, int* m_out = nullptr);

// ---------------------------------------------------------------------------
// Integration drivers for the boundary fields (CLI and tests).

struct TorusSample {
    double tau;
    double theta;
    double w_theta;
};
std::vector<TorusSample> integrate_torus(const TwoBodyTorusState& initial, double tau0,
                                         double tau1, int samples,
                                         const ode::StepControls& controls = {});

struct CollisionChartSample {
    double tau;
    CollisionChartState state;
};
/// Integrates the collision chart; Q_int is renormalized and X_int
/// re-orthogonalized after every accepted step.
std::vector<CollisionChartSample> integrate_collision_chart(const MassSystem& sys,
                                                            const CollisionChartState& initial,
                                                            double tau0, double tau1, int samples,
                                                            const ode::StepControls& controls = {});

struct InfinityChartSample {
    double tau;
    InfinityChartState state;
};
std::vector<InfinityChartSample> integrate_infinity_chart(const MassSystem& sys,
                                                          const InfinityChartState& initial,
                                                          double energy, double tau0, double tau1,
                                                          int samples,
                                                          const ode::StepControls& controls = {});

struct HillFiberSample {
    double tau;
    Matrix w;
};
std::vector<HillFiberSample> integrate_hill_fiber(const MassSystem& sys, const Matrix& q0,
                                                  const Matrix& w0, double energy, double tau0,
                                                  double tau1, int samples,
                                                  const ode::StepControls& controls = {});

}  // namespace nbflow
