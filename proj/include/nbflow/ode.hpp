#pragma once

#include <Eigen/Dense>
#include <functional>

namespace nbflow::ode {

struct StepControls {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0: pick automatically
    long max_steps = 2'000'000;
    double safety = 0.9;
    double min_factor = 0.2;
    double max_factor = 5.0;
};

/// Autonomous right-hand side dy = f(y).
using Field = std::function<void(const Eigen::VectorXd& y, Eigen::VectorXd& dy)>;

/// Called after every accepted step; may project y back onto constraint
/// manifolds.  Return false to stop the integration at this point.
using StepObserver = std::function<bool(double tau, Eigen::VectorXd& y)>;

struct IntegrationResult {
    double tau;
    Eigen::VectorXd y;
    bool stopped_by_observer = false;
    long accepted = 0;
    long rejected = 0;
    double last_step = 0.0;
};

/// Embedded Dormand-Prince 5(4) pair with PI step-size control.  Integrates
/// from tau0 to tau1 (either direction); the final step is clipped to land on
/// tau1 exactly.  Throws StiffnessError on step underflow or step-count
/// exhaustion.
IntegrationResult integrate_dopri5(const Field& f, Eigen::VectorXd y0, double tau0, double tau1,
                                   const StepControls& controls = {},
                                   const StepObserver& observer = {});

}  // namespace nbflow::ode
