#include "nbflow/ode.hpp"

#include <algorithm>
#include <cmath>

#include "nbflow/errors.hpp"

namespace nbflow::ode {

namespace {

// Dormand-Prince coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the 5th and the embedded 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0,
                  const Eigen::VectorXd& y1, double rel, double abs) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        double sk = abs + rel * std::max(std::abs(y0[i]), std::abs(y1[i]));
        double q = err[i] / sk;
        s += q * q;
    }
    return std::sqrt(s / static_cast<double>(err.size()));
}

}  // namespace

IntegrationResult integrate_dopri5(const Field& f, Eigen::VectorXd y0, double tau0, double tau1,
                                   const StepControls& c, const StepObserver& observer) {
    IntegrationResult res;
    res.tau = tau0;
    res.y = std::move(y0);
    if (tau1 == tau0) return res;
    const double dir = tau1 > tau0 ? 1.0 : -1.0;
    const double span = std::abs(tau1 - tau0);
    const Eigen::Index n = res.y.size();

    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), y5(n), err(n);
    f(res.y, k1);

    double h = c.initial_step;
    if (h == 0.0) {
        double fy = k1.norm(), yy = res.y.norm();
        h = 0.01 * std::max(yy, 1.0) / std::max(fy, 1e-6);
        h = std::min(h, span / 10.0);
        h = std::max(h, span * 1e-12);
    }
    h = std::min(std::abs(h), span) * dir;

    const double h_floor = span * 1e-15;
    double err_old = 1e-4;
    bool fsal_valid = true;

    while (dir * (tau1 - res.tau) > 0.0) {
        if (res.accepted + res.rejected >= c.max_steps)
            throw StiffnessError("integration exceeded max_steps=" + std::to_string(c.max_steps) +
                                     " at tau=" + std::to_string(res.tau),
                                 res.tau, 0.0);
        bool last = false;
        if (dir * (res.tau + h - tau1) >= 0.0) {
            h = tau1 - res.tau;
            last = true;
        }
        if (std::abs(h) < h_floor)
            throw StiffnessError("step size underflow at tau=" + std::to_string(res.tau), res.tau,
                                 0.0);

        if (!fsal_valid) {
            f(res.y, k1);
            fsal_valid = true;
        }
        yt = res.y + h * (a21 * k1);
        f(yt, k2);
        yt = res.y + h * (a31 * k1 + a32 * k2);
        f(yt, k3);
        yt = res.y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        f(yt, k4);
        yt = res.y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(yt, k5);
        yt = res.y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(yt, k6);
        y5 = res.y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(y5, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double en = error_norm(err, res.y, y5, c.rel_tol, c.abs_tol);
        if (!std::isfinite(en)) en = 2.0;  // reject and shrink

        if (en <= 1.0) {
            res.tau = last ? tau1 : res.tau + h;
            res.y = y5;
            k1 = k7;  // FSAL
            ++res.accepted;
            res.last_step = h;
            if (observer) {
                Eigen::VectorXd before = res.y;
                if (!observer(res.tau, res.y)) {
                    res.stopped_by_observer = true;
                    return res;
                }
                if (res.y != before) fsal_valid = false;  // projection invalidates k7
            }
            double fac = c.safety * std::pow(en > 0 ? en : 1e-16, -0.2) * std::pow(err_old, 0.04);
            fac = std::clamp(fac, c.min_factor, c.max_factor);
            h *= fac;
            err_old = std::max(en, 1e-4);
        } else {
            ++res.rejected;
            double fac = std::max(c.min_factor, c.safety * std::pow(en, -0.2));
            h *= fac;
        }
    }
    return res;
}

}  // namespace nbflow::ode
