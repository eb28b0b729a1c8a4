#include "nbflow/graf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <string>

#include "nbflow/errors.hpp"
#include "nbflow/metric.hpp"

namespace nbflow {

namespace {

constexpr int max_graf_n = 8;  // full-lattice enumeration guard

const std::vector<Partition>& lattice(int n) {
    static std::map<int, std::vector<Partition>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, enumerate_partitions(n)).first;
    return it->second;
}

void check_query(const MassSystem& sys, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("graf: delta must lie in (0,1), got " + std::to_string(delta));
    if (sys.size() > max_graf_n)
        throw SizeLimitError("graf: full lattice enumeration capped at n <= " +
                             std::to_string(max_graf_n));
}

double external_moment(const MassSystem& sys, const Partition& part, const Matrix& q) {
    Matrix ext = project_external(sys, part, q);
    return mass_inner(sys, ext, ext);
}

double min_pair_gap(const Matrix& q) {
    double g = std::numeric_limits<double>::infinity();
    for (int i = 0; i < q.rows(); ++i)
        for (int j = i + 1; j < q.rows(); ++j) g = std::min(g, (q.row(i) - q.row(j)).norm());
    return g;
}

// Unit directions in M, rejecting a neighborhood of the collision set.
Matrix random_direction(const MassSystem& sys, std::mt19937_64& rng, double min_gap) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int tries = 0; tries < 10000; ++tries) {
        Matrix s(sys.size(), sys.dim());
        for (int i = 0; i < s.rows(); ++i)
            for (int k = 0; k < s.cols(); ++k) s(i, k) = gauss(rng);
        Eigen::RowVectorXd com = sys.masses().transpose() * s / sys.total_mass();
        s.rowwise() -= com;
        double nrm = mass_norm(sys, s);
        if (nrm < 1e-8) continue;
        s /= nrm;
        if (min_pair_gap(s) > min_gap) return s;
    }
    throw Error("random_direction: rejection sampling failed");
}

}  // namespace

GrafValue graf_value(const MassSystem& sys, double delta, const Matrix& q) {
    check_query(sys, delta);
    const auto& parts = lattice(sys.size());
    GrafValue out;
    out.value = -std::numeric_limits<double>::infinity();
    std::vector<double> scores(parts.size());
    for (std::size_t k = 0; k < parts.size(); ++k) {
        scores[k] = external_moment(sys, parts[k], q) +
                    std::pow(delta, static_cast<double>(parts[k].rank()));
        out.value = std::max(out.value, scores[k]);
    }
    const double tie = 1e-12 * (1.0 + std::abs(out.value));
    for (std::size_t k = 0; k < parts.size(); ++k)
        if (out.value - scores[k] <= tie) out.argmax.push_back(parts[k]);
    return out;
}

std::vector<Partition> atom_membership(const MassSystem& sys, double delta, const Matrix& q) {
    return graf_value(sys, delta, q).argmax;
}

double free_atom_boundary_radius(const MassSystem& sys, double delta, const Matrix& s) {
    check_query(sys, delta);
    if (s.rows() != sys.size() || s.cols() != sys.dim())
        throw DomainError("free_atom_boundary_point: direction shape mismatch");
    double nrm = mass_norm(sys, s);
    if (std::abs(nrm - 1.0) > 1e-9)
        throw DomainError("free_atom_boundary_point: direction must be on the mass-unit sphere");
    if (min_pair_gap(s) < 1e-8)
        throw ConditioningError(
            "free_atom_boundary_point: direction too close to the collision set");

    const int n = sys.size();
    const auto& parts = lattice(n);
    const Partition finest = Partition::finest(n);
    // g(lambda) = min over D != C_min of  lambda^2 J^I_D(s) - (delta^|D| - delta^n);
    // strictly increasing in lambda, negative at 0+, positive for large lambda.
    std::vector<double> ji, gap;
    double j_total = mass_inner(sys, s, s);
    for (const auto& part : parts) {
        if (part == finest) continue;
        ji.push_back(j_total - external_moment(sys, part, s));
        gap.push_back(std::pow(delta, part.rank()) - std::pow(delta, n));
    }
    auto g = [&](double lambda) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < ji.size(); ++k)
            m = std::min(m, lambda * lambda * ji[k] - gap[k]);
        return m;
    };

    double lo = eps_floor, hi = 1.0;
    int doublings = 0;
    while (g(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 200) throw Error("free_atom_boundary_point: bracket expansion failed");
    }
    while (hi - lo > 1e-12 * hi) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Matrix free_atom_boundary_point(const MassSystem& sys, double delta, const Matrix& s) {
    return free_atom_boundary_radius(sys, delta, s) * s;
}

int count_free_boundary_components_d1(const MassSystem& sys, double delta,
                                      int samples_per_component, std::uint64_t seed) {
    check_query(sys, delta);
    if (sys.dim() != 1) throw DomainError("count_free_boundary_components_d1: requires d = 1");
    if (sys.size() > 5)
        throw SizeLimitError("count_free_boundary_components_d1: capped at n <= 5");
    if (samples_per_component < 2)
        throw DomainError("count_free_boundary_components_d1: need at least 2 samples per class");

    const int n = sys.size();
    std::mt19937_64 rng(seed);

    auto ordering_of = [&](const Matrix& s) {
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return s(a, 0) < s(b, 0); });
        return idx;
    };

    std::map<std::vector<int>, std::vector<Matrix>> classes;
    long expected = 1;
    for (int i = 2; i <= n; ++i) expected *= i;
    const long budget = 200000;
    long draws = 0;
    auto filled = [&] {
        if (static_cast<long>(classes.size()) < expected) return false;
        for (const auto& [key, v] : classes)
            if (static_cast<int>(v.size()) < samples_per_component) return false;
        return true;
    };
    while (!filled()) {
        if (++draws > budget)
            throw Error(
                "count_free_boundary_components_d1: sampling budget exhausted before every "
                "ordering class reached " +
                std::to_string(samples_per_component) + " members");
        Matrix s = random_direction(sys, rng, 1e-4);
        auto& bucket = classes[ordering_of(s)];
        if (static_cast<int>(bucket.size()) < samples_per_component) bucket.push_back(s);
    }

    // Each ordering class is an open spherical simplex, hence geodesically
    // convex: the great-circle edge from one member to another must stay in
    // the class.  Push samples and a few edge points through the ray map to
    // make sure the boundary piece is actually reachable.
    const int edge_resolution = 1000;
    for (const auto& [key, members] : classes) {
        const Matrix& base = members.front();
        (void)free_atom_boundary_radius(sys, delta, base);
        for (std::size_t m = 1; m < members.size(); ++m) {
            const Matrix& other = members[m];
            double c = std::clamp(mass_inner(sys, base, other), -1.0, 1.0);
            double omega = std::acos(c);
            for (int step = 0; step <= edge_resolution; ++step) {
                double tpar = static_cast<double>(step) / edge_resolution;
                Matrix p = omega < 1e-12
                               ? base
                               : Matrix((std::sin((1.0 - tpar) * omega) * base +
                                         std::sin(tpar * omega) * other) /
                                        std::sin(omega));
                if (ordering_of(p) != key)
                    throw Error(
                        "count_free_boundary_components_d1: edge left its ordering class; class "
                        "not verified connected");
                if (step % 100 == 0) {
                    p /= mass_norm(sys, p);
                    (void)free_atom_boundary_radius(sys, delta, p);
                }
            }
        }
    }
    return static_cast<int>(classes.size());
}

bool nesting_check(const MassSystem& sys, double delta1, double delta2, int rays,
                   std::uint64_t seed) {
    if (!(delta1 > 0.0) || delta1 > delta2 || delta2 > 0.5)
        throw DomainError("nesting_check: need 0 < delta1 <= delta2 <= 1/2");
    if (rays < 1) throw DomainError("nesting_check: need at least one ray");
    std::mt19937_64 rng(seed);
    for (int k = 0; k < rays; ++k) {
        Matrix s = random_direction(sys, rng, 1e-4);
        double r1 = free_atom_boundary_radius(sys, delta1, s);
        double r2 = free_atom_boundary_radius(sys, delta2, s);
        if (delta1 == delta2) {
            if (std::abs(r1 - r2) > 1e-12 * std::max(r1, r2)) return false;
        } else if (!(r1 < r2)) {
            return false;
        }
    }
    return true;
}

}  // namespace nbflow
