#pragma once

#include <cstdint>
#include <vector>

#include "nbflow/mass_system.hpp"
#include "nbflow/partition.hpp"

namespace nbflow {

/// The Graf functional J^(delta)(q) = max over partitions of
/// J^E_C(q) + delta^|C|, with the attaining set.  Ties are kept: boundary
/// structure lives exactly where several partitions attain the maximum.
struct GrafValue {
    double value;
    std::vector<Partition> argmax;
};
GrafValue graf_value(const MassSystem& sys, double delta, const Matrix& q);

/// Partitions whose Graf atom contains q (the argmax set).
std::vector<Partition> atom_membership(const MassSystem& sys, double delta, const Matrix& q);

/// The unique point where the ray through the unit direction s meets the
/// boundary of the free atom, found by bracketed bisection on the margin
/// between the free atom's value and the best competitor.
Matrix free_atom_boundary_point(const MassSystem& sys, double delta, const Matrix& s);
/// Radius of that point along the ray.
double free_atom_boundary_radius(const MassSystem& sys, double delta, const Matrix& s);

/// For d = 1: sample unit directions off the collision set, classify them by
/// the coordinate ordering, push them to the free-atom boundary, and verify
/// each ordering class is path-connected by great-circle edge sampling.
/// Returns the number of components found.
int count_free_boundary_components_d1(const MassSystem& sys, double delta,
                                      int samples_per_component, std::uint64_t seed);

/// Check on sampled rays that the free-atom boundary moves outward
/// monotonically in delta (delta1 <= delta2 <= 1/2).
bool nesting_check(const MassSystem& sys, double delta1, double delta2, int rays,
                   std::uint64_t seed);

}  // namespace nbflow
