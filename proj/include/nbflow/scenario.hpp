#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "nbflow/boundary.hpp"
#include "nbflow/dynamics.hpp"
#include "nbflow/mass_system.hpp"
#include "nbflow/partition.hpp"

namespace nbflow {

/// A run description parsed from the key-value scenario format:
///
///   [system]
///   masses = 1 1
///   dim = 2
///   alpha = 1.0
///   coupling = 1.0            # uniform; "coupling 1 2 = ..." overrides a pair
///   [energy]
///   value = -0.5
///   [initial.physical]        # exactly one [initial.*] section
///   q = 1 0  -1 0             # row-major n x d
///   v = 0 0.3  0 -0.3
///   [controls]
///   tau_span = 0 50
///   rel_tol = 1e-10
///   [output]
///   path = run.csv
///   format = csv
///
/// Reals are parsed at full precision; '#' starts a comment.
struct Scenario {
    enum class InitialKind { Physical, Rescaled, Collision, Infinity, Hill };
    enum class Format { Csv, Jsonl };

    explicit Scenario(MassSystem sys) : system(std::move(sys)) {}

    MassSystem system;
    double energy = 0.0;
    bool has_energy = false;

    InitialKind kind = InitialKind::Physical;
    Matrix q;        // physical/rescaled positions, or hill q0
    Matrix v_or_w;   // physical v, rescaled w, or hill w
    // collision / infinity chart payloads
    std::optional<Partition> chart_partition;
    Matrix q_ext, Q_int, X_int, w_ext;
    double v_int = 0.0;
    double z = 0.0;
    Matrix inf_Q, inf_w;

    IntegratorControls controls;
    double tau0 = 0.0, tau1 = 10.0;
    int boundary_samples = 200;

    std::string out_path = "out.csv";
    Format format = Format::Csv;
    std::optional<Partition> watch;  // partition for the |w_ext| diagnostic column
};

Scenario parse_scenario(std::istream& in, const std::string& name);
Scenario parse_scenario_file(const std::string& path);

}  // namespace nbflow
