#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nbflow/boundary.hpp"
#include "nbflow/table_io.hpp"

namespace nbflow {

/// Global CLI flags shared by all subcommands.
struct GlobalOpts {
    std::optional<std::string> out;      // overrides the scenario's output path
    std::optional<TableFormat> format;   // overrides the scenario's format
    std::uint64_t seed = 20260810;
    std::optional<double> tol_rel;
    std::optional<double> tol_abs;
};

int cmd_simulate(const std::string& scenario_path, const GlobalOpts& g, std::ostream& log);

struct TorusArgs {
    TorusKind torus = TorusKind::Collision;
    double alpha = 1.0;
    double energy = 1.0;
    double theta0 = 0.0;
    int branch = 1;
    double tau0 = -20.0;
    double tau1 = 20.0;
    int samples = 400;
};
int cmd_boundary_torus(const TorusArgs& args, const GlobalOpts& g, std::ostream& log);

/// Boundary-chart run (collision / infinity / hill) described by a scenario
/// file with the matching [initial.*] section.
int cmd_boundary_chart(const std::string& scenario_path, const GlobalOpts& g, std::ostream& log);

/// System description for Graf queries given on the command line.
struct GrafSystemArgs {
    std::vector<double> masses;
    int dim = 1;
    double alpha = 1.0;
    double coupling = 1.0;
};

int cmd_graf_value(const GrafSystemArgs& sys_args, double delta, const std::vector<double>& q,
                   bool membership_only, const GlobalOpts& g, std::ostream& log);
int cmd_graf_boundary_point(const GrafSystemArgs& sys_args, double delta,
                            const std::vector<double>& s, const GlobalOpts& g, std::ostream& log);
int cmd_graf_count_components(const GrafSystemArgs& sys_args, double delta,
                              int samples_per_component, const GlobalOpts& g, std::ostream& log);
int cmd_graf_nesting(const GrafSystemArgs& sys_args, double delta1, double delta2, int rays,
                     const GlobalOpts& g, std::ostream& log);

/// Run several scenarios concurrently, each with its own output file.
int cmd_batch(const std::vector<std::string>& scenario_paths, const GlobalOpts& g,
              std::ostream& log);

/// Map an exception to the documented exit codes (2 parse, 3 domain,
/// 4 numerical).
int exit_code_for(const std::exception& e);

}  // namespace nbflow
