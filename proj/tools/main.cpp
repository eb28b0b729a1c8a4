#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nbflow/commands.hpp"
#include "nbflow/errors.hpp"

namespace {

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::string tok;
    for (char c : text) {
        if (c == ',' || c == ' ') {
            if (!tok.empty()) out.push_back(std::stod(tok));
            tok.clear();
        } else {
            tok.push_back(c);
        }
    }
    if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compactified n-body flows: bulk integration, boundary charts, Graf queries"};
    app.require_subcommand(1);

    nbflow::GlobalOpts global;
    std::string out_flag, format_flag;
    app.add_option("--out", out_flag, "output file (overrides scenario setting)");
    app.add_option("--format", format_flag, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_option("--seed", global.seed, "seed for sampling commands");
    double tol_rel = 0, tol_abs = 0;
    auto* rel_opt = app.add_option("--tol-rel", tol_rel, "relative integration tolerance");
    auto* abs_opt = app.add_option("--tol-abs", tol_abs, "absolute integration tolerance");

    // simulate
    auto* sim = app.add_subcommand("simulate", "integrate a bulk scenario");
    std::string sim_scenario;
    sim->add_option("scenario", sim_scenario, "scenario file")->required();

    // boundary
    auto* bnd = app.add_subcommand("boundary", "boundary-stratum flows");
    bnd->require_subcommand(1);
    auto* torus = bnd->add_subcommand("twobody-torus", "two-body boundary torus vs closed form");
    nbflow::TorusArgs torus_args;
    std::string torus_kind = "collision";
    int torus_branch = 1;
    torus->add_option("--torus", torus_kind, "collision, infinity or hill")
        ->check(CLI::IsMember({"collision", "infinity", "hill"}));
    torus->add_option("--alpha", torus_args.alpha, "homogeneity exponent in (0,2)");
    torus->add_option("--energy", torus_args.energy, "energy (infinity: E>=0, hill: E<0)");
    torus->add_option("--theta0", torus_args.theta0, "initial angle");
    torus->add_option("--branch", torus_branch, "+1 or -1 heteroclinic branch");
    torus->add_option("--tau0", torus_args.tau0, "start of the tau span");
    torus->add_option("--tau1", torus_args.tau1, "end of the tau span");
    torus->add_option("--samples", torus_args.samples, "output rows");
    std::string chart_scenario;
    auto* chart_collision = bnd->add_subcommand("collision", "collision-manifold chart run");
    chart_collision->add_option("scenario", chart_scenario, "scenario file")->required();
    auto* chart_infinity = bnd->add_subcommand("infinity", "chart run near spatial infinity");
    chart_infinity->add_option("scenario", chart_scenario, "scenario file")->required();
    auto* chart_hill = bnd->add_subcommand("hill", "Hill-boundary fiber run");
    chart_hill->add_option("scenario", chart_scenario, "scenario file")->required();

    // graf
    auto* graf = app.add_subcommand("graf", "Graf partition queries");
    graf->require_subcommand(1);
    nbflow::GrafSystemArgs graf_sys;
    std::string masses_flag = "1,1,1";
    double graf_delta = 1e-3;
    std::string point_flag, direction_flag;
    int graf_samples = 20, graf_rays = 50;
    double delta1 = 1e-3, delta2 = 1e-2;
    for (auto* sub : {graf}) {
        sub->add_option("--masses", masses_flag, "comma-separated masses");
        sub->add_option("--dim", graf_sys.dim, "space dimension");
        sub->add_option("--alpha", graf_sys.alpha, "homogeneity exponent");
        sub->add_option("--coupling", graf_sys.coupling, "uniform pair coupling");
        sub->add_option("--delta", graf_delta, "Graf parameter in (0,1)");
    }
    auto* gv = graf->add_subcommand("value", "Graf functional and argmax set at a point");
    gv->add_option("--q", point_flag, "row-major configuration")->required();
    auto* gm = graf->add_subcommand("membership", "atoms containing a point");
    gm->add_option("--q", point_flag, "row-major configuration")->required();
    auto* gb = graf->add_subcommand("boundary-point", "ray map onto the free-atom boundary");
    gb->add_option("--s", direction_flag, "ray direction (any scale)")->required();
    auto* gc = graf->add_subcommand("count-components", "free-atom boundary components for d=1");
    gc->add_option("--samples", graf_samples, "samples per ordering class");
    auto* gn = graf->add_subcommand("nesting", "free-atom monotonicity in delta");
    gn->add_option("--delta1", delta1, "smaller delta")->required();
    gn->add_option("--delta2", delta2, "larger delta")->required();
    gn->add_option("--rays", graf_rays, "sampled rays");

    // batch
    auto* batch = app.add_subcommand("batch", "run scenarios concurrently");
    std::vector<std::string> batch_files;
    batch->add_option("scenarios", batch_files, "scenario files")->required();

    CLI11_PARSE(app, argc, argv);

    if (!out_flag.empty()) global.out = out_flag;
    if (!format_flag.empty())
        global.format =
            format_flag == "csv" ? nbflow::TableFormat::Csv : nbflow::TableFormat::Jsonl;
    if (*rel_opt) global.tol_rel = tol_rel;
    if (*abs_opt) global.tol_abs = tol_abs;

    try {
        if (sim->parsed()) return nbflow::cmd_simulate(sim_scenario, global, std::cout);
        if (bnd->parsed()) {
            if (torus->parsed()) {
                torus_args.branch = torus_branch;
                if (torus_kind == "collision")
                    torus_args.torus = nbflow::TorusKind::Collision;
                else if (torus_kind == "infinity")
                    torus_args.torus = nbflow::TorusKind::Infinity;
                else
                    torus_args.torus = nbflow::TorusKind::Hill;
                return nbflow::cmd_boundary_torus(torus_args, global, std::cout);
            }
            return nbflow::cmd_boundary_chart(chart_scenario, global, std::cout);
        }
        if (graf->parsed()) {
            graf_sys.masses = parse_real_list(masses_flag);
            if (gv->parsed())
                return nbflow::cmd_graf_value(graf_sys, graf_delta, parse_real_list(point_flag),
                                              false, global, std::cout);
            if (gm->parsed())
                return nbflow::cmd_graf_value(graf_sys, graf_delta, parse_real_list(point_flag),
                                              true, global, std::cout);
            if (gb->parsed())
                return nbflow::cmd_graf_boundary_point(graf_sys, graf_delta,
                                                       parse_real_list(direction_flag), global,
                                                       std::cout);
            if (gc->parsed())
                return nbflow::cmd_graf_count_components(graf_sys, graf_delta, graf_samples,
                                                         global, std::cout);
            if (gn->parsed())
                return nbflow::cmd_graf_nesting(graf_sys, delta1, delta2, graf_rays, global,
                                                std::cout);
        }
        if (batch->parsed()) return nbflow::cmd_batch(batch_files, global, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return nbflow::exit_code_for(e);
    }
    return 0;
}
