#include "nbflow/scenario.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "nbflow/errors.hpp"
#include "nbflow/metric.hpp"
#include "nbflow/potential.hpp"

namespace nbflow {

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;

    const Entry* find(const std::string& key) const {
        for (const auto& e : entries)
            if (e.key == key) return &e;
        return nullptr;
    }
};

[[noreturn]] void fail(const std::string& file, int line, const std::string& msg) {
    throw ParseError(file + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<Section> read_sections(std::istream& in, const std::string& file) {
    std::vector<Section> sections;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        std::size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(file, line, "unterminated section header");
            Section sec;
            sec.name = trim(s.substr(1, s.size() - 2));
            sec.line = line;
            if (sec.name.empty()) fail(file, line, "empty section name");
            sections.push_back(std::move(sec));
        } else {
            std::size_t eq = s.find('=');
            if (eq == std::string::npos) fail(file, line, "expected key = value");
            if (sections.empty()) fail(file, line, "entry before any [section]");
            Entry e;
            e.key = trim(s.substr(0, eq));
            e.value = trim(s.substr(eq + 1));
            e.line = line;
            if (e.key.empty()) fail(file, line, "empty key");
            sections.back().entries.push_back(std::move(e));
        }
    }
    return sections;
}

double parse_real(const std::string& file, int line, const std::string& tok) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') fail(file, line, "bad real number \"" + tok + "\"");
    return v;
}

std::vector<double> parse_reals(const std::string& file, int line, const std::string& value) {
    std::istringstream in(value);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_real(file, line, tok));
    return out;
}

double required_real(const std::string& file, const Section& sec, const std::string& key) {
    const Entry* e = sec.find(key);
    if (!e) fail(file, sec.line, "missing key \"" + key + "\" in [" + sec.name + "]");
    return parse_real(file, e->line, e->value);
}

Matrix parse_matrix(const std::string& file, const Section& sec, const std::string& key, int n,
                    int d) {
    const Entry* e = sec.find(key);
    if (!e) fail(file, sec.line, "missing key \"" + key + "\" in [" + sec.name + "]");
    std::vector<double> vals = parse_reals(file, e->line, e->value);
    if (static_cast<int>(vals.size()) != n * d)
        fail(file, e->line,
             "\"" + key + "\" needs " + std::to_string(n * d) + " reals (" + std::to_string(n) +
                 " x " + std::to_string(d) + "), got " + std::to_string(vals.size()));
    Matrix m(n, d);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) m(i, k) = vals[static_cast<std::size_t>(i) * d + k];
    return m;
}

MassSystem parse_system(const std::string& file, const Section& sec) {
    const Entry* me = sec.find("masses");
    if (!me) fail(file, sec.line, "missing key \"masses\" in [system]");
    std::vector<double> masses = parse_reals(file, me->line, me->value);
    const int n = static_cast<int>(masses.size());
    int dim = static_cast<int>(required_real(file, sec, "dim"));
    double alpha = required_real(file, sec, "alpha");

    const Entry* ce = sec.find("coupling");
    if (!ce) fail(file, sec.line, "missing key \"coupling\" in [system]");
    Matrix z = Matrix::Constant(n, n, parse_real(file, ce->line, ce->value));
    for (const auto& e : sec.entries) {
        // pair override: "coupling 1 2 = 0.5"
        if (e.key.rfind("coupling ", 0) != 0) continue;
        std::istringstream ks(e.key.substr(9));
        int i = 0, j = 0;
        if (!(ks >> i >> j) || i < 1 || j < 1 || i > n || j > n || i == j)
            fail(file, e.line, "bad coupling override \"" + e.key + "\"");
        double v = parse_real(file, e.line, e.value);
        z(i - 1, j - 1) = z(j - 1, i - 1) = v;
    }
    try {
        return MassSystem(dim, std::move(masses), std::move(z), alpha);
    } catch (const DomainError& err) {
        fail(file, sec.line, err.what());
    }
}

Partition parse_partition_value(const std::string& file, int line, const std::string& text,
                                int n) {
    try {
        Partition p = Partition::parse(text);
        if (p.size() != n)
            fail(file, line,
                 "partition " + p.str() + " is over " + std::to_string(p.size()) +
                     " elements, system has " + std::to_string(n));
        return p;
    } catch (const ParseError& e) {
        fail(file, line, e.what());
    }
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& name) {
    auto sections = read_sections(in, name);

    const Section* system_sec = nullptr;
    for (const auto& s : sections)
        if (s.name == "system") system_sec = &s;
    if (!system_sec) throw ParseError(name + ": missing [system] section");

    Scenario sc(parse_system(name, *system_sec));
    const int n = sc.system.size(), d = sc.system.dim();

    int initial_count = 0;
    for (const auto& sec : sections) {
        if (sec.name == "system") continue;
        if (sec.name == "energy") {
            sc.energy = required_real(name, sec, "value");
            sc.has_energy = true;
        } else if (sec.name == "initial.physical") {
            ++initial_count;
            sc.kind = Scenario::InitialKind::Physical;
            sc.q = parse_matrix(name, sec, "q", n, d);
            sc.v_or_w = parse_matrix(name, sec, "v", n, d);
        } else if (sec.name == "initial.rescaled") {
            ++initial_count;
            sc.kind = Scenario::InitialKind::Rescaled;
            sc.q = parse_matrix(name, sec, "q", n, d);
            sc.v_or_w = parse_matrix(name, sec, "w", n, d);
        } else if (sec.name == "initial.collision") {
            ++initial_count;
            sc.kind = Scenario::InitialKind::Collision;
            const Entry* pe = sec.find("partition");
            if (!pe) fail(name, sec.line, "missing key \"partition\" in [initial.collision]");
            sc.chart_partition = parse_partition_value(name, pe->line, pe->value, n);
            sc.q_ext = parse_matrix(name, sec, "q_ext", n, d);
            sc.Q_int = parse_matrix(name, sec, "Q_int", n, d);
            sc.v_int = required_real(name, sec, "v_int");
            sc.X_int = parse_matrix(name, sec, "X_int", n, d);
            sc.w_ext = parse_matrix(name, sec, "w_ext", n, d);
        } else if (sec.name == "initial.infinity") {
            ++initial_count;
            sc.kind = Scenario::InitialKind::Infinity;
            sc.z = required_real(name, sec, "z");
            sc.inf_Q = parse_matrix(name, sec, "Q", n, d);
            sc.inf_w = parse_matrix(name, sec, "w", n, d);
        } else if (sec.name == "initial.hill") {
            ++initial_count;
            sc.kind = Scenario::InitialKind::Hill;
            sc.q = parse_matrix(name, sec, "q0", n, d);
            sc.v_or_w = parse_matrix(name, sec, "w", n, d);
        } else if (sec.name == "controls") {
            for (const auto& e : sec.entries) {
                if (e.key == "rel_tol")
                    sc.controls.rel_tol = parse_real(name, e.line, e.value);
                else if (e.key == "abs_tol")
                    sc.controls.abs_tol = parse_real(name, e.line, e.value);
                else if (e.key == "max_steps")
                    sc.controls.max_steps = static_cast<long>(parse_real(name, e.line, e.value));
                else if (e.key == "rho_switch_factor")
                    sc.controls.rho_switch_factor = parse_real(name, e.line, e.value);
                else if (e.key == "r_max_factor")
                    sc.controls.r_max_factor = parse_real(name, e.line, e.value);
                else if (e.key == "eta_hill")
                    sc.controls.eta_hill = parse_real(name, e.line, e.value);
                else if (e.key == "t_target")
                    sc.controls.t_target = parse_real(name, e.line, e.value);
                else if (e.key == "renormalize_w")
                    sc.controls.renormalize_w = parse_real(name, e.line, e.value) != 0.0;
                else if (e.key == "initial_step")
                    sc.controls.initial_step = parse_real(name, e.line, e.value);
                else if (e.key == "samples")
                    sc.boundary_samples = static_cast<int>(parse_real(name, e.line, e.value));
                else if (e.key == "tau_span") {
                    auto v = parse_reals(name, e.line, e.value);
                    if (v.size() != 2) fail(name, e.line, "tau_span needs two reals");
                    sc.tau0 = v[0];
                    sc.tau1 = v[1];
                } else {
                    fail(name, e.line, "unknown control \"" + e.key + "\"");
                }
            }
        } else if (sec.name == "output") {
            for (const auto& e : sec.entries) {
                if (e.key == "path") {
                    sc.out_path = e.value;
                } else if (e.key == "format") {
                    if (e.value == "csv")
                        sc.format = Scenario::Format::Csv;
                    else if (e.value == "jsonl")
                        sc.format = Scenario::Format::Jsonl;
                    else
                        fail(name, e.line, "format must be csv or jsonl");
                } else {
                    fail(name, e.line, "unknown output key \"" + e.key + "\"");
                }
            }
        } else if (sec.name == "diagnostics") {
            const Entry* we = sec.find("watch");
            if (we) sc.watch = parse_partition_value(name, we->line, we->value, n);
        } else {
            fail(name, sec.line, "unknown section [" + sec.name + "]");
        }
    }

    if (initial_count != 1)
        throw ParseError(name + ": exactly one [initial.*] section required, found " +
                         std::to_string(initial_count));

    // Bulk starts must be off the collision set; boundary charts check their
    // own invariants when the command builds them.
    if (sc.kind == Scenario::InitialKind::Physical || sc.kind == Scenario::InitialKind::Rescaled) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if ((sc.q.row(i) - sc.q.row(j)).norm() == 0.0)
                    throw ParseError(name + ": initial positions of particles " +
                                     std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                     " coincide");
    }
    if (sc.kind == Scenario::InitialKind::Physical) {
        if (!sc.has_energy) {
            sc.energy = hamiltonian(sc.system, PhysicalState{Configuration(sc.system, sc.q),
                                                             sc.v_or_w});
            sc.has_energy = true;
        } else {
            double h = hamiltonian(sc.system,
                                   PhysicalState{Configuration(sc.system, sc.q), sc.v_or_w});
            if (std::abs(h - sc.energy) > 1e-9 * (1.0 + std::abs(sc.energy)))
                throw ParseError(name + ": [energy] value " + std::to_string(sc.energy) +
                                 " disagrees with the physical state's H = " + std::to_string(h));
        }
    } else if (!sc.has_energy && sc.kind != Scenario::InitialKind::Collision) {
        throw ParseError(name + ": missing [energy] section");
    }
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open scenario file");
    return parse_scenario(in, path);
}

}  // namespace nbflow
