// netcomp: exact component-size distributions, asymptotes, criticality
// diagnostics, a configuration-model simulator, and edge-list ingestion
// behind one binary. Standard output carries only data; errors go to standard
// error as one JSON object per failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "netcomp/asymptotics.hpp"
#include "netcomp/components_directed.hpp"
#include "netcomp/components_multiplex.hpp"
#include "netcomp/ingest.hpp"
#include "netcomp/simulator.hpp"
#include "netcomp/spec_io.hpp"

using nlohmann::json;
using namespace netcomp;

namespace {

struct CliError : std::runtime_error {
    int exit_code;
    std::string module;
    CliError(int code, std::string mod, const std::string& msg)
        : std::runtime_error(msg), exit_code(code), module(std::move(mod)) {}
};

int threads_cap() {
    if (const char* env = std::getenv("NETCOMP_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw CliError(1, "cli", "cannot write output: " + path);
    return file;
}

DegreeDistribution<double> load_spec_or_die(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw CliError(2, "cli", "spec not found: " + path);
    probe.close();
    try {
        return load_distribution(path);
    } catch (const DegreeError& e) {
        throw CliError(1, "degree", e.what());
    } catch (const std::exception& e) {
        throw CliError(1, "spec_io", e.what());
    }
}

void write_size_distribution(std::ostream& os, const SizeDistribution& s, const std::string& format) {
    const bool underflowed = [&] {
        for (Eigen::Index n = 1; n <= s.n_max; ++n)
            if (s.w[n] == 0.0 && std::isfinite(s.log_w[n])) return true;
        return false;
    }();
    os.precision(17);
    if (format == "json") {
        json j;
        j["kind"] = to_string(s.kind);
        j["n_max"] = s.n_max;
        j["deficit"] = s.deficit;
        j["clamp_magnitude"] = s.clamp_magnitude;
        std::vector<double> w(s.w.data() + 1, s.w.data() + s.n_max + 1);
        j["w"] = w;
        if (underflowed) {
            std::vector<double> lw(s.log_w.data() + 1, s.log_w.data() + s.n_max + 1);
            j["log_w"] = lw;
        }
        os << j.dump(1) << "\n";
        return;
    }
    os << "# kind: " << to_string(s.kind) << "\n";
    os << "# deficit: " << s.deficit << "\n";
    if (s.clamp_magnitude > 0) os << "# clamped_negative_magnitude: " << s.clamp_magnitude << "\n";
    os << "n,w,cumulative,deficit" << (underflowed ? ",log_w\n" : "\n");
    double cum = 0.0;
    for (Eigen::Index n = 1; n <= s.n_max; ++n) {
        cum += s.w[n];
        os << n << ',' << s.w[n] << ',' << cum << ',' << (1.0 - cum);
        if (underflowed) os << ',' << s.log_w[n];
        os << '\n';
    }
}

SizeDistribution read_size_distribution_csv(const std::string& path, ComponentKind* kind_out) {
    std::ifstream in(path);
    if (!in) throw CliError(2, "cli", "curve not found: " + path);
    std::string line;
    ComponentKind kind = ComponentKind::weak;
    std::vector<double> w;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("kind:");
            if (pos != std::string::npos) {
                std::string k = line.substr(pos + 5);
                k.erase(0, k.find_first_not_of(" \t"));
                k.erase(k.find_last_not_of(" \t\r") + 1);
                if (k == "in") kind = ComponentKind::in_component;
                else if (k == "out") kind = ComponentKind::out_component;
                else if (k == "weak") kind = ComponentKind::weak;
                else if (k == "multilayer") kind = ComponentKind::multilayer;
            }
            continue;
        }
        if (line[0] == 'n') continue;  // header
        std::stringstream ss(line);
        std::string f;
        std::getline(ss, f, ',');
        const long n = std::stol(f);
        std::getline(ss, f, ',');
        const double v = std::stod(f);
        if (static_cast<long>(w.size()) < n + 1) w.resize(static_cast<std::size_t>(n + 1), 0.0);
        w[static_cast<std::size_t>(n)] = v;
    }
    SizeDistribution s;
    s.kind = kind;
    s.n_max = static_cast<Eigen::Index>(w.size()) - 1;
    s.w = Eigen::ArrayXd::Zero(s.n_max + 1);
    for (std::size_t i = 0; i < w.size(); ++i) s.w[static_cast<Eigen::Index>(i)] = w[i];
    s.log_w = Eigen::ArrayXd::Constant(s.n_max + 1, -std::numeric_limits<double>::infinity());
    if (kind_out) *kind_out = kind;
    return s;
}

void write_census(std::ostream& os, const ComponentCensus& census) {
    os.precision(17);
    os << "# kind: " << to_string(census.kind) << "\n";
    os << "# population: " << census.population << "\n";
    os << "# censored: " << census.censored << "\n";
    os << "# largest_fraction: " << census.largest_fraction << "\n";
    os << "n,count,node_weighted_probability\n";
    for (const auto& [n, c] : census.counts) os << n << ',' << c << ',' << census.empirical_w(n) << '\n';
}

ComponentCensus read_census(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError(2, "cli", "census not found: " + path);
    ComponentCensus census;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::stringstream ss(line.substr(1));
            std::string key;
            ss >> key;
            if (key == "kind:") {
                std::string k;
                ss >> k;
                if (k == "in") census.kind = ComponentKind::in_component;
                else if (k == "out") census.kind = ComponentKind::out_component;
                else if (k == "multilayer") census.kind = ComponentKind::multilayer;
                else census.kind = ComponentKind::weak;
            } else if (key == "population:") {
                ss >> census.population;
            } else if (key == "censored:") {
                ss >> census.censored;
            } else if (key == "largest_fraction:") {
                ss >> census.largest_fraction;
            }
            continue;
        }
        if (line[0] == 'n') continue;
        std::stringstream ss(line);
        std::string f;
        std::getline(ss, f, ',');
        const long n = std::stol(f);
        std::getline(ss, f, ',');
        census.counts[n] = std::stol(f);
    }
    return census;
}

json asymptote_report(const AsymptoteParams<double>& p) {
    json j;
    switch (p.family) {
        case AsymptoteFamily::in_out: j["family"] = "in_out"; break;
        case AsymptoteFamily::weak_directed: j["family"] = "weak_directed"; break;
        case AsymptoteFamily::two_layer: j["family"] = "two_layer"; break;
        case AsymptoteFamily::degenerate_directed: j["family"] = "degenerate_directed"; break;
    }
    if (p.family == AsymptoteFamily::in_out) {
        j["C1"] = p.C1;
        j["C2"] = p.C2;
    } else if (p.family == AsymptoteFamily::degenerate_directed) {
        j["L0"] = p.L0;
        j["E0"] = p.E0;
        j["E1"] = p.E1;
        j["expected_size"] = p.expected_size;
        j["primed_moments"] = {{"mu0", p.mu0p}, {"mu1", p.mu1p}, {"m01", p.m01},
                               {"m02", p.m02},  {"m11", p.m11},  {"m12", p.m12}};
    } else {
        j["r1"] = p.r1;
        j["L0"] = p.L0;
        j["L1"] = p.L1;
        j["L2"] = p.L2;
        j["E1"] = p.E1;
        j["E0"] = p.E0;
        j["Em1"] = p.Em1;
        j["S_condition"] = p.S_condition;
        j["critical_window_epsilon"] = p.critical_window;
        j["linear_root"] = p.linear_root;
        j["both_roots_admissible"] = p.both_roots_admissible;
    }
    return j;
}

bool is_degenerate_directed(const DegreeDistribution<double>& u) {
    const auto& m = u.mass;
    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < m.size(); ++off) {
        if (m.flat()[off] == 0.0) continue;
        m.unravel(off, idx);
        if (idx[0] > 1) return false;
    }
    return true;
}

// ---------------- commands ----------------

int cmd_compute(const std::string& what, const std::string& spec_path, long n_max,
                const std::string& method, const std::string& out_path, const std::string& format) {
    auto u = load_spec_or_die(spec_path);
    SizeDistribution s;
    try {
        if (what == "in" || what == "out") {
            s = in_out_components(u, what == "in" ? ComponentKind::in_component : ComponentKind::out_component,
                                  n_max);
        } else if (what == "weak") {
            if (u.kind != DistributionKind::directed)
                throw CliError(1, "components_directed", "weak components need a directed spec");
            s = weak_components(u, n_max);
        } else if (what == "multiplex") {
            if (u.kind != DistributionKind::multiplex)
                throw CliError(1, "components_multiplex", "multiplex components need a multiplex spec");
            if (u.dims() == 1)
                s = single_layer_components(u, n_max);
            else
                s = multiplex_components(u, n_max,
                                         method == "lattice" ? MultiplexMethod::lattice : MultiplexMethod::series);
        } else {
            throw CliError(1, "cli", "unknown compute target: " + what);
        }
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        throw CliError(1, what == "multiplex" ? "components_multiplex" : "components_directed", e.what());
    }
    std::ofstream file;
    write_size_distribution(open_output(file, out_path), s, format);
    return 0;
}

int cmd_asymptote(const std::string& spec_path, std::string family, long n_max,
                  const std::string& out_path, const std::string& format) {
    auto u = load_spec_or_die(spec_path);
    const auto mom = moments(u);
    json report;
    AsymptoteParams<double> params;
    try {
        if (family == "auto") {
            if (u.kind == DistributionKind::directed)
                family = is_degenerate_directed(u) ? "degenerate" : "weak";
            else if (u.dims() == 2)
                family = "two-layer";
            else
                throw CliError(1, "asymptotics", "no closed-form asymptote for " + std::to_string(u.dims()) +
                                                     " layers; use --family");
        }
        if (family == "in" || family == "out") {
            params = in_out_asymptote(mom, family == "in" ? ComponentKind::in_component
                                                          : ComponentKind::out_component);
        } else if (family == "weak") {
            params = weak_asymptote(mom, AsymptoteFamily::weak_directed);
        } else if (family == "two-layer") {
            params = weak_asymptote(mom, AsymptoteFamily::two_layer);
        } else if (family == "degenerate") {
            params = degenerate_asymptote(u);
        } else {
            throw CliError(1, "cli", "unknown family: " + family);
        }
        report = asymptote_report(params);
        if (u.kind == DistributionKind::directed) {
            auto crit = criticality(mom, AsymptoteFamily::weak_directed);
            report["criterion"] = {{"kind", "weak_directed"},
                                   {"value", crit.value},
                                   {"classification", to_string(crit.classification)}};
        } else if (u.dims() == 2) {
            auto crit = criticality(mom, AsymptoteFamily::two_layer);
            report["criterion"] = {{"kind", "two_layer"},
                                   {"value", crit.value},
                                   {"classification", to_string(crit.classification)},
                                   {"sign_decides_giant", crit.sign_decides_giant}};
            report["gateaux_derivative"] = gateaux_derivative_G(mom);
        }
    } catch (const CliError&) {
        throw;
    } catch (const AsymptoteError& e) {
        throw CliError(1, "asymptotics", e.what());
    } catch (const std::exception& e) {
        throw CliError(1, "asymptotics", e.what());
    }
    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    os.precision(17);
    if (format == "json") {
        json j = report;
        if (n_max >= 1) {
            std::vector<double> curve;
            for (long n = 1; n <= n_max; ++n) curve.push_back(params.eval(double(n)));
            j["w_inf"] = curve;
        }
        os << j.dump(1) << "\n";
    } else {
        for (const auto& [k, v] : report.items()) os << "# " << k << ": " << v.dump() << "\n";
        os << "n,w_inf\n";
        for (long n = 1; n <= n_max; ++n) os << n << ',' << params.eval(double(n)) << '\n';
    }
    return 0;
}

int cmd_simulate(const std::string& spec_path, long nodes, std::uint64_t seed, const std::string& census_kind,
                 long roots, const std::string& out_path, const std::string& edges_out) {
    auto u = load_spec_or_die(spec_path);
    try {
        MultiGraph g = sample_graph(u, nodes, seed);
        if (!edges_out.empty()) write_edges(edges_out, edge_list_from_graph(g));
        ComponentCensus census;
        if (census_kind == "weak" || census_kind == "multilayer") {
            census = weak_census(g);
        } else if (census_kind == "in" || census_kind == "out") {
            census = in_out_census(g, census_kind == "in" ? ComponentKind::in_component
                                                          : ComponentKind::out_component,
                                   roots, seed + 1);
        } else {
            throw CliError(1, "cli", "unknown census kind: " + census_kind);
        }
        std::ofstream file;
        write_census(open_output(file, out_path), census);
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        throw CliError(1, "simulator", e.what());
    }
    return 0;
}

int cmd_ingest(const std::string& edges_path, bool undirected, long cutoff, const std::string& degree_out,
               const std::string& out_path) {
    try {
        EdgeList el = load_edges(edges_path, !undirected);
        ComponentCensus census = weak_census(el);
        if (!degree_out.empty()) {
            auto u = empirical_degree_distribution(el, cutoff);
            write_table_spec(degree_out, u);
            std::cerr << json{{"module", "ingest"},
                              {"nodes", el.nodes},
                              {"edges", el.edges.size()},
                              {"truncation_tail", u.truncation_tail}}
                             .dump()
                      << "\n";
        }
        std::ofstream file;
        write_census(open_output(file, out_path), census);
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        throw CliError(1, "ingest", e.what());
    }
    return 0;
}

int cmd_compare(const std::string& exact_path, const std::string& census_path, const std::string& asym_path,
                double z_tolerance, double w_floor, const std::string& out_path) {
    ComponentKind exact_kind;
    SizeDistribution exact = read_size_distribution_csv(exact_path, &exact_kind);
    ComponentCensus census = read_census(census_path);
    const bool rooted_exact =
        exact_kind == ComponentKind::in_component || exact_kind == ComponentKind::out_component;
    const bool rooted_census =
        census.kind == ComponentKind::in_component || census.kind == ComponentKind::out_component;
    if (rooted_exact != rooted_census || (rooted_exact && exact_kind != census.kind))
        throw CliError(1, "compare", std::string("kind mismatch: exact curve is '") + to_string(exact_kind) +
                                         "' but census is '" + to_string(census.kind) + "'");

    std::optional<SizeDistribution> asym;
    if (!asym_path.empty()) asym = read_size_distribution_csv(asym_path, nullptr);

    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    os.precision(17);
    os << "n,series,value\n";
    int checked = 0, failures = 0;
    double max_abs_z = 0.0;
    for (Eigen::Index n = 1; n <= exact.n_max; ++n) {
        const double we = exact.w[n];
        const double emp = census.empirical_w(n);
        os << n << ",exact," << we << '\n';
        os << n << ",empirical," << emp << '\n';
        if (asym && n <= asym->n_max) os << n << ",asymptote," << asym->w[n] << '\n';
        if (we > w_floor) {
            double se;
            const long c = census.counts.count(n) ? census.counts.at(n) : 0;
            if (rooted_census) {
                const double p = std::max(emp, 1.0 / double(census.population));
                se = std::sqrt(p * (1.0 - p) / double(census.population));
            } else {
                se = double(n) * std::sqrt(double(std::max(c, 1L))) / double(census.population);
            }
            const double z = (emp - we) / se;
            os << n << ",z," << z << '\n';
            ++checked;
            max_abs_z = std::max(max_abs_z, std::abs(z));
            if (std::abs(z) > z_tolerance) ++failures;
        }
    }
    json summary{{"module", "compare"}, {"checked", checked},       {"failures", failures},
                 {"max_abs_z", max_abs_z}, {"z_tolerance", z_tolerance}, {"pass", failures == 0}};
    std::cerr << summary.dump() << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"component-size distributions for directed and multiplex configuration networks"};
    app.require_subcommand(0, 1);

    bool explain = false;
    app.add_flag("--explain", explain, "print all defaults as JSON and exit");

    std::string spec_path, out_path, format = "csv", method = "series";
    long n_max = 100;
    long nodes = 1000000;
    std::uint64_t seed = 1;
    double tolerance = 3.0;

    auto* compute = app.add_subcommand("compute", "exact size distribution");
    std::string target;
    compute->add_option("target", target, "in|out|weak|multiplex")->required();
    compute->add_option("--spec", spec_path, "distribution spec (TOML or JSON)")->required();
    compute->add_option("--nmax", n_max, "largest component size");
    compute->add_option("--method", method, "multiplex backend: series|lattice");
    compute->add_option("--out", out_path, "output path (default stdout)");
    compute->add_option("--format", format, "csv|json");

    auto* asym = app.add_subcommand("asymptote", "closed-form asymptote constants and curve");
    std::string family = "auto";
    asym->add_option("--spec", spec_path, "distribution spec")->required();
    asym->add_option("--family", family, "auto|in|out|weak|two-layer|degenerate");
    asym->add_option("--nmax", n_max, "curve length");
    asym->add_option("--out", out_path, "output path");
    asym->add_option("--format", format, "csv|json");

    auto* sim = app.add_subcommand("simulate", "configuration-model sample and census");
    std::string census_kind = "weak";
    long roots = 100000;
    std::string edges_out;
    sim->add_option("--spec", spec_path, "distribution spec")->required();
    sim->add_option("--nodes", nodes, "node count");
    sim->add_option("--seed", seed, "random seed");
    sim->add_option("--census", census_kind, "weak|in|out");
    sim->add_option("--roots", roots, "sampled roots for in/out census");
    sim->add_option("--edges-out", edges_out, "also dump the sampled edge list");
    sim->add_option("--out", out_path, "census output path");

    auto* ing = app.add_subcommand("ingest", "edge list to census and degree distribution");
    std::string edges_path, degree_out;
    bool undirected = false;
    long cutoff = 1000;
    ing->add_option("--edges", edges_path, "edge list path")->required();
    ing->add_flag("--undirected", undirected, "treat single-layer input as undirected");
    ing->add_option("--cutoff", cutoff, "degree cutoff for the empirical distribution");
    ing->add_option("--degree-out", degree_out, "write the empirical degree distribution spec here");
    ing->add_option("--out", out_path, "census output path");

    auto* cmp = app.add_subcommand("compare", "join exact, asymptotic and empirical curves");
    std::string exact_path, census_path, asym_curve;
    double w_floor = 1e-4;
    cmp->add_option("--exact", exact_path, "exact curve CSV (from compute)")->required();
    cmp->add_option("--census", census_path, "census CSV (from simulate/ingest)")->required();
    cmp->add_option("--asymptote", asym_curve, "asymptote curve CSV (optional)");
    cmp->add_option("--tolerance", tolerance, "z-score threshold");
    cmp->add_option("--wmin", w_floor, "compare only where exact w(n) exceeds this");
    cmp->add_option("--out", out_path, "long-format output CSV");

    CLI11_PARSE(app, argc, argv);

    if (explain) {
        json j{{"threads", threads_cap()},
               {"defaults",
                {{"nmax", 100},
                 {"nodes", 1000000},
                 {"seed", 1},
                 {"roots", 100000},
                 {"census", "weak"},
                 {"format", "csv"},
                 {"method", "series"},
                 {"tolerance", 3.0},
                 {"wmin", 1e-4},
                 {"cutoff", 1000},
                 {"mass_tolerance", kMassTolerance},
                 {"balance_tolerance", kBalanceTolerance},
                 {"clamp_failure", kClampFailure}}}};
        std::cout << j.dump(1) << "\n";
        return 0;
    }

    try {
        if (compute->parsed()) return cmd_compute(target, spec_path, n_max, method, out_path, format);
        if (asym->parsed()) return cmd_asymptote(spec_path, family, n_max, out_path, format);
        if (sim->parsed()) return cmd_simulate(spec_path, nodes, seed, census_kind, roots, out_path, edges_out);
        if (ing->parsed()) return cmd_ingest(edges_path, undirected, cutoff, degree_out, out_path);
        if (cmp->parsed()) return cmd_compare(exact_path, census_path, asym_curve, tolerance, w_floor, out_path);
        std::cout << app.help();
        return 0;
    } catch (const CliError& e) {
        std::cerr << json{{"code", e.exit_code}, {"message", e.what()}, {"module", e.module}}.dump() << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << json{{"code", 1}, {"message", e.what()}, {"module", "cli"}}.dump() << "\n";
        return 1;
    }
}
