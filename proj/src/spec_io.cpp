#include "netcomp/spec_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "netcomp/toml_lite.hpp"

namespace netcomp {

namespace {

std::vector<double> number_list(const nlohmann::json& j, int dims, const char* what) {
    std::vector<double> out;
    if (j.is_number()) {
        out.assign(static_cast<std::size_t>(dims), j.get<double>());
    } else if (j.is_array()) {
        for (const auto& v : j) out.push_back(v.get<double>());
        if (static_cast<int>(out.size()) != dims)
            throw std::runtime_error(std::string("spec: ") + what + " length does not match dims");
    } else {
        throw std::runtime_error(std::string("spec: ") + what + " must be a number or array");
    }
    return out;
}

}  // namespace

DistributionSpec parse_distribution_spec(const nlohmann::json& j) {
    DistributionSpec spec;
    const std::string kind = j.value("kind", "directed");
    if (kind == "directed")
        spec.kind = DistributionKind::directed;
    else if (kind == "multiplex")
        spec.kind = DistributionKind::multiplex;
    else
        throw std::runtime_error("spec: kind must be 'directed' or 'multiplex'");
    spec.dims = j.value("dims", 2);
    if (spec.dims < 1 || spec.dims > 8) throw std::runtime_error("spec: dims must be in [1, 8]");
    if (spec.kind == DistributionKind::directed && spec.dims != 2)
        throw std::runtime_error("spec: directed distributions have dims = 2");

    if (j.contains("cutoffs")) {
        for (const auto& v : j.at("cutoffs")) spec.cutoffs.push_back(v.get<Eigen::Index>());
        if (static_cast<int>(spec.cutoffs.size()) != spec.dims)
            throw std::runtime_error("spec: cutoffs length does not match dims");
        for (auto c : spec.cutoffs)
            if (c < 0) throw std::runtime_error("spec: negative cutoff");
    }

    int sources = 0;
    if (j.contains("table")) {
        ++sources;
        const auto& t = j.at("table");
        if (t.contains("shape")) {
            std::vector<Eigen::Index> shape;
            for (const auto& v : t.at("shape")) shape.push_back(v.get<Eigen::Index>());
            if (static_cast<int>(shape.size()) != spec.dims)
                throw std::runtime_error("spec: table shape does not match dims");
            if (spec.cutoffs.empty())
                for (auto s : shape) spec.cutoffs.push_back(s - 1);
        }
        std::vector<double> vals;
        for (const auto& v : t.at("values")) vals.push_back(v.get<double>());
        spec.table = std::move(vals);
        if (spec.cutoffs.empty()) throw std::runtime_error("spec: table needs shape or cutoffs");
    }
    if (j.contains("mixture")) {
        ++sources;
        for (const auto& term : j.at("mixture")) {
            MixtureTerm m;
            m.weight = term.at("weight").get<double>();
            m.center = number_list(term.at("center"), spec.dims, "center");
            if (term.contains("gauss")) m.gauss = number_list(term.at("gauss"), spec.dims, "gauss");
            if (term.contains("expo")) m.expo = number_list(term.at("expo"), spec.dims, "expo");
            if (term.contains("poisson")) m.poisson = number_list(term.at("poisson"), spec.dims, "poisson");
            if (term.contains("point")) {
                const auto& p = term.at("point");
                if (p.is_boolean()) {
                    m.point.assign(static_cast<std::size_t>(spec.dims), p.get<bool>());
                } else {
                    for (const auto& v : p) m.point.push_back(v.get<bool>());
                    if (static_cast<int>(m.point.size()) != spec.dims)
                        throw std::runtime_error("spec: point mask length does not match dims");
                }
            }
            spec.mixture.push_back(std::move(m));
        }
    }
    if (j.contains("empirical")) {
        ++sources;
        spec.empirical_ref = j.at("empirical").get<std::string>();
    }
    if (sources != 1) throw std::runtime_error("spec: exactly one of table, mixture, empirical required");
    return spec;
}

DistributionSpec load_distribution_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("spec not found: " + path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        nlohmann::json j;
        in >> j;
        return parse_distribution_spec(j);
    }
    return parse_distribution_spec(parse_toml_file(path));
}

namespace {

double mixture_value(const DistributionSpec& spec, const std::vector<Eigen::Index>& idx) {
    double total = 0.0;
    for (const auto& t : spec.mixture) {
        double expo = 0.0;
        bool alive = true;
        for (int d = 0; d < spec.dims; ++d) {
            const double x = double(idx[static_cast<std::size_t>(d)]);
            const double c = t.center[static_cast<std::size_t>(d)];
            if (!t.point.empty() && t.point[static_cast<std::size_t>(d)] && x != c) {
                alive = false;
                break;
            }
            const double dx = x - c;
            if (!t.gauss.empty()) expo += t.gauss[static_cast<std::size_t>(d)] * dx * dx;
            if (!t.expo.empty()) expo += t.expo[static_cast<std::size_t>(d)] * std::abs(dx);
            if (!t.poisson.empty() && t.poisson[static_cast<std::size_t>(d)] > 0.0)
                expo -= x * std::log(t.poisson[static_cast<std::size_t>(d)]) - std::lgamma(x + 1.0);
        }
        if (alive) total += t.weight * std::exp(-expo);
    }
    return total;
}

Lattice<double> evaluate_mixture(const DistributionSpec& spec, const std::vector<Eigen::Index>& cutoffs) {
    std::vector<Eigen::Index> shape;
    for (auto c : cutoffs) shape.push_back(c + 1);
    Lattice<double> lat(shape);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < lat.size(); ++off) {
        lat.unravel(off, idx);
        const double v = mixture_value(spec, idx);
        if (v < 0) throw DegreeError("spec: mixture takes negative values on the grid");
        lat.flat()[off] = v;
    }
    return lat;
}

}  // namespace

DegreeDistribution<double> build_distribution(const DistributionSpec& spec) {
    if (spec.empirical_ref) {
        DistributionSpec inner = load_distribution_spec(*spec.empirical_ref);
        if (!inner.table) throw std::runtime_error("spec: empirical reference must be a table spec");
        return build_distribution(inner);
    }
    if (spec.table) {
        std::vector<Eigen::Index> shape;
        Eigen::Index total = 1;
        for (auto c : spec.cutoffs) {
            shape.push_back(c + 1);
            total *= c + 1;
        }
        if (static_cast<Eigen::Index>(spec.table->size()) != total)
            throw std::runtime_error("spec: table values length does not match shape");
        Lattice<double> lat(shape, Eigen::Map<const Eigen::ArrayXd>(spec.table->data(), total));
        return make_distribution(spec.kind, std::move(lat));
    }

    // mixture: fixed cutoffs if given, otherwise grow until the estimated tail fades
    std::vector<Eigen::Index> cutoffs = spec.cutoffs;
    if (cutoffs.empty()) {
        Eigen::Index K = 8;
        for (; K <= 4096; K *= 2) {
            std::vector<Eigen::Index> base(static_cast<std::size_t>(spec.dims), K);
            std::vector<Eigen::Index> ext(static_cast<std::size_t>(spec.dims), K + K / 2);
            const double mass_base = evaluate_mixture(spec, base).sum();
            const double mass_ext = evaluate_mixture(spec, ext).sum();
            if (mass_ext > 0 && (mass_ext - mass_base) / mass_ext < 1e-10) break;
        }
        if (K > 4096) throw DegreeError("spec: automatic cutoff exceeded 4096; specify cutoffs");
        cutoffs.assign(static_cast<std::size_t>(spec.dims), K);
    }
    Lattice<double> lat = evaluate_mixture(spec, cutoffs);
    // estimate the truncation tail on a grid extended by 50%
    std::vector<Eigen::Index> ext;
    for (auto c : cutoffs) ext.push_back(c + c / 2 + 1);
    const double mass_base = lat.sum();
    const double mass_ext = evaluate_mixture(spec, ext).sum();
    const double tail = mass_ext > 0 ? std::max(0.0, (mass_ext - mass_base) / mass_ext) : 0.0;
    return make_distribution(spec.kind, std::move(lat), tail);
}

void write_table_spec(const std::string& path, const DegreeDistribution<double>& u) {
    nlohmann::json j;
    j["kind"] = to_string(u.kind);
    j["dims"] = u.dims();
    std::vector<Eigen::Index> cut;
    std::vector<Eigen::Index> shape = u.mass.shape();
    for (auto s : shape) cut.push_back(s - 1);
    j["cutoffs"] = cut;
    j["table"]["shape"] = shape;
    std::vector<double> vals(u.mass.flat().data(), u.mass.flat().data() + u.mass.size());
    j["table"]["values"] = vals;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write spec: " + path);
    out << std::setprecision(17) << j.dump(1) << "\n";
}

}  // namespace netcomp
