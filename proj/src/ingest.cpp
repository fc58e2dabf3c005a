#include "netcomp/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace netcomp {

namespace {

bool split_fields(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    std::string cur;
    for (char c : line) {
        if (c == '#') break;
        if (c == ' ' || c == '\t' || c == ',' || c == ';' || c == '\r') {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return !out.empty();
}

bool parse_ll(const std::string& s, long long& v) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

EdgeList load_edges(const std::string& path, bool directed) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("edge list not found: " + path);
    EdgeList el;
    el.directed = directed;
    std::unordered_map<long long, Eigen::Index> remap;
    auto id_of = [&](long long orig) {
        auto [it, inserted] = remap.emplace(orig, static_cast<Eigen::Index>(el.original_ids.size()));
        if (inserted) el.original_ids.push_back(orig);
        return it->second;
    };
    std::string line;
    std::vector<std::string> f;
    long lineno = 0;
    bool first_data_line = true;
    int max_layer = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!split_fields(line, f)) continue;
        long long a, b, layer = 1;
        const bool ok = f.size() >= 2 && f.size() <= 3 && parse_ll(f[0], a) && parse_ll(f[1], b) &&
                        (f.size() < 3 || parse_ll(f[2], layer));
        if (!ok) {
            if (first_data_line) {  // tolerated header
                first_data_line = false;
                continue;
            }
            throw std::runtime_error("malformed edge list line " + std::to_string(lineno) + ": '" + line + "'");
        }
        first_data_line = false;
        if (layer < 1) throw std::runtime_error("edge list line " + std::to_string(lineno) + ": layer out of range");
        max_layer = std::max<int>(max_layer, static_cast<int>(layer));
        el.edges.push_back({id_of(a), id_of(b), static_cast<Eigen::Index>(layer - 1)});
    }
    el.layers = max_layer;
    if (el.layers > 1) el.directed = false;
    el.nodes = static_cast<Eigen::Index>(el.original_ids.size());
    return el;
}

EdgeList edge_list_from_graph(const MultiGraph& g) {
    EdgeList el;
    el.directed = g.directed;
    el.layers = g.directed ? 1 : g.layers;
    el.nodes = g.nodes;
    el.original_ids.resize(static_cast<std::size_t>(g.nodes));
    std::iota(el.original_ids.begin(), el.original_ids.end(), 0LL);
    if (g.directed) {
        const auto& off = g.offsets[0];
        const auto& tgt = g.targets[0];
        for (Eigen::Index v = 0; v < g.nodes; ++v)
            for (Eigen::Index e = off[static_cast<std::size_t>(v)]; e < off[static_cast<std::size_t>(v + 1)]; ++e)
                el.edges.push_back({v, tgt[static_cast<std::size_t>(e)], 0});
    } else {
        for (int layer = 0; layer < g.layers; ++layer) {
            const auto& off = g.offsets[static_cast<std::size_t>(layer)];
            const auto& tgt = g.targets[static_cast<std::size_t>(layer)];
            for (Eigen::Index v = 0; v < g.nodes; ++v)
                for (Eigen::Index e = off[static_cast<std::size_t>(v)]; e < off[static_cast<std::size_t>(v + 1)]; ++e) {
                    const Eigen::Index w = tgt[static_cast<std::size_t>(e)];
                    if (v <= w) el.edges.push_back({v, w, layer});  // undirected edge stored once
                }
        }
    }
    return el;
}

void write_edges(const std::string& path, const EdgeList& e) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write edge list: " + path);
    out << "# src dst" << (e.layers > 1 ? " layer\n" : "\n");
    for (const auto& ed : e.edges) {
        out << e.original_ids[static_cast<std::size_t>(ed[0])] << ' '
            << e.original_ids[static_cast<std::size_t>(ed[1])];
        if (e.layers > 1) out << ' ' << (ed[2] + 1);
        out << '\n';
    }
}

DegreeDistribution<double> empirical_degree_distribution(const EdgeList& e, Eigen::Index cutoff) {
    if (e.nodes == 0) throw std::runtime_error("empirical degree distribution: empty graph");
    const int dims = e.directed ? 2 : std::max(e.layers, 1);
    std::vector<std::int64_t> deg(static_cast<std::size_t>(e.nodes) * static_cast<std::size_t>(dims), 0);
    for (const auto& ed : e.edges) {
        if (e.directed) {
            ++deg[static_cast<std::size_t>(ed[1]) * 2 + 0];  // in-degree of target
            ++deg[static_cast<std::size_t>(ed[0]) * 2 + 1];  // out-degree of source
        } else {
            ++deg[static_cast<std::size_t>(ed[0]) * static_cast<std::size_t>(dims) + static_cast<std::size_t>(ed[2])];
            ++deg[static_cast<std::size_t>(ed[1]) * static_cast<std::size_t>(dims) + static_cast<std::size_t>(ed[2])];
        }
    }
    std::vector<Eigen::Index> shape(static_cast<std::size_t>(dims), cutoff + 1);
    Lattice<double> hist(shape);
    Eigen::Index dropped = 0;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(dims));
    for (Eigen::Index v = 0; v < e.nodes; ++v) {
        bool inside = true;
        for (int d = 0; d < dims; ++d) {
            idx[static_cast<std::size_t>(d)] =
                static_cast<Eigen::Index>(deg[static_cast<std::size_t>(v) * static_cast<std::size_t>(dims) + static_cast<std::size_t>(d)]);
            if (idx[static_cast<std::size_t>(d)] > cutoff) inside = false;
        }
        if (inside)
            hist(idx) += 1.0;
        else
            ++dropped;
    }
    const double tail = double(dropped) / double(e.nodes);
    return make_distribution(e.directed ? DistributionKind::directed : DistributionKind::multiplex,
                             std::move(hist), tail);
}

ComponentCensus weak_census(const EdgeList& e) {
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(e.nodes));
    std::vector<Eigen::Index> size(static_cast<std::size_t>(e.nodes), 1);
    std::iota(parent.begin(), parent.end(), Eigen::Index(0));
    std::function<Eigen::Index(Eigen::Index)> find = [&](Eigen::Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (const auto& ed : e.edges) {
        Eigen::Index a = find(ed[0]), b = find(ed[1]);
        if (a == b) continue;
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
    }
    ComponentCensus census;
    census.kind = e.layers > 1 ? ComponentKind::multilayer : ComponentKind::weak;
    census.population = e.nodes;
    long largest = 0;
    for (Eigen::Index v = 0; v < e.nodes; ++v)
        if (find(v) == v) {
            const long s = static_cast<long>(size[static_cast<std::size_t>(v)]);
            ++census.counts[s];
            largest = std::max(largest, s);
        }
    census.largest_fraction = e.nodes > 0 ? double(largest) / double(e.nodes) : 0.0;
    return census;
}

void write_census_csv(const std::string& path, const ComponentCensus& census) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write census: " + path);
    out << "n,count,node_weighted_probability\n";
    out.precision(17);
    for (const auto& [n, c] : census.counts) out << n << ',' << c << ',' << census.empirical_w(n) << '\n';
}

ComponentCensus read_census_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("census not found: " + path);
    ComponentCensus census;
    std::string line;
    std::getline(in, line);  // header
    long pop = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, c, ',');
        const long n = std::stol(a), cnt = std::stol(b);
        census.counts[n] = cnt;
        pop += n * cnt;
    }
    census.population = pop;  // node-weighted convention; rooted censuses carry their own metadata
    return census;
}

}  // namespace netcomp
