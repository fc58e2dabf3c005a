#include "netcomp/simulator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace netcomp {

double ComponentCensus::empirical_w(long n) const {
    auto it = counts.find(n);
    if (it == counts.end()) return 0.0;
    if (kind == ComponentKind::weak || kind == ComponentKind::multilayer)
        return double(n) * double(it->second) / double(population);
    return double(it->second) / double(population);
}

long ComponentCensus::total_components() const {
    long t = 0;
    for (const auto& [n, c] : counts) t += c;
    return t;
}

AliasTable::AliasTable(const Eigen::ArrayXd& weights) {
    const Eigen::Index n = weights.size();
    prob_.resize(static_cast<std::size_t>(n));
    alias_.resize(static_cast<std::size_t>(n));
    const double total = weights.sum();
    if (!(total > 0)) throw std::invalid_argument("alias table: zero total weight");
    std::vector<double> scaled(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) scaled[static_cast<std::size_t>(i)] = weights[i] * double(n) / total;
    std::vector<Eigen::Index> small, large;
    for (Eigen::Index i = 0; i < n; ++i) (scaled[static_cast<std::size_t>(i)] < 1.0 ? small : large).push_back(i);
    while (!small.empty() && !large.empty()) {
        const Eigen::Index s = small.back();
        small.pop_back();
        const Eigen::Index l = large.back();
        prob_[static_cast<std::size_t>(s)] = scaled[static_cast<std::size_t>(s)];
        alias_[static_cast<std::size_t>(s)] = l;
        scaled[static_cast<std::size_t>(l)] -= 1.0 - scaled[static_cast<std::size_t>(s)];
        if (scaled[static_cast<std::size_t>(l)] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (Eigen::Index i : large) {
        prob_[static_cast<std::size_t>(i)] = 1.0;
        alias_[static_cast<std::size_t>(i)] = i;
    }
    for (Eigen::Index i : small) {
        prob_[static_cast<std::size_t>(i)] = 1.0;
        alias_[static_cast<std::size_t>(i)] = i;
    }
}

Eigen::Index AliasTable::draw(std::mt19937_64& rng) const {
    const std::size_t n = prob_.size();
    const std::uint64_t r = rng();
    const std::size_t cell = static_cast<std::size_t>(r % n);
    const double u = double(r >> 11) * 0x1.0p-53;
    return u < prob_[cell] ? static_cast<Eigen::Index>(cell) : alias_[cell];
}

namespace {

struct CellTable {
    std::vector<std::vector<std::int32_t>> coords;  // cell -> degree vector
    AliasTable alias;

    CellTable(const Lattice<double>& mass, int dims)
        : coords(static_cast<std::size_t>(mass.size())), alias(build_alias(mass)) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index off = 0; off < mass.size(); ++off) {
            mass.unravel(off, idx);
            auto& c = coords[static_cast<std::size_t>(off)];
            c.resize(static_cast<std::size_t>(dims));
            for (int d = 0; d < dims; ++d) c[static_cast<std::size_t>(d)] = static_cast<std::int32_t>(idx[static_cast<std::size_t>(d)]);
        }
    }

    static AliasTable build_alias(const Lattice<double>& mass) { return AliasTable(mass.flat()); }
};

std::vector<std::vector<Eigen::Index>> csr_from_edges(Eigen::Index nodes,
                                                      const std::vector<Eigen::Index>& from,
                                                      const std::vector<Eigen::Index>& to,
                                                      std::vector<Eigen::Index>& targets_out,
                                                      bool undirected) {
    std::vector<Eigen::Index> deg(static_cast<std::size_t>(nodes), 0);
    for (std::size_t e = 0; e < from.size(); ++e) {
        ++deg[static_cast<std::size_t>(from[e])];
        if (undirected) ++deg[static_cast<std::size_t>(to[e])];
    }
    std::vector<Eigen::Index> offsets(static_cast<std::size_t>(nodes + 1), 0);
    for (Eigen::Index v = 0; v < nodes; ++v) offsets[static_cast<std::size_t>(v + 1)] = offsets[static_cast<std::size_t>(v)] + deg[static_cast<std::size_t>(v)];
    targets_out.assign(static_cast<std::size_t>(offsets.back()), 0);
    std::vector<Eigen::Index> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t e = 0; e < from.size(); ++e) {
        targets_out[static_cast<std::size_t>(cursor[static_cast<std::size_t>(from[e])]++)] = to[e];
        if (undirected) targets_out[static_cast<std::size_t>(cursor[static_cast<std::size_t>(to[e])]++)] = from[e];
    }
    std::vector<std::vector<Eigen::Index>> wrap(1);
    wrap[0] = std::move(offsets);
    return wrap;
}

}  // namespace

MultiGraph sample_graph(const DegreeDistribution<double>& u, Eigen::Index nodes, std::uint64_t seed,
                        const SimulatorOptions& opt) {
    if (nodes < 1) throw std::invalid_argument("sample_graph: need at least one node");
    const int dims = u.dims();
    const bool directed = (u.kind == DistributionKind::directed);
    std::mt19937_64 rng(seed);
    CellTable cells(u.mass, dims);

    MultiGraph g;
    g.nodes = nodes;
    g.directed = directed;
    g.layers = directed ? 1 : dims;
    g.degree_dims = dims;
    g.degrees.assign(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(dims), 0);

    auto draw_all = [&]() {
        for (Eigen::Index v = 0; v < nodes; ++v) {
            const auto& c = cells.coords[static_cast<std::size_t>(cells.alias.draw(rng))];
            for (int d = 0; d < dims; ++d)
                g.degrees[static_cast<std::size_t>(v) * static_cast<std::size_t>(dims) + static_cast<std::size_t>(d)] = c[static_cast<std::size_t>(d)];
        }
    };
    auto coord_sum = [&](int d) {
        long long s = 0;
        for (Eigen::Index v = 0; v < nodes; ++v)
            s += g.degrees[static_cast<std::size_t>(v) * static_cast<std::size_t>(dims) + static_cast<std::size_t>(d)];
        return s;
    };

    if (directed) {
        // stub balance: full resamples first, then single-node conditioned redraws
        bool balanced = false;
        for (int attempt = 0; attempt < opt.max_full_resamples; ++attempt) {
            draw_all();
            if (coord_sum(0) == coord_sum(1)) {
                balanced = true;
                break;
            }
        }
        if (!balanced) {
            long long gap = coord_sum(0) - coord_sum(1);  // need to remove gap from (k - l)
            std::uniform_int_distribution<Eigen::Index> pick(0, nodes - 1);
            int tries = 0;
            while (gap != 0) {
                if (++tries > opt.max_single_repairs)
                    throw std::runtime_error("sample_graph: stub-balance repair failed (pathological distribution)");
                const Eigen::Index v = pick(rng);
                const std::size_t base = static_cast<std::size_t>(v) * static_cast<std::size_t>(dims);
                const long long have = g.degrees[base] - g.degrees[base + 1];
                const long long want = have - gap;
                // redraw node v conditioned on k - l == want when possible,
                // otherwise accept a redraw that shrinks the gap
                const Eigen::Index cell = cells.alias.draw(rng);
                const auto& c = cells.coords[static_cast<std::size_t>(cell)];
                const long long got = c[0] - c[1];
                const long long new_gap = gap + (got - have);
                if (got == want || std::llabs(new_gap) < std::llabs(gap)) {
                    g.degrees[base] = c[0];
                    g.degrees[base + 1] = c[1];
                    gap = new_gap;
                }
            }
        }
    } else {
        draw_all();
        // per-layer parity repair: redraw single nodes, preserving the parity of
        // already-fixed layers
        for (int layer = 0; layer < dims; ++layer) {
            int tries = 0;
            while (coord_sum(layer) % 2 != 0) {
                if (++tries > opt.max_single_repairs)
                    throw std::runtime_error("sample_graph: parity repair failed (pathological distribution)");
                std::uniform_int_distribution<Eigen::Index> pick(0, nodes - 1);
                const Eigen::Index v = pick(rng);
                const std::size_t base = static_cast<std::size_t>(v) * static_cast<std::size_t>(dims);
                const Eigen::Index cell = cells.alias.draw(rng);
                const auto& c = cells.coords[static_cast<std::size_t>(cell)];
                bool ok = (((c[static_cast<std::size_t>(layer)] ^ g.degrees[base + static_cast<std::size_t>(layer)]) & 1) == 1);
                for (int fixed = 0; ok && fixed < layer; ++fixed)
                    ok = (((c[static_cast<std::size_t>(fixed)] ^ g.degrees[base + static_cast<std::size_t>(fixed)]) & 1) == 0);
                if (!ok) continue;
                for (int d = 0; d < dims; ++d) g.degrees[base + static_cast<std::size_t>(d)] = c[static_cast<std::size_t>(d)];
            }
        }
    }

    // stub pairing
    if (directed) {
        std::vector<Eigen::Index> out_stubs, in_stubs;
        for (Eigen::Index v = 0; v < nodes; ++v) {
            const std::size_t base = static_cast<std::size_t>(v) * static_cast<std::size_t>(dims);
            for (std::int32_t s = 0; s < g.degrees[base + 1]; ++s) out_stubs.push_back(v);
            for (std::int32_t s = 0; s < g.degrees[base]; ++s) in_stubs.push_back(v);
        }
        std::shuffle(in_stubs.begin(), in_stubs.end(), rng);
        std::vector<Eigen::Index> tgt;
        auto off = csr_from_edges(nodes, out_stubs, in_stubs, tgt, false);
        g.offsets.push_back(std::move(off[0]));
        g.targets.push_back(std::move(tgt));
        std::vector<Eigen::Index> rtgt;
        auto roff = csr_from_edges(nodes, in_stubs, out_stubs, rtgt, false);
        g.reverse_offsets.push_back(std::move(roff[0]));
        g.reverse_targets.push_back(std::move(rtgt));
    } else {
        for (int layer = 0; layer < dims; ++layer) {
            std::vector<Eigen::Index> stubs;
            for (Eigen::Index v = 0; v < nodes; ++v) {
                const std::size_t base = static_cast<std::size_t>(v) * static_cast<std::size_t>(dims);
                for (std::int32_t s = 0; s < g.degrees[base + static_cast<std::size_t>(layer)]; ++s) stubs.push_back(v);
            }
            std::shuffle(stubs.begin(), stubs.end(), rng);
            std::vector<Eigen::Index> from, to;
            for (std::size_t t = 0; t + 1 < stubs.size(); t += 2) {
                from.push_back(stubs[t]);
                to.push_back(stubs[t + 1]);
            }
            std::vector<Eigen::Index> tgt;
            auto off = csr_from_edges(nodes, from, to, tgt, true);
            g.offsets.push_back(std::move(off[0]));
            g.targets.push_back(std::move(tgt));
        }
    }
    return g;
}

namespace {

struct DisjointSet {
    std::vector<Eigen::Index> parent;
    std::vector<Eigen::Index> size;

    explicit DisjointSet(Eigen::Index n) : parent(static_cast<std::size_t>(n)), size(static_cast<std::size_t>(n), 1) {
        std::iota(parent.begin(), parent.end(), Eigen::Index(0));
    }
    Eigen::Index find(Eigen::Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(Eigen::Index a, Eigen::Index b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
    }
};

}  // namespace

ComponentCensus weak_census(const MultiGraph& g) {
    DisjointSet ds(g.nodes);
    for (std::size_t layer = 0; layer < g.targets.size(); ++layer) {
        const auto& off = g.offsets[layer];
        const auto& tgt = g.targets[layer];
        for (Eigen::Index v = 0; v < g.nodes; ++v)
            for (Eigen::Index e = off[static_cast<std::size_t>(v)]; e < off[static_cast<std::size_t>(v + 1)]; ++e)
                ds.unite(v, tgt[static_cast<std::size_t>(e)]);
    }
    ComponentCensus census;
    census.kind = g.directed ? ComponentKind::weak : ComponentKind::multilayer;
    census.population = g.nodes;
    long largest = 0;
    for (Eigen::Index v = 0; v < g.nodes; ++v) {
        if (ds.find(v) == v) {
            const long s = static_cast<long>(ds.size[static_cast<std::size_t>(v)]);
            ++census.counts[s];
            largest = std::max(largest, s);
        }
    }
    census.largest_fraction = double(largest) / double(g.nodes);
    return census;
}

ComponentCensus in_out_census(const MultiGraph& g, ComponentKind side, long sample_roots,
                              std::uint64_t seed, const SimulatorOptions& opt) {
    if (!g.directed) throw std::invalid_argument("in_out_census: directed graph required");
    if (side != ComponentKind::in_component && side != ComponentKind::out_component)
        throw std::invalid_argument("in_out_census: side must be in or out");
    const auto& off = (side == ComponentKind::out_component) ? g.offsets[0] : g.reverse_offsets[0];
    const auto& tgt = (side == ComponentKind::out_component) ? g.targets[0] : g.reverse_targets[0];

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, g.nodes - 1);
    std::vector<std::uint32_t> stamp(static_cast<std::size_t>(g.nodes), 0);
    std::uint32_t epoch = 0;
    std::vector<Eigen::Index> queue;

    ComponentCensus census;
    census.kind = side;
    census.population = sample_roots;
    for (long r = 0; r < sample_roots; ++r) {
        const Eigen::Index root = pick(rng);
        ++epoch;
        queue.clear();
        queue.push_back(root);
        stamp[static_cast<std::size_t>(root)] = epoch;
        long size = 1;
        bool censored = false;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const Eigen::Index v = queue[qi];
            for (Eigen::Index e = off[static_cast<std::size_t>(v)]; e < off[static_cast<std::size_t>(v + 1)]; ++e) {
                const Eigen::Index w = tgt[static_cast<std::size_t>(e)];
                if (stamp[static_cast<std::size_t>(w)] != epoch) {
                    stamp[static_cast<std::size_t>(w)] = epoch;
                    queue.push_back(w);
                    ++size;
                }
            }
            if (size > opt.size_ceiling) {
                censored = true;
                break;
            }
        }
        if (censored)
            ++census.censored;
        else
            ++census.counts[size];
    }
    return census;
}

Lattice<double> degree_histogram(const MultiGraph& g, const std::vector<Eigen::Index>& shape) {
    Lattice<double> h(shape);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(g.degree_dims));
    for (Eigen::Index v = 0; v < g.nodes; ++v) {
        bool inside = true;
        for (int d = 0; d < g.degree_dims; ++d) {
            idx[static_cast<std::size_t>(d)] =
                g.degrees[static_cast<std::size_t>(v) * static_cast<std::size_t>(g.degree_dims) + static_cast<std::size_t>(d)];
            if (idx[static_cast<std::size_t>(d)] >= shape[static_cast<std::size_t>(d)]) inside = false;
        }
        if (inside) h(idx) += 1.0;
    }
    h.flat() /= double(g.nodes);
    return h;
}

}  // namespace netcomp
