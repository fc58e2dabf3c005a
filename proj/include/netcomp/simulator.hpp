#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "netcomp/components_directed.hpp"
#include "netcomp/degree.hpp"

namespace netcomp {

// Sampled configuration-model multigraph. Self-loops and parallel edges are
// kept. For directed graphs layer 0 holds the out-adjacency and the reverse
// adjacency is stored separately; multiplex layers are undirected.
struct MultiGraph {
    Eigen::Index nodes = 0;
    bool directed = false;
    int layers = 1;
    // CSR per layer; undirected edges appear in both endpoint rows
    std::vector<std::vector<Eigen::Index>> offsets;  // size layers (+1 for reverse if directed)
    std::vector<std::vector<Eigen::Index>> targets;
    std::vector<std::vector<Eigen::Index>> reverse_offsets;  // directed only
    std::vector<std::vector<Eigen::Index>> reverse_targets;
    // drawn degree sequence, row-major (node, coordinate)
    std::vector<std::int32_t> degrees;
    int degree_dims = 0;

    Eigen::Index edge_count(int layer) const { return static_cast<Eigen::Index>(targets[static_cast<std::size_t>(layer)].size()); }
};

struct ComponentCensus {
    ComponentKind kind = ComponentKind::weak;
    std::map<long, long> counts;  // c(n): components of size n (weak) or sampled roots (in/out)
    long population = 0;          // node count (weak) or number of sampled roots
    long censored = 0;            // rooted explorations that hit the size ceiling
    double largest_fraction = 0.0;

    // node-weighted empirical size distribution: n c(n) / N (weak), c(n)/samples (rooted)
    double empirical_w(long n) const;
    long total_components() const;
};

struct SimulatorOptions {
    int max_full_resamples = 1000;   // directed stub-balance repair
    int max_single_repairs = 100000;
    long size_ceiling = 1000000;     // rooted census cap
};

MultiGraph sample_graph(const DegreeDistribution<double>& u, Eigen::Index nodes, std::uint64_t seed,
                        const SimulatorOptions& opt = {});

ComponentCensus weak_census(const MultiGraph& g);

ComponentCensus in_out_census(const MultiGraph& g, ComponentKind side, long sample_roots,
                              std::uint64_t seed, const SimulatorOptions& opt = {});

// Joint degree histogram of the realized graph (normalized), on the same grid as u.
Lattice<double> degree_histogram(const MultiGraph& g, const std::vector<Eigen::Index>& shape);

// Draws from a discrete distribution in O(1) per draw.
class AliasTable {
public:
    explicit AliasTable(const Eigen::ArrayXd& weights);
    Eigen::Index draw(std::mt19937_64& rng) const;

private:
    std::vector<double> prob_;
    std::vector<Eigen::Index> alias_;
};

}  // namespace netcomp
