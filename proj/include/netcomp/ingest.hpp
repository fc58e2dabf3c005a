#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "netcomp/degree.hpp"
#include "netcomp/simulator.hpp"

namespace netcomp {

struct EdgeList {
    bool directed = true;
    int layers = 1;  // > 1: multiplex (undirected layers)
    Eigen::Index nodes = 0;
    std::vector<std::array<Eigen::Index, 3>> edges;  // (src, dst, layer-1), remapped ids
    std::vector<long long> original_ids;             // remap table: new id -> original id
};

// Parses whitespace- or comma-separated "src dst [layer]" lines; '#' starts a
// comment; a leading non-numeric header line is skipped. Multi-edges are kept.
EdgeList load_edges(const std::string& path, bool directed);

EdgeList edge_list_from_graph(const MultiGraph& g);

void write_edges(const std::string& path, const EdgeList& e);

// Joint (in,out) or per-layer degree histogram, truncated at `cutoff`;
// nodes with any coordinate beyond the cutoff are dropped and reported as
// tail mass.
DegreeDistribution<double> empirical_degree_distribution(const EdgeList& e, Eigen::Index cutoff);

ComponentCensus weak_census(const EdgeList& e);

void write_census_csv(const std::string& path, const ComponentCensus& census);
ComponentCensus read_census_csv(const std::string& path);

}  // namespace netcomp
