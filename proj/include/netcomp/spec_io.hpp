#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "netcomp/degree.hpp"

namespace netcomp {

// One term of a closed-form mixture: weight * exp(-sum_d [gauss_d (x_d-c_d)^2
// + expo_d |x_d-c_d|]) * prod_d poisson_d^{x_d}/x_d!, optionally pinned to
// x_d == c_d where point_d is set. Zero gauss/expo/poisson entries switch the
// corresponding factor off.
struct MixtureTerm {
    double weight = 0.0;
    std::vector<double> center;
    std::vector<double> gauss;
    std::vector<double> expo;
    std::vector<double> poisson;
    std::vector<bool> point;
};

struct DistributionSpec {
    DistributionKind kind = DistributionKind::directed;
    int dims = 2;
    std::vector<Eigen::Index> cutoffs;  // empty: choose automatically
    // exactly one of:
    std::optional<std::vector<double>> table;  // row-major, shape = cutoffs + 1
    std::vector<MixtureTerm> mixture;
    std::optional<std::string> empirical_ref;  // path to a table spec written by ingest
};

DistributionSpec parse_distribution_spec(const nlohmann::json& j);

// Loads .toml or .json by extension (JSON accepted everywhere).
DistributionSpec load_distribution_spec(const std::string& path);

// Evaluates the spec on its truncated grid and renormalizes. The default
// cutoff doubles until the tail estimated on a grid extended by 50% drops
// below 1e-10.
DegreeDistribution<double> build_distribution(const DistributionSpec& spec);

inline DegreeDistribution<double> load_distribution(const std::string& path) {
    return build_distribution(load_distribution_spec(path));
}

// Writes a dense-table spec (used by ingest to hand empirical laws back).
void write_table_spec(const std::string& path, const DegreeDistribution<double>& u);

}  // namespace netcomp
