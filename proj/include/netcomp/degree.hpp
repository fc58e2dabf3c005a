#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netcomp/lattice.hpp"

namespace netcomp {

enum class DistributionKind { directed, multiplex };

inline const char* to_string(DistributionKind k) {
    return k == DistributionKind::directed ? "directed" : "multiplex";
}

struct DegreeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kMassTolerance = 1e-9;
inline constexpr double kBalanceTolerance = 1e-6;

// Joint degree distribution on a truncated grid. Immutable after construction;
// construction renormalizes explicitly and keeps the applied factor.
template <typename Scalar = double>
struct DegreeDistribution {
    DistributionKind kind = DistributionKind::directed;
    Lattice<Scalar> mass;
    Scalar renormalization = Scalar(1);  // raw total mass divided out
    Scalar truncation_tail = Scalar(0);  // estimated mass lost to the cutoff (closed forms)

    int dims() const { return mass.dims(); }
};

template <typename Scalar>
struct MomentSet {
    int dims = 2;
    std::map<std::vector<int>, Scalar> partial;  // all |alpha| <= 3

    Eigen::Matrix<Scalar, 2, 1> mu0, mu1, mu2;
    Eigen::Matrix<Scalar, 2, 2> Sigma0, Sigma1, Sigma2;

    Scalar mu(int i, int j) const { return partial.at({i, j}); }
    Scalar mu(const std::vector<int>& alpha) const { return partial.at(alpha); }
};

template <typename Scalar>
struct ExcessDistribution {
    Lattice<Scalar> mass;
    int coord = 0;  // size-biased coordinate
};

namespace detail {

template <typename Scalar>
void check_distribution(const Lattice<Scalar>& m, DistributionKind kind) {
    for (Eigen::Index off = 0; off < m.size(); ++off)
        if (m.flat()[off] < Scalar(0)) throw DegreeError("degree distribution has negative entries");
    const Scalar total = m.sum();
    using std::abs;
    if (abs(total - Scalar(1)) > Scalar(kMassTolerance))
        throw DegreeError("degree distribution mass differs from 1 beyond tolerance");
    if (kind == DistributionKind::directed) {
        if (m.dims() != 2) throw DegreeError("directed distribution must be bivariate");
        Scalar m10 = 0, m01 = 0;
        std::vector<Eigen::Index> idx;
        for (Eigen::Index off = 0; off < m.size(); ++off) {
            const Scalar v = m.flat()[off];
            if (v == Scalar(0)) continue;
            m.unravel(off, idx);
            m10 += Scalar(idx[0]) * v;
            m01 += Scalar(idx[1]) * v;
        }
        if (abs(m10 - m01) > Scalar(kBalanceTolerance))
            throw DegreeError("directed balance violated: mean in-degree differs from mean out-degree");
    }
}

}  // namespace detail

template <typename Scalar>
DegreeDistribution<Scalar> make_distribution(DistributionKind kind, Lattice<Scalar> raw,
                                             Scalar truncation_tail = Scalar(0)) {
    const Scalar total = raw.sum();
    if (!(total > Scalar(0))) throw DegreeError("degree distribution is identically zero");
    for (Eigen::Index off = 0; off < raw.size(); ++off)
        if (raw.flat()[off] < Scalar(0)) throw DegreeError("degree distribution has negative entries");
    raw.flat() /= total;
    detail::check_distribution(raw, kind);
    return {kind, std::move(raw), total, truncation_tail};
}

// --- moments -------------------------------------------------------------

template <typename Scalar>
MomentSet<Scalar> moments(const DegreeDistribution<Scalar>& u) {
    return moments(u.mass, u.kind == DistributionKind::directed);
}

template <typename Scalar>
MomentSet<Scalar> moments(const Lattice<Scalar>& m, bool assert_balance = false) {
    MomentSet<Scalar> out;
    const int d = m.dims();
    out.dims = d;

    // enumerate exponent vectors with |alpha| <= 3
    std::vector<std::vector<int>> alphas;
    std::vector<int> a(static_cast<std::size_t>(d), 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == d) { alphas.push_back(a); return; }
        for (int e = 0; e <= left; ++e) {
            a[static_cast<std::size_t>(pos)] = e;
            rec(pos + 1, left - e);
        }
        a[static_cast<std::size_t>(pos)] = 0;
    };
    rec(0, 3);
    for (const auto& al : alphas) out.partial[al] = Scalar(0);

    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < m.size(); ++off) {
        const Scalar v = m.flat()[off];
        if (v == Scalar(0)) continue;
        m.unravel(off, idx);
        for (const auto& al : alphas) {
            Scalar term = v;
            for (int q = 0; q < d; ++q)
                for (int e = 0; e < al[static_cast<std::size_t>(q)]; ++e) term *= Scalar(idx[static_cast<std::size_t>(q)]);
            out.partial[al] += term;
        }
    }

    if (d == 2) {
        const Scalar m10 = out.mu(1, 0), m01 = out.mu(0, 1), m20 = out.mu(2, 0), m02 = out.mu(0, 2),
                     m11 = out.mu(1, 1), m30 = out.mu(3, 0), m03 = out.mu(0, 3), m21 = out.mu(2, 1),
                     m12 = out.mu(1, 2);
        out.mu0 << m10, m01;
        out.Sigma0 << m20 - m10 * m10, m11 - m10 * m01, m11 - m10 * m01, m02 - m01 * m01;
        if (m10 > Scalar(0)) {
            out.mu1 << m20 / m10, m11 / m10;
            out.Sigma1 << (m30 * m10 - m20 * m20), (m21 * m10 - m11 * m20), (m21 * m10 - m11 * m20),
                (m12 * m10 - m11 * m11);
            out.Sigma1 /= m10 * m10;
        } else {
            out.mu1.setZero();
            out.Sigma1.setZero();
        }
        if (m01 > Scalar(0)) {
            out.mu2 << m11 / m01, m02 / m01;
            out.Sigma2 << (m21 * m01 - m11 * m11), (m12 * m01 - m02 * m11), (m12 * m01 - m02 * m11),
                (m03 * m01 - m02 * m02);
            out.Sigma2 /= m01 * m01;
        } else {
            out.mu2.setZero();
            out.Sigma2.setZero();
        }
        if (assert_balance) {
            using std::abs;
            if (abs(m10 - m01) > Scalar(kBalanceTolerance))
                throw DegreeError("directed balance violated in moments");
        }
    }
    return out;
}

// --- excess distributions ------------------------------------------------

// Size-biased shift along `coord`: v(..., k, ...) = (k+1) u(..., k+1, ...) / mu_coord.
template <typename Scalar>
ExcessDistribution<Scalar> excess(const DegreeDistribution<Scalar>& u, int coord) {
    return {excess_lattice(u.mass, coord), coord};
}

template <typename Scalar>
Lattice<Scalar> excess_lattice(const Lattice<Scalar>& m, int coord) {
    Scalar mu_c = 0;
    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < m.size(); ++off) {
        const Scalar v = m.flat()[off];
        if (v == Scalar(0)) continue;
        m.unravel(off, idx);
        mu_c += Scalar(idx[static_cast<std::size_t>(coord)]) * v;
    }
    if (!(mu_c > Scalar(0))) throw DegreeError("no edges along coordinate " + std::to_string(coord));
    Lattice<Scalar> out(m.shape());
    for (Eigen::Index off = 0; off < m.size(); ++off) {
        const Scalar v = m.flat()[off];
        if (v == Scalar(0)) continue;
        m.unravel(off, idx);
        if (idx[static_cast<std::size_t>(coord)] == 0) continue;
        const Eigen::Index k = idx[static_cast<std::size_t>(coord)];
        idx[static_cast<std::size_t>(coord)] = k - 1;
        out(idx) += Scalar(k) * v / mu_c;
        idx[static_cast<std::size_t>(coord)] = k;
    }
    return out;
}

// Marginal onto one coordinate (sum over all others).
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> marginal(const Lattice<Scalar>& m, int coord) {
    Eigen::Array<Scalar, Eigen::Dynamic, 1> out =
        Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(m.shape()[static_cast<std::size_t>(coord)]);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < m.size(); ++off) {
        const Scalar v = m.flat()[off];
        if (v == Scalar(0)) continue;
        m.unravel(off, idx);
        out[idx[static_cast<std::size_t>(coord)]] += v;
    }
    return out;
}

template <typename Scalar>
DegreeDistribution<Scalar> transpose(const DegreeDistribution<Scalar>& u) {
    DegreeDistribution<Scalar> out = u;
    out.mass = u.mass.transposed2();
    return out;
}

}  // namespace netcomp
