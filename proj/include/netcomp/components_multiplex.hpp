#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "netcomp/components_directed.hpp"
#include "netcomp/convolution.hpp"
#include "netcomp/degree.hpp"
#include "netcomp/series.hpp"

namespace netcomp {

enum class MultiplexMethod { series, lattice };

namespace detail {

inline void check_multiplex(const DegreeDistribution<double>& u) {
    if (u.kind != DistributionKind::multiplex)
        throw DegreeError("multiplex components need a multiplex distribution");
    if (u.dims() > 8) throw DegreeError("multiplex: more than 8 layers exceeds the supported range");
}

// Coefficient of x^k of U[A_1..A_m] where the A_i solve the branching system
// restricted to the kept dimensions: a dense fixed-point iteration on
// truncated multivariate series (boxes are small on the reference path).
inline double composition_cell(const Lattice<double>& root, const std::vector<Lattice<double>>& branches,
                               const std::vector<Eigen::Index>& k) {
    const int m = static_cast<int>(branches.size());
    std::vector<Eigen::Index> box;
    Eigen::Index total = 0;
    for (auto v : k) {
        box.push_back(v + 1);
        total += v;
    }
    auto compose = [&](const Lattice<double>& tab, const std::vector<Lattice<double>>& A) {
        Lattice<double> out(box);
        const Lattice<double> fit = tab.fitted(box);  // only indices inside the box can contribute
        std::vector<Eigen::Index> idx;
        for (Eigen::Index off = 0; off < fit.size(); ++off) {
            const double c = fit.flat()[off];
            if (c == 0.0) continue;
            fit.unravel(off, idx);
            Lattice<double> term = Lattice<double>::delta(box);
            for (int i = 0; i < m; ++i)
                for (Eigen::Index rep = 0; rep < idx[static_cast<std::size_t>(i)]; ++rep)
                    term = convolve_direct(term, A[static_cast<std::size_t>(i)], box);
            out.flat() += c * term.flat();
        }
        return out;
    };
    auto shift = [&](const Lattice<double>& f, int dim) {
        Lattice<double> out(box);
        std::vector<Eigen::Index> idx;
        for (Eigen::Index off = 0; off < f.size(); ++off) {
            if (f.flat()[off] == 0.0) continue;
            f.unravel(off, idx);
            if (idx[static_cast<std::size_t>(dim)] + 1 >= box[static_cast<std::size_t>(dim)]) continue;
            ++idx[static_cast<std::size_t>(dim)];
            out(idx) = f.flat()[off];
        }
        return out;
    };
    std::vector<Lattice<double>> A(static_cast<std::size_t>(m), Lattice<double>(box));
    for (Eigen::Index sweep = 0; sweep <= total + 1; ++sweep) {
        std::vector<Lattice<double>> next;
        next.reserve(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) next.push_back(shift(compose(branches[static_cast<std::size_t>(i)], A), i));
        A = std::move(next);
    }
    return compose(root, A)(k);
}

// One cell of the N-layer inversion sum:
//   [ u * det_kernel * prod_i u_i^{*(k_i - 1)} ](k).
// Zero components of k collapse their coordinate (all factor indices are
// forced to 0 there); the surviving reciprocal is cleared through the
// coordinate-slice restriction of the fixed-point system, which computes the
// same coefficients without forming the (possibly ill-conditioned) series
// inverse. The spec's error contract for vanishing constant terms is kept.
inline double multiplex_cell(const Lattice<double>& u, const std::vector<Lattice<double>>& exc,
                             const Lattice<double>& base /* u * det kernel */,
                             const std::vector<Eigen::Index>& ks) {
    const int N = static_cast<int>(ks.size());
    std::vector<int> zero_dims, pos_dims;
    for (int i = 0; i < N; ++i) (ks[static_cast<std::size_t>(i)] == 0 ? zero_dims : pos_dims).push_back(i);

    auto collapse = [&](Lattice<double> f) {
        // drop zero dims in descending order so indices stay valid
        for (auto it = zero_dims.rbegin(); it != zero_dims.rend(); ++it) f = f.slice0(*it);
        return f;
    };
    if (!zero_dims.empty()) {
        for (int i : zero_dims) {
            const Lattice<double> f = collapse(exc[static_cast<std::size_t>(i)]);
            if (f.flat()[0] == 0.0)
                throw std::runtime_error("multiplex: boundary requires a series reciprocal but layer " +
                                         std::to_string(i + 1) + " excess has zero constant term");
        }
        if (pos_dims.empty()) return u.flat()[0];
        std::vector<Lattice<double>> branches;
        std::vector<Eigen::Index> kkeep;
        for (int i : pos_dims) {
            branches.push_back(collapse(exc[static_cast<std::size_t>(i)]));
            kkeep.push_back(ks[static_cast<std::size_t>(i)]);
        }
        return composition_cell(collapse(u), branches, kkeep);
    }

    std::vector<Eigen::Index> box;
    for (int i : pos_dims) box.push_back(ks[static_cast<std::size_t>(i)] + 1);
    Lattice<double> cur = base.fitted(box);
    for (int i : pos_dims) {
        Lattice<double> f = exc[static_cast<std::size_t>(i)].fitted(box);
        for (Eigen::Index rep = 0; rep + 1 < ks[static_cast<std::size_t>(i)]; ++rep)
            cur = convolve_direct(cur, f, box);
    }
    return cur(ks);
}

// Row-scaled determinant kernel: det over the convolution ring of
// Dt_{ij}(m) = (delta_ij - m_j) u_i(m). Evaluated once per run.
inline Lattice<double> det_kernel_nd(const std::vector<Lattice<double>>& exc,
                                     const std::vector<Eigen::Index>& out_shape) {
    const int N = static_cast<int>(exc.size());
    std::vector<std::vector<Lattice<double>>> Dt(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            const double diag = (i == j) ? 1.0 : 0.0;
            Dt[static_cast<std::size_t>(i)].push_back(
                exc[static_cast<std::size_t>(i)].index_weighted(j, [diag](Eigen::Index m) { return diag - double(m); }));
        }
    }
    return conv_determinant(Dt, out_shape);
}

inline void enumerate_compositions(Eigen::Index total, int parts, std::vector<Eigen::Index>& cur,
                                   const std::function<void(const std::vector<Eigen::Index>&)>& fn) {
    if (parts == 1) {
        cur.push_back(total);
        fn(cur);
        cur.pop_back();
        return;
    }
    for (Eigen::Index first = 0; first <= total; ++first) {
        cur.push_back(first);
        enumerate_compositions(total - first, parts - 1, cur, fn);
        cur.pop_back();
    }
}

}  // namespace detail

inline SizeDistribution single_layer_components(const DegreeDistribution<double>& u, Eigen::Index n_max);

// Size distribution of multilayer components for an N-layer multiplex
// distribution. The series method solves the N-variate fixed-point system
// coefficientwise (production path); the lattice method evaluates the
// inversion sum with the convolution determinant term by term (reference
// path, cost grows like n^{N-1} cells).
inline SizeDistribution multiplex_components(const DegreeDistribution<double>& u, Eigen::Index n_max,
                                             MultiplexMethod method = MultiplexMethod::series) {
    detail::check_multiplex(u);
    if (n_max < 1) throw std::invalid_argument("multiplex_components: n_max must be >= 1");

    // a layer with zero mean has all mass on its zero slice; drop it
    {
        Lattice<double> m = u.mass;
        for (int d = m.dims() - 1; d >= 0; --d) {
            if (m.dims() == 1) break;
            double mean = 0;
            std::vector<Eigen::Index> idx;
            for (Eigen::Index off = 0; off < m.size(); ++off) {
                if (m.flat()[off] == 0.0) continue;
                m.unravel(off, idx);
                mean += double(idx[static_cast<std::size_t>(d)]) * m.flat()[off];
            }
            if (mean == 0.0) m = m.slice0(d);
        }
        if (m.dims() != u.dims()) {
            DegreeDistribution<double> reduced{DistributionKind::multiplex, std::move(m), u.renormalization,
                                               u.truncation_tail};
            if (reduced.dims() == 1) return single_layer_components(reduced, n_max);
            return multiplex_components(reduced, n_max, method);
        }
    }

    const int N = u.dims();
    std::vector<Lattice<double>> exc;
    for (int i = 0; i < N; ++i) exc.push_back(excess_lattice(u.mass, i));

    SizeDistribution s;
    s.kind = ComponentKind::multilayer;
    s.n_max = n_max;
    s.w = Eigen::ArrayXd::Zero(n_max + 1);
    s.log_w = Eigen::ArrayXd::Constant(n_max + 1, -std::numeric_limits<double>::infinity());

    if (method == MultiplexMethod::series) {
        auto res = solve_branching_system<double>(exc, {u.mass}, n_max - 1);
        for (Eigen::Index n = 1; n <= n_max; ++n) s.w[n] = res[0][n - 1];
    } else {
        std::vector<Eigen::Index> kshape(static_cast<std::size_t>(N), n_max + 1);
        std::vector<Eigen::Index> dshape(static_cast<std::size_t>(N));
        for (int q = 0; q < N; ++q) {
            Eigen::Index m = 0;
            for (const auto& e : exc) m = std::max(m, e.shape()[static_cast<std::size_t>(q)]);
            dshape[static_cast<std::size_t>(q)] = std::min<Eigen::Index>(Eigen::Index(N) * (m - 1) + 1, n_max + 1);
        }
        Lattice<double> det = detail::det_kernel_nd(exc, dshape);
        std::vector<Eigen::Index> bshape(static_cast<std::size_t>(N), n_max + 1);
        Lattice<double> base = convolve_direct(u.mass.fitted(bshape), det.fitted(bshape), bshape);
        s.w[1] = u.mass.flat()[0];
        std::vector<Eigen::Index> cur;
        for (Eigen::Index n = 2; n <= n_max; ++n) {
            double acc = 0.0;
            detail::enumerate_compositions(n - 1, N, cur, [&](const std::vector<Eigen::Index>& ks) {
                acc += detail::multiplex_cell(u.mass, exc, base, ks);
            });
            s.w[n] = acc;
        }
    }
    for (Eigen::Index n = 1; n <= n_max; ++n)
        if (s.w[n] > 0) s.log_w[n] = std::log(s.w[n]);
    detail::finalize_size_distribution(s);
    return s;
}

// Two-layer fast path: the bivariate inversion table a(i,j) with u_1 carrying
// the first-index powers.
inline LatticeTable two_layer_lattice(const DegreeDistribution<double>& u, Eigen::Index n_max,
                                      int threads = 0) {
    detail::check_multiplex(u);
    if (u.dims() != 2) throw DegreeError("two_layer_lattice needs exactly two layers");
    Lattice<double> u1 = excess_lattice(u.mass, 0);
    Lattice<double> u2 = excess_lattice(u.mass, 1);
    return detail::inversion_table_2d(u.mass, u1, u2, n_max, "u_1", "u_2", threads);
}

// Degenerate two-layer reduction: when layer-1 excess is degenerate
// (u(k,l) = 0 for k > 1), the model reduces to a one-layer network with
// coupled nodes and degree law d(l) = u(0,l) + u(1,l)/2, renormalized.
inline DegreeDistribution<double> degenerate_two_layer_reduce(const DegreeDistribution<double>& u) {
    detail::check_multiplex(u);
    if (u.dims() != 2) throw DegreeError("degenerate reduction needs exactly two layers");
    const auto& m = u.mass;
    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < m.size(); ++off) {
        if (m.flat()[off] == 0.0) continue;
        m.unravel(off, idx);
        if (idx[0] > 1) throw DegreeError("degenerate reduction requires u(k,l) = 0 for k > 1");
    }
    const Eigen::Index L = m.shape()[1];
    Lattice<double> d({L});
    for (Eigen::Index l = 0; l < L; ++l) {
        double v = m.at2(0, l);
        if (m.shape()[0] > 1) v += 0.5 * m.at2(1, l);
        d.flat()[l] = v;
    }
    return make_distribution(DistributionKind::multiplex, std::move(d));
}

// Single-layer component sizes (univariate configuration model):
// w(n) = mu/(n-1) * u_e^{*n}(n-2) with u_e the excess law.
inline SizeDistribution single_layer_components(const DegreeDistribution<double>& u, Eigen::Index n_max) {
    if (u.dims() != 1) throw DegreeError("single_layer_components needs a univariate distribution");
    if (n_max < 1) throw std::invalid_argument("single_layer_components: n_max must be >= 1");
    auto res = solve_branching_system<double>({excess_lattice(u.mass, 0)}, {u.mass}, n_max - 1);
    SizeDistribution s;
    s.kind = ComponentKind::multilayer;
    s.n_max = n_max;
    s.w = Eigen::ArrayXd::Zero(n_max + 1);
    s.log_w = Eigen::ArrayXd::Constant(n_max + 1, -std::numeric_limits<double>::infinity());
    for (Eigen::Index n = 1; n <= n_max; ++n) {
        s.w[n] = res[0][n - 1];
        if (s.w[n] > 0) s.log_w[n] = std::log(s.w[n]);
    }
    detail::finalize_size_distribution(s);
    return s;
}

}  // namespace netcomp
