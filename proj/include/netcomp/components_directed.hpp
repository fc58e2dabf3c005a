#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "netcomp/convolution.hpp"
#include "netcomp/degree.hpp"
#include "netcomp/series.hpp"

namespace netcomp {

enum class ComponentKind { in_component, out_component, weak, multilayer };

inline const char* to_string(ComponentKind k) {
    switch (k) {
        case ComponentKind::in_component: return "in";
        case ComponentKind::out_component: return "out";
        case ComponentKind::weak: return "weak";
        case ComponentKind::multilayer: return "multilayer";
    }
    return "?";
}

struct SizeDistribution {
    ComponentKind kind = ComponentKind::weak;
    Eigen::ArrayXd w;      // w[n] for n = 1..n_max; w[0] unused (0)
    Eigen::ArrayXd log_w;  // log w[n] where defined, -inf otherwise (survives deep tails)
    Eigen::Index n_max = 0;
    double deficit = 0.0;          // 1 - sum_{n<=n_max} w(n)
    double clamp_magnitude = 0.0;  // largest negative magnitude clamped to 0

    double operator()(Eigen::Index n) const { return w[n]; }
};

struct LatticeTable {
    Eigen::MatrixXd a;  // a(i,j), valid for i+j <= n_max-1; NaN outside the triangle
    Eigen::Index n_max = 0;
    double clamp_magnitude = 0.0;
};

inline constexpr double kClampFailure = 1e-8;

namespace detail {

inline void finalize_size_distribution(SizeDistribution& s) {
    double worst = 0.0;
    for (Eigen::Index n = 1; n <= s.n_max; ++n) {
        if (s.w[n] < 0.0) {
            worst = std::max(worst, -s.w[n]);
            s.w[n] = 0.0;
            s.log_w[n] = -std::numeric_limits<double>::infinity();
        }
    }
    s.clamp_magnitude = worst;
    if (worst > kClampFailure)
        throw std::runtime_error("size distribution: cancellation produced negatives above 1e-8");
    double sum = 0.0;
    for (Eigen::Index n = 1; n <= s.n_max; ++n) sum += s.w[n];
    s.deficit = 1.0 - sum;
}

}  // namespace detail

// --- in/out components -----------------------------------------------------
//
// Size of the set reachable from a node (out) or of the set that reaches it
// (in). With q the excess marginal on the exploration side and m the degree
// law of an explored node, h(n) = mu/(n-1) * [q * m^{*(n-1)}](n-2) for n > 1;
// h(1) is the probability of a zero exploration degree. The convolution power
// is built by a sliding pass with log rescaling so arbitrarily deep tails
// keep full relative accuracy.
inline SizeDistribution in_out_components(const DegreeDistribution<double>& u, ComponentKind side,
                                          Eigen::Index n_max) {
    if (u.kind != DistributionKind::directed) throw DegreeError("in/out components need a directed distribution");
    if (side != ComponentKind::in_component && side != ComponentKind::out_component)
        throw std::invalid_argument("in_out_components: side must be in or out");
    if (n_max < 1) throw std::invalid_argument("in_out_components: n_max must be >= 1");

    const auto& m2 = u.mass;
    const bool out_side = (side == ComponentKind::out_component);
    const int grow_dim = out_side ? 1 : 0;   // coordinate whose edges we traverse
    const int other_dim = out_side ? 0 : 1;

    const auto ms = moments(u);
    const double mu = ms.mu(1, 0);

    Eigen::ArrayXd marg = marginal(m2, grow_dim);                      // degree law on the growth side
    Eigen::ArrayXd q = Eigen::ArrayXd::Zero(marg.size());              // excess marginal
    for (Eigen::Index k = 0; k + 1 < marg.size(); ++k) q[k] = double(k + 1) * marg[k + 1] / (mu > 0 ? mu : 1);
    // m: growth-side degree law of a node reached along an edge (opposite-coordinate biased)
    Eigen::ArrayXd mseq = Eigen::ArrayXd::Zero(m2.shape()[static_cast<std::size_t>(grow_dim)]);
    {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index off = 0; off < m2.size(); ++off) {
            const double v = m2.flat()[off];
            if (v == 0.0) continue;
            m2.unravel(off, idx);
            mseq[idx[static_cast<std::size_t>(grow_dim)]] +=
                double(idx[static_cast<std::size_t>(other_dim)]) * v;
        }
        if (mu > 0) mseq /= mu;
    }

    SizeDistribution s;
    s.kind = side;
    s.n_max = n_max;
    s.w = Eigen::ArrayXd::Zero(n_max + 1);
    s.log_w = Eigen::ArrayXd::Constant(n_max + 1, -std::numeric_limits<double>::infinity());
    s.w[1] = marg[0];
    if (marg[0] > 0) s.log_w[1] = std::log(marg[0]);
    if (n_max == 1) {
        detail::finalize_size_distribution(s);
        return s;
    }
    if (!(mu > 0)) throw DegreeError("in_out_components: mean degree is zero but n_max > 1");

    const Eigen::Index T = n_max;  // need indices up to n_max - 2
    Eigen::ArrayXd p = Eigen::ArrayXd::Zero(T);
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(T, q.size()); ++k) p[k] = q[k];
    double log_scale = 0.0;
    Eigen::ArrayXd next(T);
    const Eigen::Index Km = mseq.size();
    for (Eigen::Index n = 2; n <= n_max; ++n) {
        // p <- p * mseq (linear convolution truncated to [0, T))
        next.setZero();
        for (Eigen::Index k = 0; k < Km; ++k) {
            const double mv = mseq[k];
            if (mv == 0.0) continue;
            const Eigen::Index lim = T - k;
            for (Eigen::Index s2 = 0; s2 < lim; ++s2) next[s2 + k] += p[s2] * mv;
        }
        p.swap(next);
        const double peak = p.maxCoeff();
        if (peak > 0 && (peak < 1e-120 || peak > 1e120)) {
            p /= peak;
            log_scale += std::log(peak);
        }
        const double mant = p[n - 2];
        if (mant > 0) {
            s.log_w[n] = std::log(mu) - std::log(double(n - 1)) + std::log(mant) + log_scale;
            s.w[n] = std::exp(s.log_w[n]);  // 0 on underflow; log_w keeps the value
        }
    }
    detail::finalize_size_distribution(s);
    return s;
}

// --- weakly connected components --------------------------------------------
//
// w(n) for n = 1..n_max, computed as the coefficients of the generating
// function of the weak-component fixed-point system. Coefficientwise this is
// identical to the diagonal sums of the inversion table and is subtraction
// free, so the deep tail keeps relative accuracy.
inline SizeDistribution weak_components(const DegreeDistribution<double>& u, Eigen::Index n_max) {
    if (u.kind != DistributionKind::directed) throw DegreeError("weak_components needs a directed distribution");
    if (n_max < 1) throw std::invalid_argument("weak_components: n_max must be >= 1");
    Lattice<double> u_out = excess_lattice(u.mass, 1);
    Lattice<double> u_in = excess_lattice(u.mass, 0);
    auto res = solve_branching_system<double>({u_out, u_in}, {u.mass}, n_max > 0 ? n_max - 1 : 0);
    const auto& comp = res[0];
    SizeDistribution s;
    s.kind = ComponentKind::weak;
    s.n_max = n_max;
    s.w = Eigen::ArrayXd::Zero(n_max + 1);
    s.log_w = Eigen::ArrayXd::Constant(n_max + 1, -std::numeric_limits<double>::infinity());
    for (Eigen::Index n = 1; n <= n_max; ++n) {
        s.w[n] = comp[n - 1];
        if (s.w[n] > 0) s.log_w[n] = std::log(s.w[n]);
    }
    detail::finalize_size_distribution(s);
    return s;
}

// --- inversion-table evaluation ----------------------------------------------

namespace detail {

// d(k,l) = [(1-k) ua] * [(1-l) ub] - [l ua] * [k ub]  (the determinant kernel
// after clearing denominators; ua carries the first-coordinate powers).
inline Lattice<double> det_kernel_2d(const Lattice<double>& ua, const Lattice<double>& ub) {
    std::vector<Eigen::Index> shape = {ua.shape()[0] + ub.shape()[0] - 1, ua.shape()[1] + ub.shape()[1] - 1};
    auto f1 = ua.index_weighted(0, [](Eigen::Index k) { return 1.0 - double(k); });
    auto f2 = ub.index_weighted(1, [](Eigen::Index l) { return 1.0 - double(l); });
    auto f3 = ua.index_weighted(1, [](Eigen::Index l) { return double(l); });
    auto f4 = ub.index_weighted(0, [](Eigen::Index k) { return double(k); });
    Lattice<double> d = convolve(f1, f2, shape);
    Lattice<double> c = convolve(f3, f4, shape);
    d.flat() -= c.flat();
    return d;
}

// Boundary row/column of the table through the coordinate-slice restriction of
// the fixed-point system: fixing one lattice coordinate at zero reduces the
// bivariate system to a univariate one whose composition coefficients are the
// boundary cells. Equals coefficient extraction with one series reciprocal, but
// stays subtraction free.
inline Eigen::ArrayXd boundary_cells(const Lattice<double>& u, const Lattice<double>& ua,
                                     const Lattice<double>& ub, int fixed_dim, Eigen::Index count) {
    // fixed_dim = 0: row i = 0 (powers of ua vanish); branch series follows ub on its slice.
    const Lattice<double> branch = (fixed_dim == 0) ? ub.slice0(0) : ua.slice0(1);
    const Lattice<double> root = (fixed_dim == 0) ? u.slice0(0) : u.slice0(1);
    auto res = solve_branching_system<double>({branch}, {root}, count - 1);
    Eigen::ArrayXd out(count);
    for (Eigen::Index j = 0; j < count; ++j) out[j] = res[0][j];
    return out;
}

struct TwiddleCache {
    std::vector<std::vector<std::complex<double>>> rows;  // e^{+2 pi i * i * w / L} per index
    static TwiddleCache build(Eigen::Index L, Eigen::Index max_index) {
        TwiddleCache c;
        c.rows.resize(static_cast<std::size_t>(max_index + 1));
        for (Eigen::Index i = 0; i <= max_index; ++i) {
            auto& v = c.rows[static_cast<std::size_t>(i)];
            v.resize(static_cast<std::size_t>(L));
            for (Eigen::Index w = 0; w < L; ++w) {
                const double ph = 2.0 * M_PI * double((i * w) % L) / double(L);
                v[static_cast<std::size_t>(w)] = {std::cos(ph), std::sin(ph)};
            }
        }
        return c;
    }
};

inline int env_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("NETCOMP_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) return std::min(hw, cap);
    }
    return hw;
}

// General 2-d inversion table: interior cells by pointwise powering of shared
// spectra, boundary cells by slice systems. `ua` carries the first-index
// powers (i), `ub` the second (j). Rows are independent; each row rebuilds its
// power spectrum by binary powering, so results are bit-stable under any
// thread count.
inline LatticeTable inversion_table_2d(const Lattice<double>& u, const Lattice<double>& ua,
                                       const Lattice<double>& ub, Eigen::Index n_max,
                                       const char* ua_name, const char* ub_name, int threads = 0) {
    if (n_max < 1) throw std::invalid_argument("lattice table: n_max must be >= 1");
    if (threads <= 0) threads = env_threads();
    LatticeTable table;
    table.n_max = n_max;
    table.a = Eigen::MatrixXd::Constant(n_max, n_max, std::numeric_limits<double>::quiet_NaN());

    const Eigen::Index m_big = n_max;  // largest total power on the final diagonal
    // grid per aliasing rule, driven by both power factors plus the base support
    ConvPowerOptions opt;
    std::vector<Eigen::Index> grid(2);
    {
        std::vector<Eigen::Index> win = {n_max + 1, n_max + 1};
        auto ga = detail::power_grid(ua, m_big, win, opt);
        auto gb = detail::power_grid(ub, m_big, win, opt);
        Lattice<double> d = det_kernel_2d(ua, ub);
        for (int q = 0; q < 2; ++q) {
            const Eigen::Index base = u.shape()[static_cast<std::size_t>(q)] + d.shape()[static_cast<std::size_t>(q)];
            grid[static_cast<std::size_t>(q)] = next_pow2(std::max(ga[static_cast<std::size_t>(q)], gb[static_cast<std::size_t>(q)]) + base);
        }
    }
    NdFft fft(grid);
    Lattice<double> d = det_kernel_2d(ua, ub);
    auto ud = convolve(u, d, {u.shape()[0] + d.shape()[0] - 1, u.shape()[1] + d.shape()[1] - 1});
    auto base_sp = fft.embed(ud);
    fft.forward(base_sp);
    auto ua_sp = fft.embed(ua);
    fft.forward(ua_sp);
    auto ub_sp = fft.embed(ub);
    fft.forward(ub_sp);

    const Eigen::Index L1 = grid[0], L2 = grid[1];
    const double inv_total = 1.0 / double(L1 * L2);
    auto tw1 = TwiddleCache::build(L1, n_max);
    auto tw2 = TwiddleCache::build(L2, n_max);

    auto run_rows = [&](Eigen::Index begin, Eigen::Index end) {
        std::vector<std::complex<double>> row_sp(base_sp.size());
        std::vector<std::complex<double>> pw(base_sp.size());
        std::vector<std::complex<double>> cell_sp(base_sp.size());
        std::vector<std::complex<double>> contracted(static_cast<std::size_t>(L2));
        for (Eigen::Index i = begin; i < end; ++i) {
            // row_sp = base * ua^(i-1), binary powering per row
            std::fill(pw.begin(), pw.end(), std::complex<double>{1.0, 0.0});
            Eigen::Index e = i - 1;
            std::vector<std::complex<double>> sq = ua_sp;
            while (e > 0) {
                if (e & 1)
                    for (std::size_t p = 0; p < pw.size(); ++p) pw[p] *= sq[p];
                e >>= 1;
                if (e)
                    for (std::size_t p = 0; p < sq.size(); ++p) sq[p] *= sq[p];
            }
            for (std::size_t p = 0; p < row_sp.size(); ++p) row_sp[p] = base_sp[p] * pw[p];
            cell_sp = row_sp;
            for (Eigen::Index j = 1; i + j <= n_max - 1; ++j) {
                if (j > 1)
                    for (std::size_t p = 0; p < cell_sp.size(); ++p) cell_sp[p] *= ub_sp[p];
                // contract over w1 with the i-th twiddle, then over w2 with the j-th
                const auto& t1 = tw1.rows[static_cast<std::size_t>(i)];
                for (Eigen::Index w2 = 0; w2 < L2; ++w2) contracted[static_cast<std::size_t>(w2)] = {0.0, 0.0};
                for (Eigen::Index w1 = 0; w1 < L1; ++w1) {
                    const std::complex<double> t = t1[static_cast<std::size_t>(w1)];
                    const std::size_t off = static_cast<std::size_t>(w1 * L2);
                    for (Eigen::Index w2 = 0; w2 < L2; ++w2)
                        contracted[static_cast<std::size_t>(w2)] += t * cell_sp[off + static_cast<std::size_t>(w2)];
                }
                std::complex<double> acc{0.0, 0.0};
                const auto& t2 = tw2.rows[static_cast<std::size_t>(j)];
                for (Eigen::Index w2 = 0; w2 < L2; ++w2)
                    acc += t2[static_cast<std::size_t>(w2)] * contracted[static_cast<std::size_t>(w2)];
                table.a(i, j) = acc.real() * inv_total;
            }
        }
    };

    const Eigen::Index nrows = n_max - 1;
    const int nthreads = static_cast<int>(std::min<Eigen::Index>(threads, std::max<Eigen::Index>(nrows, 1)));
    if (nthreads <= 1 || nrows <= 1) {
        run_rows(1, n_max);
    } else {
        std::vector<std::thread> pool;
        const Eigen::Index chunk = (nrows + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const Eigen::Index b = 1 + t * chunk;
            const Eigen::Index e = std::min<Eigen::Index>(1 + (t + 1) * chunk, n_max);
            if (b < e) pool.emplace_back(run_rows, b, e);
        }
        for (auto& th : pool) th.join();
    }

    // boundaries
    if (ua.flat()[0] == 0.0)
        throw std::runtime_error(std::string("lattice table: boundary i=0 requires a series reciprocal but ") +
                                 ua_name + "(0,0) = 0");
    if (ub.flat()[0] == 0.0)
        throw std::runtime_error(std::string("lattice table: boundary j=0 requires a series reciprocal but ") +
                                 ub_name + "(0,0) = 0");
    Eigen::ArrayXd row0 = boundary_cells(u, ua, ub, 0, n_max);
    Eigen::ArrayXd col0 = boundary_cells(u, ua, ub, 1, n_max);
    for (Eigen::Index j = 0; j < n_max; ++j) table.a(0, j) = row0[j];
    for (Eigen::Index i = 1; i < n_max; ++i) table.a(i, 0) = col0[i];
    return table;
}

}  // namespace detail

// a(i,j) for i + j <= n_max - 1: one Fourier transform of u*d, u_out, u_in per
// run; per-cell work is a pointwise power update plus one spectrum contraction.
// Rows run in parallel up to the NETCOMP_THREADS cap.
inline LatticeTable weak_lattice(const DegreeDistribution<double>& u, Eigen::Index n_max, int threads = 0) {
    if (u.kind != DistributionKind::directed) throw DegreeError("weak_lattice needs a directed distribution");
    Lattice<double> u_out = excess_lattice(u.mass, 1);
    Lattice<double> u_in = excess_lattice(u.mass, 0);
    return detail::inversion_table_2d(u.mass, u_out, u_in, n_max, "u_out", "u_in", threads);
}

// Diagonal sums of a table (w(n) = sum_{i+j=n-1} a(i,j)); clamps tiny negative
// cancellation residue and records its magnitude.
inline SizeDistribution size_distribution_from_table(const LatticeTable& t, const DegreeDistribution<double>& u,
                                                     ComponentKind kind) {
    SizeDistribution s;
    s.kind = kind;
    s.n_max = t.n_max;
    s.w = Eigen::ArrayXd::Zero(t.n_max + 1);
    s.log_w = Eigen::ArrayXd::Constant(t.n_max + 1, -std::numeric_limits<double>::infinity());
    s.w[1] = u.mass.flat()[0];
    for (Eigen::Index n = 2; n <= t.n_max; ++n) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i <= n - 1; ++i) acc += t.a(i, n - 1 - i);
        s.w[n] = acc;
    }
    for (Eigen::Index n = 1; n <= t.n_max; ++n)
        if (s.w[n] > 0) s.log_w[n] = std::log(s.w[n]);
    detail::finalize_size_distribution(s);
    return s;
}

}  // namespace netcomp
