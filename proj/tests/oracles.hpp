#pragma once

// Test-side oracles, independent of the implementation paths they check.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "netcomp/convolution.hpp"
#include "netcomp/degree.hpp"
#include "netcomp/lattice.hpp"

namespace oracles {

using netcomp::Lattice;

// ---- reference distributions -------------------------------------------------

inline Lattice<double> fig3_raw(int K = 20) {
    Lattice<double> u({K + 1, K + 1});
    for (int k = 0; k <= K; ++k)
        for (int l = 0; l <= K; ++l)
            u.at2(k, l) = 0.5167 * std::exp(-double(k) * k - double(l) * l) +
                          0.0052 * std::exp(-2.5 * ((k - 4.) * (k - 4.) + (l - 4.) * (l - 4.)));
    return u;
}

inline Lattice<double> fig2_raw(int K = 20) {
    Lattice<double> u({K + 1, K + 1});
    for (int k = 0; k <= K; ++k)
        for (int l = 0; l <= K; ++l)
            u.at2(k, l) = 0.9782 * std::exp(-5.0 * ((k - 1.) * (k - 1.) + double(l) * l)) +
                          0.002 * std::exp(-10.0 * ((k - 9.) * (k - 9.) + (l - 3.) * (l - 3.)));
    return u;
}

// Two geometric rows with weights solving normalization + directed balance.
inline Lattice<double> fig4_raw(int K = 40, double beta = 0.7) {
    double s0 = 0, s1 = 0, m0 = 0, m1 = 0;
    for (int l = 0; l <= K; ++l) {
        s0 += std::exp(-2.266 * l);
        s1 += std::exp(-beta * l);
        m0 += l * std::exp(-2.266 * l);
        m1 += l * std::exp(-beta * l);
    }
    const double c1 = 1.0 / ((s1 - m1) / m0 * s0 + s1);
    const double c0 = c1 * (s1 - m1) / m0;
    Lattice<double> u({2, K + 1});
    for (int l = 0; l <= K; ++l) {
        u.at2(0, l) = c0 * std::exp(-2.266 * l);
        u.at2(1, l) = c1 * std::exp(-beta * l);
    }
    return u;
}

inline double poisson_pmf(int k, double lambda) {
    return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
}

inline Lattice<double> poisson_product_raw(double lambda, int K) {
    Lattice<double> u({K + 1, K + 1});
    for (int k = 0; k <= K; ++k)
        for (int l = 0; l <= K; ++l) u.at2(k, l) = poisson_pmf(k, lambda) * poisson_pmf(l, lambda);
    return u;
}

// random nonnegative lattice with mass at the origin
inline Lattice<double> random_lattice(std::mt19937_64& rng, const std::vector<Eigen::Index>& shape,
                                      double density = 1.0, bool origin_mass = true) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Lattice<double> f(shape);
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (unif(rng) < density) f.flat()[i] = unif(rng);
    if (origin_mass) f.flat()[0] = 0.25 + unif(rng);
    return f;
}

// random balanced directed distribution (mu10 == mu01 by symmetrization weights)
inline Lattice<double> random_balanced_directed(std::mt19937_64& rng, Eigen::Index K) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Lattice<double> f({K + 1, K + 1});
    for (Eigen::Index k = 0; k <= K; ++k)
        for (Eigen::Index l = 0; l <= K; ++l) f.at2(k, l) = unif(rng);
    // symmetrize to enforce balance exactly, then normalize
    for (Eigen::Index k = 0; k <= K; ++k)
        for (Eigen::Index l = 0; l < k; ++l) {
            const double v = 0.5 * (f.at2(k, l) + f.at2(l, k));
            f.at2(k, l) = f.at2(l, k) = v;
        }
    f.flat() /= f.sum();
    return f;
}

// ---- determinant oracle -------------------------------------------------------

inline Lattice<double> leibniz_determinant(const std::vector<std::vector<Lattice<double>>>& M,
                                           const std::vector<Eigen::Index>& out_shape) {
    const int N = static_cast<int>(M.size());
    std::vector<int> perm(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) perm[static_cast<std::size_t>(i)] = i;
    Lattice<double> acc(out_shape);
    do {
        int inv = 0;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)]) ++inv;
        Lattice<double> term = Lattice<double>::delta(out_shape);
        for (int i = 0; i < N; ++i)
            term = netcomp::convolve_direct(term, M[static_cast<std::size_t>(i)][static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])],
                                            out_shape);
        if (inv % 2 == 0)
            acc.flat() += term.flat();
        else
            acc.flat() -= term.flat();
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
}

// ---- bivariate fixed-point table oracle -----------------------------------------
//
// Solves A1 = x U1[A1, A2], A2 = y U2[A1, A2] as truncated bivariate series by
// plain fixed-point iteration with naive polynomial arithmetic, then composes
// U[A1, A2]. Returns the full coefficient table a(i, j) for i, j <= n.
class BivariateTableOracle {
public:
    using Table = Eigen::MatrixXd;

    // tables are the (k,l)-coefficient grids of U, U1, U2
    BivariateTableOracle(const Lattice<double>& u, const Lattice<double>& u1, const Lattice<double>& u2,
                         Eigen::Index n)
        : n_(n) {
        Table A1 = Table::Zero(n + 1, n + 1), A2 = Table::Zero(n + 1, n + 1);
        for (Eigen::Index it = 0; it <= 2 * n + 2; ++it) {
            Table B1 = shift_x(compose(u1, A1, A2));
            Table B2 = shift_y(compose(u2, A1, A2));
            A1 = B1;
            A2 = B2;
        }
        table_ = compose(u, A1, A2);
    }

    double a(Eigen::Index i, Eigen::Index j) const { return table_(i, j); }
    const Table& table() const { return table_; }

private:
    Eigen::Index n_;
    Table table_;

    Table mul(const Table& f, const Table& g) const {
        Table h = Table::Zero(n_ + 1, n_ + 1);
        for (Eigen::Index i = 0; i <= n_; ++i)
            for (Eigen::Index j = 0; j <= n_; ++j) {
                const double v = f(i, j);
                if (v == 0.0) continue;
                for (Eigen::Index p = 0; i + p <= n_; ++p)
                    for (Eigen::Index q = 0; j + q <= n_; ++q) h(i + p, j + q) += v * g(p, q);
            }
        return h;
    }

    Table compose(const Lattice<double>& tab, const Table& A1, const Table& A2) const {
        // sum_{k,l} tab(k,l) A1^k A2^l via powers
        const Eigen::Index K1 = tab.shape()[0], K2 = tab.shape()[1];
        std::vector<Table> P1(static_cast<std::size_t>(K1)), P2(static_cast<std::size_t>(K2));
        P1[0] = Table::Zero(n_ + 1, n_ + 1);
        P1[0](0, 0) = 1.0;
        for (Eigen::Index k = 1; k < K1; ++k) P1[static_cast<std::size_t>(k)] = mul(P1[static_cast<std::size_t>(k - 1)], A1);
        P2[0] = P1[0];
        for (Eigen::Index l = 1; l < K2; ++l) P2[static_cast<std::size_t>(l)] = mul(P2[static_cast<std::size_t>(l - 1)], A2);
        Table out = Table::Zero(n_ + 1, n_ + 1);
        for (Eigen::Index k = 0; k < K1; ++k)
            for (Eigen::Index l = 0; l < K2; ++l) {
                const double c = tab.at2(k, l);
                if (c == 0.0) continue;
                out += c * mul(P1[static_cast<std::size_t>(k)], P2[static_cast<std::size_t>(l)]);
            }
        return out;
    }

    Table shift_x(const Table& f) const {
        Table g = Table::Zero(n_ + 1, n_ + 1);
        g.block(1, 0, n_, n_ + 1) = f.block(0, 0, n_, n_ + 1);
        return g;
    }
    Table shift_y(const Table& f) const {
        Table g = Table::Zero(n_ + 1, n_ + 1);
        g.block(0, 1, n_ + 1, n_) = f.block(0, 0, n_ + 1, n_);
        return g;
    }
};

// ---- misc ---------------------------------------------------------------------

// least-squares slope of y against x
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Wilson-Hilferty chi-square quantile approximation (p = 0.99 or 0.999)
inline double chi_square_quantile(double p, double df) {
    const double z = p >= 0.999 ? 3.090232306167814 : 2.3263478740408408;
    const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    return df * t * t * t;
}

}  // namespace oracles
