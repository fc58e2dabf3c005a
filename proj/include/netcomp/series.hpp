#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

#include "netcomp/lattice.hpp"

namespace netcomp {

template <typename Scalar>
using Series = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

// Coefficientwise solution of the branching fixed-point system
//
//   W_i(x) = x * T_i[W_1(x), ..., W_N(x)],   i = 1..N,
//
// where T_i are N-variate polynomial tables (lattices), followed by the
// composition F[W_1..W_N] for each root table F. Every output coefficient is
// a finite sum of products of input coefficients; for nonnegative tables the
// computation is subtraction-free.
//
// Returns one coefficient array per root table: out[t][m] = [x^m] F_t[W].
// The branch series themselves are appended after the root compositions.
template <typename Scalar>
std::vector<Series<Scalar>> solve_branching_system(const std::vector<Lattice<Scalar>>& branch_tables,
                                                   const std::vector<Lattice<Scalar>>& root_tables,
                                                   Eigen::Index n_max) {
    const int N = static_cast<int>(branch_tables.size());
    if (N < 1) throw std::invalid_argument("branching system: need at least one branch table");
    for (const auto& t : branch_tables)
        if (t.dims() != N) throw std::invalid_argument("branching system: table dims must equal branch count");
    for (const auto& t : root_tables)
        if (t.dims() != N) throw std::invalid_argument("branching system: root table dims must equal branch count");

    const Eigen::Index M = n_max + 1;
    std::vector<Series<Scalar>> W(static_cast<std::size_t>(N), Series<Scalar>::Zero(M));

    // shared support box
    std::vector<Eigen::Index> box(static_cast<std::size_t>(N), 1);
    auto grow = [&](const Lattice<Scalar>& t) {
        for (int d = 0; d < N; ++d)
            box[static_cast<std::size_t>(d)] = std::max(box[static_cast<std::size_t>(d)], t.shape()[static_cast<std::size_t>(d)]);
    };
    for (const auto& t : branch_tables) grow(t);
    for (const auto& t : root_tables) grow(t);

    const Eigen::Index Klast = box[static_cast<std::size_t>(N - 1)];
    Eigen::Index n_prefix = 1;
    for (int d = 0; d < N - 1; ++d) n_prefix *= box[static_cast<std::size_t>(d)];

    // last-dim powers PL[k] = W_N^k
    std::vector<Series<Scalar>> PL(static_cast<std::size_t>(Klast), Series<Scalar>::Zero(M));
    PL[0][0] = Scalar(1);

    // prefix products Q[p] = prod_{d<N-1} W_d^{p_d}, p enumerated row-major over box[0..N-2]
    std::vector<Series<Scalar>> Q(static_cast<std::size_t>(n_prefix), Series<Scalar>::Zero(M));
    Q[0][0] = Scalar(1);
    // parent[p] = (p - e_j, j) for the last nonzero coordinate j
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n_prefix), -1);
    std::vector<int> parent_dim(static_cast<std::size_t>(n_prefix), -1);
    {
        std::vector<Eigen::Index> strides(static_cast<std::size_t>(std::max(N - 1, 1)), 1);
        for (int d = N - 3; d >= 0; --d)
            strides[static_cast<std::size_t>(d)] = strides[static_cast<std::size_t>(d) + 1] * box[static_cast<std::size_t>(d) + 1];
        std::vector<Eigen::Index> p(static_cast<std::size_t>(std::max(N - 1, 0)), 0);
        for (Eigen::Index off = 1; off < n_prefix; ++off) {
            Eigen::Index rem = off;
            for (int d = 0; d < N - 1; ++d) {
                p[static_cast<std::size_t>(d)] = rem / strides[static_cast<std::size_t>(d)];
                rem %= strides[static_cast<std::size_t>(d)];
            }
            for (int d = N - 2; d >= 0; --d) {
                if (p[static_cast<std::size_t>(d)] > 0) {
                    parent[static_cast<std::size_t>(off)] = off - strides[static_cast<std::size_t>(d)];
                    parent_dim[static_cast<std::size_t>(off)] = d;
                    break;
                }
            }
        }
    }

    // V tables: per input table, V[p][m] = sum_k table(p,k) * PL[k][m]
    const std::size_t n_tables = branch_tables.size() + root_tables.size();
    auto table = [&](std::size_t t) -> const Lattice<Scalar>& {
        return t < branch_tables.size() ? branch_tables[t] : root_tables[t - branch_tables.size()];
    };
    std::vector<std::vector<Series<Scalar>>> V(n_tables);
    // dense copies of tables over (prefix, last) for fast addressing
    std::vector<Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>> tab2(n_tables);
    for (std::size_t t = 0; t < n_tables; ++t) {
        V[t].assign(static_cast<std::size_t>(n_prefix), Series<Scalar>::Zero(M));
        tab2[t] = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_prefix, Klast);
        const Lattice<Scalar> fit = table(t).fitted(box);
        for (Eigen::Index p = 0; p < n_prefix; ++p)
            for (Eigen::Index k = 0; k < Klast; ++k)
                tab2[t](p, k) = fit.flat()[p * Klast + k];
    }

    std::vector<Series<Scalar>> out(n_tables, Series<Scalar>::Zero(M));

    for (Eigen::Index r = 0; r < M; ++r) {
        const Eigen::Index m = r;  // we now finalize coefficient index m of all derived series
        // 1. extend last-dim powers to index m (needs W_N coeffs <= m-? : PL[k][m] uses W_N[1..m])
        for (Eigen::Index k = 1; k < Klast; ++k) {
            Scalar acc = Scalar(0);
            const auto& prev = PL[static_cast<std::size_t>(k - 1)];
            const auto& w = W[static_cast<std::size_t>(N - 1)];
            for (Eigen::Index s = 0; s <= m; ++s) acc += prev[s] * w[m - s];
            PL[static_cast<std::size_t>(k)][m] = acc;
        }
        // 2. extend prefix products
        for (Eigen::Index p = 1; p < n_prefix; ++p) {
            const auto& par = Q[static_cast<std::size_t>(parent[static_cast<std::size_t>(p)])];
            const auto& w = W[static_cast<std::size_t>(parent_dim[static_cast<std::size_t>(p)])];
            Scalar acc = Scalar(0);
            for (Eigen::Index s = 0; s <= m; ++s) acc += par[s] * w[m - s];
            Q[static_cast<std::size_t>(p)][m] = acc;
        }
        // 3. V tables at index m
        for (std::size_t t = 0; t < n_tables; ++t)
            for (Eigen::Index p = 0; p < n_prefix; ++p) {
                Scalar acc = Scalar(0);
                for (Eigen::Index k = 0; k < Klast; ++k) {
                    const Scalar c = tab2[t](p, k);
                    if (c != Scalar(0)) acc += c * PL[static_cast<std::size_t>(k)][m];
                }
                V[t][static_cast<std::size_t>(p)][m] = acc;
            }
        // 4. compositions at index m: comp_t[m] = sum_p [x^m](Q[p] * V_t[p])
        for (std::size_t t = 0; t < n_tables; ++t) {
            Scalar acc = Scalar(0);
            for (Eigen::Index p = 0; p < n_prefix; ++p) {
                const auto& q = Q[static_cast<std::size_t>(p)];
                const auto& v = V[t][static_cast<std::size_t>(p)];
                for (Eigen::Index s = 0; s <= m; ++s) acc += q[s] * v[m - s];
            }
            out[t][m] = acc;
        }
        // 5. branch update: W_i[m+1] = [x^m] T_i[W]
        if (m + 1 < M)
            for (int i = 0; i < N; ++i) W[static_cast<std::size_t>(i)][m + 1] = out[static_cast<std::size_t>(i)][m];
    }

    std::vector<Series<Scalar>> result;
    for (std::size_t t = branch_tables.size(); t < n_tables; ++t) result.push_back(std::move(out[t]));
    for (int i = 0; i < N; ++i) result.push_back(std::move(W[static_cast<std::size_t>(i)]));
    return result;
}

}  // namespace netcomp
