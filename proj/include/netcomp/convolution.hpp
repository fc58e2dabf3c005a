#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "netcomp/fft.hpp"
#include "netcomp/lattice.hpp"

namespace netcomp {

// f^{*n} values paired with a log-scale so deep exponential tails survive
// double range: value(idx) = mantissa(idx) * exp(log_scale).
struct ScaledLattice {
    Lattice<double> mantissa;
    double log_scale = 0.0;

    double value(const std::vector<Eigen::Index>& idx) const {
        return mantissa(idx) * std::exp(log_scale);
    }
};

struct ConvPowerOptions {
    double aliasing_budget = 1e-12;
    double spread_sigmas = 12.0;           // c in L = ceil(n*m + c*sqrt(n)*s) + K
    Eigen::Index max_total_elements = Eigen::Index(1) << 26;
};

// Reference linear convolution, the direct double sum. Used as the oracle
// for everything FFT-backed and by small production paths.
template <typename Scalar>
Lattice<Scalar> convolve_direct(const Lattice<Scalar>& f, const Lattice<Scalar>& g,
                                const std::vector<Eigen::Index>& out_shape) {
    if (f.dims() != g.dims()) throw std::invalid_argument("convolve: dimension mismatch");
    if (static_cast<int>(out_shape.size()) != f.dims())
        throw std::invalid_argument("convolve: out_shape dimension mismatch");
    Lattice<Scalar> out(out_shape);
    std::vector<Eigen::Index> fi, gi, oi(out_shape.size());
    for (Eigen::Index fo = 0; fo < f.size(); ++fo) {
        const Scalar fv = f.flat()[fo];
        if (fv == Scalar(0)) continue;
        f.unravel(fo, fi);
        for (Eigen::Index go = 0; go < g.size(); ++go) {
            const Scalar gv = g.flat()[go];
            if (gv == Scalar(0)) continue;
            g.unravel(go, gi);
            bool inside = true;
            for (std::size_t d = 0; d < oi.size(); ++d) {
                oi[d] = fi[d] + gi[d];
                if (oi[d] >= out_shape[d]) { inside = false; break; }
            }
            if (inside) out(oi) += fv * gv;
        }
    }
    return out;
}

// FFT-backed linear convolution truncated to out_shape. The transform grid
// covers the full linear support, so the result is exact up to roundoff.
inline Lattice<double> convolve(const Lattice<double>& f, const Lattice<double>& g,
                                const std::vector<Eigen::Index>& out_shape) {
    if (f.dims() != g.dims()) throw std::invalid_argument("convolve: dimension mismatch");
    if (static_cast<int>(out_shape.size()) != f.dims())
        throw std::invalid_argument("convolve: out_shape dimension mismatch");
    std::vector<Eigen::Index> grid(out_shape.size());
    for (std::size_t d = 0; d < grid.size(); ++d) {
        Eigen::Index full = f.shape()[d] + g.shape()[d] - 1;
        grid[d] = next_pow2(std::min<Eigen::Index>(full, f.shape()[d] + g.shape()[d]));
        grid[d] = next_pow2(full);
    }
    NdFft fft(grid);
    auto fa = fft.embed(f);
    auto ga = fft.embed(g);
    fft.forward(fa);
    fft.forward(ga);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= ga[i];
    fft.inverse(fa);
    Lattice<double> out(out_shape);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < out.size(); ++off) {
        out.unravel(off, idx);
        Eigen::Index o = 0, stride = 1;
        bool inside = true;
        for (int d = static_cast<int>(grid.size()) - 1; d >= 0; --d) {
            if (idx[static_cast<std::size_t>(d)] >= grid[static_cast<std::size_t>(d)]) {
                inside = false;  // beyond the full linear support: a true zero
                break;
            }
            o += idx[static_cast<std::size_t>(d)] * stride;
            stride *= grid[static_cast<std::size_t>(d)];
        }
        out.flat()[off] = inside ? fa[static_cast<std::size_t>(o)].real() : 0.0;
    }
    return out;
}

namespace detail {

// Per-dimension cyclic length for f^{*n}: L = min(n*K, ceil(n*m + c*sqrt(n)*s) + K),
// then doubled until the Chebyshev wrap-around bound n*s^2/(L - n*m)^2 clears the budget.
inline std::vector<Eigen::Index> power_grid(const Lattice<double>& f, long n,
                                            const std::vector<Eigen::Index>& window,
                                            const ConvPowerOptions& opt) {
    const int d = f.dims();
    const double mass = f.flat().sum();
    std::vector<double> mean(static_cast<std::size_t>(d), 0.0), var(static_cast<std::size_t>(d), 0.0);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < f.size(); ++off) {
        const double v = f.flat()[off];
        if (v == 0.0) continue;
        f.unravel(off, idx);
        for (int q = 0; q < d; ++q) mean[static_cast<std::size_t>(q)] += v * double(idx[static_cast<std::size_t>(q)]);
    }
    for (int q = 0; q < d; ++q) mean[static_cast<std::size_t>(q)] /= (mass != 0.0 ? mass : 1.0);
    for (Eigen::Index off = 0; off < f.size(); ++off) {
        const double v = f.flat()[off];
        if (v == 0.0) continue;
        f.unravel(off, idx);
        for (int q = 0; q < d; ++q) {
            const double c = double(idx[static_cast<std::size_t>(q)]) - mean[static_cast<std::size_t>(q)];
            var[static_cast<std::size_t>(q)] += v * c * c;
        }
    }
    for (int q = 0; q < d; ++q) var[static_cast<std::size_t>(q)] /= (mass != 0.0 ? mass : 1.0);

    std::vector<Eigen::Index> grid(static_cast<std::size_t>(d));
    for (int q = 0; q < d; ++q) {
        const Eigen::Index K = f.shape()[static_cast<std::size_t>(q)] - 1;
        const Eigen::Index exact = n * K + 1;
        const double m = mean[static_cast<std::size_t>(q)];
        const double s = std::sqrt(var[static_cast<std::size_t>(q)]);
        double L = std::ceil(double(n) * m + opt.spread_sigmas * std::sqrt(double(n)) * s) + double(K);
        L = std::max(L, double(window[static_cast<std::size_t>(q)]));
        while (L < double(exact)) {
            const double slack = L - double(n) * m;
            const double tail = slack > 0 ? double(n) * var[static_cast<std::size_t>(q)] / (slack * slack) : 1.0;
            if (tail < opt.aliasing_budget) break;
            L *= 2;
        }
        grid[static_cast<std::size_t>(q)] = next_pow2(std::min<Eigen::Index>(Eigen::Index(L), exact));
    }
    return grid;
}

}  // namespace detail

// f^{*n} on the window [0, window_d) computed as the n-th pointwise power in
// the Fourier domain. The mantissa/log-scale split keeps large n from
// underflowing: the spectrum is divided by its peak (the total mass for
// nonnegative f) before powering.
inline ScaledLattice convolution_power_scaled(const Lattice<double>& f, long n,
                                              const std::vector<Eigen::Index>& window,
                                              const ConvPowerOptions& opt = {}) {
    if (n < 0) throw std::invalid_argument("convolution_power: negative exponent");
    if (static_cast<int>(window.size()) != f.dims())
        throw std::invalid_argument("convolution_power: window dimension mismatch");
    if (n == 0) return {Lattice<double>::delta(window), 0.0};

    auto grid = detail::power_grid(f, n, window, opt);
    Eigen::Index total = 1;
    for (auto g : grid) total *= g;
    if (total > opt.max_total_elements)
        throw std::runtime_error("convolution_power: transform exceeds memory budget");

    NdFft fft(grid);
    auto fa = fft.embed(f);
    fft.forward(fa);
    double peak = 0.0;
    for (const auto& z : fa) peak = std::max(peak, std::abs(z));
    if (peak == 0.0) return {Lattice<double>(window), 0.0};
    for (auto& z : fa) {
        z /= peak;
        z = std::pow(z, double(n));
    }
    fft.inverse(fa);

    Lattice<double> out(window);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < out.size(); ++off) {
        out.unravel(off, idx);
        Eigen::Index o = 0, stride = 1;
        bool inside = true;
        for (int d = static_cast<int>(grid.size()) - 1; d >= 0; --d) {
            // the grid never truncates below the support reach, so indices past
            // it are identically zero
            if (idx[static_cast<std::size_t>(d)] >= std::min(grid[static_cast<std::size_t>(d)],
                                                             n * (f.shape()[static_cast<std::size_t>(d)] - 1) + 1)) {
                inside = false;
                break;
            }
            o += idx[static_cast<std::size_t>(d)] * stride;
            stride *= grid[static_cast<std::size_t>(d)];
        }
        out.flat()[off] = inside ? fa[static_cast<std::size_t>(o)].real() : 0.0;
    }
    return {std::move(out), double(n) * std::log(peak)};
}

inline Lattice<double> convolution_power(const Lattice<double>& f, long n,
                                         const std::vector<Eigen::Index>& window,
                                         const ConvPowerOptions& opt = {}) {
    ScaledLattice s = convolution_power_scaled(f, n, window, opt);
    const double scale = std::exp(s.log_scale);
    s.mantissa.flat() *= scale;
    return std::move(s.mantissa);
}

// Truncated formal power-series reciprocal: (f * g)(m) = delta(m) on out_shape.
template <typename Scalar>
Lattice<Scalar> reciprocal(const Lattice<Scalar>& f, const std::vector<Eigen::Index>& out_shape) {
    if (static_cast<int>(out_shape.size()) != f.dims())
        throw std::invalid_argument("reciprocal: out_shape dimension mismatch");
    const Lattice<Scalar> fp = f.fitted(out_shape);
    const Scalar f0 = fp.flat()[0];
    if (f0 == Scalar(0)) throw std::runtime_error("reciprocal: series not invertible (zero constant term)");
    Lattice<Scalar> g(out_shape);
    g.flat()[0] = Scalar(1) / f0;

    // order by total degree so every needed g entry is already final
    std::vector<Eigen::Index> order(static_cast<std::size_t>(g.size()));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::vector<Eigen::Index> idx;
    std::vector<long> deg(static_cast<std::size_t>(g.size()));
    for (Eigen::Index off = 0; off < g.size(); ++off) {
        g.unravel(off, idx);
        deg[static_cast<std::size_t>(off)] = std::accumulate(idx.begin(), idx.end(), long(0));
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return deg[static_cast<std::size_t>(a)] < deg[static_cast<std::size_t>(b)]; });

    std::vector<Eigen::Index> tgt, sub(out_shape.size());
    for (Eigen::Index oi : order) {
        if (deg[static_cast<std::size_t>(oi)] == 0) continue;
        g.unravel(oi, tgt);
        // sum over strictly smaller multi-indices s: f(tgt - s) g(s)
        Scalar acc = Scalar(0);
        std::vector<Eigen::Index> s(out_shape.size(), 0);
        while (true) {
            bool self = true;
            for (std::size_t d = 0; d < s.size(); ++d)
                if (s[d] != tgt[d]) { self = false; break; }
            if (!self) {
                for (std::size_t d = 0; d < s.size(); ++d) sub[d] = tgt[d] - s[d];
                const Scalar fv = fp(sub);
                if (fv != Scalar(0)) acc += fv * g(s);
            }
            // odometer over the box [0, tgt]
            int d = static_cast<int>(s.size()) - 1;
            while (d >= 0) {
                if (s[static_cast<std::size_t>(d)] < tgt[static_cast<std::size_t>(d)]) {
                    ++s[static_cast<std::size_t>(d)];
                    break;
                }
                s[static_cast<std::size_t>(d)] = 0;
                --d;
            }
            if (d < 0) break;
        }
        g.flat()[oi] = -acc / f0;
    }
    return g;
}

// Determinant over the convolution ring: pointwise numeric determinant in the
// Fourier domain, on a grid large enough that every Leibniz term is unaliased.
inline Lattice<double> conv_determinant(const std::vector<std::vector<Lattice<double>>>& M,
                                        const std::vector<Eigen::Index>& out_shape) {
    const std::size_t N = M.size();
    if (N == 0 || N > 8) throw std::invalid_argument("conv_determinant: order must be in [1,8]");
    for (const auto& row : M)
        if (row.size() != N) throw std::invalid_argument("conv_determinant: non-square input");

    const int dims = M[0][0].dims();
    std::vector<Eigen::Index> grid(static_cast<std::size_t>(dims), 1);
    for (int d = 0; d < dims; ++d) {
        Eigen::Index maxext = 1;
        for (const auto& row : M)
            for (const auto& e : row) maxext = std::max(maxext, e.shape()[static_cast<std::size_t>(d)]);
        grid[static_cast<std::size_t>(d)] = next_pow2(Eigen::Index(N) * (maxext - 1) + 1);
    }
    NdFft fft(grid);
    std::vector<std::vector<std::vector<std::complex<double>>>> tr(N);
    for (std::size_t i = 0; i < N; ++i) {
        tr[i].resize(N);
        for (std::size_t j = 0; j < N; ++j) {
            tr[i][j] = fft.embed(M[i][j]);
            fft.forward(tr[i][j]);
        }
    }
    std::vector<std::complex<double>> det(static_cast<std::size_t>(fft.total()));
    Eigen::MatrixXcd A(N, N);
    for (std::size_t p = 0; p < det.size(); ++p) {
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = tr[i][j][p];
        det[p] = A.determinant();
    }
    fft.inverse(det);
    Lattice<double> out(out_shape);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index off = 0; off < out.size(); ++off) {
        out.unravel(off, idx);
        Eigen::Index o = 0, stride = 1;
        bool inside = true;
        for (int d = dims - 1; d >= 0; --d) {
            if (idx[static_cast<std::size_t>(d)] >= grid[static_cast<std::size_t>(d)]) { inside = false; break; }
            o += idx[static_cast<std::size_t>(d)] * stride;
            stride *= grid[static_cast<std::size_t>(d)];
        }
        out.flat()[off] = inside ? det[static_cast<std::size_t>(o)].real() : 0.0;
    }
    return out;
}

}  // namespace netcomp
