#pragma once

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

#include "netcomp/lattice.hpp"

namespace netcomp {

inline Eigen::Index next_pow2(Eigen::Index n) {
    Eigen::Index p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place complex FFT over every axis of a row-major flat nd array.
class NdFft {
public:
    explicit NdFft(std::vector<Eigen::Index> shape) : shape_(std::move(shape)) {
        strides_.assign(shape_.size(), 1);
        for (int d = static_cast<int>(shape_.size()) - 2; d >= 0; --d)
            strides_[static_cast<std::size_t>(d)] =
                strides_[static_cast<std::size_t>(d) + 1] * shape_[static_cast<std::size_t>(d) + 1];
        total_ = 1;
        for (auto s : shape_) total_ *= s;
    }

    Eigen::Index total() const { return total_; }
    const std::vector<Eigen::Index>& shape() const { return shape_; }

    void forward(std::vector<std::complex<double>>& a) const { run(a, false); }
    void inverse(std::vector<std::complex<double>>& a) const { run(a, true); }

    // Embed a real lattice into the cyclic grid (indices taken mod nothing:
    // caller guarantees support fits; wrap would silently alias).
    std::vector<std::complex<double>> embed(const Lattice<double>& f) const {
        std::vector<std::complex<double>> out(static_cast<std::size_t>(total_));
        std::vector<Eigen::Index> idx;
        for (Eigen::Index off = 0; off < f.size(); ++off) {
            double v = f.flat()[off];
            if (v == 0.0) continue;
            f.unravel(off, idx);
            Eigen::Index o = 0;
            for (std::size_t d = 0; d < shape_.size(); ++d) {
                Eigen::Index i = idx[d] % shape_[d];
                o += i * strides_[d];
            }
            out[static_cast<std::size_t>(o)] += v;
        }
        return out;
    }

private:
    void run(std::vector<std::complex<double>>& a, bool inv) const {
        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> line, out;
        for (std::size_t d = 0; d < shape_.size(); ++d) {
            const Eigen::Index len = shape_[d];
            const Eigen::Index stride = strides_[d];
            const Eigen::Index nlines = total_ / len;
            line.resize(static_cast<std::size_t>(len));
            out.resize(static_cast<std::size_t>(len));
            for (Eigen::Index li = 0; li < nlines; ++li) {
                // base offset of this line: enumerate all indices with dim d == 0
                Eigen::Index rem = li, base = 0;
                for (std::size_t q = 0; q < shape_.size(); ++q) {
                    if (q == d) continue;
                    const Eigen::Index sz = shape_[q];
                    base += (rem % sz) * strides_[q];
                    rem /= sz;
                }
                for (Eigen::Index i = 0; i < len; ++i)
                    line[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(base + i * stride)];
                if (inv)
                    fft.inv(out, line);
                else
                    fft.fwd(out, line);
                for (Eigen::Index i = 0; i < len; ++i)
                    a[static_cast<std::size_t>(base + i * stride)] = out[static_cast<std::size_t>(i)];
            }
        }
    }

    std::vector<Eigen::Index> shape_;
    std::vector<Eigen::Index> strides_;
    Eigen::Index total_ = 0;
};

}  // namespace netcomp
