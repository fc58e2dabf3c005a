#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace netcomp {

// Dense d-dimensional tensor on a nonnegative-integer support box.
// Row-major flat storage; entries may be negative (signed lattices such as
// the determinant kernel are first-class citizens here).
template <typename Scalar>
class Lattice {
public:
    using Flat = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

    Lattice() = default;

    explicit Lattice(std::vector<Eigen::Index> shape)
        : shape_(std::move(shape)), data_(Flat::Zero(flat_size(shape_))) {
        init_strides();
    }

    Lattice(std::vector<Eigen::Index> shape, Flat data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != flat_size(shape_))
            throw std::invalid_argument("lattice: data size does not match shape");
        init_strides();
    }

    static Lattice delta(std::vector<Eigen::Index> shape) {
        Lattice out(std::move(shape));
        out.data_[0] = Scalar(1);
        return out;
    }

    int dims() const { return static_cast<int>(shape_.size()); }
    const std::vector<Eigen::Index>& shape() const { return shape_; }
    Eigen::Index extent(int d) const { return shape_[static_cast<std::size_t>(d)]; }
    Eigen::Index size() const { return data_.size(); }

    Flat& flat() { return data_; }
    const Flat& flat() const { return data_; }

    Eigen::Index offset(const std::vector<Eigen::Index>& idx) const {
        Eigen::Index off = 0;
        for (std::size_t d = 0; d < shape_.size(); ++d) off += idx[d] * strides_[d];
        return off;
    }

    Scalar& operator()(const std::vector<Eigen::Index>& idx) { return data_[offset(idx)]; }
    Scalar operator()(const std::vector<Eigen::Index>& idx) const { return data_[offset(idx)]; }

    Scalar& at2(Eigen::Index i, Eigen::Index j) { return data_[i * strides_[0] + j]; }
    Scalar at2(Eigen::Index i, Eigen::Index j) const { return data_[i * strides_[0] + j]; }

    void unravel(Eigen::Index off, std::vector<Eigen::Index>& idx) const {
        idx.resize(shape_.size());
        for (std::size_t d = 0; d < shape_.size(); ++d) {
            idx[d] = off / strides_[d];
            off %= strides_[d];
        }
    }

    Scalar sum() const { return data_.sum(); }

    // Value-preserving embed into a larger (or truncated into a smaller) box.
    Lattice fitted(const std::vector<Eigen::Index>& shape) const {
        Lattice out(shape);
        std::vector<Eigen::Index> idx;
        for (Eigen::Index off = 0; off < data_.size(); ++off) {
            if (data_[off] == Scalar(0)) continue;
            unravel(off, idx);
            bool inside = true;
            for (std::size_t d = 0; d < shape.size(); ++d)
                if (idx[d] >= shape[d]) { inside = false; break; }
            if (inside) out(idx) = data_[off];
        }
        return out;
    }

    // Fix coordinate `dim` at index 0 and drop it.
    Lattice slice0(int dim) const {
        if (dims() == 1) throw std::logic_error("lattice: cannot slice a 1-d lattice");
        std::vector<Eigen::Index> new_shape;
        for (int d = 0; d < dims(); ++d)
            if (d != dim) new_shape.push_back(shape_[static_cast<std::size_t>(d)]);
        Lattice out(new_shape);
        std::vector<Eigen::Index> idx, src(shape_.size());
        for (Eigen::Index off = 0; off < out.size(); ++off) {
            out.unravel(off, idx);
            std::size_t q = 0;
            for (int d = 0; d < dims(); ++d)
                src[static_cast<std::size_t>(d)] = (d == dim) ? 0 : idx[q++];
            out.flat()[off] = (*this)(src);
        }
        return out;
    }

    // Multiply entry at index m by w(m_dim): the index-weighting that turns a GF
    // derivative into a lattice. weight(m) is applied along one coordinate.
    template <typename Fn>
    Lattice index_weighted(int dim, Fn&& weight) const {
        Lattice out = *this;
        std::vector<Eigen::Index> idx;
        for (Eigen::Index off = 0; off < data_.size(); ++off) {
            out.unravel(off, idx);
            out.flat()[off] *= weight(idx[static_cast<std::size_t>(dim)]);
        }
        return out;
    }

    Lattice transposed2() const {
        if (dims() != 2) throw std::logic_error("lattice: transpose needs 2 dims");
        Lattice out({shape_[1], shape_[0]});
        for (Eigen::Index i = 0; i < shape_[0]; ++i)
            for (Eigen::Index j = 0; j < shape_[1]; ++j)
                out.at2(j, i) = at2(i, j);
        return out;
    }

    static Eigen::Index flat_size(const std::vector<Eigen::Index>& shape) {
        Eigen::Index n = 1;
        for (auto s : shape) {
            if (s <= 0) throw std::invalid_argument("lattice: nonpositive extent");
            n *= s;
        }
        return n;
    }

private:
    void init_strides() {
        strides_.assign(shape_.size(), 1);
        for (int d = static_cast<int>(shape_.size()) - 2; d >= 0; --d)
            strides_[static_cast<std::size_t>(d)] =
                strides_[static_cast<std::size_t>(d) + 1] * shape_[static_cast<std::size_t>(d) + 1];
    }

    std::vector<Eigen::Index> shape_;
    std::vector<Eigen::Index> strides_;
    Flat data_;
};

using Latticed = Lattice<double>;

}  // namespace netcomp
