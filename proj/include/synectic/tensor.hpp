#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "synectic/errors.hpp"

namespace synectic {

enum class Variance { Upper, Lower };

// Dense multi-index array with per-slot dimension and variance, row-major
// flat storage.  Small and concrete: geometry code addresses components by
// explicit index tuples, and the handful of generic operations below
// (contraction, pair symmetrization) are plain loops over the flat data.
class MultiIndexArray {
  public:
    MultiIndexArray() = default;

    MultiIndexArray(std::vector<std::size_t> dims, std::vector<Variance> variances)
        : dims_(std::move(dims)), var_(std::move(variances)) {
        if (dims_.size() != var_.size())
            throw ShapeError("dims and variances differ in rank");
        std::size_t total = 1;
        for (std::size_t d : dims_) {
            if (d == 0) throw ShapeError("zero-sized tensor slot");
            total *= d;
        }
        strides_.assign(dims_.size(), 1);
        for (std::size_t s = dims_.size(); s-- > 1;)
            strides_[s - 1] = strides_[s] * dims_[s];
        data_.assign(total, 0.0);
    }

    std::size_t rank() const { return dims_.size(); }
    std::size_t dim(std::size_t slot) const { return dims_.at(slot); }
    Variance variance(std::size_t slot) const { return var_.at(slot); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    const std::vector<Variance>& variances() const { return var_; }
    std::size_t size() const { return data_.size(); }

    double& at(std::span<const std::size_t> idx) { return data_[flatten(idx)]; }
    double at(std::span<const std::size_t> idx) const { return data_[flatten(idx)]; }

    double& at(std::initializer_list<std::size_t> idx) {
        return at(std::span<const std::size_t>(idx.begin(), idx.size()));
    }
    double at(std::initializer_list<std::size_t> idx) const {
        return at(std::span<const std::size_t>(idx.begin(), idx.size()));
    }

    std::vector<double>& flat() { return data_; }
    const std::vector<double>& flat() const { return data_; }

    double max_abs() const {
        double m = 0.0;
        for (double x : data_) m = std::max(m, std::abs(x));
        return m;
    }

    MultiIndexArray& operator+=(const MultiIndexArray& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    MultiIndexArray& operator-=(const MultiIndexArray& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }

    MultiIndexArray& operator*=(double c) {
        for (double& x : data_) x *= c;
        return *this;
    }

    void check_same_shape(const MultiIndexArray& o) const {
        if (dims_ != o.dims_) throw ShapeError("tensor dimension mismatch");
        if (var_ != o.var_) throw ShapeError("tensor variance mismatch");
    }

    std::size_t flatten(std::span<const std::size_t> idx) const {
        if (idx.size() != dims_.size()) throw ShapeError("wrong index rank");
        std::size_t f = 0;
        for (std::size_t s = 0; s < idx.size(); ++s) {
            if (idx[s] >= dims_[s]) throw ShapeError("index out of range");
            f += idx[s] * strides_[s];
        }
        return f;
    }

    void unflatten(std::size_t f, std::vector<std::size_t>& idx) const {
        idx.resize(dims_.size());
        for (std::size_t s = 0; s < dims_.size(); ++s) {
            idx[s] = f / strides_[s];
            f %= strides_[s];
        }
    }

  private:
    std::vector<std::size_t> dims_;
    std::vector<Variance> var_;
    std::vector<std::size_t> strides_;
    std::vector<double> data_;
};

inline MultiIndexArray operator+(MultiIndexArray a, const MultiIndexArray& b) {
    a += b;
    return a;
}

inline MultiIndexArray operator-(MultiIndexArray a, const MultiIndexArray& b) {
    a -= b;
    return a;
}

inline MultiIndexArray operator*(MultiIndexArray a, double c) {
    a *= c;
    return a;
}

inline MultiIndexArray operator*(double c, MultiIndexArray a) {
    a *= c;
    return a;
}

// Largest absolute componentwise difference; shapes must agree.
inline double max_abs_diff(const MultiIndexArray& a, const MultiIndexArray& b) {
    a.check_same_shape(b);
    double m = 0.0;
    for (std::size_t i = 0; i < a.flat().size(); ++i)
        m = std::max(m, std::abs(a.flat()[i] - b.flat()[i]));
    return m;
}

// Contraction of slotA of A against slotB of B.  The paired slots must
// have equal dimension and opposite variance.  The result keeps the
// remaining slots of A, then those of B, in their original order.
inline MultiIndexArray contract(const MultiIndexArray& a, const MultiIndexArray& b,
                                std::size_t slot_a, std::size_t slot_b) {
    if (slot_a >= a.rank() || slot_b >= b.rank())
        throw ShapeError("contraction slot out of range");
    if (a.dim(slot_a) != b.dim(slot_b))
        throw ShapeError("contracted slots differ in dimension");
    if (a.variance(slot_a) == b.variance(slot_b))
        throw ShapeError("contracted slots must have opposite variance");

    std::vector<std::size_t> dims;
    std::vector<Variance> var;
    for (std::size_t s = 0; s < a.rank(); ++s)
        if (s != slot_a) {
            dims.push_back(a.dim(s));
            var.push_back(a.variance(s));
        }
    for (std::size_t s = 0; s < b.rank(); ++s)
        if (s != slot_b) {
            dims.push_back(b.dim(s));
            var.push_back(b.variance(s));
        }
    MultiIndexArray r(dims, var);

    const std::size_t nk = a.dim(slot_a);
    std::vector<std::size_t> ridx, aidx(a.rank()), bidx(b.rank());
    for (std::size_t f = 0; f < r.size(); ++f) {
        r.unflatten(f, ridx);
        std::size_t p = 0;
        for (std::size_t s = 0; s < a.rank(); ++s)
            if (s != slot_a) aidx[s] = ridx[p++];
        for (std::size_t s = 0; s < b.rank(); ++s)
            if (s != slot_b) bidx[s] = ridx[p++];
        double sum = 0.0;
        for (std::size_t k = 0; k < nk; ++k) {
            aidx[slot_a] = k;
            bidx[slot_b] = k;
            sum += a.at(aidx) * b.at(bidx);
        }
        r.flat()[f] = sum;
    }
    return r;
}

// Trace over two slots of the same tensor (equal dimension, opposite
// variance); remaining slots keep their order.
inline MultiIndexArray trace(const MultiIndexArray& a, std::size_t s1, std::size_t s2) {
    if (s1 >= a.rank() || s2 >= a.rank() || s1 == s2)
        throw ShapeError("trace slots out of range");
    if (a.dim(s1) != a.dim(s2))
        throw ShapeError("traced slots differ in dimension");
    if (a.variance(s1) == a.variance(s2))
        throw ShapeError("traced slots must have opposite variance");

    std::vector<std::size_t> dims;
    std::vector<Variance> var;
    for (std::size_t s = 0; s < a.rank(); ++s)
        if (s != s1 && s != s2) {
            dims.push_back(a.dim(s));
            var.push_back(a.variance(s));
        }
    MultiIndexArray r(dims, var);
    std::vector<std::size_t> ridx, aidx(a.rank());
    for (std::size_t f = 0; f < r.size(); ++f) {
        r.unflatten(f, ridx);
        std::size_t p = 0;
        for (std::size_t s = 0; s < a.rank(); ++s)
            if (s != s1 && s != s2) aidx[s] = ridx[p++];
        double sum = 0.0;
        for (std::size_t k = 0; k < a.dim(s1); ++k) {
            aidx[s1] = k;
            aidx[s2] = k;
            sum += a.at(aidx);
        }
        r.flat()[f] = sum;
    }
    return r;
}

namespace detail {

inline MultiIndexArray pair_combine(const MultiIndexArray& a, std::size_t s1,
                                    std::size_t s2, double sign, bool scaled) {
    if (s1 >= a.rank() || s2 >= a.rank() || s1 == s2)
        throw ShapeError("symmetrization slots out of range");
    if (a.dim(s1) != a.dim(s2) || a.variance(s1) != a.variance(s2))
        throw ShapeError("symmetrization slots must match in dimension and variance");
    MultiIndexArray r(a.dims(), a.variances());
    std::vector<std::size_t> idx, swapped;
    for (std::size_t f = 0; f < r.size(); ++f) {
        r.unflatten(f, idx);
        swapped = idx;
        std::swap(swapped[s1], swapped[s2]);
        double v = a.at(idx) + sign * a.at(swapped);
        r.flat()[f] = scaled ? 0.5 * v : v;
    }
    return r;
}

}  // namespace detail

// sym_pair(A, i, j) = (A + A with slots i,j swapped), halved when scaled.
inline MultiIndexArray sym_pair(const MultiIndexArray& a, std::size_t s1,
                                std::size_t s2, bool scaled = true) {
    return detail::pair_combine(a, s1, s2, +1.0, scaled);
}

inline MultiIndexArray antisym_pair(const MultiIndexArray& a, std::size_t s1,
                                    std::size_t s2, bool scaled = true) {
    return detail::pair_combine(a, s1, s2, -1.0, scaled);
}

}  // namespace synectic
