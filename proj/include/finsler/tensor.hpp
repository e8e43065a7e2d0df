#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace finsler {

/// Dense cube of components: every slot ranges over 0..dim-1, stored row-major.
template <class T>
class Tensor {
public:
    Tensor() = default;
    Tensor(int dim, int rank, const T& fill = T{})
        : dim_(dim), rank_(rank), data_(count(dim, rank), fill) {}

    int dim() const noexcept { return dim_; }
    int rank() const noexcept { return rank_; }
    std::size_t size() const noexcept { return data_.size(); }

    T& operator[](std::size_t f) { return data_[f]; }
    const T& operator[](std::size_t f) const { return data_[f]; }

    template <class... I>
    T& operator()(I... idx) {
        return data_[offset(idx...)];
    }
    template <class... I>
    const T& operator()(I... idx) const {
        return data_[offset(idx...)];
    }

    /// Component index at slot p of flat position f.
    int index_at(std::size_t f, int p) const noexcept {
        return static_cast<int>((f / stride(p)) % static_cast<std::size_t>(dim_));
    }
    std::size_t stride(int p) const noexcept {
        std::size_t s = 1;
        for (int q = rank_ - 1; q > p; --q) s *= static_cast<std::size_t>(dim_);
        return s;
    }
    /// Flat position f with slot p replaced by value m.
    std::size_t replace(std::size_t f, int p, int m) const noexcept {
        const std::size_t s = stride(p);
        return f - s * static_cast<std::size_t>(index_at(f, p)) + s * static_cast<std::size_t>(m);
    }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

private:
    static std::size_t count(int dim, int rank) {
        std::size_t c = 1;
        for (int r = 0; r < rank; ++r) c *= static_cast<std::size_t>(dim);
        return c;
    }

    template <class... I>
    std::size_t offset(I... idx) const {
        static_assert(sizeof...(I) > 0);
        const std::array<int, sizeof...(I)> ix{static_cast<int>(idx)...};
        std::size_t f = 0;
        for (int i : ix) f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
        return f;
    }

    int dim_ = 0;
    int rank_ = 0;
    std::vector<T> data_;
};

using NumTensor = Tensor<double>;

inline double frobenius(const NumTensor& t) {
    double s = 0.0;
    for (double v : t.data()) s += v * v;
    return std::sqrt(s);
}

inline double max_abs(const NumTensor& t) {
    double m = 0.0;
    for (double v : t.data()) m = std::max(m, std::abs(v));
    return m;
}

inline NumTensor operator-(const NumTensor& a, const NumTensor& b) {
    NumTensor r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline NumTensor operator+(const NumTensor& a, const NumTensor& b) {
    NumTensor r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline NumTensor operator*(double s, const NumTensor& a) {
    NumTensor r = a;
    for (double& v : r.data()) v *= s;
    return r;
}

/// Frobenius norm of a - b.
inline double distance(const NumTensor& a, const NumTensor& b) {
    if (a.size() != b.size()) throw std::invalid_argument("tensor shapes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace finsler
