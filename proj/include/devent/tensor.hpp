#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace devent {

using Vec = std::vector<double>;

/// Dense row-major tensor of doubles. Rank 1..3 is what the library uses.
struct Tensor {
    std::vector<std::size_t> shape;
    Vec values;

    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        values.assign(element_count(shape), 0.0);
    }

    Tensor(std::vector<std::size_t> s, Vec v) : shape(std::move(s)), values(std::move(v)) {
        if (values.size() != element_count(shape)) {
            throw std::invalid_argument("Tensor: value count does not match shape");
        }
    }

    static std::size_t element_count(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (std::size_t d : s) {
            if (d == 0) throw std::invalid_argument("Tensor: zero extent");
            n *= d;
        }
        return n;
    }

    static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }

    std::size_t size() const { return values.size(); }
    std::size_t rank() const { return shape.size(); }

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    double& operator()(std::size_t i, std::size_t j) { return values[i * shape[1] + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * shape[1] + j]; }

    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return values[(i * shape[1] + j) * shape[2] + k];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return values[(i * shape[1] + j) * shape[2] + k];
    }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void fill(double v) { std::fill(values.begin(), values.end(), v); }
};

inline std::string shape_string(const std::vector<std::size_t>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                    shape_string(a.shape) + " vs " + shape_string(b.shape));
    }
}

}  // namespace devent
