#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace selfsim {

// Dense square matrix of exact nonnegative counts, row-major.
struct CountMatrix {
    std::size_t n = 0;
    std::vector<std::uint64_t> a;

    CountMatrix() = default;
    explicit CountMatrix(std::size_t dim) : n(dim), a(dim * dim, 0) {}

    std::uint64_t& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    std::uint64_t operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    static CountMatrix identity(std::size_t dim);
    static CountMatrix from_rows(const std::vector<std::vector<std::uint64_t>>& rows);

    bool operator==(const CountMatrix&) const = default;
};

// Exact products; throw std::overflow_error past 2^64 - 1.
CountMatrix multiply(const CountMatrix& x, const CountMatrix& y);
CountMatrix power(const CountMatrix& m, unsigned k);

CountMatrix principal_submatrix(const CountMatrix& m, const std::vector<std::size_t>& idx);
CountMatrix permuted(const CountMatrix& m, const std::vector<std::size_t>& order);

bool any_positive(const CountMatrix& m, const std::vector<std::size_t>& rows,
                  const std::vector<std::size_t>& cols);

}  // namespace selfsim
