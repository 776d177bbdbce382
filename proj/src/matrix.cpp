#include "selfsim/matrix.hpp"

#include <stdexcept>

namespace selfsim {

CountMatrix CountMatrix::identity(std::size_t dim) {
    CountMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1;
    return m;
}

CountMatrix CountMatrix::from_rows(const std::vector<std::vector<std::uint64_t>>& rows) {
    CountMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw std::invalid_argument("matrix is not square");
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

CountMatrix multiply(const CountMatrix& x, const CountMatrix& y) {
    if (x.n != y.n) throw std::invalid_argument("dimension mismatch");
    CountMatrix r(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t k = 0; k < x.n; ++k) {
            std::uint64_t xik = x(i, k);
            if (xik == 0) continue;
            for (std::size_t j = 0; j < x.n; ++j) {
                std::uint64_t p, s;
                if (__builtin_mul_overflow(xik, y(k, j), &p) ||
                    __builtin_add_overflow(r(i, j), p, &s))
                    throw std::overflow_error("count matrix entry exceeds 64 bits");
                r(i, j) = s;
            }
        }
    return r;
}

CountMatrix power(const CountMatrix& m, unsigned k) {
    CountMatrix r = CountMatrix::identity(m.n);
    for (unsigned i = 0; i < k; ++i) r = multiply(r, m);
    return r;
}

CountMatrix principal_submatrix(const CountMatrix& m, const std::vector<std::size_t>& idx) {
    CountMatrix r(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) r(i, j) = m(idx[i], idx[j]);
    return r;
}

CountMatrix permuted(const CountMatrix& m, const std::vector<std::size_t>& order) {
    return principal_submatrix(m, order);
}

bool any_positive(const CountMatrix& m, const std::vector<std::size_t>& rows,
                  const std::vector<std::size_t>& cols) {
    for (auto i : rows)
        for (auto j : cols)
            if (m(i, j) > 0) return true;
    return false;
}

}  // namespace selfsim
