#include "risfl/linalg.hpp"

#include <cassert>

namespace risfl {

void matmul(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
    assert(a.cols == b.rows);
    if (c.rows != a.rows || c.cols != b.cols) c = Matrix(a.rows, b.cols);
    if (!accumulate) c.fill(0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* crow = c.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
    assert(a.rows == b.rows);
    if (c.rows != a.cols || c.cols != b.cols) c = Matrix(a.cols, b.cols);
    if (!accumulate) c.fill(0.0);
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* arow = a.row(k);
        const double* brow = b.row(k);
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* crow = c.row(i);
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aki * brow[j];
        }
    }
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
    assert(a.cols == b.cols);
    if (c.rows != a.rows || c.cols != b.rows) c = Matrix(a.rows, b.rows);
    if (!accumulate) c.fill(0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* crow = c.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* brow = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
            crow[j] += acc;
        }
    }
}

void add_row_vector(Matrix& m, const std::vector<double>& v) {
    assert(v.size() == m.cols);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double* row = m.row(i);
        for (std::size_t j = 0; j < m.cols; ++j) row[j] += v[j];
    }
}

std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> s(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* row = m.row(i);
        for (std::size_t j = 0; j < m.cols; ++j) s[j] += row[j];
    }
    return s;
}

}  // namespace risfl
