#pragma once

#include <cstddef>
#include <vector>

namespace risfl {

// Dense row-major matrix of doubles. Small by design: the networks here are
// a few hundred units wide at most, so this plus a cache-friendly matmul is
// all the linear algebra the project needs.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    void fill(double v) { data.assign(rows * cols, v); }
    std::size_t size() const { return data.size(); }
};

// C = A * B, or C += A * B when accumulate is set.
void matmul(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);

// C = A^T * B
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);

// C = A * B^T
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);

// every row of m += v (v has m.cols entries)
void add_row_vector(Matrix& m, const std::vector<double>& v);

// column sums of m
std::vector<double> column_sums(const Matrix& m);

}  // namespace risfl
