#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace quenchmap {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data.data() + i * cols, cols);
    }
    std::span<double> row(std::size_t i) {
        return std::span<double>(data.data() + i * cols, cols);
    }

    /// New matrix holding the given rows, in the given order.
    Matrix select_rows(std::span<const std::size_t> idx) const {
        Matrix out(idx.size(), cols);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] >= rows) throw std::out_of_range("Matrix::select_rows: index out of range");
            for (std::size_t j = 0; j < cols; ++j) out(k, j) = (*this)(idx[k], j);
        }
        return out;
    }

    /// New matrix holding the given columns, in the given order.
    Matrix select_cols(std::span<const std::size_t> idx) const {
        Matrix out(rows, idx.size());
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t k = 0; k < idx.size(); ++k) {
                if (idx[k] >= cols) throw std::out_of_range("Matrix::select_cols: index out of range");
                out(i, k) = (*this)(i, idx[k]);
            }
        }
        return out;
    }

    bool operator==(const Matrix& other) const = default;
};

} // namespace quenchmap
