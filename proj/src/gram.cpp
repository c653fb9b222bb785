#include "quenchmap/gram.hpp"

#include <cmath>
#include <stdexcept>

namespace quenchmap {

Matrix gram_linear(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) throw std::runtime_error("gram: column counts differ");
    Matrix k(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < b.rows; ++j) {
            double dot = 0.0;
            for (std::size_t c = 0; c < a.cols; ++c) dot += a(i, c) * b(j, c);
            k(i, j) = dot;
        }
    return k;
}

Matrix gram_fidelity(std::span<const StateVector> a, std::span<const StateVector> b) {
    Matrix k(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (a[i].dim() != b[j].dim()) throw std::runtime_error("gram: state dimensions differ");
            cplx overlap(0.0, 0.0);
            for (std::size_t q = 0; q < a[i].dim(); ++q)
                overlap += std::conj(a[i].amps[q]) * b[j].amps[q];
            k(i, j) = std::norm(overlap);
        }
    return k;
}

double gram_asymmetry(const Matrix& k) {
    if (k.rows != k.cols) throw std::runtime_error("gram: asymmetry needs a square matrix");
    double worst = 0.0;
    for (std::size_t i = 0; i < k.rows; ++i)
        for (std::size_t j = i + 1; j < k.cols; ++j)
            worst = std::max(worst, std::abs(k(i, j) - k(j, i)));
    return worst;
}

} // namespace quenchmap
