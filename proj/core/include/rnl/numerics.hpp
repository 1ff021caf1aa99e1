#pragma once

#include <cstddef>

#include "rnl/common.hpp"

namespace rnl {

// Dense row-major matrix of doubles. Everything in this library is desk
// scale (dimensions well under 64), so there are no sparse or blocked paths.
struct Mat64 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a; // row-major, a[i*cols + j]

    Mat64() = default;
    Mat64(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    static Mat64 identity(std::size_t n);

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    bool empty() const { return rows == 0 || cols == 0; }
};

// Extremal singular values plus |det| (|det| is 0-flagged for non-square
// input). sigma_min is the smallest of the min(rows, cols) singular values.
struct SpectralSummary {
    double sigma_max = 0.0;
    double sigma_min = 0.0;
    double abs_det = 0.0;
};

// max_i |v_i|
double inf_norm_vec(const Vec64& v);

// Induced infinity norm: max row absolute sum.
double inf_norm_mat(const Mat64& A);

// Singular extremes via one-sided cyclic Jacobi (off-diagonal tolerance
// 1e-12, at most 64 sweeps). Throws NumericError if the sweep limit is hit.
SpectralSummary spectral_summary(const Mat64& A);

// |det(J + s*Id)| via LU with partial pivoting. Returns 0 when -s is an
// eigenvalue of J; that is the intended use (rank test of a shifted matrix).
double solve_det_shift(const Mat64& J, double s);

// Shared small-matrix helpers.
Mat64 matmul(const Mat64& A, const Mat64& B);
Vec64 matvec(const Mat64& A, const Vec64& x);
Mat64 transpose(const Mat64& A);

void check_finite(const Vec64& v, const char* what);
void check_finite(const Mat64& A, const char* what);

} // namespace rnl
