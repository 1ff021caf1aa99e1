#include "rnl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rnl {

Mat64 Mat64::identity(std::size_t n) {
    Mat64 I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

void check_finite(const Vec64& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw NumericError(std::string(what) + ": non-finite entry");
}

void check_finite(const Mat64& A, const char* what) {
    check_finite(A.a, what);
}

double inf_norm_vec(const Vec64& v) {
    if (v.empty()) throw DimError("inf_norm_vec: empty vector");
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double inf_norm_mat(const Mat64& A) {
    if (A.empty()) throw DimError("inf_norm_mat: degenerate dimensions");
    double m = 0.0;
    for (std::size_t i = 0; i < A.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < A.cols; ++j) s += std::abs(A(i, j));
        m = std::max(m, s);
    }
    return m;
}

Mat64 transpose(const Mat64& A) {
    Mat64 T(A.cols, A.rows);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
    return T;
}

Mat64 matmul(const Mat64& A, const Mat64& B) {
    if (A.cols != B.rows) throw DimError("matmul: inner dimensions disagree");
    Mat64 C(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t k = 0; k < A.cols; ++k) {
            const double aik = A(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

Vec64 matvec(const Mat64& A, const Vec64& x) {
    if (A.cols != x.size()) throw DimError("matvec: dimension mismatch");
    Vec64 y(A.rows, 0.0);
    for (std::size_t i = 0; i < A.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < A.cols; ++j) s += A(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

namespace {

double col_dot(const Mat64& B, std::size_t p, std::size_t q) {
    double s = 0.0;
    for (std::size_t i = 0; i < B.rows; ++i) s += B(i, p) * B(i, q);
    return s;
}

} // namespace

SpectralSummary spectral_summary(const Mat64& A) {
    if (A.empty()) throw DimError("spectral_summary: degenerate dimensions");
    check_finite(A, "spectral_summary");

    // One-sided Jacobi orthogonalizes the columns of a tall copy of A; the
    // surviving column norms are the singular values. Working on the tall
    // orientation keeps exactly min(rows, cols) of them.
    Mat64 B = (A.rows >= A.cols) ? A : transpose(A);
    const std::size_t n = B.cols;

    const double tol = 1e-12;
    const int max_sweeps = 64;

    double worst = 0.0;
    bool converged = (n == 1);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        std::size_t rotations = 0;
        worst = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double app = col_dot(B, p, p);
                const double aqq = col_dot(B, q, q);
                const double apq = col_dot(B, p, q);
                const double denom = std::sqrt(app * aqq);
                if (denom == 0.0) continue;
                worst = std::max(worst, std::abs(apq) / denom);
                if (std::abs(apq) <= tol * denom) continue;

                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < B.rows; ++i) {
                    const double bip = B(i, p);
                    const double biq = B(i, q);
                    B(i, p) = c * bip - s * biq;
                    B(i, q) = s * bip + c * biq;
                }
                ++rotations;
            }
        }
        if (rotations == 0) converged = true;
    }
    if (!converged)
        throw NumericError("spectral_summary: Jacobi sweeps exhausted, residual " +
                           std::to_string(worst));

    SpectralSummary out;
    out.sigma_max = 0.0;
    out.sigma_min = std::numeric_limits<double>::infinity();
    double det = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double sigma = std::sqrt(col_dot(B, j, j));
        out.sigma_max = std::max(out.sigma_max, sigma);
        out.sigma_min = std::min(out.sigma_min, sigma);
        det *= sigma;
    }
    out.abs_det = (A.rows == A.cols) ? det : 0.0;
    return out;
}

double solve_det_shift(const Mat64& J, double s) {
    if (J.rows != J.cols) throw DimError("solve_det_shift: square matrix required");
    check_finite(J, "solve_det_shift");
    const std::size_t n = J.rows;
    Mat64 M = J;
    for (std::size_t i = 0; i < n; ++i) M(i, i) += s;

    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(M(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(M(i, k)) > best) {
                best = std::abs(M(i, k));
                pivot = i;
            }
        }
        if (best == 0.0) return 0.0;
        if (pivot != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(M(k, j), M(pivot, j));
        det *= M(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = M(i, k) / M(k, k);
            for (std::size_t j = k; j < n; ++j) M(i, j) -= f * M(k, j);
        }
    }
    return std::abs(det);
}

} // namespace rnl
