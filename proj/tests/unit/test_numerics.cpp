#include <doctest.h>

#include <cmath>

#include "rnl/numerics.hpp"
#include "rnl/rng.hpp"

using namespace rnl;

namespace {

Mat64 make2(double a, double b, double c, double d) {
    Mat64 M(2, 2);
    M(0, 0) = a; M(0, 1) = b; M(1, 0) = c; M(1, 1) = d;
    return M;
}

// Singular values of a 2x2 by the quadratic formula on A^T A, the
// independent oracle for the Jacobi sweep.
void check_svd2(const Mat64& A) {
    const double t = A(0,0)*A(0,0) + A(0,1)*A(0,1) + A(1,0)*A(1,0) + A(1,1)*A(1,1);
    const double det = A(0,0)*A(1,1) - A(0,1)*A(1,0);
    const double disc = std::sqrt(std::max(t*t - 4.0*det*det, 0.0));
    const double smax = std::sqrt((t + disc) / 2.0);
    const double smin = std::sqrt(std::max((t - disc) / 2.0, 0.0));

    const SpectralSummary s = spectral_summary(A);
    CHECK(s.sigma_max == doctest::Approx(smax).epsilon(1e-12));
    CHECK(s.sigma_min == doctest::Approx(smin).epsilon(1e-12));
    CHECK(s.abs_det == doctest::Approx(std::abs(det)).epsilon(1e-12));
}

} // namespace

TEST_SUITE("numerics") {

TEST_CASE("inf norm is the max absolute row sum and is attained") {
    Mat64 A = make2(1.0, -2.0, 3.0, 0.5);
    CHECK(inf_norm_mat(A) == doctest::Approx(3.5));

    // sign vector of the heaviest row attains the norm
    Vec64 s{1.0, 1.0}; // signs of row 1
    const Vec64 y = matvec(A, s);
    CHECK(inf_norm_vec(y) == doctest::Approx(inf_norm_mat(A)));
}

TEST_CASE("spectral summary matches the 2x2 closed form") {
    check_svd2(make2(3.0, 1.0, 1.0, 2.0));
    check_svd2(make2(1.0, -2.0, 0.5, 0.7));
    check_svd2(make2(0.0, 1.0, -2.0, -3.0));
}

TEST_CASE("spectral summary of a wide matrix") {
    Mat64 A(2, 3);
    A(0, 0) = 1.0; A(0, 2) = 1.0;
    A(1, 1) = 1.0;
    const SpectralSummary s = spectral_summary(A);
    // A A^T = diag(2, 1)
    CHECK(s.sigma_max == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s.sigma_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.abs_det == 0.0);
}

TEST_CASE("det shift agrees with the 3x3 cofactor expansion") {
    Mat64 J(3, 3);
    J(0,0) = 2.0; J(0,1) = 1.0; J(0,2) = 0.0;
    J(1,0) = 0.0; J(1,1) = 3.0; J(1,2) = 1.0;
    J(2,0) = 1.0; J(2,1) = 0.0; J(2,2) = 1.0;
    const double s = 0.5;
    const double a = J(0,0)+s, b = J(0,1), c = J(0,2);
    const double d = J(1,0), e = J(1,1)+s, f = J(1,2);
    const double g = J(2,0), h = J(2,1), i = J(2,2)+s;
    const double det = a*(e*i - f*h) - b*(d*i - f*g) + c*(d*h - e*g);
    CHECK(solve_det_shift(J, s) == doctest::Approx(std::abs(det)).epsilon(1e-12));
    CHECK(det == doctest::Approx(14.125));
}

TEST_CASE("det shift vanishes exactly at eigenvalues of a companion matrix") {
    // companion of x^2 + 3x + 2, eigenvalues -1 and -2
    Mat64 J = make2(0.0, 1.0, -2.0, -3.0);
    CHECK(solve_det_shift(J, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(solve_det_shift(J, 2.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(solve_det_shift(J, 1.5) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("induced norm is submultiplicative") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Mat64 A(3, 3), B(3, 3);
        for (double& v : A.a) v = rng.uniform(-2.0, 2.0);
        for (double& v : B.a) v = rng.uniform(-2.0, 2.0);
        CHECK(inf_norm_mat(matmul(A, B)) <= inf_norm_mat(A) * inf_norm_mat(B) + 1e-12);
    }
}

TEST_CASE("matmul, matvec, transpose on fixed values") {
    Mat64 A = make2(1.0, 2.0, 3.0, 4.0);
    Mat64 B = make2(0.0, 1.0, 1.0, 0.0);
    Mat64 C = matmul(A, B);
    CHECK(C(0, 0) == 2.0);
    CHECK(C(0, 1) == 1.0);
    CHECK(C(1, 0) == 4.0);
    CHECK(C(1, 1) == 3.0);

    const Vec64 y = matvec(A, {1.0, -1.0});
    CHECK(y[0] == -1.0);
    CHECK(y[1] == -1.0);

    Mat64 T = transpose(A);
    CHECK(T(0, 1) == 3.0);
    CHECK(T(1, 0) == 2.0);
}

TEST_CASE("check_finite rejects NaN and infinity") {
    Vec64 v{1.0, std::nan("")};
    CHECK_THROWS_AS(check_finite(v, "v"), NumericError);
    Mat64 A = make2(1.0, 2.0, std::numeric_limits<double>::infinity(), 0.0);
    CHECK_THROWS_AS(check_finite(A, "A"), NumericError);
}

} // TEST_SUITE
