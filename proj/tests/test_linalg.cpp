#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <gnorm/linalg.hpp>
#include <gnorm/norm.hpp>
#include <gnorm/rng.hpp>

using namespace gnorm;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    DenseMatrix m(r, c);
    for (double& v : m.data()) v = rng.normal();
    return m;
}

// Independent naive product used as an oracle against matmul.
DenseMatrix naive_product(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

// Random orthogonal matrix via Gram-Schmidt on Gaussian columns.
DenseMatrix random_orthogonal(std::size_t n, Rng& rng) {
    DenseMatrix q(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> col(n);
        for (double& v : col) v = rng.normal();
        for (std::size_t p = 0; p < j; ++p) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += col[i] * q(i, p);
            for (std::size_t i = 0; i < n; ++i) col[i] -= dot * q(i, p);
        }
        double nrm = 0.0;
        for (double v : col) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) q(i, j) = col[i] / nrm;
    }
    return q;
}

}  // namespace

TEST_CASE("matmul identity and zero cases") {
    Rng rng(7);
    DenseMatrix m = random_matrix(3, 3, rng);
    CHECK(max_abs_diff(matmul(DenseMatrix::identity(3), m), m) == 0.0);

    DenseMatrix a{{1, 2}, {3, 4}};
    DenseMatrix z{{0}, {0}};
    DenseMatrix out = matmul(a, z);
    CHECK(out.rows() == 2);
    CHECK(out.cols() == 1);
    CHECK(out(0, 0) == 0.0);
    CHECK(out(1, 0) == 0.0);
}

TEST_CASE("matmul matches naive oracle on random 4x5 by 5x3") {
    Rng rng(11);
    DenseMatrix a = random_matrix(4, 5, rng);
    DenseMatrix b = random_matrix(5, 3, rng);
    CHECK(max_abs_diff(matmul(a, b), naive_product(a, b)) <= 1e-12);
}

TEST_CASE("matmul rejects dimension mismatch naming both shapes") {
    DenseMatrix a(2, 3), b(4, 2);
    CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("2x3"),
                         std::invalid_argument);
}

TEST_CASE("matmul associativity on random triples") {
    Rng rng(13);
    for (int t = 0; t < 5; ++t) {
        DenseMatrix a = random_matrix(8, 6, rng);
        DenseMatrix b = random_matrix(6, 7, rng);
        DenseMatrix c = random_matrix(7, 8, rng);
        DenseMatrix left = matmul(matmul(a, b), c);
        DenseMatrix right = matmul(a, matmul(b, c));
        CHECK(max_abs_diff(left, right) <= 1e-9 * (1.0 + max_abs(left)));
    }
}

TEST_CASE("DenseMatrix construction errors") {
    CHECK_THROWS_AS(DenseMatrix::from_data(2, 2, {1.0, 2.0, 3.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DenseMatrix::from_data(1, 2, {1.0, std::nan("")}),
                    std::invalid_argument);
}

TEST_CASE("sym_eigen on diagonal matrix") {
    EigenResult e = sym_eigen(DenseMatrix::diagonal({5, 2, -1}));
    REQUIRE(e.eigenvalues.size() == 3);
    CHECK(e.eigenvalues[0] == doctest::Approx(5).epsilon(1e-12));
    CHECK(e.eigenvalues[1] == doctest::Approx(2).epsilon(1e-12));
    CHECK(e.eigenvalues[2] == doctest::Approx(-1).epsilon(1e-12));
}

TEST_CASE("sym_eigen on rank-1 all-ones matrix") {
    DenseMatrix ones(3, 3);
    for (double& v : ones.data()) v = 1.0;
    EigenResult e = sym_eigen(ones);
    CHECK(e.eigenvalues[0] == doctest::Approx(3).epsilon(1e-10));
    CHECK(std::abs(e.eigenvalues[1]) <= 1e-10);
    CHECK(std::abs(e.eigenvalues[2]) <= 1e-10);
}

TEST_CASE("sym_eigen reconstruction and orthonormality on random symmetric") {
    Rng rng(17);
    DenseMatrix g = random_matrix(6, 6, rng);
    DenseMatrix m = add(g, transpose(g));  // symmetric
    EigenResult e = sym_eigen(m);

    DenseMatrix vvt = matmul(e.eigenvectors, transpose(e.eigenvectors));
    CHECK(frobenius_norm(sub(vvt, DenseMatrix::identity(6))) <= 1e-9);

    DenseMatrix rec = matmul(
        matmul(e.eigenvectors, DenseMatrix::diagonal(e.eigenvalues)),
        transpose(e.eigenvectors));
    CHECK(frobenius_norm(sub(rec, m)) <= 1e-9 * frobenius_norm(m));
}

TEST_CASE("sym_eigen rejects non-square input") {
    CHECK_THROWS_AS(sym_eigen(DenseMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("singular values of identity and rank-1") {
    Spectrum s = singular_values(DenseMatrix::identity(4));
    for (double v : s.values) CHECK(v == doctest::Approx(1).epsilon(1e-10));

    DenseMatrix ones(3, 3);
    for (double& v : ones.data()) v = 1.0;
    Spectrum s1 = singular_values(ones);
    CHECK(s1.values[0] == doctest::Approx(3).epsilon(1e-10));
    CHECK(s1.values[1] == 0.0);
    CHECK(s1.values[2] == 0.0);
}

TEST_CASE("singular values of A+2I on the triangle are {4,1,1}") {
    // A(K_3) has eigenvalues {2, -1, -1}; adding 2I shifts them to {4, 1, 1},
    // an independent rank-1-update derivation of the expected spectrum.
    DenseMatrix a{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
    DenseMatrix q = a;
    for (std::size_t i = 0; i < 3; ++i) q(i, i) += 2.0;
    Spectrum s = singular_values(q);
    CHECK(s.values[0] == doctest::Approx(4).epsilon(1e-10));
    CHECK(s.values[1] == doctest::Approx(1).epsilon(1e-10));
    CHECK(s.values[2] == doctest::Approx(1).epsilon(1e-10));
}

TEST_CASE("singular values invariant under orthogonal transforms") {
    Rng rng(19);
    DenseMatrix m = random_matrix(6, 6, rng);
    Spectrum base = singular_values(m);
    DenseMatrix u = random_orthogonal(6, rng);
    DenseMatrix v = random_orthogonal(6, rng);
    Spectrum rotated = singular_values(matmul(u, matmul(m, v)));
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(rotated.values[i] ==
              doctest::Approx(base.values[i]).epsilon(1e-9).scale(base.values[0]));
}

TEST_CASE("pseudoinverse of diagonal and identity") {
    DenseMatrix p = pseudoinverse(DenseMatrix::diagonal({2, 0}));
    CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(p(1, 1)) <= 1e-12);
    CHECK(frobenius_norm(sub(pseudoinverse(DenseMatrix::identity(5)),
                             DenseMatrix::identity(5))) <= 1e-9);
}

TEST_CASE("pseudoinverse satisfies the four Penrose identities on random PSD") {
    // Well-separated spectrum with an exact zero keeps the check meaningful
    // for rank deficiency without running into squared-conditioning noise.
    Rng rng(23);
    DenseMatrix q = random_orthogonal(5, rng);
    DenseMatrix m =
        matmul(q, matmul(DenseMatrix::diagonal({3.0, 2.0, 1.5, 1.0, 0.0}),
                         transpose(q)));
    DenseMatrix mp = pseudoinverse(m);
    double scl = 1.0 + frobenius_norm(m);
    CHECK(frobenius_norm(sub(matmul(matmul(m, mp), m), m)) <= 1e-8 * scl);
    CHECK(frobenius_norm(sub(matmul(matmul(mp, m), mp), mp)) <= 1e-8 * scl);
    DenseMatrix mmp = matmul(m, mp);
    CHECK(frobenius_norm(sub(mmp, transpose(mmp))) <= 1e-8 * scl);
    DenseMatrix mpm = matmul(mp, m);
    CHECK(frobenius_norm(sub(mpm, transpose(mpm))) <= 1e-8 * scl);
}

TEST_CASE("gauss_solve round-trips against multiplication") {
    Rng rng(29);
    DenseMatrix a = random_matrix(6, 6, rng);
    for (std::size_t i = 0; i < 6; ++i) a(i, i) += 6.0;  // well-conditioned
    std::vector<double> b(6);
    for (double& v : b) v = rng.normal();
    std::vector<double> x = gauss_solve(a, b);
    for (std::size_t i = 0; i < 6; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 6; ++j) s += a(i, j) * x[j];
        CHECK(s == doctest::Approx(b[i]).epsilon(1e-9));
    }
    CHECK_THROWS_AS(gauss_solve(DenseMatrix(2, 2), {1.0, 1.0}), std::runtime_error);
}
