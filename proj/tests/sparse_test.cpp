#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nonneg/sparse.hpp"
#include "oracles.hpp"

using namespace nonneg;
using doctest::Approx;

namespace {

SparseMatrix tridiag(std::size_t n, double lo, double d, double hi) {
    TripletBuilder t(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) t.add(i, i - 1, lo);
        t.add(i, i, d);
        if (i + 1 < n) t.add(i, i + 1, hi);
    }
    return t.build();
}

// Random sparse matrix with a dominant diagonal, so it is well conditioned.
SparseMatrix random_matrix(std::mt19937_64& rng, std::size_t n, double density, double diag) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    TripletBuilder t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t.add(i, i, diag);
        for (std::size_t j = 0; j < n; ++j)
            if (coin(rng) < density) t.add(i, j, d(rng));
    }
    return t.build();
}

}  // namespace

TEST_CASE("builder sums duplicates, sorts and drops zeros") {
    TripletBuilder t(3);
    t.add(2, 0, 1.0);
    t.add(0, 2, 4.0);
    t.add(0, 1, 2.0);
    t.add(0, 1, -2.0);
    t.add(2, 0, 0.5);
    const auto a = t.build();
    CHECK(a.nonzeros() == 2);
    CHECK(a.at(0, 1) == 0.0);
    CHECK(a.at(2, 0) == 1.5);
    CHECK(a.bandwidth() == 2);
    CHECK_THROWS_AS(t.add(3, 0, 1.0), Error);
}

TEST_CASE("CSR constructor validates") {
    CHECK_THROWS_AS(SparseMatrix(2, {0, 1}, {0}, {1.0}), Error);                    // short offsets
    CHECK_THROWS_AS(SparseMatrix(2, {0, 2, 2}, {1, 0}, {1.0, 1.0}), Error);         // unsorted
    CHECK_THROWS_AS(SparseMatrix(2, {0, 1, 1}, {5}, {1.0}), Error);                 // column range
    CHECK_THROWS_AS(SparseMatrix(1, {0, 1}, {0}, {std::nan("")}), Error);           // NaN
    CHECK_NOTHROW(SparseMatrix(2, {0, 1, 2}, {0, 1}, {1.0, 2.0}));
}

TEST_CASE("matvec") {
    const std::vector<double> x{1.0, -2.0, 3.5};
    CHECK(matvec(SparseMatrix::identity(3), x) == x);
    CHECK(matvec(SparseMatrix::zero(3), x) == std::vector<double>(3, 0.0));
    CHECK_THROWS_AS(matvec(SparseMatrix::identity(2), x), Error);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_matrix(rng, 5, 0.4, 0.0);
        std::vector<double> v(5);
        for (auto& e : v) e = d(rng);
        const auto got = matvec(a, v);
        const auto want = oracle::dense_matvec(oracle::to_dense(a), v);
        for (std::size_t i = 0; i < 5; ++i) CHECK(got[i] == Approx(want[i]).epsilon(1e-14).scale(1.0));
    }
}

TEST_CASE("operator norm") {
    CHECK(operator_norm_inf(SparseMatrix::identity(4)) == 1.0);
    TripletBuilder t(3);
    t.add(0, 0, -1.0);
    t.add(1, 0, 1.0);
    t.add(1, 2, -2.0);
    t.add(2, 1, 2.0);
    CHECK(operator_norm_inf(t.build()) == 3.0);
}

TEST_CASE("norm is submultiplicative and multiply matches dense product") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = random_matrix(rng, 8, 0.3, 0.5);
        const auto b = random_matrix(rng, 8, 0.3, -0.7);
        const auto ab = multiply(a, b);
        CHECK(operator_norm_inf(ab) <= operator_norm_inf(a) * operator_norm_inf(b) * (1 + 1e-14));
        const auto want = oracle::dense_multiply(oracle::to_dense(a), oracle::to_dense(b));
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j) CHECK(ab.at(i, j) == Approx(want[i][j]).scale(1.0).epsilon(1e-13));
    }
}

TEST_CASE("combine") {
    const auto a = tridiag(4, -1, 2, -1);
    const auto c = combine(2.0, SparseMatrix::identity(4), -0.5, a);
    CHECK(c.at(0, 0) == 1.0);
    CHECK(c.at(1, 0) == 0.5);
    CHECK(combine(1.0, a, -1.0, a).nonzeros() == 0);
}

TEST_CASE("solve examples") {
    const std::vector<double> rhs{1.0, -2.0, 0.25};
    CHECK(solve(SparseMatrix::identity(3), rhs).first == rhs);

    const auto [x, rep] = solve(tridiag(4, -1, 2, -1), std::vector<double>(4, 1.0));
    const std::vector<double> want{2.0, 3.0, 3.0, 2.0};
    for (std::size_t i = 0; i < 4; ++i) CHECK(x[i] == Approx(want[i]).epsilon(1e-14));
    CHECK(rep.method == "banded-lu");
    CHECK(rep.residual_norm <= default_solve_tol);

    // Dirichlet Laplacian, 3 interior nodes of h = 0.25: multiply then solve.
    const auto lap = tridiag(3, 16.0, -32.0, 16.0);
    const std::vector<double> truth{0.3, -1.7, 2.2};
    const auto back = solve(lap, matvec(lap, truth)).first;
    for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == Approx(truth[i]).epsilon(1e-13));
}

TEST_CASE("solve round trip on random well-conditioned matrices") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (std::size_t n : {5u, 40u, 200u}) {
        for (double density : {0.02, 0.2}) {
            const auto a = random_matrix(rng, n, density, 0.5 * density * static_cast<double>(n) + 2.0);
            std::vector<double> x(n);
            for (auto& e : x) e = d(rng);
            double xn = 0.0;
            for (double e : x) xn = std::max(xn, std::abs(e));
            SolveReport rep;
            const auto y = Factorization(a).solve(matvec(a, x), default_solve_tol, &rep);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - x[i]) <= 10 * default_solve_tol * xn);
        }
    }
}

TEST_CASE("pentadiagonal systems take the banded path and match dense elimination") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    const std::size_t n = 60;
    TripletBuilder t(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i >= 2 ? i - 2 : 0); j <= std::min(n - 1, i + 2); ++j) t.add(i, j, d(rng));
    const auto a = t.build();
    CHECK(a.bandwidth() == 2);
    std::vector<double> b(n);
    for (auto& e : b) e = d(rng);
    const Factorization f(a);
    CHECK(f.method() == "banded-lu");
    const auto x = f.solve(b);
    const auto want = oracle::gauss_solve(oracle::to_dense(a), b);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == Approx(want[i]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("wide band goes to sparse LU") {
    TripletBuilder t(5);
    for (std::size_t i = 0; i < 5; ++i) t.add(i, i, 4.0);
    t.add(0, 4, 1.0);
    t.add(4, 0, 1.0);
    const Factorization f(t.build());
    CHECK(f.method() == "sparse-lu");
    const auto x = f.solve(std::vector<double>{5, 4, 4, 4, 5});
    for (double v : x) CHECK(v == Approx(1.0));
}

TEST_CASE("singular and malformed systems fail loudly") {
    TripletBuilder t(3);
    t.add(0, 0, 1.0);
    t.add(1, 1, 1.0);
    try {
        Factorization f(t.build());
        FAIL("singular matrix factored");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::singular);
    }
    TripletBuilder w(4);
    for (std::size_t i = 0; i < 4; ++i) w.add(i, 3 - i, 1.0);
    w.add(0, 0, 1.0);
    w.add(3, 3, 1.0);
    CHECK_THROWS_AS(Factorization(SparseMatrix::zero(6)), Error);
    const Factorization ok(SparseMatrix::identity(2));
    const std::vector<double> wrong(3, 1.0);
    CHECK_THROWS_AS(ok.solve(wrong), Error);
    const std::vector<double> nan{1.0, std::nan("")};
    CHECK_THROWS_AS(ok.solve(nan), Error);
}

TEST_CASE("explicit inverse norms match the dense oracle") {
    std::mt19937_64 rng(33);
    const auto a = random_matrix(rng, 30, 0.1, 3.0);
    const auto b = random_matrix(rng, 30, 0.1, 1.0);
    const Factorization f(a);
    const auto inv = oracle::dense_inverse(oracle::to_dense(a));
    CHECK(inverse_norm_inf(f) == Approx(oracle::dense_norm_inf(inv)).epsilon(1e-10));
    const auto prod = oracle::dense_multiply(inv, oracle::to_dense(b));
    CHECK(inverse_product_norm_inf(f, b) == Approx(oracle::dense_norm_inf(prod)).epsilon(1e-10));
    CHECK(inverse_norm_inf(Factorization(SparseMatrix::identity(7))) == 1.0);
}

TEST_CASE("coordinate output") {
    std::ostringstream os;
    write_coordinate(tridiag(2, -1, 2, -1), os);
    CHECK(os.str() == "0 0 2\n0 1 -1\n1 0 -1\n1 1 2\n");
}
