#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "nonneg/cutoff.hpp"

using namespace nonneg;

namespace {

// Pads short vectors with ones so the grid has at least two cells.
Field line(std::vector<double> v) {
    while (v.size() < 3) v.push_back(1.0);
    const int cells = static_cast<int>(v.size()) - 1;
    return Field(Grid1D{Axis(0.0, 1.0, cells)}, std::move(v));
}

std::vector<double> head(const Field& f, std::size_t n) { return {f.values().begin(), f.values().begin() + n}; }

std::vector<double> as_vector(const Field& f) { return {f.values().begin(), f.values().end()}; }

}  // namespace

TEST_CASE("cutoff_nonneg clips the sign cases") {
    CHECK(as_vector(cutoff_nonneg(line({-1.0, 0.5, 0.0}))) == std::vector<double>{0.0, 0.5, 0.0});
}

TEST_CASE("cutoff_nonneg leaves a nonnegative field bit-identical") {
    const Field f = line({0.0, 1e-300, 3.5, 2.0});
    const Field g = cutoff_nonneg(f);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(std::signbit(g[k]) == std::signbit(f[k]));
    CHECK(as_vector(g) == as_vector(f));
}

TEST_CASE("cutoff_nonneg maps -|x| to zero") {
    const Grid g = Grid1D{Axis(-1.0, 1.0, 10)};
    const Field f = Field::sample(g, [](double x, double) { return -std::abs(x); });
    const Field c = cutoff_nonneg(f);
    for (double v : c.values()) CHECK(v == 0.0);
}

TEST_CASE("negative zero comes out as a plain zero") {
    const Field c = cutoff_nonneg(line({-0.0, 1.0}));
    CHECK(c[0] == 0.0);
}

TEST_CASE("cutoff_delta floors at delta") {
    CHECK(head(cutoff_delta(line({0.05, 0.2}), CutoffParams(0.1)), 2) == std::vector<double>{0.1, 0.2});
    const Field one = Field(Grid1D{Axis(0.0, 1.0, 2)}, {-5.0, -5.0, -5.0});
    const Field fd = cutoff_delta(one, CutoffParams(0.2));
    const Field fp = cutoff_nonneg(one);
    CHECK(fd[0] == 0.2);
    CHECK(std::abs(fd[0] - fp[0]) <= 0.2);
}

TEST_CASE("delta = 0 reproduces the nonnegative part") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(50);
    for (auto& x : v) x = d(rng);
    const Field f(Grid1D{Axis(0.0, 1.0, 49)}, v);
    CHECK(as_vector(cutoff_delta(f, CutoffParams(0.0))) == as_vector(cutoff_nonneg(f)));
}

TEST_CASE("ties at the floor keep their value") {
    const Field c = cutoff_delta(line({0.1, 0.1}), CutoffParams(0.1));
    CHECK(c[0] == 0.1);
}

TEST_CASE("invalid cutoff parameters and inputs are rejected") {
    CHECK_THROWS_AS(CutoffParams(-1e-3), Error);
    CHECK_THROWS_AS(CutoffParams(std::numeric_limits<double>::quiet_NaN()), Error);
    CHECK_THROWS_AS(CutoffParams(std::numeric_limits<double>::infinity()), Error);

    std::vector<double> v{1.0, std::numeric_limits<double>::quiet_NaN()};
    try {
        apply_cutoff(v, CutoffParams(0.0));
        FAIL("NaN accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::non_finite);
        CHECK(std::string(e.what()).find('1') != std::string::npos);
    }
    std::vector<double> w{-std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(apply_cutoff(w, CutoffParams(0.0)), Error);
}

TEST_CASE("apply_cutoff on an empty span is a no-op") {
    std::vector<double> v;
    CHECK_NOTHROW(apply_cutoff(v, CutoffParams(0.5)));
}

TEST_CASE("lemma_gap single node arithmetic") {
    const std::vector<double> f{-2.0};
    const std::vector<double> u{1.0};
    const auto g = lemma_gap(f, u);
    CHECK(g.first == -2.0);
    CHECK(g.second == -1.0);
}

TEST_CASE("lemma_gap of coincident nonnegative fields") {
    const Field f = line({0.0, 0.3, 2.0});
    const auto g = lemma_gap(f, f);
    CHECK(g.first == 0.0);
    CHECK(g.second <= 0.0);
}

TEST_CASE("lemma_gap rejects negative u and mismatched sizes") {
    const std::vector<double> f{1.0, 2.0};
    const std::vector<double> bad{0.0, -1.0};
    const std::vector<double> short_u{0.0};
    CHECK_THROWS_AS(lemma_gap(f, bad), Error);
    CHECK_THROWS_AS(lemma_gap(f, short_u), Error);
    const Field a = line({1.0, 2.0, 3.0});
    const Field b(Grid1D{Axis(0.0, 2.0, 2)}, {1.0, 2.0, 3.0});
    CHECK_THROWS_AS(lemma_gap(a, b), Error);
}

TEST_CASE("lemma gaps stay nonpositive on random pairs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> fd(-3.0, 3.0);
    std::uniform_real_distribution<double> ud(0.0, 3.0);
    std::vector<double> f(10000), u(10000);
    for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = fd(rng);
        u[k] = ud(rng);
    }
    const auto g = lemma_gap(f, u);
    CHECK(g.first <= 0.0);
    CHECK(g.second <= 0.0);
}

TEST_CASE("all five inequalities hold on random triples") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> fd(-2.0, 2.0);
    std::uniform_real_distribution<double> ud(0.0, 2.0);
    std::uniform_real_distribution<double> dd(0.0, 1.0);
    for (int s = 0; s < 10000; ++s) {
        const double f = fd(rng), u = ud(rng), delta = dd(rng);
        for (bool ok : cutoff_inequalities(f, u, delta)) REQUIRE(ok);
    }
    std::vector<double> f{-1.0, 0.0, 0.5}, u{0.0, 0.0, 0.5};
    CHECK(cutoff_inequalities_hold(f, u, 0.25));
    CHECK_THROWS_AS(cutoff_inequalities(0.0, -1.0, 0.0), Error);
}

TEST_CASE("cutoff is idempotent, monotone and nonexpansive") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::uniform_real_distribution<double> bump(0.0, 0.5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(40), b(40);
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = d(rng);
            b[k] = a[k] + bump(rng);  // b >= a
        }
        const Grid g = Grid1D{Axis(0.0, 1.0, 39)};
        const Field fa(g, a), fb(g, b);
        const Field pa = cutoff_nonneg(fa), pb = cutoff_nonneg(fb);
        CHECK(as_vector(cutoff_nonneg(pa)) == as_vector(pa));
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(pa[k] <= pb[k]);
        CHECK(max_norm(pa - pb) <= max_norm(fa - fb));
        const CutoffParams p(0.3);
        CHECK(as_vector(cutoff_delta(cutoff_delta(fa, p), p)) == as_vector(cutoff_delta(fa, p)));
    }
}
