#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nonneg/lubrication.hpp"
#include "oracles.hpp"

using namespace nonneg;
using namespace nonneg::lub;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;

Grid1D line(int cells) { return Grid1D{Axis(-1.0, 1.0, cells)}; }
Grid2D square(int cells) { return Grid2D{Axis(-1.0, 1.0, cells), Axis(-1.0, 1.0, cells)}; }

std::vector<double> ones(std::size_t n, double v = 1.0) { return std::vector<double>(n, v); }

// Field on [0, 1] from explicit nodal values.
Field nodes(std::vector<double> v) {
    const int cells = static_cast<int>(v.size()) - 1;
    return Field(Grid1D{Axis(0.0, 1.0, cells)}, std::move(v));
}

// Largest |sum_i w_i A_ij| over columns j.
double worst_column_sum(const SparseMatrix& a, const std::vector<double>& w) {
    std::vector<double> col(a.size(), 0.0);
    const auto off = a.row_offsets();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) col[a.cols()[k]] += w[i] * a.values()[k];
    double worst = 0.0;
    for (double c : col) worst = std::max(worst, std::abs(c));
    return worst;
}

}  // namespace

TEST_CASE("mobility values") {
    CHECK(mobility(4.0, MobilitySpec{}) == Approx(2.0).epsilon(1e-15));
    CHECK(mobility(0.01, MobilitySpec{0.5, 1e-14}) == Approx(1e-9 / (1e-15 + 1e-8)).epsilon(1e-13));
    CHECK(mobility(0.01, MobilitySpec{0.5, 1e-14}) == Approx(0.09999990).epsilon(1e-7));
    CHECK(mobility(0.0, MobilitySpec{}) == 0.0);
    CHECK(mobility(0.0, MobilitySpec{0.5, 1e-3}) == 0.0);
    CHECK(mobility(2.0, MobilitySpec{0.0, 0.0}) == 1.0);
    try {
        mobility(-1e-12, MobilitySpec{});
        FAIL("negative argument accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
    CHECK_THROWS_AS(mobility(NAN, MobilitySpec{}), Error);
    CHECK_THROWS_AS(MobilitySpec({-1.0, 0.0}).validate(), Error);
    CHECK_THROWS_AS(MobilitySpec({0.5, -1.0}).validate(), Error);

    // The regularized mobility approaches the plain one from below.
    for (double u : {1e-3, 0.05, 0.5, 2.0}) {
        const double plain = mobility(u, MobilitySpec{});
        const double reg = mobility(u, MobilitySpec{0.5, 1e-14});
        CHECK(reg <= plain);
        CHECK(plain - reg <= 1e-14 * plain * plain / (u * u * u * u) + 4e-16 * plain);
    }
}

TEST_CASE("standard initial datum") {
    CHECK(standard_profile(0.0) == Approx(0.05).epsilon(1e-15));
    CHECK(standard_profile(1.0) == Approx(2.05).epsilon(1e-15));
    CHECK(standard_profile(0.5) == Approx(0.55).epsilon(1e-14));
    const auto s2 = LubricationSpec::standard_2d(8);
    CHECK(s2.dimension() == 2);
    CHECK(s2.initial(0.0, 0.0) == Approx(0.0025));
}

TEST_CASE("constant mobility gives the biharmonic stencil in the interior") {
    const int cells = 20;
    const double h = 0.1;
    const auto a = thin_film_operator_1d(line(cells), ones(cells + 1));
    const double s = 1.0 / (h * h * h * h);
    const int j = 10;
    CHECK(a.at(j, j - 2) == Approx(-1.0 * s));
    CHECK(a.at(j, j - 1) == Approx(4.0 * s));
    CHECK(a.at(j, j) == Approx(-6.0 * s));
    CHECK(a.at(j, j + 1) == Approx(4.0 * s));
    CHECK(a.at(j, j + 2) == Approx(-1.0 * s));
    CHECK(a.at(j, j + 3) == 0.0);
    CHECK(a.bandwidth() <= 3);
}

TEST_CASE("cubics are annihilated away from the boundary") {
    const int cells = 40;
    const Field c = Field::sample(line(cells), [](double x, double) { return 2 * x * x * x - x * x + 0.5 * x + 3; });
    const auto r = matvec(thin_film_operator_1d(line(cells), ones(cells + 1)), c.values());
    for (int j = 2; j <= cells - 2; ++j) CHECK(std::abs(r[j]) <= 1e-6);
}

TEST_CASE("fourth derivative of cos(pi x)") {
    // cos(pi x) is even about both ends, so the reflected ghosts are exact
    // and the check holds on every node.
    const int cells = 2000;
    const Field c = Field::sample(line(cells), [](double x, double) { return std::cos(pi * x); });
    const auto r = matvec(thin_film_operator_1d(line(cells), ones(cells + 1)), c.values());
    const double p4 = std::pow(pi, 4);
    double worst = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) worst = std::max(worst, std::abs(r[k] + p4 * c[k]));
    CHECK(worst / p4 <= 1e-4);
}

TEST_CASE("2D operator: kernel and separable eigenfunction") {
    {
        const int cells = 16;
        const auto g = square(cells);
        const Field q = Field::sample(g, [](double x, double y) { return x * x + y * y + x * y; });
        const auto r = matvec(thin_film_operator_2d(g, ones(q.size())), q.values());
        for (int j = 3; j <= cells - 3; ++j)
            for (int i = 3; i <= cells - 3; ++i) CHECK(std::abs(r[g.index(i, j)]) <= 1e-8);
    }
    std::vector<double> err;
    std::vector<double> hs;
    for (int cells : {32, 64, 128}) {
        const auto g = square(cells);
        const Field c = Field::sample(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
        const auto r = matvec(thin_film_operator_2d(g, ones(c.size())), c.values());
        double worst = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) worst = std::max(worst, std::abs(r[k] + 4 * std::pow(pi, 4) * c[k]));
        err.push_back(worst);
        hs.push_back(2.0 / cells);
    }
    CHECK(oracle::loglog_slope(hs, err) == Approx(2.0).epsilon(0.1));
}

TEST_CASE("operator is linear in the mobility") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.1, 2.0);
    const int cells = 12;
    std::vector<double> m1(cells + 1), m2(cells + 1), mix(cells + 1);
    for (int k = 0; k <= cells; ++k) {
        m1[k] = d(rng);
        m2[k] = d(rng);
        mix[k] = 2.0 * m1[k] + 3.0 * m2[k];
    }
    const auto g = line(cells);
    const auto want = combine(2.0, thin_film_operator_1d(g, m1), 3.0, thin_film_operator_1d(g, m2));
    const auto got = thin_film_operator_1d(g, mix);
    CHECK(operator_norm_inf(combine(1.0, got, -1.0, want)) <= 1e-12 * operator_norm_inf(want));
    const auto scaled = thin_film_operator_1d(g, ones(cells + 1, 0.7));
    const auto unit = thin_film_operator_1d(g, ones(cells + 1));
    CHECK(operator_norm_inf(combine(1.0, scaled, -0.7, unit)) <= 1e-12 * operator_norm_inf(unit));
}

TEST_CASE("discrete mass is conserved by construction") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(0.0, 2.0);
    for (int cells : {8, 33, 200}) {
        std::vector<double> m(cells + 1);
        for (auto& v : m) v = d(rng);
        const Grid g = line(cells);
        const auto a = thin_film_operator_1d(std::get<Grid1D>(g), m);
        const double h = 2.0 / cells;
        CHECK(worst_column_sum(a, trapezoid_weights(g)) <= 1e-12 / (h * h * h * h));
    }
    const int cells = 10;
    const Grid g = square(cells);
    std::vector<double> m(node_count(g));
    for (auto& v : m) v = d(rng);
    const auto a = thin_film_operator_2d(std::get<Grid2D>(g), m);
    const double h = 0.2;
    CHECK(worst_column_sum(a, trapezoid_weights(g)) <= 1e-12 / (h * h * h * h));
}

TEST_CASE("lagged assembly checks its input") {
    auto spec = LubricationSpec::standard_1d(16);
    Field u = spec.initial_field();
    const auto a = assemble_lubrication(u, spec);
    CHECK(a.size() == 17);
    u[3] = -1e-9;
    try {
        assemble_lubrication(u, spec);
        FAIL("negative lagged state accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
    CHECK_THROWS_AS(thin_film_operator_1d(line(3), ones(4)), Error);
    CHECK_THROWS_AS(thin_film_operator_1d(line(8), ones(5)), Error);
    const auto other = LubricationSpec::standard_1d(32);
    CHECK_THROWS_AS(assemble_lubrication(other.initial_field(), spec), Error);
}

TEST_CASE("regularized and plain operators agree on positive fields") {
    // The 2D standard datum dips to 0.0025, where u^4 is comparable to
    // epsilon; use a film bounded away from zero instead.
    auto thick = LubricationSpec::standard_2d(24);
    thick.initial = [](double x, double y) { return 1.0 + 0.5 * std::cos(pi * x) * std::cos(pi * y); };
    for (auto spec : {LubricationSpec::standard_1d(200), thick}) {
        const Field u = spec.initial_field();
        const auto plain = assemble_lubrication(u, spec);
        spec.mobility.epsilon = 1e-14;
        const auto reg = assemble_lubrication(u, spec);
        CHECK(operator_norm_inf(combine(1.0, reg, -1.0, plain)) <= 1e-10 * operator_norm_inf(plain));
    }
}

TEST_CASE("touching measure") {
    const double h = 0.25;
    CHECK(touching_measure(nodes({1.0, 0.0, 0.0, 0.0, 1.0}), 0.0) == Approx(2 * h));
    CHECK(touching_measure(nodes({1.0, 0.0, 1.0, 1.0, 1.0}), 0.0) == Approx(h / 2));
    CHECK(touching_measure(nodes({1.0, 2.0, 1.0, 1.0, 1.0}), 0.0) == 0.0);
    // Longest run wins; the threshold is inclusive.
    CHECK(touching_measure(nodes({0.0, 1.0, 0.1, 0.1, 0.05}), 0.1) == Approx(2 * h));
    CHECK(touching_extent(nodes({0.0, 1.0, 0.0, 0.0, 1.0}), 0.0) == Approx(3 * h));
    CHECK(touching_extent(nodes({1.0, 1.0, 0.0, 1.0, 1.0}), 0.0) == Approx(h / 2));
    CHECK(trapped_film_height(nodes({0.0, 0.3, 0.0, 0.0, 1.0}), 0.0) == 0.3);
    CHECK(trapped_film_height(nodes({1.0, 0.0, 0.0, 0.0, 1.0}), 0.0) == 0.0);

    const Grid2D g{Axis(0.0, 1.0, 2), Axis(0.0, 1.0, 2)};
    Field f(g, std::vector<double>(9, 1.0));
    f[g.index(1, 1)] = 0.0;
    CHECK(touching_measure(f, 0.0) == Approx(0.25));
    f[g.index(0, 0)] = 0.0;
    CHECK(touching_measure(f, 0.0) == Approx(0.25 + 0.0625));
    CHECK(touching_extent(f, 0.0) == touching_measure(f, 0.0));
}

TEST_CASE("singularity tracker") {
    SingularityTracker positive;
    for (int k = 0; k < 5; ++k) positive.observe(0.1 * k, nodes({1.0, 0.5, 1.0}));
    CHECK_FALSE(positive.record().onset_touching);
    CHECK_FALSE(positive.record().liftoff);
    CHECK(positive.record().max_length == 0.0);

    SingularityTracker t;
    t.observe(0.0, nodes({1.0, 0.5, 0.5, 1.0}));
    t.observe_pre_minimum(0.05, -1e-6);
    t.observe(0.1, nodes({1.0, 0.0, 0.5, 1.0}));
    t.observe(0.2, nodes({1.0, 0.0, 0.0, 1.0}));
    t.observe(0.3, nodes({1.0, 0.5, 0.5, 1.0}));
    t.observe(0.4, nodes({1.0, 0.0, 0.5, 1.0}));
    const auto& r = t.record();
    REQUIRE(r.onset_negative);
    CHECK(*r.onset_negative == 0.05);
    CHECK(*r.onset_touching == 0.1);
    CHECK(*r.liftoff == 0.3);
    CHECK(r.max_length == Approx(1.0 / 3.0));
    CHECK(r.lengths.size() == 5);
    CHECK_THROWS_AS(t.observe(0.4, nodes({1.0, 1.0, 1.0})), Error);

    std::ostringstream os;
    r.write_csv(os);
    CHECK(os.str().rfind("onset=0.05", 0) == 0);
    CHECK(os.str().find("t,touching_length\n") != std::string::npos);

    std::vector<std::pair<double, Field>> snaps;
    snaps.emplace_back(0.0, nodes({1.0, 0.0, 1.0}));
    snaps.emplace_back(1.0, nodes({1.0, 1.0, 1.0}));
    const auto rec = track_singularity(snaps);
    CHECK(*rec.onset_touching == 0.0);
    CHECK(*rec.liftoff == 1.0);
}

TEST_CASE("run refuses a plain mobility without cutoff") {
    StepperConfig cfg;
    cfg.dt = 1e-6;
    cfg.t_end = 1e-5;
    cfg.cutoff.reset();
    CHECK_THROWS_AS(run_lubrication(LubricationSpec::standard_1d(32), cfg), Error);
}

TEST_CASE("1D run: symmetry and mass before touchdown") {
    const auto spec = LubricationSpec::standard_1d(128);
    StepperConfig cfg;
    cfg.dt = 1e-6;
    cfg.t_end = 5e-4;
    const auto run = run_lubrication(spec, cfg);
    const Field& u = run.final_pre;
    const std::size_t n = u.size();
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(u[k] - u[n - 1 - k]) <= 1e-9);
    const double m0 = mass(spec.initial_field());
    double prev = m0;
    for (const auto& s : run.trace.steps) {
        CHECK(std::abs(s.mass_pre - prev) <= 1e-9 * m0);
        CHECK(s.min_post >= 0.0);
        prev = s.mass_post;
    }
    CHECK_FALSE(run.singularity.onset_negative);
    CHECK(run.final_state.min() > 0.0);
}

TEST_CASE("1D run relaxes to the mean") {
    const auto spec = LubricationSpec::standard_1d(64);
    StepperConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 0.5;
    const auto run = run_lubrication(spec, cfg);
    const Field& u = run.final_state;
    const double avg = mean(u);
    // The cutoff only adds mass, and only a little of it.
    CHECK(avg >= 0.8 - 1e-12);
    CHECK(avg <= 0.8 + 1e-3);
    for (double v : u.values()) CHECK(std::abs(v - avg) <= 1e-6);
}

TEST_CASE("2D run conserves mass before touchdown") {
    const auto spec = LubricationSpec::standard_2d(16);
    StepperConfig cfg;
    cfg.dt = 1e-6;
    cfg.t_end = 2e-5;
    const auto run = run_lubrication(spec, cfg);
    const double m0 = mass(spec.initial_field());
    for (const auto& s : run.trace.steps) CHECK(std::abs(s.mass_post - m0) <= 1e-9 * m0 * static_cast<double>(s.step));
    // Symmetric under x -> -x and x <-> y.
    const auto& g = std::get<Grid2D>(spec.grid);
    const Field& u = run.final_pre;
    for (int j = 0; j <= 16; ++j)
        for (int i = 0; i <= 16; ++i) {
            CHECK(std::abs(u[g.index(i, j)] - u[g.index(16 - i, j)]) <= 1e-10);
            CHECK(std::abs(u[g.index(i, j)] - u[g.index(j, i)]) <= 1e-10);
        }
}
