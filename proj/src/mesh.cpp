#include "nonneg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "nonneg/io.hpp"

namespace nonneg {

Axis::Axis(double lo_, double hi_, int cells_) : lo(lo_), hi(hi_), cells(cells_) {
    require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "axis requires hi > lo");
    require(cells >= 2, "axis requires at least 2 cells");
}

double Axis::weight(int j) const {
    return (j == 0 || j == cells) ? 0.5 * h() : h();
}

int dimension(const Grid& g) {
    return std::holds_alternative<Grid1D>(g) ? 1 : 2;
}

std::size_t node_count(const Grid& g) {
    return std::visit(
        [](const auto& gr) -> std::size_t {
            using T = std::decay_t<decltype(gr)>;
            if constexpr (std::is_same_v<T, Grid1D>) {
                return static_cast<std::size_t>(gr.x.nodes());
            } else {
                return static_cast<std::size_t>(gr.x.nodes()) * gr.y.nodes();
            }
        },
        g);
}

double domain_measure(const Grid& g) {
    if (const auto* g1 = std::get_if<Grid1D>(&g)) return g1->x.length();
    const auto& g2 = std::get<Grid2D>(g);
    return g2.x.length() * g2.y.length();
}

std::vector<double> trapezoid_weights(const Grid& g) {
    std::vector<double> w(node_count(g));
    if (const auto* g1 = std::get_if<Grid1D>(&g)) {
        for (int i = 0; i < g1->x.nodes(); ++i) w[i] = g1->x.weight(i);
        return w;
    }
    const auto& g2 = std::get<Grid2D>(g);
    for (int j = 0; j < g2.y.nodes(); ++j)
        for (int i = 0; i < g2.x.nodes(); ++i)
            w[g2.index(i, j)] = g2.x.weight(i) * g2.y.weight(j);
    return w;
}

Field::Field(Grid grid) : grid_(std::move(grid)), values_(node_count(grid_), 0.0) {}

Field::Field(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    require(values_.size() == node_count(grid_), "field length does not match grid node count");
}

Field Field::sample(const Grid& grid, const std::function<double(double, double)>& fn) {
    Field f(grid);
    for (std::size_t k = 0; k < f.size(); ++k) f.values_[k] = fn(f.x_of(k), f.y_of(k));
    return f;
}

double Field::x_of(std::size_t k) const {
    if (const auto* g1 = std::get_if<Grid1D>(&grid_)) return g1->x.node(static_cast<int>(k));
    const auto& g2 = std::get<Grid2D>(grid_);
    return g2.x.node(static_cast<int>(k % g2.x.nodes()));
}

double Field::y_of(std::size_t k) const {
    if (std::holds_alternative<Grid1D>(grid_)) return 0.0;
    const auto& g2 = std::get<Grid2D>(grid_);
    return g2.y.node(static_cast<int>(k / g2.x.nodes()));
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

namespace {

void require_same_grid(const Field& a, const Field& b) {
    require(a.grid() == b.grid(), "field arithmetic across different grids");
}

}  // namespace

Field operator-(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field r(a.grid());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
    return r;
}

Field operator+(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field r(a.grid());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] + b[k];
    return r;
}

Field operator*(double s, const Field& a) {
    Field r(a.grid());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = s * a[k];
    return r;
}

void check_finite(std::span<const double> v, const char* what) {
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v[k])) {
            fail(ErrorKind::non_finite,
                 std::string(what) + ": non-finite value at node " + std::to_string(k));
        }
    }
}

double l2_norm(const Field& e) {
    check_finite(e.values(), "l2_norm");
    const auto w = trapezoid_weights(e.grid());
    double s = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) s += w[k] * e[k] * e[k];
    return std::sqrt(s);
}

double max_norm(const Field& e) {
    check_finite(e.values(), "max_norm");
    double m = 0.0;
    for (double v : e.values()) m = std::max(m, std::abs(v));
    return m;
}

double max_undershoot(const Field& f) {
    check_finite(f.values(), "max_undershoot");
    return std::max(0.0, -f.min());
}

double mass(const Field& f) {
    check_finite(f.values(), "mass");
    const auto w = trapezoid_weights(f.grid());
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += w[k] * f[k];
    return s;
}

double mean(const Field& f) { return mass(f) / domain_measure(f.grid()); }

Field third_derivative(const Field& f) {
    const auto* g = std::get_if<Grid1D>(&f.grid());
    require(g != nullptr, "third_derivative needs a 1D field");
    const int n = g->x.cells;
    require(n >= 4, "third_derivative needs at least 4 cells");
    const double h3 = std::pow(g->x.h(), 3);
    Field d(f.grid());
    for (int j = 2; j <= n - 2; ++j) {
        d[j] = (f[j + 2] - 2.0 * f[j + 1] + 2.0 * f[j - 1] - f[j - 2]) / (2.0 * h3);
    }
    auto forward = [&](int j) {
        return (-2.5 * f[j] + 9.0 * f[j + 1] - 12.0 * f[j + 2] + 7.0 * f[j + 3] - 1.5 * f[j + 4]) / h3;
    };
    auto backward = [&](int j) {
        return (2.5 * f[j] - 9.0 * f[j - 1] + 12.0 * f[j - 2] - 7.0 * f[j - 3] + 1.5 * f[j - 4]) / h3;
    };
    d[0] = forward(0);
    d[1] = forward(1);
    d[n - 1] = backward(n - 1);
    d[n] = backward(n);
    return d;
}

double sample_linear(const Field& f, double x) {
    const auto* g = std::get_if<Grid1D>(&f.grid());
    require(g != nullptr, "sample_linear needs a 1D field");
    const double s = std::clamp((x - g->x.lo) / g->x.h(), 0.0, static_cast<double>(g->x.cells));
    const int j = std::min(static_cast<int>(s), g->x.cells - 1);
    const double t = s - j;
    return (1.0 - t) * f[j] + t * f[j + 1];
}

void write_csv(const Field& f, std::ostream& os) {
    const bool two_d = dimension(f.grid()) == 2;
    os << (two_d ? "x,y,value\n" : "x,value\n");
    for (std::size_t k = 0; k < f.size(); ++k) {
        os << format_real(f.x_of(k)) << ',';
        if (two_d) os << format_real(f.y_of(k)) << ',';
        os << format_real(f[k]) << '\n';
    }
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream os(path);
    if (!os) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
    return os;
}

}  // namespace nonneg
