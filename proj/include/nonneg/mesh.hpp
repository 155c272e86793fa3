#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "nonneg/error.hpp"

namespace nonneg {

/// Uniform partition of [lo, hi] into `cells` cells, nodes x_j = lo + j*h.
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    int cells = 2;

    Axis() = default;
    Axis(double lo_, double hi_, int cells_);

    double h() const { return (hi - lo) / cells; }
    int nodes() const { return cells + 1; }
    double node(int j) const { return lo + j * h(); }
    /// Trapezoid weight of node j: h/2 at the ends, h inside.
    double weight(int j) const;
    double length() const { return hi - lo; }

    bool operator==(const Axis&) const = default;
};

struct Grid1D {
    Axis x;
    bool operator==(const Grid1D&) const = default;
};

/// Tensor-product grid. Nodes are stored row-major with rows along y:
/// index(i, j) = j * x.nodes() + i, i the x-index and j the y-index.
struct Grid2D {
    Axis x;
    Axis y;

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * x.nodes() + i;
    }
    bool operator==(const Grid2D&) const = default;
};

using Grid = std::variant<Grid1D, Grid2D>;

int dimension(const Grid& g);
std::size_t node_count(const Grid& g);
/// Measure of the domain.
double domain_measure(const Grid& g);
/// Tensor-product trapezoid weights, one per node.
std::vector<double> trapezoid_weights(const Grid& g);

/// Nodal values on a grid. The grid travels with the values and arithmetic
/// between fields on different grids is rejected.
class Field {
public:
    explicit Field(Grid grid);
    Field(Grid grid, std::vector<double> values);

    /// Samples fn(x, y) at every node (y = 0 for 1D grids).
    static Field sample(const Grid& grid, const std::function<double(double, double)>& fn);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }

    /// Node coordinates (y = 0 in 1D).
    double x_of(std::size_t k) const;
    double y_of(std::size_t k) const;

    double min() const;
    double max() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

Field operator-(const Field& a, const Field& b);
Field operator+(const Field& a, const Field& b);
Field operator*(double s, const Field& a);

/// Throws non_finite naming the first offending node.
void check_finite(std::span<const double> v, const char* what);

double l2_norm(const Field& e);
double max_norm(const Field& e);
double max_undershoot(const Field& f);
double mass(const Field& f);
double mean(const Field& f);

/// Discrete third derivative of a 1D field: centered 4-point stencil inside,
/// second-order one-sided 5-point stencils on the two nodes nearest each end.
Field third_derivative(const Field& f);

/// Piecewise-linear interpolation of a 1D field at x (clamped to the domain).
double sample_linear(const Field& f, double x);

/// Writes `x[,y],value` rows with 17 significant digits.
void write_csv(const Field& f, std::ostream& os);

}  // namespace nonneg
