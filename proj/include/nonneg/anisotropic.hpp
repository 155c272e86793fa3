#pragma once

#include <array>

#include "nonneg/mesh.hpp"
#include "nonneg/stepper.hpp"

namespace nonneg::aniso {

/// Symmetric 2x2 diffusion tensor.
struct Tensor2 {
    double xx = 500.5;
    double xy = 480.0;
    double yy = 500.5;
};

/// u_t = div(D grad u) - b . grad u + f on [0,1]^2 with Dirichlet data taken
/// from the manufactured solution.
struct AnisotropicSpec {
    Tensor2 diffusion;
    std::array<double, 2> convection{0.0, 0.0};
    Grid2D grid;

    /// Default tensor, zero convection, J x J cells on the unit square.
    static AnisotropicSpec unit_square(int cells);
    /// Same with b = (1000, 1000).
    static AnisotropicSpec unit_square_convective(int cells);

    /// D must be symmetric positive definite (trace > 0, det > 0).
    void validate() const;
};

/// 0.5 e^{-t} (tanh(-15 (x - y)) + 1).
double exact_solution(double t, double x, double y);

/// u_t - div(D grad u) + b . grad u from closed-form derivatives.
double forcing(double t, double x, double y, const AnisotropicSpec& spec);

/// div(D grad u) - b . grad u of the manufactured solution (analytic).
double spatial_operator_exact(double t, double x, double y, const AnisotropicSpec& spec);

/// Nine-point central-difference operator. Interior rows discretize
/// div(D grad u) - b . grad u; boundary rows are empty and flagged as
/// constrained. The source writes f on interior nodes and the exact boundary
/// value on boundary nodes.
SpatialSystem assemble(const AnisotropicSpec& spec);

/// Problem bundle for the stepper (frozen operator, exact solution attached).
ProblemSpec make_problem(const AnisotropicSpec& spec);

}  // namespace nonneg::aniso
