#include "nonneg/anisotropic.hpp"

#include <cmath>
#include <memory>

namespace nonneg::aniso {

AnisotropicSpec AnisotropicSpec::unit_square(int cells) {
    AnisotropicSpec s;
    s.grid = Grid2D{Axis(0.0, 1.0, cells), Axis(0.0, 1.0, cells)};
    return s;
}

AnisotropicSpec AnisotropicSpec::unit_square_convective(int cells) {
    auto s = unit_square(cells);
    s.convection = {1000.0, 1000.0};
    return s;
}

void AnisotropicSpec::validate() const {
    const auto& d = diffusion;
    require(std::isfinite(d.xx) && std::isfinite(d.xy) && std::isfinite(d.yy),
            "diffusion tensor must be finite");
    require(d.xx + d.yy > 0.0 && d.xx * d.yy - d.xy * d.xy > 0.0,
            "diffusion tensor must be positive definite");
    require(std::isfinite(convection[0]) && std::isfinite(convection[1]), "convection must be finite");
}

double exact_solution(double t, double x, double y) {
    return 0.5 * std::exp(-t) * (std::tanh(-15.0 * (x - y)) + 1.0);
}

namespace {

// Derivatives of the manufactured solution. With s = -15 (x - y):
//   u_x = -u_y = -7.5 e^{-t} sech^2 s
//   u_xx = u_yy = -u_xy = -225 e^{-t} sech^2 s tanh s
struct Derivatives {
    double u, ux, uy, uxx, uxy, uyy;
};

Derivatives derivatives(double t, double x, double y) {
    const double s = -15.0 * (x - y);
    const double e = std::exp(-t);
    const double th = std::tanh(s);
    const double sech2 = 1.0 - th * th;
    Derivatives d;
    d.u = 0.5 * e * (th + 1.0);
    d.ux = -7.5 * e * sech2;
    d.uy = -d.ux;
    d.uxx = -225.0 * e * sech2 * th;
    d.uyy = d.uxx;
    d.uxy = -d.uxx;
    return d;
}

}  // namespace

double spatial_operator_exact(double t, double x, double y, const AnisotropicSpec& spec) {
    const auto d = derivatives(t, x, y);
    const auto& D = spec.diffusion;
    return D.xx * d.uxx + 2.0 * D.xy * d.uxy + D.yy * d.uyy - spec.convection[0] * d.ux -
           spec.convection[1] * d.uy;
}

double forcing(double t, double x, double y, const AnisotropicSpec& spec) {
    // u_t = -u for this solution.
    return -exact_solution(t, x, y) - spatial_operator_exact(t, x, y, spec);
}

SpatialSystem assemble(const AnisotropicSpec& spec) {
    spec.validate();
    const Grid2D g = spec.grid;
    const int nx = g.x.nodes();
    const int ny = g.y.nodes();
    const double hx = g.x.h();
    const double hy = g.y.h();
    const auto& D = spec.diffusion;
    const double bx = spec.convection[0];
    const double by = spec.convection[1];

    const std::size_t n = node_count(Grid(g));
    TripletBuilder t(n);
    t.reserve(9 * n);
    std::vector<std::uint8_t> constrained(n, 0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t row = g.index(i, j);
            if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) {
                constrained[row] = 1;
                continue;
            }
            const double cx = D.xx / (hx * hx);
            const double cy = D.yy / (hy * hy);
            const double cxy = 2.0 * D.xy / (4.0 * hx * hy);
            t.add(row, row, -2.0 * cx - 2.0 * cy);
            t.add(row, g.index(i - 1, j), cx + bx / (2.0 * hx));
            t.add(row, g.index(i + 1, j), cx - bx / (2.0 * hx));
            t.add(row, g.index(i, j - 1), cy + by / (2.0 * hy));
            t.add(row, g.index(i, j + 1), cy - by / (2.0 * hy));
            t.add(row, g.index(i + 1, j + 1), cxy);
            t.add(row, g.index(i - 1, j - 1), cxy);
            t.add(row, g.index(i + 1, j - 1), -cxy);
            t.add(row, g.index(i - 1, j + 1), -cxy);
        }
    }

    SpatialSystem sys;
    sys.op = t.build();
    sys.constrained = constrained;
    sys.source = [spec, g, constrained](double time, std::span<double> out) {
        for (int j = 0; j < g.y.nodes(); ++j) {
            for (int i = 0; i < g.x.nodes(); ++i) {
                const std::size_t k = g.index(i, j);
                const double x = g.x.node(i);
                const double y = g.y.node(j);
                out[k] = constrained[k] ? exact_solution(time, x, y) : forcing(time, x, y, spec);
            }
        }
    };
    return sys;
}

ProblemSpec make_problem(const AnisotropicSpec& spec) {
    ProblemSpec p{
        .name = "anisotropic-diffusion",
        .initial = Field::sample(spec.grid, [](double x, double y) { return exact_solution(0.0, x, y); }),
        .assemble = {},
        .frozen_operator = true,
        .exact = exact_solution,
    };
    auto sys = std::make_shared<const SpatialSystem>(assemble(spec));
    p.assemble = [sys](const Field&, double) { return *sys; };
    return p;
}

}  // namespace nonneg::aniso
