#include "nonneg/lubrication.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "nonneg/io.hpp"

namespace nonneg::lub {

void MobilitySpec::validate() const {
    require(std::isfinite(exponent) && exponent >= 0.0, "mobility exponent must be >= 0");
    require(std::isfinite(epsilon) && epsilon >= 0.0, "regularization epsilon must be >= 0");
}

double mobility(double u, const MobilitySpec& spec) {
    if (!std::isfinite(u)) fail(ErrorKind::non_finite, "mobility: non-finite argument");
    if (u < 0.0) fail(ErrorKind::domain, "mobility: negative argument " + format_real(u));
    if (u == 0.0) return 0.0;
    const double f = std::pow(u, spec.exponent);
    if (spec.epsilon == 0.0) return f;
    const double u4 = (u * u) * (u * u);
    return u4 * f / (spec.epsilon * f + u4);
}

double standard_profile(double x) {
    constexpr double pi = std::numbers::pi;
    return 0.8 - std::cos(pi * x) + 0.25 * std::cos(2.0 * pi * x);
}

Field LubricationSpec::initial_field() const {
    require(static_cast<bool>(initial), "lubrication spec has no initial datum");
    return Field::sample(grid, initial);
}

LubricationSpec LubricationSpec::standard_1d(int cells) {
    LubricationSpec s;
    s.grid = Grid1D{Axis(-1.0, 1.0, cells)};
    s.initial = [](double x, double) { return standard_profile(x); };
    return s;
}

LubricationSpec LubricationSpec::standard_2d(int cells) {
    LubricationSpec s;
    s.grid = Grid2D{Axis(-1.0, 1.0, cells), Axis(-1.0, 1.0, cells)};
    s.initial = [](double x, double y) { return standard_profile(x) * standard_profile(y); };
    return s;
}

namespace {

// Sparse row as (column, coefficient) pairs, duplicates allowed.
using Row = std::vector<std::pair<std::size_t, double>>;

void axpy(Row& acc, double s, const Row& r) {
    for (const auto& [c, v] : r) acc.emplace_back(c, s * v);
}

// Even reflection across the end nodes: index -k -> k, cells + k -> cells - k.
int reflect(int j, int cells) {
    if (j < 0) return -j;
    if (j > cells) return 2 * cells - j;
    return j;
}

std::vector<double> nodal_mobility(const Field& lagged, const MobilitySpec& spec) {
    spec.validate();
    std::vector<double> m(lagged.size());
    for (std::size_t k = 0; k < lagged.size(); ++k) {
        const double u = lagged[k];
        if (u < 0.0) {
            fail(ErrorKind::domain, "lagged state negative at node " + std::to_string(k) + " (" +
                                        format_real(u) + "); cutoff must precede assembly");
        }
        m[k] = mobility(u, spec);
    }
    return m;
}

}  // namespace

SparseMatrix thin_film_operator_1d(const Grid1D& grid, std::span<const double> m) {
    const int N = grid.x.cells;
    require(N >= 4, "thin-film operator needs at least 4 cells");
    require(m.size() == static_cast<std::size_t>(N + 1), "mobility length does not match grid");
    const double h = grid.x.h();
    const double h3 = h * h * h;

    // Face j+1/2 flux: f_{j+1/2} (u_{j+2} - 3u_{j+1} + 3u_j - u_{j-1}) / h^3.
    std::vector<Row> flux(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        const double f = 0.5 * (m[j] + m[j + 1]);
        Row& r = flux[j];
        r.emplace_back(reflect(j + 2, N), f / h3);
        r.emplace_back(j + 1, -3.0 * f / h3);
        r.emplace_back(j, 3.0 * f / h3);
        r.emplace_back(reflect(j - 1, N), -f / h3);
    }

    TripletBuilder t(static_cast<std::size_t>(N + 1));
    t.reserve(static_cast<std::size_t>(N + 1) * 8);
    for (int j = 0; j <= N; ++j) {
        Row row;
        if (j == 0) {
            // Reflected outer face carries -F_{1/2}.
            axpy(row, -2.0 / h, flux[0]);
        } else if (j == N) {
            axpy(row, 2.0 / h, flux[N - 1]);
        } else {
            axpy(row, -1.0 / h, flux[j]);
            axpy(row, 1.0 / h, flux[j - 1]);
        }
        for (const auto& [c, v] : row) t.add(j, c, v);
    }
    return t.build();
}

SparseMatrix thin_film_operator_2d(const Grid2D& g, std::span<const double> m) {
    const int Nx = g.x.cells;
    const int Ny = g.y.cells;
    require(Nx >= 4 && Ny >= 4, "thin-film operator needs at least 4 cells per axis");
    const std::size_t n = node_count(Grid(g));
    require(m.size() == n, "mobility length does not match grid");
    const double hx = g.x.h();
    const double hy = g.y.h();

    // Five-point Laplacian with reflected ghost nodes.
    std::vector<Row> lap(n);
    for (int j = 0; j <= Ny; ++j) {
        for (int i = 0; i <= Nx; ++i) {
            Row& r = lap[g.index(i, j)];
            r.emplace_back(g.index(reflect(i - 1, Nx), j), 1.0 / (hx * hx));
            r.emplace_back(g.index(reflect(i + 1, Nx), j), 1.0 / (hx * hx));
            r.emplace_back(g.index(i, reflect(j - 1, Ny)), 1.0 / (hy * hy));
            r.emplace_back(g.index(i, reflect(j + 1, Ny)), 1.0 / (hy * hy));
            r.emplace_back(g.index(i, j), -2.0 / (hx * hx) - 2.0 / (hy * hy));
        }
    }

    // Flux across the face between nodes a and b (b the higher index along the axis).
    auto face_flux = [&](std::size_t a, std::size_t b, double h) {
        const double f = 0.5 * (m[a] + m[b]);
        Row r;
        axpy(r, f / h, lap[b]);
        axpy(r, -f / h, lap[a]);
        return r;
    };

    TripletBuilder t(n);
    t.reserve(n * 26);
    for (int j = 0; j <= Ny; ++j) {
        for (int i = 0; i <= Nx; ++i) {
            const std::size_t k = g.index(i, j);
            Row row;
            // -(F_{i+1/2} - F_{i-1/2}) / hx, reflected faces carry the negated inner flux.
            if (i == 0) {
                axpy(row, -2.0 / hx, face_flux(k, g.index(1, j), hx));
            } else if (i == Nx) {
                axpy(row, 2.0 / hx, face_flux(g.index(Nx - 1, j), k, hx));
            } else {
                axpy(row, -1.0 / hx, face_flux(k, g.index(i + 1, j), hx));
                axpy(row, 1.0 / hx, face_flux(g.index(i - 1, j), k, hx));
            }
            if (j == 0) {
                axpy(row, -2.0 / hy, face_flux(k, g.index(i, 1), hy));
            } else if (j == Ny) {
                axpy(row, 2.0 / hy, face_flux(g.index(i, Ny - 1), k, hy));
            } else {
                axpy(row, -1.0 / hy, face_flux(k, g.index(i, j + 1), hy));
                axpy(row, 1.0 / hy, face_flux(g.index(i, j - 1), k, hy));
            }
            for (const auto& [c, v] : row) t.add(k, c, v);
        }
    }
    return t.build();
}

SparseMatrix assemble_lubrication_1d(const Field& lagged, const LubricationSpec& spec) {
    const auto* g = std::get_if<Grid1D>(&lagged.grid());
    require(g != nullptr && lagged.grid() == spec.grid, "1D lubrication assembly needs a field on the problem grid");
    return thin_film_operator_1d(*g, nodal_mobility(lagged, spec.mobility));
}

SparseMatrix assemble_lubrication_2d(const Field& lagged, const LubricationSpec& spec) {
    const auto* g = std::get_if<Grid2D>(&lagged.grid());
    require(g != nullptr && lagged.grid() == spec.grid, "2D lubrication assembly needs a field on the problem grid");
    return thin_film_operator_2d(*g, nodal_mobility(lagged, spec.mobility));
}

SparseMatrix assemble_lubrication(const Field& lagged, const LubricationSpec& spec) {
    return spec.dimension() == 1 ? assemble_lubrication_1d(lagged, spec) : assemble_lubrication_2d(lagged, spec);
}

double touching_measure(const Field& f, double threshold) {
    if (const auto* g = std::get_if<Grid1D>(&f.grid())) {
        std::size_t best = 0;
        std::size_t run = 0;
        for (double v : f.values()) {
            run = (v <= threshold) ? run + 1 : 0;
            best = std::max(best, run);
        }
        if (best == 0) return 0.0;
        const double h = g->x.h();
        return best == 1 ? 0.5 * h : static_cast<double>(best - 1) * h;
    }
    const auto w = trapezoid_weights(f.grid());
    double area = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (f[k] <= threshold) area += w[k];
    return area;
}

namespace {

// Indices of the first and last touching node, if any.
std::optional<std::pair<std::size_t, std::size_t>> touching_span(const Field& f, double threshold) {
    const auto v = f.values();
    const auto first = std::find_if(v.begin(), v.end(), [&](double x) { return x <= threshold; });
    if (first == v.end()) return std::nullopt;
    const auto last = std::find_if(v.rbegin(), v.rend(), [&](double x) { return x <= threshold; });
    return std::pair<std::size_t, std::size_t>(static_cast<std::size_t>(first - v.begin()),
                                               static_cast<std::size_t>(v.rend() - last - 1));
}

}  // namespace

double touching_extent(const Field& f, double threshold) {
    const auto* g = std::get_if<Grid1D>(&f.grid());
    if (!g) return touching_measure(f, threshold);
    const auto span = touching_span(f, threshold);
    if (!span) return 0.0;
    if (span->first == span->second) return 0.5 * g->x.h();
    return static_cast<double>(span->second - span->first) * g->x.h();
}

double trapped_film_height(const Field& f, double threshold) {
    require(std::holds_alternative<Grid1D>(f.grid()), "trapped_film_height is defined for 1D fields");
    const auto span = touching_span(f, threshold);
    if (!span) return 0.0;
    double top = 0.0;
    for (std::size_t k = span->first + 1; k < span->second; ++k)
        if (f[k] > threshold) top = std::max(top, f[k]);
    return top;
}

void SingularityRecord::write_csv(std::ostream& os) const {
    auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string("none"); };
    os << "onset=" << opt(onset_negative ? onset_negative : onset_touching) << '\n';
    os << "onset_touching=" << opt(onset_touching) << '\n';
    os << "liftoff=" << opt(liftoff) << '\n';
    os << "max_length=" << format_real(max_length) << '\n';
    os << "max_extent=" << format_real(max_extent) << '\n';
    os << "max_trapped_film=" << format_real(max_trapped_film) << '\n';
    os << "t,touching_length\n";
    for (const auto& [t, len] : lengths) os << format_real(t) << ',' << format_real(len) << '\n';
}

SingularityTracker::SingularityTracker(double threshold)
    : threshold_(threshold), last_t_(-std::numeric_limits<double>::infinity()) {
    require(threshold >= 0.0, "touching threshold must be >= 0");
}

void SingularityTracker::observe(double t, const Field& post) {
    require(t > last_t_, "snapshot times must be strictly increasing");
    last_t_ = t;
    const double len = touching_measure(post, threshold_);
    const bool touching = std::any_of(post.values().begin(), post.values().end(),
                                      [&](double v) { return v <= threshold_; });
    record_.lengths.emplace_back(t, len);
    record_.max_length = std::max(record_.max_length, len);
    record_.max_extent = std::max(record_.max_extent, touching_extent(post, threshold_));
    if (std::holds_alternative<Grid1D>(post.grid()))
        record_.max_trapped_film = std::max(record_.max_trapped_film, trapped_film_height(post, threshold_));
    if (touching && !record_.onset_touching) record_.onset_touching = t;
    if (!touching && record_.onset_touching && !record_.liftoff) record_.liftoff = t;
}

void SingularityTracker::observe_pre_minimum(double t, double min_pre) {
    if (min_pre <= 0.0 && !record_.onset_negative) record_.onset_negative = t;
}

SingularityRecord track_singularity(std::span<const std::pair<double, Field>> snapshots, double threshold) {
    SingularityTracker tracker(threshold);
    for (const auto& [t, f] : snapshots) tracker.observe(t, f);
    return tracker.record();
}

LubricationRun run_lubrication(const LubricationSpec& spec, const StepperConfig& cfg,
                               const LubricationRunOptions& opts) {
    spec.mobility.validate();
    require(cfg.cutoff.has_value() || spec.mobility.epsilon > 0.0,
            "unregularized lubrication runs require cutoff: the mobility is undefined for negative values");
    require(opts.snapshot_every >= 1, "snapshot_every must be >= 1");

    ProblemSpec problem{
        .name = spec.dimension() == 1 ? "lubrication-1d" : "lubrication-2d",
        .initial = spec.initial_field(),
        .assemble =
            [spec](const Field& corrected, double) {
                SpatialSystem sys;
                sys.op = assemble_lubrication(corrected, spec);
                return sys;
            },
        .frozen_operator = false,
        .exact = {},
    };

    const double threshold = opts.threshold.value_or(cfg.cutoff ? cfg.cutoff->delta() : 0.0);
    SingularityTracker tracker(threshold);
    RunOptions ro;
    ro.snapshot_times = opts.snapshot_times;
    ro.on_step = [&](const StepRecord& rec, const Field& pre, const Field& post) {
        tracker.observe_pre_minimum(rec.t, rec.min_pre);
        if (rec.step % opts.snapshot_every == 0) tracker.observe(rec.t, post);
        // Nonnegativity tripwire: cutoff must leave nothing below the floor.
        if (cfg.cutoff && post.min() < cfg.cutoff->delta()) {
            fail(ErrorKind::domain, "post-cutoff state below floor at t=" + format_real(rec.t));
        }
        if (opts.on_step) opts.on_step(rec, pre, post);
    };
    auto res = run(problem, cfg, ro);
    return LubricationRun{std::move(res.final_state), std::move(res.final_pre), std::move(res.trace),
                          tracker.record()};
}

}  // namespace nonneg::lub
