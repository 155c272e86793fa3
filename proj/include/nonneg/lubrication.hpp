#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nonneg/mesh.hpp"
#include "nonneg/sparse.hpp"
#include "nonneg/stepper.hpp"

namespace nonneg::lub {

/// f(u) = u^exponent, optionally regularized to u^4 f / (epsilon f + u^4).
struct MobilitySpec {
    double exponent = 0.5;
    double epsilon = 0.0;

    void validate() const;
};

/// Mobility value. Negative or non-finite u is a domain error; f(0) = 0.
double mobility(double u, const MobilitySpec& spec);

enum class BoundaryMode {
    /// u_x = u_xxx = 0 (2D: du/dn = d(Lap u)/dn = 0) by even ghost reflection.
    no_flux,
};

/// u_t + div(f(u) grad Lap u) = 0 on [-1,1] or [-1,1]^2.
struct LubricationSpec {
    Grid grid = Grid1D{Axis(-1.0, 1.0, 128)};
    MobilitySpec mobility;
    /// Initial datum u0(x, y); y is ignored in 1D.
    std::function<double(double, double)> initial;
    BoundaryMode boundary = BoundaryMode::no_flux;

    int dimension() const { return nonneg::dimension(grid); }
    Field initial_field() const;

    /// 0.8 - cos(pi x) + 0.25 cos(2 pi x) on `cells` uniform cells of [-1,1].
    static LubricationSpec standard_1d(int cells);
    /// Tensor product of the 1D datum on [-1,1]^2 with `cells` x `cells` cells.
    static LubricationSpec standard_2d(int cells);
};

/// 0.8 - cos(pi x) + 0.25 cos(2 pi x).
double standard_profile(double x);

/// Conservative flux-form matrix of u -> -(m u_xxx)_x for given nodal
/// mobilities m (face value = arithmetic mean of the two nodes).
SparseMatrix thin_film_operator_1d(const Grid1D& grid, std::span<const double> nodal_mobility);
/// Conservative flux-form matrix of u -> -div(m grad Lap u), 13-point interior.
SparseMatrix thin_film_operator_2d(const Grid2D& grid, std::span<const double> nodal_mobility);

/// Lagged-diffusivity operators: mobility evaluated on the corrected state.
SparseMatrix assemble_lubrication_1d(const Field& lagged, const LubricationSpec& spec);
SparseMatrix assemble_lubrication_2d(const Field& lagged, const LubricationSpec& spec);
SparseMatrix assemble_lubrication(const Field& lagged, const LubricationSpec& spec);

/// Measure of the touching set {u <= threshold}. 1D: longest contiguous run
/// of k touching nodes counts (k - 1) h for k >= 2 and h / 2 for k = 1.
/// 2D: total trapezoid area of touching nodes.
double touching_measure(const Field& f, double threshold);

/// 1D: distance between the outermost touching nodes (h / 2 for a single
/// node, 0 when none touch), counting any positive film trapped in between.
/// 2D: same as touching_measure().
double touching_extent(const Field& f, double threshold);

/// Largest value strictly between the outermost touching nodes of a 1D
/// field, or 0 when there is no such node above the threshold.
double trapped_film_height(const Field& f, double threshold);

struct SingularityRecord {
    /// First step whose pre-cutoff minimum is <= 0 (stepper trace).
    std::optional<double> onset_negative;
    /// First snapshot whose touching set is nonempty.
    std::optional<double> onset_touching;
    /// First snapshot after onset_touching with an empty touching set.
    std::optional<double> liftoff;
    std::vector<std::pair<double, double>> lengths;  ///< (t, touching measure)
    double max_length = 0.0;
    double max_extent = 0.0;       ///< largest touching_extent() seen
    double max_trapped_film = 0.0; ///< largest trapped_film_height() seen

    /// Header lines `onset=`, `onset_touching=`, `liftoff=`, `max_length=`,
    /// `max_extent=`, `max_trapped_film=` followed by `t,touching_length` rows. `onset` is the pre-cutoff
    /// negativity time when known.
    void write_csv(std::ostream& os) const;
};

/// Incremental form of track_singularity().
class SingularityTracker {
public:
    explicit SingularityTracker(double threshold = 0.0);
    void observe(double t, const Field& post_cutoff);
    void observe_pre_minimum(double t, double min_pre);
    const SingularityRecord& record() const { return record_; }

private:
    double threshold_;
    double last_t_;
    bool any_ = false;
    SingularityRecord record_;
};

/// Builds the record from (time, post-cutoff field) snapshots in time order.
SingularityRecord track_singularity(std::span<const std::pair<double, Field>> snapshots, double threshold = 0.0);

struct LubricationRunOptions {
    /// Touching-set statistics every this many steps.
    int snapshot_every = 10;
    /// Full fields kept at these times.
    std::vector<double> snapshot_times;
    /// Touching threshold; defaults to the cutoff floor.
    std::optional<double> threshold;
    StepObserver on_step;
};

struct LubricationRun {
    Field final_state;
    Field final_pre;
    RunTrace trace;
    SingularityRecord singularity;
};

/// Per step: cutoff, lagged-diffusivity reassembly from the corrected state,
/// one SDIRK3 (or theta) step with the operator frozen across stages.
LubricationRun run_lubrication(const LubricationSpec& spec, const StepperConfig& cfg,
                               const LubricationRunOptions& opts = {});

}  // namespace nonneg::lub
