#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nonneg/cutoff.hpp"
#include "nonneg/lubrication.hpp"
#include "nonneg/stepper.hpp"

namespace nonneg {

enum class CutoffMode { off, nonneg, delta };

std::string cutoff_mode_name(CutoffMode m);
/// Parses "off", "nonneg" or "delta".
CutoffMode parse_cutoff_mode(const std::string& s);

enum class Experiment { aniso_convergence, aniso_run, lub1d, lub2d, reg_compare, diagnostics };

std::string experiment_name(Experiment e);
/// Parses the command-line spelling, e.g. "aniso-convergence".
Experiment parse_experiment(const std::string& s);

/// Everything that defines one experiment run. Defaults are filled per
/// experiment by ExperimentConfig::defaults().
struct ExperimentConfig {
    Experiment experiment = Experiment::aniso_convergence;
    std::vector<int> resolutions;
    double dt = 1e-2;
    double t_end = 1.0;
    CutoffMode cutoff = CutoffMode::nonneg;
    /// delta = coefficient * dt * h^2 in delta mode.
    double delta_coefficient = 1.0;
    double epsilon = 0.0;
    std::array<double, 2> convection{0.0, 0.0};
    Integrator integrator = Sdirk3{};
    /// Empty: nothing is written.
    std::filesystem::path output_dir;
    std::vector<double> snapshot_times;
    std::uint64_t seed = 0;
    /// Randomized samples for the diagnostics experiment.
    long samples = 10000;
    /// Worker threads for multi-run studies; 0 picks the hardware count.
    unsigned threads = 0;

    static ExperimentConfig defaults(Experiment e);

    void validate() const;
    /// Cutoff for a grid of spacing h, or nullopt when cutoff is off.
    std::optional<CutoffParams> cutoff_for(double h) const;
    StepperConfig stepper_for(double h) const;
    /// `key=value` lines naming every numerical design choice in force.
    void write_metadata(std::ostream& os) const;
};

/// Least-squares slope of log(y) against log(x). Needs >= 2 points, all positive.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct ConvergenceRow {
    int cells = 0;
    double h = 0.0;
    double dt = 0.0;
    double l2_error = 0.0;        ///< ||(U^N)^+ - u(t_end)||_L2 (uncut when cutoff is off)
    double max_undershoot = 0.0;  ///< -min(U^N, 0) before cutoff
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::optional<double> l2_slope;
    /// Empty when some run produced no undershoot (log of zero).
    std::optional<double> undershoot_slope;

    /// `J,h,dt,l2_error,max_undershoot` rows followed by `# slope_l2=` and
    /// `# slope_undershoot=` lines.
    void write_csv(std::ostream& os) const;
};

/// Thrown when one run of a study fails; the rows that finished are kept.
class StudyError : public Error {
public:
    StudyError(ErrorKind kind, const std::string& what, ConvergenceReport partial)
        : Error(kind, what), partial_(std::move(partial)) {}
    const ConvergenceReport& partial() const { return partial_; }

private:
    ConvergenceReport partial_;
};

/// Anisotropic manufactured-solution study over cfg.resolutions, runs fanned
/// out across threads. Writes convergence.csv when an output dir is set.
ConvergenceReport convergence_study(const ExperimentConfig& cfg);

struct AnisotropicRunReport {
    int cells = 0;
    double l2_error = 0.0;
    double max_error = 0.0;
    double max_undershoot = 0.0;
    RunTrace trace;
};

/// Single anisotropic run at cfg.resolutions.front(); writes trace.csv,
/// final.csv, final_pre.csv and requested snapshots.
AnisotropicRunReport anisotropic_run(const ExperimentConfig& cfg);

/// Single lubrication run (1D or 2D per cfg.experiment); writes trace.csv,
/// singularity.csv, final.csv, final_pre.csv and snapshot files.
lub::LubricationRun lubrication_run(const ExperimentConfig& cfg);

struct RegularizationComparison {
    double epsilon = 0.0;
    lub::SingularityRecord unregularized;
    lub::SingularityRecord regularized;
    std::optional<double> onset_difference;    ///< |onset(eps) - onset(0)|, pre-cutoff definition
    std::optional<double> liftoff_difference;  ///< empty unless both runs lift off
    double max_field_difference = 0.0;         ///< final post-cutoff states
    /// A contiguous run of >= 2 nodes at the floor was seen at some snapshot.
    bool unregularized_zero_interval = false;
    bool regularized_zero_interval = false;

    void write(std::ostream& os) const;
};

/// Runs eps = 0 and eps = cfg.epsilon with otherwise identical settings.
RegularizationComparison regularization_comparison(const ExperimentConfig& cfg);

struct LemmaCheckReport {
    long samples = 0;
    /// Violation counts of the five cutoff inequalities.
    std::array<long, 5> violations{};
    bool all_hold() const;
};

/// Seeded random (f, u, delta) triples, u >= 0, delta in [0, 1], with a share
/// of ties and exact zeros mixed in.
LemmaCheckReport randomized_lemma_check(std::uint64_t seed, long samples);

struct DiagnosticsReport {
    LemmaCheckReport lemmas;
    SchemeDiagnostics scheme;
    SchemeDiagnostics scheme_half_dt;
};

/// Lemma check plus max-norm diagnostics of the configured integrator's step
/// map on the anisotropic grid at dt and dt / 2.
DiagnosticsReport diagnostics(const ExperimentConfig& cfg);

/// Flat named results of one experiment, for the C interface and the CLI.
struct ExperimentReport {
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<std::string> files;

    std::optional<double> get(const std::string& key) const;
};

/// Validates, dispatches on cfg.experiment and writes metadata.txt.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace nonneg
