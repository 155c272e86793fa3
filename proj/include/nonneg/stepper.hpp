#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nonneg/cutoff.hpp"
#include "nonneg/mesh.hpp"
#include "nonneg/sparse.hpp"

namespace nonneg {

/// Diagonally implicit Runge-Kutta coefficients. `a` is lower triangular.
struct ButcherTableau {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<double> c;
    int order = 0;

    std::size_t stages() const { return b.size(); }

    /// Three-stage, stiffly accurate, L-stable SDIRK of order 3. The diagonal
    /// gamma ~ 0.4358665215 is the root of g^3 - 3g^2 + 3g/2 - 1/6 in (1/6, 1/2).
    static ButcherTableau sdirk3();
    /// Theta method as a two-stage tableau: explicit first stage, c = (0, 1).
    static ButcherTableau theta_method(double theta);
};

/// R(z) = 1 + z b^T (I - zA)^{-1} 1 for the scalar test equation u' = lambda u.
double stability_function(const ButcherTableau& tab, double z);

struct ThetaMethod {
    double theta = 1.0;
};
struct Sdirk3 {};
using Integrator = std::variant<ThetaMethod, Sdirk3>;

std::string integrator_name(const Integrator& integ);

struct StepperConfig {
    double dt = 1e-2;
    double t0 = 0.0;
    double t_end = 1.0;
    /// Disabled when empty.
    std::optional<CutoffParams> cutoff = CutoffParams(0.0);
    Integrator integrator = Sdirk3{};
    double tol = default_solve_tol;

    void validate() const;
    /// Number of fixed steps; (t_end - t0) must be an integer multiple of dt
    /// up to 1e-9 relative.
    long steps() const;
};

/// Writes the source term at time t into `out`.
using SourceFn = std::function<void(double t, std::span<double> out)>;

/// Semi-discrete linear system u' = L u + s(t). Nodes flagged in
/// `constrained` are Dirichlet nodes: their value is g(t), which `source`
/// writes in place of s. Rows of L at constrained nodes are ignored.
struct SpatialSystem {
    SparseMatrix op;
    std::vector<std::uint8_t> constrained;
    SourceFn source;

    bool is_constrained(std::size_t k) const { return !constrained.empty() && constrained[k] != 0; }
    /// s(t) (and g(t) at constrained nodes); zeros when no source is set.
    std::vector<double> source_at(double t) const;
};

/// I - coeff * L, with identity rows at constrained nodes.
SparseMatrix implicit_matrix(const SpatialSystem& sys, double coeff);

/// One-step scheme B1 U^{n+1} = B0 U^n + F^n.
struct SparseOperator {
    SparseMatrix b1;
    SparseMatrix b0;
    std::vector<double> source;
    bool time_independent = true;

    void validate() const;
};

/// Theta-method operator for the step t -> t + dt. Constrained rows get
/// B1 = identity, B0 = 0 and F = g(t + dt).
SparseOperator theta_operator(const SpatialSystem& sys, double theta, double dt, double t);

/// B1 U^{n+1} = B0 (U^n)^+ + F. The input is cut (when enabled) before the
/// right-hand side is formed; the output is returned uncut.
Field step_linear(const SparseOperator& op, const Field& u, const StepperConfig& cfg,
                  SolveReport* report = nullptr);
Field step_linear(const SparseOperator& op, const Factorization& b1, const Field& u,
                  const std::optional<CutoffParams>& cutoff, double tol, SolveReport* report = nullptr);

/// One SDIRK3 step of u' = L u + s(t) from t to t + dt. `stage` must be the
/// factorization of implicit_matrix(sys, gamma * dt). Stages act on the state
/// as given; no cutoff is applied inside the step.
Field sdirk3_step(const SpatialSystem& sys, const Factorization& stage, const Field& u, double t,
                  double dt, double tol, SolveReport* report = nullptr);
Field sdirk3_step(const SpatialSystem& sys, const Field& u, double t, const StepperConfig& cfg,
                  SolveReport* report = nullptr);

/// Everything that defines one initial-boundary value problem.
struct ProblemSpec {
    std::string name;
    Field initial;
    /// Spatial system for the step that starts at t, built from the corrected
    /// (post-cutoff) state.
    std::function<SpatialSystem(const Field& corrected, double t)> assemble;
    /// When true, `assemble` ignores its arguments and is called once per run.
    bool frozen_operator = true;
    /// Optional closed-form solution u(t, x, y).
    std::function<double(double, double, double)> exact;
};

struct StepRecord {
    long step = 0;
    double t = 0.0;
    double min_pre = 0.0;
    double min_post = 0.0;
    double mass_pre = 0.0;
    double mass_post = 0.0;
    double residual = 0.0;
};

struct Snapshot {
    double t = 0.0;
    Field pre;
    Field post;
};

struct RunTrace {
    std::vector<StepRecord> steps;
    std::vector<Snapshot> snapshots;

    /// `step,t,min_pre,min_post,mass_pre,mass_post,residual`
    void write_csv(std::ostream& os) const;
};

using StepObserver = std::function<void(const StepRecord&, const Field& pre, const Field& post)>;

struct RunOptions {
    /// Times at which full pre/post fields are kept (nearest step).
    std::vector<double> snapshot_times;
    StepObserver on_step;
};

struct RunResult {
    Field final_state;  ///< post-cutoff (U^N)^+ when cutoff is enabled
    Field final_pre;    ///< U^N before cutoff
    RunTrace trace;
};

/// Thrown when the state turns non-finite. Carries the trace up to failure.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, RunTrace partial)
        : Error(ErrorKind::diverged, what), trace_(std::move(partial)) {}
    const RunTrace& trace() const { return trace_; }

private:
    RunTrace trace_;
};

/// Fixed-step integration with cutoff between steps.
RunResult run(const ProblemSpec& problem, const StepperConfig& cfg, const RunOptions& opts = {});

struct SchemeDiagnostics {
    double b1_inverse_norm = 0.0;     ///< ||B1^{-1}||_inf
    double amplification_norm = 0.0;  ///< ||B1^{-1} B0||_inf
    double growth_constant = 0.0;     ///< max(0, (||B1^{-1} B0||_inf - 1) / dt)
};

/// Max-norm stability witnesses of a one-step operator, by explicit inverse
/// application. Limited to n <= 2500.
SchemeDiagnostics scheme_diagnostics(const SparseOperator& op, double dt);

/// Same witnesses for the homogeneous step map of `integ` on u' = L u. For
/// SDIRK3 the amplification matrix is built column by column and B1 is the
/// shared stage matrix I - gamma dt L.
SchemeDiagnostics scheme_diagnostics(const SpatialSystem& sys, const Grid& grid, const Integrator& integ,
                                     double dt);

}  // namespace nonneg
