#include "nonneg/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nonneg/io.hpp"

namespace nonneg {

ButcherTableau ButcherTableau::sdirk3() {
    // Newton on g^3 - 3g^2 + 3g/2 - 1/6 from the tabulated value.
    double g = 0.4358665215;
    for (int it = 0; it < 8; ++it) {
        const double p = ((g - 3.0) * g + 1.5) * g - 1.0 / 6.0;
        const double dp = (3.0 * g - 6.0) * g + 1.5;
        g -= p / dp;
    }
    const double b1 = -(6.0 * g * g - 16.0 * g + 1.0) / 4.0;
    const double b2 = (6.0 * g * g - 20.0 * g + 5.0) / 4.0;
    ButcherTableau t;
    t.a = {{g, 0.0, 0.0}, {(1.0 - g) / 2.0, g, 0.0}, {b1, b2, g}};
    t.b = {b1, b2, g};
    t.c = {g, (1.0 + g) / 2.0, 1.0};
    t.order = 3;
    return t;
}

ButcherTableau ButcherTableau::theta_method(double theta) {
    require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0, 1]");
    ButcherTableau t;
    t.a = {{0.0, 0.0}, {1.0 - theta, theta}};
    t.b = {1.0 - theta, theta};
    t.c = {0.0, 1.0};
    t.order = theta == 0.5 ? 2 : 1;
    return t;
}

double stability_function(const ButcherTableau& tab, double z) {
    const std::size_t s = tab.stages();
    std::vector<double> k(s, 0.0);
    // (I - zA) k = 1 by forward substitution.
    for (std::size_t i = 0; i < s; ++i) {
        double r = 1.0;
        for (std::size_t j = 0; j < i; ++j) r += z * tab.a[i][j] * k[j];
        k[i] = r / (1.0 - z * tab.a[i][i]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < s; ++i) sum += tab.b[i] * k[i];
    return 1.0 + z * sum;
}

std::string integrator_name(const Integrator& integ) {
    if (const auto* th = std::get_if<ThetaMethod>(&integ)) return "theta(" + format_real(th->theta) + ")";
    return "sdirk3";
}

void StepperConfig::validate() const {
    require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    require(std::isfinite(t0) && std::isfinite(t_end) && t_end > t0, "t_end must exceed t0");
    require(tol > 0.0, "solver tolerance must be positive");
    if (const auto* th = std::get_if<ThetaMethod>(&integrator)) {
        require(th->theta >= 0.0 && th->theta <= 1.0, "theta must lie in [0, 1]");
    }
    steps();
}

long StepperConfig::steps() const {
    const double ratio = (t_end - t0) / dt;
    const long n = std::lround(ratio);
    require(n >= 1 && std::abs(ratio - static_cast<double>(n)) <= 1e-9 * std::max(1.0, ratio),
            "t_end - t0 must be an integer multiple of dt");
    return n;
}

std::vector<double> SpatialSystem::source_at(double t) const {
    std::vector<double> s(op.size(), 0.0);
    if (source) source(t, s);
    return s;
}

SparseMatrix implicit_matrix(const SpatialSystem& sys, double coeff) {
    const auto& L = sys.op;
    const std::size_t n = L.size();
    require(sys.constrained.empty() || sys.constrained.size() == n, "constraint mask size mismatch");
    TripletBuilder t(n);
    t.reserve(L.nonzeros() + n);
    const auto off = L.row_offsets();
    for (std::size_t i = 0; i < n; ++i) {
        t.add(i, i, 1.0);
        if (sys.is_constrained(i)) continue;
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) t.add(i, L.cols()[k], -coeff * L.values()[k]);
    }
    return t.build();
}

void SparseOperator::validate() const {
    require(b1.size() == b0.size() && b1.size() == source.size(), "scheme operator dimensions disagree");
}

namespace {

void theta_source(const SpatialSystem& sys, double theta, double dt, double t, std::vector<double>& out) {
    const auto s0 = sys.source_at(t);
    const auto s1 = sys.source_at(t + dt);
    out.resize(s0.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = sys.is_constrained(k) ? s1[k] : dt * (theta * s1[k] + (1.0 - theta) * s0[k]);
    }
}

}  // namespace

SparseOperator theta_operator(const SpatialSystem& sys, double theta, double dt, double t) {
    require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0, 1]");
    require(dt > 0.0, "dt must be positive");
    SparseOperator op;
    op.b1 = implicit_matrix(sys, theta * dt);
    const std::size_t n = sys.op.size();
    TripletBuilder t0(n);
    const auto off = sys.op.row_offsets();
    for (std::size_t i = 0; i < n; ++i) {
        if (sys.is_constrained(i)) continue;
        t0.add(i, i, 1.0);
        for (std::size_t k = off[i]; k < off[i + 1]; ++k)
            t0.add(i, sys.op.cols()[k], (1.0 - theta) * dt * sys.op.values()[k]);
    }
    op.b0 = t0.build();
    theta_source(sys, theta, dt, t, op.source);
    return op;
}

Field step_linear(const SparseOperator& op, const Factorization& b1, const Field& u,
                  const std::optional<CutoffParams>& cutoff, double tol, SolveReport* report) {
    op.validate();
    require(u.size() == op.b1.size(), "state does not match operator dimension");
    Field corrected = u;
    if (cutoff) apply_cutoff(corrected.values(), *cutoff);
    auto rhs = matvec(op.b0, corrected.values());
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += op.source[k];
    return Field(u.grid(), b1.solve(rhs, tol, report));
}

Field step_linear(const SparseOperator& op, const Field& u, const StepperConfig& cfg, SolveReport* report) {
    Factorization b1(op.b1);
    return step_linear(op, b1, u, cfg.cutoff, cfg.tol, report);
}

Field sdirk3_step(const SpatialSystem& sys, const Factorization& stage, const Field& u, double t, double dt,
                  double tol, SolveReport* report) {
    static const ButcherTableau tab = ButcherTableau::sdirk3();
    const double gamma = tab.a[0][0];
    const std::size_t n = u.size();
    require(n == sys.op.size() && stage.size() == n, "state does not match system dimension");

    std::vector<std::vector<double>> slopes;
    std::vector<double> base(n), stage_value;
    double worst = 0.0;
    for (std::size_t i = 0; i < tab.stages(); ++i) {
        const double ti = t + tab.c[i] * dt;
        const auto s = sys.source_at(ti);
        for (std::size_t k = 0; k < n; ++k) {
            double b = u[k];
            for (std::size_t j = 0; j < i; ++j) b += dt * tab.a[i][j] * slopes[j][k];
            base[k] = b;
        }
        std::vector<double> rhs(n);
        for (std::size_t k = 0; k < n; ++k) {
            rhs[k] = sys.is_constrained(k) ? s[k] : base[k] + gamma * dt * s[k];
        }
        SolveReport rep;
        stage_value = stage.solve(rhs, tol, &rep);
        worst = std::max(worst, rep.residual_norm);
        if (report) {
            report->method = rep.method;
            report->iterations += rep.iterations;
        }
        check_finite(stage_value, "sdirk3 stage");
        if (i + 1 < tab.stages()) {
            std::vector<double> slope(n);
            for (std::size_t k = 0; k < n; ++k) slope[k] = (stage_value[k] - base[k]) / (gamma * dt);
            slopes.push_back(std::move(slope));
        }
    }
    if (report) report->residual_norm = worst;
    // Stiffly accurate: the last stage is the step result.
    return Field(u.grid(), std::move(stage_value));
}

Field sdirk3_step(const SpatialSystem& sys, const Field& u, double t, const StepperConfig& cfg,
                  SolveReport* report) {
    const double gamma = ButcherTableau::sdirk3().a[0][0];
    Factorization stage(implicit_matrix(sys, gamma * cfg.dt));
    return sdirk3_step(sys, stage, u, t, cfg.dt, cfg.tol, report);
}

void RunTrace::write_csv(std::ostream& os) const {
    os << "step,t,min_pre,min_post,mass_pre,mass_post,residual\n";
    for (const auto& r : steps) {
        os << r.step << ',' << format_real(r.t) << ',' << format_real(r.min_pre) << ','
           << format_real(r.min_post) << ',' << format_real(r.mass_pre) << ',' << format_real(r.mass_post)
           << ',' << format_real(r.residual) << '\n';
    }
}

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Per-run integrator state: the assembled system and its cached factorization.
class Advancer {
public:
    Advancer(const ProblemSpec& p, const StepperConfig& cfg) : problem_(p), cfg_(cfg) {}

    Field advance(const Field& corrected, double t, SolveReport& rep) {
        if (!system_ || !problem_.frozen_operator) {
            system_ = problem_.assemble(corrected, t);
            require(system_->op.size() == corrected.size(), "assembled operator does not match state");
            factor_.reset();
        }
        rep = SolveReport{};
        if (const auto* th = std::get_if<ThetaMethod>(&cfg_.integrator)) {
            if (!factor_) {
                op_ = theta_operator(*system_, th->theta, cfg_.dt, t);
                factor_.emplace(op_.b1);
            } else {
                theta_source(*system_, th->theta, cfg_.dt, t, op_.source);
            }
            // Cutoff already applied by the caller.
            return step_linear(op_, *factor_, corrected, std::nullopt, cfg_.tol, &rep);
        }
        if (!factor_) {
            const double gamma = ButcherTableau::sdirk3().a[0][0];
            factor_.emplace(implicit_matrix(*system_, gamma * cfg_.dt));
        }
        return sdirk3_step(*system_, *factor_, corrected, t, cfg_.dt, cfg_.tol, &rep);
    }

private:
    const ProblemSpec& problem_;
    const StepperConfig& cfg_;
    std::optional<SpatialSystem> system_;
    std::optional<Factorization> factor_;
    SparseOperator op_;
};

}  // namespace

RunResult run(const ProblemSpec& problem, const StepperConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    require(static_cast<bool>(problem.assemble), "problem has no assembler");
    check_finite(problem.initial.values(), "initial state");
    const long nsteps = cfg.steps();

    RunTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(nsteps));
    std::vector<bool> taken(opts.snapshot_times.size(), false);
    auto maybe_snapshot = [&](double t, const Field& pre, const Field& post) {
        for (std::size_t s = 0; s < opts.snapshot_times.size(); ++s) {
            if (!taken[s] && std::abs(opts.snapshot_times[s] - t) <= 0.5 * cfg.dt) {
                trace.snapshots.push_back({t, pre, post});
                taken[s] = true;
            }
        }
    };

    Field pre = problem.initial;
    Field post = problem.initial;
    if (cfg.cutoff) apply_cutoff(post.values(), *cfg.cutoff);
    maybe_snapshot(cfg.t0, pre, post);

    Advancer advancer(problem, cfg);
    for (long n = 0; n < nsteps; ++n) {
        const double t = cfg.t0 + static_cast<double>(n) * cfg.dt;
        SolveReport rep;
        try {
            pre = advancer.advance(post, t, rep);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::non_finite) {
                throw DivergenceError("diverged at step " + std::to_string(n + 1) + ": " + e.what(), trace);
            }
            throw;
        }
        if (!all_finite(pre.values())) {
            throw DivergenceError("non-finite state at step " + std::to_string(n + 1), trace);
        }
        post = pre;
        if (cfg.cutoff) apply_cutoff(post.values(), *cfg.cutoff);

        StepRecord rec;
        rec.step = n + 1;
        rec.t = cfg.t0 + static_cast<double>(n + 1) * cfg.dt;
        rec.min_pre = pre.min();
        rec.min_post = post.min();
        rec.mass_pre = mass(pre);
        rec.mass_post = mass(post);
        rec.residual = rep.residual_norm;
        trace.steps.push_back(rec);
        if (opts.on_step) opts.on_step(rec, pre, post);
        maybe_snapshot(rec.t, pre, post);
    }
    return RunResult{std::move(post), std::move(pre), std::move(trace)};
}

SchemeDiagnostics scheme_diagnostics(const SparseOperator& op, double dt) {
    op.validate();
    require(dt > 0.0, "dt must be positive");
    require(op.b1.size() <= max_explicit_inverse_size, "scheme diagnostics limited to n <= 2500");
    Factorization b1(op.b1);
    SchemeDiagnostics d;
    d.b1_inverse_norm = inverse_norm_inf(b1);
    d.amplification_norm = inverse_product_norm_inf(b1, op.b0);
    d.growth_constant = std::max(0.0, (d.amplification_norm - 1.0) / dt);
    return d;
}

SchemeDiagnostics scheme_diagnostics(const SpatialSystem& sys, const Grid& grid, const Integrator& integ,
                                     double dt) {
    require(dt > 0.0, "dt must be positive");
    if (const auto* th = std::get_if<ThetaMethod>(&integ))
        return scheme_diagnostics(theta_operator(sys, th->theta, dt, 0.0), dt);

    const std::size_t n = sys.op.size();
    require(node_count(grid) == n, "grid does not match system dimension");
    require(n <= max_explicit_inverse_size, "scheme diagnostics limited to n <= 2500");
    // Homogeneous problem: the step map is linear and its columns are the
    // images of unit vectors.
    SpatialSystem homogeneous{sys.op, sys.constrained, {}};
    const double gamma = ButcherTableau::sdirk3().a[0][0];
    Factorization stage(implicit_matrix(homogeneous, gamma * dt));
    std::vector<double> row_sums(n, 0.0);
    Field unit(grid);
    for (std::size_t j = 0; j < n; ++j) {
        unit[j] = 1.0;
        const Field col = sdirk3_step(homogeneous, stage, unit, 0.0, dt, default_solve_tol);
        for (std::size_t i = 0; i < n; ++i) row_sums[i] += std::abs(col[i]);
        unit[j] = 0.0;
    }
    SchemeDiagnostics d;
    d.b1_inverse_norm = inverse_norm_inf(stage);
    d.amplification_norm = *std::max_element(row_sums.begin(), row_sums.end());
    d.growth_constant = std::max(0.0, (d.amplification_norm - 1.0) / dt);
    return d;
}

}  // namespace nonneg
