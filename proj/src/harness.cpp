#include "nonneg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <future>
#include <ostream>
#include <random>
#include <thread>

#include "nonneg/anisotropic.hpp"
#include "nonneg/io.hpp"

namespace nonneg {

std::string cutoff_mode_name(CutoffMode m) {
    switch (m) {
        case CutoffMode::off: return "off";
        case CutoffMode::nonneg: return "nonneg";
        case CutoffMode::delta: return "delta";
    }
    return "?";
}

CutoffMode parse_cutoff_mode(const std::string& s) {
    if (s == "off") return CutoffMode::off;
    if (s == "nonneg") return CutoffMode::nonneg;
    if (s == "delta") return CutoffMode::delta;
    fail(ErrorKind::invalid_argument, "unknown cutoff mode '" + s + "' (expected off, nonneg or delta)");
}

namespace {

constexpr std::pair<Experiment, const char*> experiment_names[] = {
    {Experiment::aniso_convergence, "aniso-convergence"},
    {Experiment::aniso_run, "aniso-run"},
    {Experiment::lub1d, "lub1d"},
    {Experiment::lub2d, "lub2d"},
    {Experiment::reg_compare, "reg-compare"},
    {Experiment::diagnostics, "diagnostics"},
};

bool is_lubrication(Experiment e) {
    return e == Experiment::lub1d || e == Experiment::lub2d || e == Experiment::reg_compare;
}

// Mesh spacing of a J-cell run: the anisotropic problem lives on [0,1]^2,
// the thin-film problems on [-1,1]^d.
double spacing(Experiment e, int cells) {
    return (is_lubrication(e) ? 2.0 : 1.0) / cells;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v[i]);
    return s;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string opt_real(const std::optional<double>& v) {
    return v ? format_real(*v) : std::string("none");
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, jobs));
}

// Collects the names of files an experiment writes.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {}

    bool enabled() const { return !dir_.empty(); }
    const std::filesystem::path& path() const { return dir_; }

    std::ofstream open(const std::string& name) {
        files_.push_back((dir_ / name).string());
        return open_output(dir_ / name);
    }
    const std::vector<std::string>& files() const { return files_; }
    void adopt(const OutputDir& other) { files_.insert(files_.end(), other.files_.begin(), other.files_.end()); }

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

void write_field(OutputDir& out, const std::string& name, const Field& f) {
    auto os = out.open(name);
    write_csv(f, os);
}

void write_snapshots(OutputDir& out, const std::vector<Snapshot>& snaps) {
    if (snaps.empty()) return;
    auto index = out.open("snapshots.csv");
    index << "index,t\n";
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        index << k << ',' << format_real(snaps[k].t) << '\n';
        write_field(out, "snapshot_" + std::to_string(k) + "_post.csv", snaps[k].post);
        write_field(out, "snapshot_" + std::to_string(k) + "_pre.csv", snaps[k].pre);
    }
}

}  // namespace

std::string experiment_name(Experiment e) {
    for (const auto& [k, name] : experiment_names)
        if (k == e) return name;
    return "?";
}

Experiment parse_experiment(const std::string& s) {
    for (const auto& [k, name] : experiment_names)
        if (s == name) return k;
    fail(ErrorKind::invalid_argument, "unknown experiment '" + s + "'");
}

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    switch (e) {
        case Experiment::aniso_convergence:
            c.resolutions = {10, 20, 40, 80};
            break;
        case Experiment::aniso_run:
            c.resolutions = {80};
            break;
        case Experiment::lub1d:
            c.resolutions = {1000};
            c.dt = 1e-6;
            c.t_end = 2.5e-3;
            break;
        case Experiment::lub2d:
            c.resolutions = {80};
            c.dt = 1e-6;
            c.t_end = 1e-3;
            break;
        case Experiment::reg_compare:
            c.resolutions = {1000};
            c.dt = 1e-6;
            c.t_end = 2.5e-3;
            c.epsilon = 1e-14;
            break;
        case Experiment::diagnostics:
            c.resolutions = {20};
            break;
    }
    return c;
}

void ExperimentConfig::validate() const {
    require(!resolutions.empty(), "at least one resolution is required");
    const int min_cells = is_lubrication(experiment) ? 4 : 2;
    for (std::size_t i = 0; i < resolutions.size(); ++i) {
        require(resolutions[i] >= min_cells,
                "resolution " + std::to_string(resolutions[i]) + " is below the minimum of " +
                    std::to_string(min_cells) + " cells");
        require(i == 0 || resolutions[i] > resolutions[i - 1], "resolutions must be strictly increasing");
    }
    require(std::isfinite(dt) && dt > 0.0, "dt must be positive and finite");
    require(std::isfinite(t_end) && t_end > 0.0, "t_end must be positive and finite");
    require(std::isfinite(delta_coefficient) && delta_coefficient >= 0.0,
            "delta coefficient must be finite and >= 0");
    require(std::isfinite(epsilon) && epsilon >= 0.0, "epsilon must be finite and >= 0");
    require(std::isfinite(convection[0]) && std::isfinite(convection[1]), "convection must be finite");
    require(samples > 0, "sample count must be positive");
    if (const auto* th = std::get_if<ThetaMethod>(&integrator))
        require(th->theta >= 0.0 && th->theta <= 1.0, "theta must lie in [0, 1]");
    for (double t : snapshot_times)
        require(std::isfinite(t) && t >= 0.0 && t <= t_end, "snapshot times must lie in [0, t_end]");
    if (experiment == Experiment::reg_compare)
        require(epsilon > 0.0, "the regularization comparison needs epsilon > 0");
    if (is_lubrication(experiment) && experiment != Experiment::reg_compare)
        require(cutoff != CutoffMode::off || epsilon > 0.0,
                "unregularized thin-film runs need a cutoff (mobility is undefined below zero)");
    if (experiment == Experiment::reg_compare)
        require(cutoff != CutoffMode::off, "the regularization comparison runs eps = 0 and needs a cutoff");
    StepperConfig probe{.dt = dt, .t0 = 0.0, .t_end = t_end};
    probe.steps();
}

std::optional<CutoffParams> ExperimentConfig::cutoff_for(double h) const {
    switch (cutoff) {
        case CutoffMode::off: return std::nullopt;
        case CutoffMode::nonneg: return CutoffParams(0.0);
        case CutoffMode::delta: return CutoffParams(delta_coefficient * dt * h * h);
    }
    return std::nullopt;
}

StepperConfig ExperimentConfig::stepper_for(double h) const {
    StepperConfig s;
    s.dt = dt;
    s.t0 = 0.0;
    s.t_end = t_end;
    s.cutoff = cutoff_for(h);
    s.integrator = integrator;
    s.validate();
    return s;
}

void ExperimentConfig::write_metadata(std::ostream& os) const {
    const bool lub = is_lubrication(experiment);
    os << "experiment=" << experiment_name(experiment) << '\n';
    os << "resolutions=" << join(resolutions) << '\n';
    os << "dt=" << format_real(dt) << '\n';
    os << "t_end=" << format_real(t_end) << '\n';
    os << "integrator=" << integrator_name(integrator) << '\n';
    if (const auto* th = std::get_if<ThetaMethod>(&integrator)) os << "theta=" << format_real(th->theta) << '\n';
    os << "cutoff=" << cutoff_mode_name(cutoff) << '\n';
    os << "delta_rule=coefficient*dt*h^2\n";
    os << "delta_coefficient=" << format_real(delta_coefficient) << '\n';
    for (int j : resolutions) {
        const auto c = cutoff_for(spacing(experiment, j));
        os << "delta_J" << j << '=' << (c ? format_real(c->delta()) : std::string("none")) << '\n';
    }
    os << "solve_tolerance=" << format_real(default_solve_tol) << '\n';
    os << "solve_tolerance_scaling=max(1,|A||x|/max(1,|b|))\n";
    os << "refinement_sweeps=2\n";
    os << "linear_solver=banded-lu(bandwidth<=2);sparse-lu(otherwise)\n";
    os << "l2_norm=trapezoid\n";
    os << "mass=trapezoid\n";
    os << "slope_fit=least-squares-loglog-all-points\n";
    os << "seed=" << seed << '\n';
    os << "samples=" << samples << '\n';
    os << "threads=" << threads << '\n';
    os << "snapshot_times=" << join(snapshot_times) << '\n';
    if (lub) {
        os << "domain=[-1,1]^" << (experiment == Experiment::lub2d ? 2 : 1) << '\n';
        os << "mobility=u^0.5\n";
        os << "epsilon=" << format_real(epsilon) << '\n';
        os << "regularization=u^4 f/(eps f + u^4)\n";
        os << "face_mobility=arithmetic-mean\n";
        os << "linearization=lagged-mobility-frozen-across-stages\n";
        os << "boundary=no-flux-even-reflection\n";
        os << "touching_threshold=cutoff-floor\n";
        os << "touching_length=(k-1)h-longest-contiguous-run;h/2-single-node\n";
        os << "touching_area_2d=trapezoid-area\n";
        os << "singularity_snapshot_every=10\n";
        os << "onset_headline=pre-cutoff-min<=0\n";
        os << "liftoff=first-snapshot-after-onset-with-empty-touching-set\n";
    } else {
        os << "domain=[0,1]^2\n";
        os << "diffusion=[[500.5,480],[480,500.5]]\n";
        os << "convection=" << format_real(convection[0]) << ',' << format_real(convection[1]) << '\n';
        os << "stencil=nine-point-central\n";
        os << "boundary=dirichlet-identity-rows-exact-data\n";
        os << "exact_solution=0.5*exp(-t)*(tanh(-15(x-y))+1)\n";
    }
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "slope fit needs matching x and y");
    require(x.size() >= 2, "slope fit needs at least two points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i]),
                "slope fit needs positive finite data");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    require(sxx > 0.0, "slope fit needs at least two distinct x values");
    return sxy / sxx;
}

void ConvergenceReport::write_csv(std::ostream& os) const {
    os << "J,h,dt,l2_error,max_undershoot\n";
    for (const auto& r : rows) {
        os << r.cells << ',' << format_real(r.h) << ',' << format_real(r.dt) << ',' << format_real(r.l2_error)
           << ',' << format_real(r.max_undershoot) << '\n';
    }
    os << "# slope_l2=" << opt_real(l2_slope) << '\n';
    os << "# slope_undershoot=" << opt_real(undershoot_slope) << '\n';
}

namespace {

aniso::AnisotropicSpec anisotropic_spec(const ExperimentConfig& cfg, int cells) {
    auto spec = aniso::AnisotropicSpec::unit_square(cells);
    spec.convection = cfg.convection;
    return spec;
}

ConvergenceRow convergence_row(const ExperimentConfig& cfg, int cells) {
    const auto spec = anisotropic_spec(cfg, cells);
    const double h = spec.grid.x.h();
    const auto res = run(aniso::make_problem(spec), cfg.stepper_for(h));
    const double t = res.trace.steps.empty() ? 0.0 : res.trace.steps.back().t;
    const auto exact = Field::sample(spec.grid, [t](double x, double y) { return aniso::exact_solution(t, x, y); });
    return ConvergenceRow{cells, h, cfg.dt, l2_norm(res.final_state - exact), max_undershoot(res.final_pre)};
}

void fit_slopes(ConvergenceReport& rep) {
    if (rep.rows.size() < 2) return;
    std::vector<double> h, e, u;
    for (const auto& r : rep.rows) {
        h.push_back(r.h);
        e.push_back(r.l2_error);
        u.push_back(r.max_undershoot);
    }
    if (std::all_of(e.begin(), e.end(), [](double v) { return v > 0.0; })) rep.l2_slope = fit_loglog_slope(h, e);
    if (std::all_of(u.begin(), u.end(), [](double v) { return v > 0.0; }))
        rep.undershoot_slope = fit_loglog_slope(h, u);
}

ConvergenceReport convergence_study(const ExperimentConfig& cfg, OutputDir& out) {
    cfg.validate();
    const std::size_t n = cfg.resolutions.size();
    std::vector<std::optional<ConvergenceRow>> rows(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                rows[i] = convergence_row(cfg, cfg.resolutions[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned workers = worker_count(cfg.threads, n);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    ConvergenceReport rep;
    for (const auto& r : rows)
        if (r) rep.rows.push_back(*r);
    fit_slopes(rep);
    if (out.enabled()) {
        auto os = out.open("convergence.csv");
        rep.write_csv(os);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        const std::string where = "run J=" + std::to_string(cfg.resolutions[i]) + " failed: ";
        try {
            std::rethrow_exception(errors[i]);
        } catch (const Error& e) {
            throw StudyError(e.kind(), where + e.what(), rep);
        } catch (const std::exception& e) {
            throw StudyError(ErrorKind::diverged, where + e.what(), rep);
        }
    }
    return rep;
}

AnisotropicRunReport anisotropic_run(const ExperimentConfig& cfg, OutputDir& out) {
    cfg.validate();
    const int cells = cfg.resolutions.front();
    const auto spec = anisotropic_spec(cfg, cells);
    RunOptions opts;
    opts.snapshot_times = cfg.snapshot_times;
    auto res = run(aniso::make_problem(spec), cfg.stepper_for(spec.grid.x.h()), opts);
    const double t = res.trace.steps.empty() ? 0.0 : res.trace.steps.back().t;
    const auto exact = Field::sample(spec.grid, [t](double x, double y) { return aniso::exact_solution(t, x, y); });
    const Field err = res.final_state - exact;
    AnisotropicRunReport rep{cells, l2_norm(err), max_norm(err), max_undershoot(res.final_pre), std::move(res.trace)};
    if (out.enabled()) {
        auto os = out.open("trace.csv");
        rep.trace.write_csv(os);
        write_field(out, "final.csv", res.final_state);
        write_field(out, "final_pre.csv", res.final_pre);
        write_snapshots(out, rep.trace.snapshots);
    }
    return rep;
}

lub::LubricationRun lubrication_run(const ExperimentConfig& cfg, OutputDir& out) {
    const int cells = cfg.resolutions.front();
    auto spec = cfg.experiment == Experiment::lub2d ? lub::LubricationSpec::standard_2d(cells)
                                                    : lub::LubricationSpec::standard_1d(cells);
    spec.mobility.epsilon = cfg.epsilon;
    lub::LubricationRunOptions opts;
    opts.snapshot_times = cfg.snapshot_times;
    if (opts.snapshot_times.empty()) {
        for (int k = 1; k <= 5; ++k) opts.snapshot_times.push_back(cfg.t_end * k / 5.0);
    }
    auto res = lub::run_lubrication(spec, cfg.stepper_for(spacing(cfg.experiment, cells)), opts);
    if (out.enabled()) {
        auto os = out.open("trace.csv");
        res.trace.write_csv(os);
        auto ss = out.open("singularity.csv");
        res.singularity.write_csv(ss);
        write_field(out, "final.csv", res.final_state);
        write_field(out, "final_pre.csv", res.final_pre);
        write_snapshots(out, res.trace.snapshots);
    }
    return res;
}

RegularizationComparison regularization_comparison(const ExperimentConfig& cfg, OutputDir& out) {
    cfg.validate();
    ExperimentConfig base = cfg;
    base.experiment = Experiment::lub1d;
    base.epsilon = 0.0;
    ExperimentConfig reg = base;
    reg.epsilon = cfg.epsilon;
    OutputDir out0(out.enabled() ? out.path() / "eps0" : std::filesystem::path());
    OutputDir out1(out.enabled() ? out.path() / "eps" : std::filesystem::path());

    auto launch = cfg.threads == 1 ? std::launch::deferred : std::launch::async;
    auto f0 = std::async(launch, [&] { return lubrication_run(base, out0); });
    auto f1 = std::async(launch, [&] { return lubrication_run(reg, out1); });
    // Collect both before rethrowing so no worker outlives this frame.
    std::exception_ptr err;
    std::optional<lub::LubricationRun> r0, r1;
    try { r0 = f0.get(); } catch (...) { err = std::current_exception(); }
    try { r1 = f1.get(); } catch (...) { if (!err) err = std::current_exception(); }
    if (err) std::rethrow_exception(err);

    RegularizationComparison c;
    c.epsilon = cfg.epsilon;
    c.unregularized = r0->singularity;
    c.regularized = r1->singularity;
    const auto& a = c.unregularized;
    const auto& b = c.regularized;
    if (a.onset_negative && b.onset_negative) c.onset_difference = std::abs(*b.onset_negative - *a.onset_negative);
    if (a.liftoff && b.liftoff) c.liftoff_difference = std::abs(*b.liftoff - *a.liftoff);
    c.max_field_difference = max_norm(r1->final_state - r0->final_state);
    // A run of k >= 2 touching nodes measures (k - 1) h >= h.
    const double h = spacing(Experiment::lub1d, cfg.resolutions.front());
    c.unregularized_zero_interval = a.max_length >= h * (1.0 - 1e-12);
    c.regularized_zero_interval = b.max_length >= h * (1.0 - 1e-12);
    out.adopt(out0);
    out.adopt(out1);
    if (out.enabled()) {
        auto os = out.open("comparison.txt");
        c.write(os);
    }
    return c;
}

}  // namespace

ConvergenceReport convergence_study(const ExperimentConfig& cfg) {
    OutputDir out(cfg.output_dir);
    return convergence_study(cfg, out);
}

AnisotropicRunReport anisotropic_run(const ExperimentConfig& cfg) {
    OutputDir out(cfg.output_dir);
    return anisotropic_run(cfg, out);
}

lub::LubricationRun lubrication_run(const ExperimentConfig& cfg) {
    cfg.validate();
    require(cfg.experiment == Experiment::lub1d || cfg.experiment == Experiment::lub2d,
            "lubrication_run needs the lub1d or lub2d experiment");
    OutputDir out(cfg.output_dir);
    return lubrication_run(cfg, out);
}

void RegularizationComparison::write(std::ostream& os) const {
    os << "epsilon=" << format_real(epsilon) << '\n';
    os << "onset_eps0=" << opt_real(unregularized.onset_negative) << '\n';
    os << "onset_eps=" << opt_real(regularized.onset_negative) << '\n';
    os << "liftoff_eps0=" << opt_real(unregularized.liftoff) << '\n';
    os << "liftoff_eps=" << opt_real(regularized.liftoff) << '\n';
    os << "onset_difference=" << opt_real(onset_difference) << '\n';
    os << "liftoff_difference=" << opt_real(liftoff_difference) << '\n';
    os << "max_field_difference=" << format_real(max_field_difference) << '\n';
    os << "max_length_eps0=" << format_real(unregularized.max_length) << '\n';
    os << "max_length_eps=" << format_real(regularized.max_length) << '\n';
    os << "max_trapped_film_eps0=" << format_real(unregularized.max_trapped_film) << '\n';
    os << "max_trapped_film_eps=" << format_real(regularized.max_trapped_film) << '\n';
    os << "zero_interval_eps0=" << (unregularized_zero_interval ? 1 : 0) << '\n';
    os << "zero_interval_eps=" << (regularized_zero_interval ? 1 : 0) << '\n';
}

RegularizationComparison regularization_comparison(const ExperimentConfig& cfg) {
    OutputDir out(cfg.output_dir);
    return regularization_comparison(cfg, out);
}

bool LemmaCheckReport::all_hold() const {
    return std::all_of(violations.begin(), violations.end(), [](long v) { return v == 0; });
}

LemmaCheckReport randomized_lemma_check(std::uint64_t seed, long samples) {
    require(samples > 0, "sample count must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> fdist(-2.0, 2.0);
    std::uniform_real_distribution<double> udist(0.0, 2.0);
    std::uniform_real_distribution<double> ddist(0.0, 1.0);
    std::uniform_int_distribution<int> kind(0, 9);
    LemmaCheckReport rep;
    rep.samples = samples;
    for (long s = 0; s < samples; ++s) {
        double f = fdist(rng);
        double u = udist(rng);
        double d = ddist(rng);
        // Boundary cases the order relations are tight on.
        switch (kind(rng)) {
            case 0: f = u; break;
            case 1: f = 0.0; break;
            case 2: u = 0.0; break;
            case 3: d = 0.0; break;
            case 4: f = d; break;
            case 5: u = d; break;
            default: break;
        }
        const auto ok = cutoff_inequalities(f, u, d);
        for (std::size_t i = 0; i < ok.size(); ++i)
            if (!ok[i]) ++rep.violations[i];
    }
    return rep;
}

DiagnosticsReport diagnostics(const ExperimentConfig& cfg) {
    cfg.validate();
    DiagnosticsReport rep;
    rep.lemmas = randomized_lemma_check(cfg.seed, cfg.samples);
    const auto spec = anisotropic_spec(cfg, cfg.resolutions.front());
    const auto sys = aniso::assemble(spec);
    rep.scheme = scheme_diagnostics(sys, spec.grid, cfg.integrator, cfg.dt);
    rep.scheme_half_dt = scheme_diagnostics(sys, spec.grid, cfg.integrator, 0.5 * cfg.dt);
    return rep;
}

std::optional<double> ExperimentReport::get(const std::string& key) const {
    for (const auto& [k, v] : scalars)
        if (k == key) return v;
    return std::nullopt;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    OutputDir out(cfg.output_dir);
    ExperimentReport rep;
    auto put = [&](const std::string& k, double v) { rep.scalars.emplace_back(k, v); };
    auto put_opt = [&](const std::string& k, const std::optional<double>& v) {
        if (v) put(k, *v);
    };
    if (out.enabled()) {
        auto os = out.open("metadata.txt");
        cfg.write_metadata(os);
    }

    switch (cfg.experiment) {
        case Experiment::aniso_convergence: {
            const auto r = convergence_study(cfg, out);
            for (const auto& row : r.rows) {
                put("l2_error_J" + std::to_string(row.cells), row.l2_error);
                put("max_undershoot_J" + std::to_string(row.cells), row.max_undershoot);
            }
            put_opt("slope_l2", r.l2_slope);
            put_opt("slope_undershoot", r.undershoot_slope);
            break;
        }
        case Experiment::aniso_run: {
            const auto r = anisotropic_run(cfg, out);
            put("l2_error", r.l2_error);
            put("max_error", r.max_error);
            put("max_undershoot", r.max_undershoot);
            put("steps", static_cast<double>(r.trace.steps.size()));
            break;
        }
        case Experiment::lub1d:
        case Experiment::lub2d: {
            const auto r = lubrication_run(cfg, out);
            const auto& s = r.singularity;
            put_opt("onset", s.onset_negative);
            put_opt("onset_touching", s.onset_touching);
            put_opt("liftoff", s.liftoff);
            put("max_length", s.max_length);
            put("max_extent", s.max_extent);
            put("max_trapped_film", s.max_trapped_film);
            put("final_min_pre", r.final_pre.min());
            put("final_mass", mass(r.final_state));
            put("steps", static_cast<double>(r.trace.steps.size()));
            break;
        }
        case Experiment::reg_compare: {
            const auto c = regularization_comparison(cfg, out);
            put_opt("onset_eps0", c.unregularized.onset_negative);
            put_opt("onset_eps", c.regularized.onset_negative);
            put_opt("liftoff_eps0", c.unregularized.liftoff);
            put_opt("liftoff_eps", c.regularized.liftoff);
            put_opt("onset_difference", c.onset_difference);
            put_opt("liftoff_difference", c.liftoff_difference);
            put("max_field_difference", c.max_field_difference);
            put("max_trapped_film_eps0", c.unregularized.max_trapped_film);
            put("max_trapped_film_eps", c.regularized.max_trapped_film);
            put("zero_interval_eps0", c.unregularized_zero_interval ? 1.0 : 0.0);
            put("zero_interval_eps", c.regularized_zero_interval ? 1.0 : 0.0);
            break;
        }
        case Experiment::diagnostics: {
            const auto d = diagnostics(cfg);
            put("samples", static_cast<double>(d.lemmas.samples));
            for (std::size_t i = 0; i < d.lemmas.violations.size(); ++i)
                put("violations_" + std::to_string(i + 1), static_cast<double>(d.lemmas.violations[i]));
            put("b1_inverse_norm", d.scheme.b1_inverse_norm);
            put("amplification_norm", d.scheme.amplification_norm);
            put("growth_constant", d.scheme.growth_constant);
            put("amplification_norm_half_dt", d.scheme_half_dt.amplification_norm);
            put("growth_constant_half_dt", d.scheme_half_dt.growth_constant);
            if (out.enabled()) {
                auto os = out.open("diagnostics.txt");
                for (const auto& [k, v] : rep.scalars) os << k << '=' << format_real(v) << '\n';
            }
            break;
        }
    }
    rep.files = out.files();
    return rep;
}

}  // namespace nonneg
