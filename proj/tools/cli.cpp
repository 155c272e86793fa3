#include "cli.hpp"

#include <CLI11.hpp>

#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nonneg/nonneg.h"

namespace nonneg::cli {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

struct Flags {
    std::vector<int> grid;
    double dt = 0.0;
    double t_end = 0.0;
    std::string cutoff;
    double delta_coefficient = 1.0;
    double epsilon = 0.0;
    std::vector<double> convection;
    std::string integrator;
    double theta = 1.0;
    std::string out;
    std::vector<double> snapshots;
    std::uint64_t seed = 0;
    long samples = 0;
    unsigned threads = 0;
};

// Options shared by every subcommand. Pointers let us tell "given" from default.
struct Options {
    CLI::Option* grid;
    CLI::Option* dt;
    CLI::Option* t_end;
    CLI::Option* cutoff;
    CLI::Option* delta_coefficient;
    CLI::Option* epsilon;
    CLI::Option* convection;
    CLI::Option* integrator;
    CLI::Option* theta;
    CLI::Option* out;
    CLI::Option* snapshots;
    CLI::Option* seed;
    CLI::Option* samples;
    CLI::Option* threads;
};

Options add_options(CLI::App& sub, Flags& f) {
    Options o{};
    o.grid = sub.add_option("-J,--grid", f.grid, "Cells per direction; comma-separated list for studies")
                 ->delimiter(',');
    o.dt = sub.add_option("--dt", f.dt, "Time step");
    o.t_end = sub.add_option("--t-end", f.t_end, "Final time");
    o.cutoff = sub.add_option("--cutoff", f.cutoff, "Cutoff between steps")
                   ->check(CLI::IsMember({"off", "nonneg", "delta"}));
    o.delta_coefficient = sub.add_option("--delta-coeff", f.delta_coefficient,
                                         "delta = coeff * dt * h^2 in delta mode");
    o.epsilon = sub.add_option("--epsilon", f.epsilon, "Mobility regularization");
    o.convection = sub.add_option("--convection", f.convection, "Convection vector bx,by")
                       ->delimiter(',')
                       ->expected(2);
    o.integrator = sub.add_option("--integrator", f.integrator, "Time integrator")
                       ->check(CLI::IsMember({"sdirk3", "theta"}));
    o.theta = sub.add_option("--theta", f.theta, "Theta for --integrator theta");
    o.out = sub.add_option("--out", f.out, "Output directory");
    o.snapshots = sub.add_option("--snapshots", f.snapshots, "Snapshot times t1,t2,...")->delimiter(',');
    o.seed = sub.add_option("--seed", f.seed, "Seed for randomized checks");
    o.samples = sub.add_option("--samples", f.samples, "Randomized samples (diagnostics)");
    o.threads = sub.add_option("--threads", f.threads, "Worker threads (0 = all cores)");
    return o;
}

struct ConfigDeleter {
    void operator()(nn_config* c) const { nn_config_destroy(c); }
};
struct ReportDeleter {
    void operator()(nn_report* r) const { nn_report_destroy(r); }
};

int exit_code(nn_status s) {
    if (s == NN_OK) return exit_ok;
    return s == NN_INVALID_ARGUMENT ? exit_usage : exit_failure;
}

// Applies the given flags to a fresh config; returns the first failing status.
nn_status configure(nn_config* c, const Options& o, const Flags& f) {
    nn_status s = NN_OK;
    auto apply = [&](bool given, auto&& call) {
        if (s == NN_OK && given) s = call();
    };
    apply(o.grid->count() > 0, [&] { return nn_config_set_resolutions(c, f.grid.data(), f.grid.size()); });
    apply(o.dt->count() > 0, [&] { return nn_config_set_dt(c, f.dt); });
    apply(o.t_end->count() > 0, [&] { return nn_config_set_t_end(c, f.t_end); });
    apply(o.cutoff->count() > 0, [&] { return nn_config_set_cutoff(c, f.cutoff.c_str()); });
    apply(o.delta_coefficient->count() > 0,
          [&] { return nn_config_set_delta_coefficient(c, f.delta_coefficient); });
    apply(o.epsilon->count() > 0, [&] { return nn_config_set_epsilon(c, f.epsilon); });
    apply(o.convection->count() > 0,
          [&] { return nn_config_set_convection(c, f.convection.at(0), f.convection.at(1)); });
    apply(o.integrator->count() > 0 || o.theta->count() > 0, [&] {
        const std::string name = f.integrator.empty() ? "theta" : f.integrator;
        return nn_config_set_integrator(c, name.c_str(), f.theta);
    });
    apply(o.out->count() > 0, [&] { return nn_config_set_output_dir(c, f.out.c_str()); });
    apply(o.snapshots->count() > 0,
          [&] { return nn_config_set_snapshot_times(c, f.snapshots.data(), f.snapshots.size()); });
    apply(o.seed->count() > 0, [&] { return nn_config_set_seed(c, f.seed); });
    apply(o.samples->count() > 0, [&] { return nn_config_set_samples(c, f.samples); });
    apply(o.threads->count() > 0, [&] { return nn_config_set_threads(c, f.threads); });
    return s;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cutoff-stabilized parabolic solvers: convergence studies and thin-film runs"};
    app.name("nonneg-cli");
    app.require_subcommand(1);

    struct Command {
        const char* name;
        const char* help;
    };
    const Command commands[] = {
        {"aniso-convergence", "Anisotropic manufactured-solution convergence study"},
        {"aniso-run", "Single anisotropic run with trace and snapshots"},
        {"lub1d", "1D thin-film run with singularity tracking"},
        {"lub2d", "2D thin-film run"},
        {"reg-compare", "Regularized vs unregularized thin-film comparison"},
        {"diagnostics", "Randomized cutoff inequality check and scheme stability witnesses"},
    };
    Flags flags;
    std::vector<std::pair<CLI::App*, Options>> subs;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        subs.emplace_back(sub, add_options(*sub, flags));
    }

    if (argc <= 1) {
        err << app.help();
        return exit_usage;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        err << app.help();
        return exit_usage;
    }

    for (const auto& [sub, opts] : subs) {
        if (!sub->parsed()) continue;
        nn_config* raw = nullptr;
        nn_status s = nn_config_create(sub->get_name().c_str(), &raw);
        std::unique_ptr<nn_config, ConfigDeleter> cfg(raw);
        if (s == NN_OK) s = configure(cfg.get(), opts, flags);
        if (s == NN_OK) s = nn_config_validate(cfg.get());
        if (s != NN_OK) {
            err << "error: " << nn_last_error() << '\n';
            return exit_code(s);
        }
        nn_report* rraw = nullptr;
        s = nn_run(cfg.get(), &rraw);
        std::unique_ptr<nn_report, ReportDeleter> rep(rraw);
        if (s != NN_OK) {
            err << "error (" << nn_status_name(s) << "): " << nn_last_error() << '\n';
            return exit_code(s) == exit_usage ? exit_usage : exit_failure;
        }
        for (std::size_t i = 0; i < nn_report_size(rep.get()); ++i) {
            const char* key = nullptr;
            double value = 0.0;
            nn_report_entry(rep.get(), i, &key, &value);
            std::ostringstream v;
            v.precision(17);
            v << value;
            out << key << '=' << v.str() << '\n';
        }
        for (std::size_t i = 0; i < nn_report_file_count(rep.get()); ++i)
            out << "wrote " << nn_report_file(rep.get(), i) << '\n';
        return exit_ok;
    }
    err << app.help();
    return exit_usage;
}

}  // namespace nonneg::cli
