#include "nonneg/nonneg.h"

#include <exception>
#include <new>
#include <string>

#include "nonneg/cutoff.hpp"
#include "nonneg/harness.hpp"

struct nn_config {
    nonneg::ExperimentConfig cfg;
};

struct nn_report {
    nonneg::ExperimentReport rep;
};

namespace {

thread_local std::string last_error;

nn_status status_of(nonneg::ErrorKind kind) {
    using nonneg::ErrorKind;
    switch (kind) {
        case ErrorKind::invalid_argument: return NN_INVALID_ARGUMENT;
        case ErrorKind::non_finite: return NN_NON_FINITE;
        case ErrorKind::singular: return NN_SINGULAR;
        case ErrorKind::not_converged: return NN_NOT_CONVERGED;
        case ErrorKind::domain: return NN_DOMAIN;
        case ErrorKind::diverged: return NN_DIVERGED;
        case ErrorKind::io: return NN_IO;
    }
    return NN_INTERNAL;
}

/// Runs fn, translating exceptions into status codes; never lets one escape.
template <class Fn>
nn_status guarded(Fn&& fn) {
    try {
        fn();
        last_error.clear();
        return NN_OK;
    } catch (const nonneg::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return NN_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return NN_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return NN_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    nonneg::require(p != nullptr, std::string(what) + " must not be null");
}

}  // namespace

extern "C" {

const char* nn_last_error(void) { return last_error.c_str(); }

const char* nn_status_name(nn_status status) {
    switch (status) {
        case NN_OK: return "ok";
        case NN_INVALID_ARGUMENT: return "invalid_argument";
        case NN_NON_FINITE: return "non_finite";
        case NN_SINGULAR: return "singular";
        case NN_NOT_CONVERGED: return "not_converged";
        case NN_DOMAIN: return "domain";
        case NN_DIVERGED: return "diverged";
        case NN_IO: return "io";
        case NN_INTERNAL: return "internal";
    }
    return "unknown";
}

nn_status nn_config_create(const char* experiment, nn_config** out) {
    return guarded([&] {
        need(experiment, "experiment");
        need(out, "out");
        *out = nullptr;
        auto* c = new nn_config{nonneg::ExperimentConfig::defaults(nonneg::parse_experiment(experiment))};
        *out = c;
    });
}

void nn_config_destroy(nn_config* cfg) { delete cfg; }

nn_status nn_config_set_resolutions(nn_config* cfg, const int* cells, size_t count) {
    return guarded([&] {
        need(cfg, "config");
        nonneg::require(count > 0, "at least one resolution is required");
        need(cells, "cells");
        cfg->cfg.resolutions.assign(cells, cells + count);
    });
}

nn_status nn_config_set_dt(nn_config* cfg, double dt) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.dt = dt;
    });
}

nn_status nn_config_set_t_end(nn_config* cfg, double t_end) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.t_end = t_end;
    });
}

nn_status nn_config_set_cutoff(nn_config* cfg, const char* mode) {
    return guarded([&] {
        need(cfg, "config");
        need(mode, "mode");
        cfg->cfg.cutoff = nonneg::parse_cutoff_mode(mode);
    });
}

nn_status nn_config_set_delta_coefficient(nn_config* cfg, double coefficient) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.delta_coefficient = coefficient;
    });
}

nn_status nn_config_set_epsilon(nn_config* cfg, double epsilon) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.epsilon = epsilon;
    });
}

nn_status nn_config_set_convection(nn_config* cfg, double bx, double by) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.convection = {bx, by};
    });
}

nn_status nn_config_set_integrator(nn_config* cfg, const char* name, double theta) {
    return guarded([&] {
        need(cfg, "config");
        need(name, "name");
        const std::string n = name;
        if (n == "sdirk3") {
            cfg->cfg.integrator = nonneg::Sdirk3{};
        } else if (n == "theta") {
            nonneg::require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0, 1]");
            cfg->cfg.integrator = nonneg::ThetaMethod{theta};
        } else {
            nonneg::fail(nonneg::ErrorKind::invalid_argument, "unknown integrator '" + n + "'");
        }
    });
}

nn_status nn_config_set_output_dir(nn_config* cfg, const char* dir) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.output_dir = dir ? std::filesystem::path(dir) : std::filesystem::path();
    });
}

nn_status nn_config_set_snapshot_times(nn_config* cfg, const double* times, size_t count) {
    return guarded([&] {
        need(cfg, "config");
        if (count) need(times, "times");
        cfg->cfg.snapshot_times.assign(times, times + count);
    });
}

nn_status nn_config_set_seed(nn_config* cfg, uint64_t seed) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.seed = seed;
    });
}

nn_status nn_config_set_samples(nn_config* cfg, long samples) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.samples = samples;
    });
}

nn_status nn_config_set_threads(nn_config* cfg, unsigned threads) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.threads = threads;
    });
}

nn_status nn_config_validate(const nn_config* cfg) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.validate();
    });
}

nn_status nn_run(const nn_config* cfg, nn_report** out) {
    return guarded([&] {
        need(cfg, "config");
        need(out, "out");
        *out = nullptr;
        auto rep = nonneg::run_experiment(cfg->cfg);
        *out = new nn_report{std::move(rep)};
    });
}

void nn_report_destroy(nn_report* report) { delete report; }

size_t nn_report_size(const nn_report* report) { return report ? report->rep.scalars.size() : 0; }

nn_status nn_report_entry(const nn_report* report, size_t index, const char** key, double* value) {
    return guarded([&] {
        need(report, "report");
        nonneg::require(index < report->rep.scalars.size(), "report index out of range");
        const auto& [k, v] = report->rep.scalars[index];
        if (key) *key = k.c_str();
        if (value) *value = v;
    });
}

nn_status nn_report_get(const nn_report* report, const char* key, double* value) {
    return guarded([&] {
        need(report, "report");
        need(key, "key");
        need(value, "value");
        const auto v = report->rep.get(key);
        nonneg::require(v.has_value(), std::string("report has no entry '") + key + "'");
        *value = *v;
    });
}

size_t nn_report_file_count(const nn_report* report) { return report ? report->rep.files.size() : 0; }

const char* nn_report_file(const nn_report* report, size_t index) {
    if (!report || index >= report->rep.files.size()) return nullptr;
    return report->rep.files[index].c_str();
}

nn_status nn_cutoff_apply(double* values, size_t count, double delta) {
    return guarded([&] {
        if (count) need(values, "values");
        nonneg::apply_cutoff(std::span<double>(values, count), nonneg::CutoffParams(delta));
    });
}

nn_status nn_lemma_check(uint64_t seed, long samples, long violations[5]) {
    return guarded([&] {
        need(violations, "violations");
        const auto rep = nonneg::randomized_lemma_check(seed, samples);
        for (int i = 0; i < 5; ++i) violations[i] = rep.violations[i];
    });
}

}  // extern "C"
