#include "nonneg/cutoff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace nonneg {

CutoffParams::CutoffParams(double delta) : delta_(delta) {
    require(std::isfinite(delta) && delta >= 0.0, "cutoff delta must be finite and >= 0");
}

void apply_cutoff(std::span<double> values, CutoffParams p) {
    check_finite(values, "cutoff");
    const double d = p.delta();
    for (double& v : values) {
        if (!(v >= d)) v = d;
    }
}

Field cutoff_nonneg(const Field& f) { return cutoff_delta(f, CutoffParams(0.0)); }

Field cutoff_delta(const Field& f, CutoffParams p) {
    Field out = f;
    apply_cutoff(out.values(), p);
    return out;
}

namespace {

void require_lemma_inputs(std::span<const double> f, std::span<const double> u) {
    require(f.size() == u.size(), "lemma check: length mismatch");
    check_finite(f, "lemma check f");
    check_finite(u, "lemma check u");
    for (std::size_t k = 0; k < u.size(); ++k) {
        require(u[k] >= 0.0, "lemma check: u negative at node " + std::to_string(k));
    }
}

double pos(double v) { return v >= 0.0 ? v : 0.0; }

}  // namespace

LemmaGap lemma_gap(std::span<const double> f, std::span<const double> u) {
    require_lemma_inputs(f, u);
    LemmaGap g{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double fp = pos(f[k]);
        g.first = std::max(g.first, std::abs(fp - u[k]) - std::abs(f[k] - u[k]));
        g.second = std::max(g.second, std::abs(fp - f[k]) - std::abs(u[k] - f[k]));
    }
    return g;
}

LemmaGap lemma_gap(const Field& f, const Field& u) {
    require(f.grid() == u.grid(), "lemma check across different grids");
    return lemma_gap(f.values(), u.values());
}

std::array<bool, 5> cutoff_inequalities(double f, double u, double delta) {
    require(u >= 0.0 && delta >= 0.0, "cutoff inequalities need u >= 0 and delta >= 0");
    const double fp = pos(f);
    const double fd = f >= delta ? f : delta;
    const double ud = u >= delta ? u : delta;
    return {
        std::abs(fp - u) <= std::abs(f - u),
        std::abs(fp - f) <= std::abs(u - f),
        std::abs(fd - fp) <= delta,
        std::abs(fd - u) <= std::abs(f - u) + delta,
        std::abs(fd - ud) <= std::abs(f - u),
    };
}

bool cutoff_inequalities_hold(std::span<const double> f, std::span<const double> u, double delta) {
    require_lemma_inputs(f, u);
    require(delta >= 0.0, "delta must be >= 0");
    for (std::size_t k = 0; k < f.size(); ++k) {
        for (bool ok : cutoff_inequalities(f[k], u[k], delta))
            if (!ok) return false;
    }
    return true;
}

}  // namespace nonneg
