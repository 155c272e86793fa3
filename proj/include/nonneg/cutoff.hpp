#pragma once

#include <array>
#include <span>

#include "nonneg/mesh.hpp"

namespace nonneg {

/// Floor value for the delta-cutoff. delta = 0 is the plain nonnegative part.
class CutoffParams {
public:
    explicit CutoffParams(double delta = 0.0);
    double delta() const { return delta_; }

private:
    double delta_;
};

/// f+ = max(f, 0) nodewise. Nonnegative entries are copied bit for bit.
Field cutoff_nonneg(const Field& f);

/// f+_delta = max(f, delta) nodewise.
Field cutoff_delta(const Field& f, CutoffParams p);

/// In-place variant used by the stepper. Rejects NaN/Inf with the node index.
void apply_cutoff(std::span<double> values, CutoffParams p);

/// Worst-case slack of the two nonnegative-part inequalities over all nodes:
///   first  = max_x |f+ - u| - |f - u|
///   second = max_x |f+ - f| - |u - f|
/// Both are <= 0 whenever u >= 0. Test oracle, not used by the solver.
struct LemmaGap {
    double first;
    double second;
};

LemmaGap lemma_gap(std::span<const double> f, std::span<const double> u);
LemmaGap lemma_gap(const Field& f, const Field& u);

/// Checks all five cutoff inequalities at every node with exact comparisons:
///   |f+ - u| <= |f - u|,  |f+ - f| <= |u - f|,
///   |f+_d - f+| <= d,     |f+_d - u| <= |f - u| + d,
///   and |f+_d - u+_d| <= |f - u| (the floor map is nonexpansive).
/// Requires u >= 0 and d >= 0.
bool cutoff_inequalities_hold(std::span<const double> f, std::span<const double> u, double delta);

/// One flag per inequality above, in the same order, for a single point.
std::array<bool, 5> cutoff_inequalities(double f, double u, double delta);

}  // namespace nonneg
