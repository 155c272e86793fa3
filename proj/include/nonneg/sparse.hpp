#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nonneg/error.hpp"

namespace nonneg {

/// Square matrix in compressed sparse row layout. Column indices are strictly
/// increasing within a row and no stored value is zero.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
                 std::vector<std::size_t> cols, std::vector<double> values);

    static SparseMatrix identity(std::size_t n);
    static SparseMatrix zero(std::size_t n);
    /// Diagonal matrix with the given entries (zeros dropped).
    static SparseMatrix diagonal(std::span<const double> d);

    std::size_t size() const { return n_; }
    std::size_t nonzeros() const { return values_.size(); }
    std::span<const std::size_t> row_offsets() const { return offsets_; }
    std::span<const std::size_t> cols() const { return cols_; }
    std::span<const double> values() const { return values_; }

    /// Entry lookup (binary search within the row); 0 for structural zeros.
    double at(std::size_t i, std::size_t j) const;
    /// Largest |i - j| over stored entries.
    std::size_t bandwidth() const;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
};

/// Coordinate-format accumulator. Duplicates are summed, exact zeros dropped.
class TripletBuilder {
public:
    explicit TripletBuilder(std::size_t n) : n_(n) {}
    void add(std::size_t i, std::size_t j, double v);
    void reserve(std::size_t count) { entries_.reserve(count); }
    SparseMatrix build() const;

private:
    struct Entry {
        std::size_t i, j;
        double v;
    };
    std::size_t n_;
    std::vector<Entry> entries_;
};

std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x);
/// alpha*a + beta*b.
SparseMatrix combine(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b);
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
/// Max absolute row sum.
double operator_norm_inf(const SparseMatrix& a);

/// Writes `row col value` lines (0-based), one per stored entry.
void write_coordinate(const SparseMatrix& a, std::ostream& os);

struct SolveReport {
    double residual_norm = 0.0;  ///< ||a x - rhs||_inf / max(1, ||rhs||_inf)
    int iterations = 0;          ///< refinement sweeps for direct solves
    std::string method;
};

/// Default tolerance. Checked against the scaled residual above after
/// multiplying by max(1, ||a||_inf ||x||_inf / max(1, ||rhs||_inf)), i.e. the
/// backward-error scale of the system, so stiff operators with large entries
/// are not held to a bound below rounding.
inline constexpr double default_solve_tol = 1e-12;

/// LU factorization of a square sparse matrix. Matrices with half-bandwidth
/// <= 2 use a banded LU with partial pivoting; everything else goes through a
/// general sparse LU. Immutable after construction; solve() allocates its own
/// workspace so one factorization may be shared across threads.
class Factorization {
public:
    explicit Factorization(const SparseMatrix& a);
    ~Factorization();
    Factorization(Factorization&&) noexcept;
    Factorization& operator=(Factorization&&) noexcept;

    std::size_t size() const;
    const std::string& method() const;

    /// Solves, re-verifies the residual and applies up to two refinement
    /// sweeps. Throws not_converged when the residual stays above tol.
    std::vector<double> solve(std::span<const double> rhs, double tol = default_solve_tol,
                              SolveReport* report = nullptr) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::pair<std::vector<double>, SolveReport> solve(const SparseMatrix& a, std::span<const double> rhs,
                                                  double tol = default_solve_tol);

/// ||a^{-1}||_inf and ||a^{-1} b||_inf by solving against every unit vector.
/// Limited to n <= max_explicit_inverse_size.
inline constexpr std::size_t max_explicit_inverse_size = 2500;
double inverse_norm_inf(const Factorization& a);
double inverse_product_norm_inf(const Factorization& a, const SparseMatrix& b);

}  // namespace nonneg
