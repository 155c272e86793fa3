#include "nonneg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "nonneg/io.hpp"

namespace nonneg {

SparseMatrix::SparseMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> cols, std::vector<double> values)
    : n_(n), offsets_(std::move(row_offsets)), cols_(std::move(cols)), values_(std::move(values)) {
    require(offsets_.size() == n_ + 1 && offsets_.front() == 0 && offsets_.back() == cols_.size() &&
                cols_.size() == values_.size(),
            "inconsistent CSR arrays");
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
            require(cols_[k] < n_, "CSR column out of range");
            require(k == offsets_[i] || cols_[k] > cols_[k - 1], "CSR columns not strictly increasing");
            require(std::isfinite(values_[k]) && values_[k] != 0.0, "CSR values must be finite and nonzero");
        }
    }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<double> d(n, 1.0);
    return diagonal(d);
}

SparseMatrix SparseMatrix::zero(std::size_t n) {
    return SparseMatrix(n, std::vector<std::size_t>(n + 1, 0), {}, {});
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
    TripletBuilder b(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) b.add(i, i, d[i]);
    return b.build();
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    require(i < n_ && j < n_, "matrix index out of range");
    const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
    const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - cols_.begin())];
}

std::size_t SparseMatrix::bandwidth() const {
    std::size_t bw = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
            const std::size_t j = cols_[k];
            bw = std::max(bw, i > j ? i - j : j - i);
        }
    }
    return bw;
}

void TripletBuilder::add(std::size_t i, std::size_t j, double v) {
    require(i < n_ && j < n_, "triplet index out of range");
    entries_.push_back({i, j, v});
}

SparseMatrix TripletBuilder::build() const {
    std::vector<Entry> e = entries_;
    std::stable_sort(e.begin(), e.end(),
                     [](const Entry& a, const Entry& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    std::vector<std::size_t> offsets(n_ + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    cols.reserve(e.size());
    vals.reserve(e.size());
    for (std::size_t k = 0; k < e.size();) {
        const std::size_t i = e[k].i;
        const std::size_t j = e[k].j;
        double sum = 0.0;
        for (; k < e.size() && e[k].i == i && e[k].j == j; ++k) sum += e[k].v;
        if (sum != 0.0) {
            cols.push_back(j);
            vals.push_back(sum);
            ++offsets[i + 1];
        }
    }
    for (std::size_t i = 0; i < n_; ++i) offsets[i + 1] += offsets[i];
    return SparseMatrix(n_, std::move(offsets), std::move(cols), std::move(vals));
}

std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x) {
    require(x.size() == a.size(), "matvec dimension mismatch");
    const auto off = a.row_offsets();
    const auto cols = a.cols();
    const auto vals = a.values();
    std::vector<double> y(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) s += vals[k] * x[cols[k]];
        y[i] = s;
    }
    return y;
}

SparseMatrix combine(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b) {
    require(a.size() == b.size(), "combine dimension mismatch");
    TripletBuilder t(a.size());
    t.reserve(a.nonzeros() + b.nonzeros());
    const std::pair<double, const SparseMatrix*> terms[] = {{alpha, &a}, {beta, &b}};
    for (const auto& [s, m] : terms) {
        const auto off = m->row_offsets();
        for (std::size_t i = 0; i < m->size(); ++i)
            for (std::size_t k = off[i]; k < off[i + 1]; ++k) t.add(i, m->cols()[k], s * m->values()[k]);
    }
    return t.build();
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
    require(a.size() == b.size(), "multiply dimension mismatch");
    TripletBuilder t(a.size());
    const auto ao = a.row_offsets();
    const auto bo = b.row_offsets();
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t ka = ao[i]; ka < ao[i + 1]; ++ka) {
            const std::size_t m = a.cols()[ka];
            for (std::size_t kb = bo[m]; kb < bo[m + 1]; ++kb)
                t.add(i, b.cols()[kb], a.values()[ka] * b.values()[kb]);
        }
    }
    return t.build();
}

double operator_norm_inf(const SparseMatrix& a) {
    const auto off = a.row_offsets();
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) s += std::abs(a.values()[k]);
        best = std::max(best, s);
    }
    return best;
}

void write_coordinate(const SparseMatrix& a, std::ostream& os) {
    const auto off = a.row_offsets();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = off[i]; k < off[i + 1]; ++k)
            os << i << ' ' << a.cols()[k] << ' ' << format_real(a.values()[k]) << '\n';
}

namespace {

// Row-pivoted LU of a band matrix with kl sub- and ku super-diagonals. Row k of
// U may fill up to column k + ku + kl. Multipliers of step k are kept apart so
// later row swaps never have to move them.
class BandedLU {
public:
    BandedLU(const SparseMatrix& a, std::size_t kl, std::size_t ku)
        : n_(a.size()), kl_(kl), ku_(ku), width_(2 * kl + ku + 1),
          band_(n_ * width_, 0.0), lower_(n_ * kl_, 0.0), pivots_(n_) {
        const auto off = a.row_offsets();
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = off[i]; k < off[i + 1]; ++k) at(i, a.cols()[k]) = a.values()[k];
        factor();
    }

    void solve_in_place(std::vector<double>& b) const {
        for (std::size_t k = 0; k < n_; ++k) {
            std::swap(b[k], b[pivots_[k]]);
            const std::size_t last = std::min(n_ - 1, k + kl_);
            for (std::size_t i = k + 1; i <= last; ++i) b[i] -= lower_[k * kl_ + (i - k - 1)] * b[k];
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            double s = b[ii];
            const std::size_t last = std::min(n_ - 1, ii + ku_ + kl_);
            for (std::size_t c = ii + 1; c <= last; ++c) s -= at(ii, c) * b[c];
            b[ii] = s / at(ii, ii);
        }
    }

private:
    double& at(std::size_t i, std::size_t c) { return band_[i * width_ + (c + kl_ - i)]; }
    double at(std::size_t i, std::size_t c) const { return band_[i * width_ + (c + kl_ - i)]; }

    void factor() {
        double umax = 0.0;
        double umin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t last_row = std::min(n_ - 1, k + kl_);
            const std::size_t last_col = std::min(n_ - 1, k + ku_ + kl_);
            std::size_t p = k;
            for (std::size_t i = k + 1; i <= last_row; ++i)
                if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
            pivots_[k] = p;
            if (at(p, k) == 0.0) {
                fail(ErrorKind::singular, "banded LU: zero pivot in column " + std::to_string(k));
            }
            if (p != k)
                for (std::size_t c = k; c <= last_col; ++c) std::swap(at(k, c), at(p, c));
            const double piv = at(k, k);
            umax = std::max(umax, std::abs(piv));
            umin = std::min(umin, std::abs(piv));
            for (std::size_t i = k + 1; i <= last_row; ++i) {
                const double m = at(i, k) / piv;
                lower_[k * kl_ + (i - k - 1)] = m;
                at(i, k) = 0.0;
                if (m == 0.0) continue;
                for (std::size_t c = k + 1; c <= last_col; ++c) at(i, c) -= m * at(k, c);
            }
        }
        if (umin <= 1e-15 * umax) {
            fail(ErrorKind::singular, "banded LU: pivot ratio " + format_real(umin / umax) +
                                          " indicates a singular or ill-conditioned matrix");
        }
    }

    std::size_t n_, kl_, ku_, width_;
    std::vector<double> band_;
    std::vector<double> lower_;
    std::vector<std::size_t> pivots_;
};

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen(const SparseMatrix& a) {
    std::vector<Eigen::Triplet<double, int>> t;
    t.reserve(a.nonzeros());
    const auto off = a.row_offsets();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = off[i]; k < off[i + 1]; ++k)
            t.emplace_back(static_cast<int>(i), static_cast<int>(a.cols()[k]), a.values()[k]);
    EigenSparse m(static_cast<int>(a.size()), static_cast<int>(a.size()));
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

struct Factorization::Impl {
    SparseMatrix matrix;
    double matrix_norm = 0.0;
    std::string method;
    std::unique_ptr<BandedLU> banded;
    std::unique_ptr<Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>>> general;

    void raw_solve(std::vector<double>& b) const {
        if (banded) {
            banded->solve_in_place(b);
            return;
        }
        Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
        Eigen::VectorXd x = general->solve(rhs);
        std::copy(x.data(), x.data() + x.size(), b.begin());
    }
};

Factorization::Factorization(const SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
    require(a.size() > 0, "cannot factor an empty matrix");
    impl_->matrix = a;
    impl_->matrix_norm = operator_norm_inf(a);
    const std::size_t bw = a.bandwidth();
    if (bw <= 2) {
        impl_->method = "banded-lu";
        impl_->banded = std::make_unique<BandedLU>(a, bw, bw);
    } else {
        impl_->method = "sparse-lu";
        impl_->general = std::make_unique<Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>>>();
        impl_->general->compute(to_eigen(a));
        if (impl_->general->info() != Eigen::Success) {
            fail(ErrorKind::singular, "sparse LU failed: " + impl_->general->lastErrorMessage());
        }
    }
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

std::size_t Factorization::size() const { return impl_->matrix.size(); }
const std::string& Factorization::method() const { return impl_->method; }

std::vector<double> Factorization::solve(std::span<const double> rhs, double tol,
                                         SolveReport* report) const {
    require(rhs.size() == size(), "solve dimension mismatch");
    require(tol > 0.0, "solve tolerance must be positive");
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (!std::isfinite(rhs[k])) fail(ErrorKind::non_finite, "solve: non-finite rhs at " + std::to_string(k));
    }
    const double rhs_scale = std::max(1.0, inf_norm(rhs));
    std::vector<double> x(rhs.begin(), rhs.end());
    impl_->raw_solve(x);

    auto scaled_residual = [&](std::vector<double>& r) {
        r = matvec(impl_->matrix, x);
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = rhs[k] - r[k];
        return inf_norm(r) / rhs_scale;
    };
    auto bound = [&] {
        return tol * std::max(1.0, impl_->matrix_norm * inf_norm(x) / rhs_scale);
    };

    std::vector<double> r;
    double res = scaled_residual(r);
    int sweeps = 0;
    while (!(res <= bound()) && sweeps < 2) {
        impl_->raw_solve(r);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += r[k];
        res = scaled_residual(r);
        ++sweeps;
    }
    if (report) *report = SolveReport{res, sweeps, impl_->method};
    if (!std::isfinite(res) || !(res <= bound())) {
        fail(ErrorKind::not_converged, impl_->method + ": residual " + format_real(res) +
                                           " above tolerance " + format_real(bound()));
    }
    return x;
}

std::pair<std::vector<double>, SolveReport> solve(const SparseMatrix& a, std::span<const double> rhs,
                                                  double tol) {
    Factorization f(a);
    SolveReport rep;
    auto x = f.solve(rhs, tol, &rep);
    return {std::move(x), rep};
}

namespace {

template <typename ColumnFn>
double inverse_apply_norm(const Factorization& a, ColumnFn&& column) {
    const std::size_t n = a.size();
    require(n <= max_explicit_inverse_size, "explicit inverse limited to n <= 2500");
    std::vector<double> row_sums(n, 0.0);
    std::vector<double> e(n);
    for (std::size_t j = 0; j < n; ++j) {
        column(j, e);
        const auto x = a.solve(e);
        for (std::size_t i = 0; i < n; ++i) row_sums[i] += std::abs(x[i]);
    }
    return inf_norm(row_sums);
}

}  // namespace

double inverse_norm_inf(const Factorization& a) {
    return inverse_apply_norm(a, [](std::size_t j, std::vector<double>& e) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
    });
}

double inverse_product_norm_inf(const Factorization& a, const SparseMatrix& b) {
    require(b.size() == a.size(), "dimension mismatch");
    // Column access to b through its transpose.
    TripletBuilder tb(b.size());
    const auto off = b.row_offsets();
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) tb.add(b.cols()[k], i, b.values()[k]);
    const SparseMatrix bt = tb.build();
    return inverse_apply_norm(a, [&](std::size_t j, std::vector<double>& e) {
        std::fill(e.begin(), e.end(), 0.0);
        const auto o = bt.row_offsets();
        for (std::size_t k = o[j]; k < o[j + 1]; ++k) e[bt.cols()[k]] = bt.values()[k];
    });
}

}  // namespace nonneg
