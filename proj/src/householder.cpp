#include "hhdl/householder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hhdl {

namespace {

thread_local std::uint64_t* tl_ops = nullptr;

#ifdef HHDL_OP_COUNTING
inline void tally(std::uint64_t n) {
    if (tl_ops) *tl_ops += n;
}
#else
inline void tally(std::uint64_t) {}
#endif

constexpr double kUnitTol = 1e-8;
constexpr double kZeroSnap = 1e-12;

void check_dim(const Reflector& r, std::size_t n, const char* where) {
    if (r.u.size() != n)
        throw std::invalid_argument(std::string(where) + ": reflector length " +
                                    std::to_string(r.u.size()) + " does not match dimension " +
                                    std::to_string(n));
}

} // namespace

bool Reflector::is_zero() const {
    for (double v : u)
        if (v != 0.0) return false;
    return true;
}

void snap_unit_or_zero(std::vector<double>& u) {
    const double nrm = norm2(u);
    if (nrm < kZeroSnap) {
        u.assign(u.size(), 0.0);
    } else if (std::abs(nrm - 1.0) > 1e-14) {
        scale_in_place(u, 1.0 / nrm);
    }
}

HouseholderDictionary make_reflector_dictionary(std::size_t dim,
                                                std::vector<std::vector<double>> units,
                                                bool orthogonal_set) {
    HouseholderDictionary d;
    d.dim = dim;
    d.orthogonal_set = orthogonal_set;
    d.reflectors.reserve(units.size());
    for (std::size_t k = 0; k < units.size(); ++k) {
        auto& u = units[k];
        if (u.size() != dim)
            throw std::invalid_argument("reflector " + std::to_string(k) + " has length " +
                                        std::to_string(u.size()) + ", expected " +
                                        std::to_string(dim));
        const double nrm = norm2(u);
        if (nrm >= kZeroSnap && std::abs(nrm - 1.0) > kUnitTol)
            throw std::invalid_argument("reflector " + std::to_string(k) +
                                        " is neither unit nor zero (norm " + std::to_string(nrm) +
                                        ")");
        snap_unit_or_zero(u);
        d.reflectors.push_back(Reflector{std::move(u)});
    }
    return d;
}

void validate_dictionary(const HouseholderDictionary& d) {
    for (std::size_t k = 0; k < d.reflectors.size(); ++k) {
        const auto& u = d.reflectors[k].u;
        if (u.size() != d.dim)
            throw std::invalid_argument("reflector " + std::to_string(k) + " length mismatch");
        const double nrm = norm2(u);
        if (nrm > kZeroSnap && std::abs(nrm - 1.0) > kUnitTol)
            throw std::invalid_argument("reflector " + std::to_string(k) +
                                        " is neither unit nor zero");
    }
}

void reflect_in_place(const Reflector& r, std::span<double> x) {
    const std::size_t n = x.size();
    check_dim(r, n, "reflect");
    const double* u = r.u.data();
    double nu = 0.0;
    for (std::size_t i = 0; i < n; ++i) nu += u[i] * x[i];
    nu *= 2.0;
    tally(2 * n);
    for (std::size_t i = 0; i < n; ++i) x[i] -= nu * u[i];
    tally(2 * n);
}

std::vector<double> reflect_vector(const Reflector& r, std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    reflect_in_place(r, y);
    return y;
}

void reflect_columns_in_place(const Reflector& r, Matrix& x) {
    const std::size_t n = x.rows(), cols = x.cols();
    check_dim(r, n, "reflect_columns");
    const double* u = r.u.data();
    // v = 2 X'u, accumulated row by row: n*cols multiplies, (n-1)*cols
    // adds, cols scalings -> 2n per column.
    std::vector<double> v(cols, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double ui = u[i];
        const double* xi = x.row(i);
        for (std::size_t j = 0; j < cols; ++j) v[j] += ui * xi[j];
    }
    for (std::size_t j = 0; j < cols; ++j) v[j] *= 2.0;
    tally(2 * n * cols);
    // X -= u v': n*cols multiplies plus n*cols subtractions -> 2n per column.
    for (std::size_t i = 0; i < n; ++i) {
        const double ui = u[i];
        double* xi = x.row(i);
        for (std::size_t j = 0; j < cols; ++j) xi[j] -= ui * v[j];
    }
    tally(2 * n * cols);
}

void reflect_rows_in_place(const Reflector& r, Matrix& x) {
    const std::size_t rows = x.rows(), n = x.cols();
    check_dim(r, n, "reflect_rows");
    const double* u = r.u.data();
    for (std::size_t i = 0; i < rows; ++i) {
        double* xi = x.row(i);
        double nu = 0.0;
        for (std::size_t j = 0; j < n; ++j) nu += xi[j] * u[j];
        nu *= 2.0;
        for (std::size_t j = 0; j < n; ++j) xi[j] -= nu * u[j];
    }
    tally(4 * n * rows);
}

void dict_apply_in_place(const HouseholderDictionary& d, Matrix& x) {
    if (x.rows() != d.dim) throw std::invalid_argument("dict_apply: dimension mismatch");
    for (const Reflector& r : d.reflectors) reflect_columns_in_place(r, x);
}

void dict_apply_adjoint_in_place(const HouseholderDictionary& d, Matrix& y) {
    if (y.rows() != d.dim) throw std::invalid_argument("dict_apply_adjoint: dimension mismatch");
    for (auto it = d.reflectors.rbegin(); it != d.reflectors.rend(); ++it)
        reflect_columns_in_place(*it, y);
}

Matrix dict_apply(const HouseholderDictionary& d, const Matrix& x) {
    Matrix out = x;
    dict_apply_in_place(d, out);
    return out;
}

Matrix dict_apply_adjoint(const HouseholderDictionary& d, const Matrix& y) {
    Matrix out = y;
    dict_apply_adjoint_in_place(d, out);
    return out;
}

Matrix dict_to_dense(const HouseholderDictionary& d) {
    if (d.orthogonal_set) {
        // U = I - 2 sum u_j u_j', exactly symmetric by construction.
        Matrix b = Matrix::identity(d.dim);
        for (const Reflector& r : d.reflectors) {
            if (r.is_zero()) continue;
            for (std::size_t i = 0; i < d.dim; ++i) {
                const double f = 2.0 * r.u[i];
                double* bi = b.row(i);
                for (std::size_t j = 0; j < d.dim; ++j) bi[j] -= f * r.u[j];
            }
        }
        return b;
    }
    return dict_apply(d, Matrix::identity(d.dim));
}

namespace {

// Annihilating reflector for column `col` of the working matrix, acting on
// rows col..n-1. Returns the sign landing on the diagonal. An already
// reduced column yields the zero reflector and keeps its diagonal sign.
double column_annihilator(const Matrix& w, std::size_t col, std::vector<double>& u_out) {
    const std::size_t n = w.rows();
    u_out.assign(n, 0.0);
    double below_sq = 0.0;
    for (std::size_t i = col + 1; i < n; ++i) below_sq += w(i, col) * w(i, col);
    const double x0 = w(col, col);
    const double alpha = std::sqrt(x0 * x0 + below_sq);
    if (std::sqrt(below_sq) <= kZeroSnap * std::max(alpha, 1e-300))
        return x0 < 0.0 ? -1.0 : 1.0;

    const double g = (x0 >= 0.0) ? -alpha : alpha;  // cancellation-free branch
    u_out[col] = x0 - g;
    for (std::size_t i = col + 1; i < n; ++i) u_out[i] = w(i, col);
    const double nrm = norm2(u_out);
    scale_in_place(u_out, 1.0 / nrm);
    return g < 0.0 ? -1.0 : 1.0;
}

void check_orthonormal(const Matrix& q, const char* where) {
    Matrix gram = multiply_at_b(q, q);
    for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) -= 1.0;
    if (max_abs(gram) > 1e-8)
        throw std::invalid_argument(std::string(where) + ": input columns not orthonormal within 1e-8");
}

} // namespace

std::pair<HouseholderDictionary, SignDiagonal> factorize_orthonormal(const Matrix& q) {
    if (q.rows() != q.cols() || q.rows() == 0)
        throw std::invalid_argument("factorize_orthonormal: matrix not square");
    check_orthonormal(q, "factorize_orthonormal");

    const std::size_t n = q.rows();
    Matrix w = q;
    std::vector<std::vector<double>> generated;  // annihilation order, column 0 first
    SignDiagonal signs;
    signs.entries.resize(n);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        std::vector<double> u;
        signs.entries[j] = column_annihilator(w, j, u);
        Reflector r{u};
        if (!r.is_zero()) reflect_columns_in_place(r, w);
        generated.push_back(std::move(u));
    }
    signs.entries[n - 1] = w(n - 1, n - 1) < 0.0 ? -1.0 : 1.0;

    // Reverse into application order: the column-0 annihilator must act
    // first under the adjoint, i.e. sit in the last slot.
    std::vector<std::vector<double>> units(generated.rbegin(), generated.rend());
    return {make_reflector_dictionary(n, std::move(units), false), std::move(signs)};
}

HouseholderDictionary triangularize_basis(const Matrix& q) {
    if (q.cols() == 0 || q.rows() < q.cols())
        throw std::invalid_argument("triangularize_basis: need a tall basis with at least one column");
    check_orthonormal(q, "triangularize_basis");

    const std::size_t m = q.cols() - 1;
    Matrix w = q;
    std::vector<std::vector<double>> generated;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> u;
        column_annihilator(w, j, u);
        Reflector r{u};
        if (!r.is_zero()) reflect_columns_in_place(r, w);
        generated.push_back(std::move(u));
    }
    std::vector<std::vector<double>> units(generated.rbegin(), generated.rend());
    return make_reflector_dictionary(q.rows(), std::move(units), false);
}

double reflector_set_drift(const HouseholderDictionary& d) {
    double drift = 0.0;
    for (std::size_t i = 0; i < d.reflectors.size(); ++i) {
        const auto& ui = d.reflectors[i].u;
        if (d.reflectors[i].is_zero()) continue;
        drift = std::max(drift, std::abs(norm2(ui) - 1.0));
        for (std::size_t j = i + 1; j < d.reflectors.size(); ++j) {
            if (d.reflectors[j].is_zero()) continue;
            drift = std::max(drift, std::abs(dot(ui, d.reflectors[j].u)));
        }
    }
    return drift;
}

bool op_counting_enabled() {
#ifdef HHDL_OP_COUNTING
    return true;
#else
    return false;
#endif
}

OpCountScope::OpCountScope() : prev_(tl_ops) { tl_ops = &count_; }

OpCountScope::~OpCountScope() { tl_ops = prev_; }

} // namespace hhdl
