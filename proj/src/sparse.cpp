#include "hhdl/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hhdl {

Matrix SparseCodeMatrix::to_dense() const {
    Matrix d(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (const SparseEntry& e : columns[j]) d(e.index, j) = e.value;
    return d;
}

double SparseCodeMatrix::frob_sq() const {
    double s = 0.0;
    for (const auto& col : columns)
        for (const SparseEntry& e : col) s += e.value * e.value;
    return s;
}

std::size_t SparseCodeMatrix::nonzeros() const {
    std::size_t c = 0;
    for (const auto& col : columns) c += col.size();
    return c;
}

SparseCodeMatrix hard_threshold_top_s(const Matrix& a, std::size_t s) {
    if (s == 0) throw std::invalid_argument("hard_threshold_top_s: s must be positive");
    const std::size_t n = a.rows(), cols = a.cols();
    SparseCodeMatrix x;
    x.rows = n;
    x.cols = cols;
    x.budget = s;
    x.columns.resize(cols);

    const std::size_t keep = std::min(s, n);
    std::vector<std::uint32_t> idx(n);
    std::vector<double> col(n);
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = a(i, j);
        std::iota(idx.begin(), idx.end(), 0u);
        auto larger = [&](std::uint32_t p, std::uint32_t q) {
            const double ap = std::abs(col[p]), aq = std::abs(col[q]);
            if (ap != aq) return ap > aq;
            return p < q;
        };
        if (keep < n)
            std::nth_element(idx.begin(), idx.begin() + keep, idx.end(), larger);
        std::sort(idx.begin(), idx.begin() + keep);
        auto& out = x.columns[j];
        out.reserve(keep);
        for (std::size_t k = 0; k < keep; ++k)
            if (col[idx[k]] != 0.0) out.push_back({idx[k], col[idx[k]]});
    }
    return x;
}

OmpResult omp_cholesky(const Matrix& dict, std::span<const double> y, std::size_t s) {
    const std::size_t n = dict.rows(), natoms = dict.cols();
    if (y.size() != n) throw std::invalid_argument("omp_cholesky: signal length mismatch");
    if (s == 0) throw std::invalid_argument("omp_cholesky: s must be positive");
    for (std::size_t k = 0; k < natoms; ++k) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += dict(i, k) * dict(i, k);
        if (std::abs(std::sqrt(nrm) - 1.0) > 1e-8)
            throw std::invalid_argument("omp_cholesky: column " + std::to_string(k) +
                                        " is not unit norm");
    }

    OmpResult result;
    const std::size_t cap = std::min({s, n, natoms});
    const std::vector<double> yv(y.begin(), y.end());
    std::vector<std::size_t> support;
    std::vector<double> coef;
    std::vector<double> residual = yv;
    std::vector<double> lower(cap * cap, 0.0);  // row-major lower triangle
    std::vector<char> used(natoms, 0);

    auto atom_dot = [&](std::size_t k, const std::vector<double>& v) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += dict(i, k) * v[i];
        return acc;
    };

    while (support.size() < cap) {
        double rn = 0.0;
        for (double v : residual) rn += v * v;
        if (std::sqrt(rn) < 1e-12) break;

        double best = 0.0;
        std::size_t pick = natoms;
        for (std::size_t k = 0; k < natoms; ++k) {
            if (used[k]) continue;
            const double c = std::abs(atom_dot(k, residual));
            if (c > best) {
                best = c;
                pick = k;
            }
        }
        if (pick == natoms || best < 1e-12) break;  // nothing correlates

        const std::size_t t = support.size();
        if (t == 0) {
            lower[0] = 1.0;
        } else {
            // w = L^{-1} (D_S' d_pick); diagonal becomes sqrt(1 - |w|^2).
            std::vector<double> g(t);
            for (std::size_t i = 0; i < t; ++i) {
                double acc = 0.0;
                for (std::size_t r = 0; r < n; ++r) acc += dict(r, support[i]) * dict(r, pick);
                g[i] = acc;
            }
            for (std::size_t i = 0; i < t; ++i) {
                double acc = g[i];
                for (std::size_t k2 = 0; k2 < i; ++k2) acc -= lower[i * cap + k2] * g[k2];
                g[i] = acc / lower[i * cap + i];
            }
            double w2 = 0.0;
            for (double v : g) w2 += v * v;
            const double d2 = 1.0 - w2;
            if (d2 <= 1e-14) {
                result.breakdown = true;
                break;
            }
            for (std::size_t i = 0; i < t; ++i) lower[t * cap + i] = g[i];
            lower[t * cap + t] = std::sqrt(d2);
        }
        support.push_back(pick);
        used[pick] = 1;

        // Least squares on the support: L L' c = D_S' y, then fresh residual.
        const std::size_t sz = support.size();
        std::vector<double> b(sz);
        for (std::size_t i = 0; i < sz; ++i) b[i] = atom_dot(support[i], yv);
        for (std::size_t i = 0; i < sz; ++i) {
            double acc = b[i];
            for (std::size_t k2 = 0; k2 < i; ++k2) acc -= lower[i * cap + k2] * b[k2];
            b[i] = acc / lower[i * cap + i];
        }
        for (std::size_t i = sz; i-- > 0;) {
            double acc = b[i];
            for (std::size_t k2 = i + 1; k2 < sz; ++k2) acc -= lower[k2 * cap + i] * b[k2];
            b[i] = acc / lower[i * cap + i];
        }
        coef = b;
        residual = yv;
        for (std::size_t i = 0; i < sz; ++i)
            for (std::size_t r = 0; r < n; ++r) residual[r] -= coef[i] * dict(r, support[i]);
    }

    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b2) { return support[a] < support[b2]; });
    for (std::size_t i : order)
        if (coef[i] != 0.0)
            result.entries.push_back({static_cast<std::uint32_t>(support[i]), coef[i]});
    return result;
}

Matrix sparse_times_dense_t(const SparseCodeMatrix& x, const Matrix& y) {
    if (x.cols != y.cols())
        throw std::invalid_argument("sparse_times_dense_t: sample counts differ");
    Matrix out(x.rows, y.rows());
    for (std::size_t j = 0; j < x.cols; ++j)
        for (const SparseEntry& e : x.columns[j]) {
            double* row = out.row(e.index);
            for (std::size_t c = 0; c < y.rows(); ++c) row[c] += e.value * y(c, j);
        }
    return out;
}

Matrix dense_times_sparse(const Matrix& a, const SparseCodeMatrix& x) {
    if (a.cols() != x.rows) throw std::invalid_argument("dense_times_sparse: shape mismatch");
    Matrix out(a.rows(), x.cols);
    for (std::size_t j = 0; j < x.cols; ++j)
        for (const SparseEntry& e : x.columns[j])
            for (std::size_t r = 0; r < a.rows(); ++r) out(r, j) += e.value * a(r, e.index);
    return out;
}

double inner_with_dense(const SparseCodeMatrix& x, const Matrix& a) {
    if (a.rows() != x.rows || a.cols() != x.cols)
        throw std::invalid_argument("inner_with_dense: shape mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j)
        for (const SparseEntry& e : x.columns[j]) acc += e.value * a(e.index, j);
    return acc;
}

} // namespace hhdl
