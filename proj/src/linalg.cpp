#include "hhdl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hhdl/rng.hpp"

namespace hhdl {

namespace {

// Reduces a symmetric matrix to tridiagonal form by Householder
// similarity transforms, accumulating the orthogonal factor in z.
// On exit z' A z = tridiag(d, e) with e[i] coupling d[i] and d[i+1].
void tridiagonalize(Matrix& z, std::vector<double>& d, std::vector<double>& e) {
    const int n = static_cast<int>(z.rows());
    d.assign(n, 0.0);
    e.assign(n, 0.0);

    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
                for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = 1.0;
        for (int j = 0; j <= l; ++j) z(j, i) = z(i, j) = 0.0;
    }
    // Shift the subdiagonal so e[i] sits between d[i] and d[i+1].
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
}

// Implicit-shift QL on a symmetric tridiagonal, rotating the eigenvector
// columns of z along. Throws after 50 sweeps on any single eigenvalue.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
    const int n = static_cast<int>(d.size());
    const double eps = std::numeric_limits<double>::epsilon();

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw std::runtime_error("sym_eig: QL failed to converge within 50 sweeps");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

// One modified Gram-Schmidt polish pass; assumes columns are already
// near-orthonormal, so a single sweep reaches working precision.
void mgs_polish(Matrix& q) {
    const std::size_t n = q.rows(), k = q.cols();
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            double proj = 0.0;
            for (std::size_t r = 0; r < n; ++r) proj += q(r, i) * q(r, j);
            for (std::size_t r = 0; r < n; ++r) q(r, j) -= proj * q(r, i);
        }
        double nrm = 0.0;
        for (std::size_t r = 0; r < n; ++r) nrm += q(r, j) * q(r, j);
        nrm = std::sqrt(nrm);
        if (nrm > 0.0)
            for (std::size_t r = 0; r < n; ++r) q(r, j) /= nrm;
    }
}

// Full symmetric eigendecomposition, ascending, sign-normalized.
EigenPairs eig_sym_all(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: matrix not square");
    const std::size_t n = a.rows();
    if (n == 0) throw std::invalid_argument("sym_eig: empty matrix");
    if (symmetry_gap(a) > 1e-10)
        throw std::invalid_argument("sym_eig: matrix not symmetric within 1e-10");

    // Work on the exactly symmetrized copy so the result is independent of
    // which triangle carried rounding noise.
    Matrix z(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        z(i, i) = a(i, i);
        for (std::size_t j = i + 1; j < n; ++j)
            z(i, j) = z(j, i) = 0.5 * (a(i, j) + a(j, i));
    }

    std::vector<double> d, e;
    if (n == 1) {
        d = {z(0, 0)};
        z(0, 0) = 1.0;
    } else {
        tridiagonalize(z, d, e);
        ql_implicit(d, e, z);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

    EigenPairs out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = z(i, order[j]);
    }
    mgs_polish(out.vectors);
    normalize_column_signs(out.vectors);
    return out;
}

// Deterministic completion: replaces column j of q (assumed unusable) with
// a standard basis vector orthogonalized against columns [0, j).
void complete_column(Matrix& q, std::size_t j) {
    const std::size_t n = q.rows();
    for (std::size_t cand = 0; cand < n; ++cand) {
        std::vector<double> v(n, 0.0);
        v[cand] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t i = 0; i < j; ++i) {
                double proj = 0.0;
                for (std::size_t r = 0; r < n; ++r) proj += q(r, i) * v[r];
                for (std::size_t r = 0; r < n; ++r) v[r] -= proj * q(r, i);
            }
        const double nrm = norm2(v);
        if (nrm >= 1e-3) {
            for (std::size_t r = 0; r < n; ++r) q(r, j) = v[r] / nrm;
            return;
        }
    }
    throw std::runtime_error("orthonormal completion failed (should be unreachable)");
}

Matrix mgs_orthonormalize(const Matrix& a, bool complete_degenerate) {
    if (a.cols() > a.rows())
        throw std::invalid_argument("qr_orthonormalize: more columns than rows");
    Matrix q = a;
    const std::size_t n = q.rows(), k = q.cols();
    for (std::size_t j = 0; j < k; ++j) {
        const double orig = norm2(q.column(j));
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t i = 0; i < j; ++i) {
                double proj = 0.0;
                for (std::size_t r = 0; r < n; ++r) proj += q(r, i) * q(r, j);
                for (std::size_t r = 0; r < n; ++r) q(r, j) -= proj * q(r, i);
            }
        double nrm = 0.0;
        for (std::size_t r = 0; r < n; ++r) nrm += q(r, j) * q(r, j);
        nrm = std::sqrt(nrm);
        if (nrm <= 1e-10 * std::max(orig, 1e-300) || orig == 0.0) {
            if (!complete_degenerate)
                throw std::invalid_argument(
                    "qr_orthonormalize: column " + std::to_string(j) + " is linearly dependent");
            complete_column(q, j);
        } else {
            for (std::size_t r = 0; r < n; ++r) q(r, j) /= nrm;
        }
    }
    return q;
}

} // namespace

void normalize_column_signs(Matrix& m) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double best = 0.0;
        std::size_t at = 0;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const double v = std::abs(m(i, j));
            if (v > best) {
                best = v;
                at = i;
            }
        }
        if (best > 0.0 && m(at, j) < 0.0)
            for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = -m(i, j);
    }
}

EigenPairs sym_eig_smallest(const Matrix& a, std::size_t count) {
    if (count == 0 || count > a.rows())
        throw std::invalid_argument("sym_eig_smallest: count out of range");
    EigenPairs full = eig_sym_all(a);
    if (count == a.rows()) return full;
    EigenPairs out;
    out.values.assign(full.values.begin(), full.values.begin() + count);
    out.vectors = Matrix(a.rows(), count);
    for (std::size_t j = 0; j < count; ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) out.vectors(i, j) = full.vectors(i, j);
    return out;
}

Svd economy_svd(const Matrix& a, std::size_t count) {
    const std::size_t n = a.rows(), m = a.cols();
    if (n == 0 || m == 0) throw std::invalid_argument("economy_svd: empty matrix");
    if (count == 0 || count > std::min(n, m))
        throw std::invalid_argument("economy_svd: rank out of range");

    const bool tall = n > m;  // Gram on the smaller side
    Matrix gram = tall ? multiply_at_b(a, a) : multiply_a_bt(a, a);
    EigenPairs eig = eig_sym_all(gram);

    const std::size_t g = gram.rows();
    std::vector<double> sigma(count);
    for (std::size_t j = 0; j < count; ++j)
        sigma[j] = std::sqrt(std::max(eig.values[g - 1 - j], 0.0));
    // The Gram route floors resolvable singular values near sqrt(eps) of
    // the largest; anything below that is eigenvalue roundoff, not rank.
    const double clamp = 1e-7 * (count > 0 ? sigma[0] : 0.0);
    for (double& s : sigma)
        if (s < clamp) s = 0.0;

    Matrix small_side(g, count);  // eigenvector columns, descending eigenvalue
    for (std::size_t j = 0; j < count; ++j)
        for (std::size_t i = 0; i < g; ++i) small_side(i, j) = eig.vectors(i, g - 1 - j);

    // Other factor by quotient; null directions completed afterwards.
    const std::size_t other_rows = tall ? n : m;
    Matrix other(other_rows, count);
    for (std::size_t j = 0; j < count; ++j) {
        if (sigma[j] == 0.0) continue;
        std::vector<double> q = small_side.column(j);
        std::vector<double> w(other_rows, 0.0);
        if (tall) {
            for (std::size_t r = 0; r < n; ++r) {
                const double* ar = a.row(r);
                double acc = 0.0;
                for (std::size_t c = 0; c < m; ++c) acc += ar[c] * q[c];
                w[r] = acc;
            }
        } else {
            for (std::size_t r = 0; r < n; ++r) {
                const double* ar = a.row(r);
                const double qr = q[r];
                if (qr == 0.0) continue;
                for (std::size_t c = 0; c < m; ++c) w[c] += ar[c] * qr;
            }
        }
        scale_in_place(w, 1.0 / sigma[j]);
        other.set_column(j, w);
    }
    for (std::size_t j = 0; j < count; ++j)
        if (sigma[j] == 0.0) complete_column(other, j);
    mgs_polish(other);

    Svd out;
    out.sigma = std::move(sigma);
    if (tall) {
        out.u = std::move(other);
        out.v = std::move(small_side);
    } else {
        out.u = std::move(small_side);
        out.v = std::move(other);
    }
    return out;
}

Matrix qr_orthonormalize(const Matrix& a) { return mgs_orthonormalize(a, false); }

Matrix orthonormalize_with_completion(const Matrix& a) { return mgs_orthonormalize(a, true); }

Matrix procrustes(const Matrix& p) {
    if (p.rows() != p.cols()) throw std::invalid_argument("procrustes: matrix not square");
    Svd s = economy_svd(p, p.rows());
    return multiply_a_bt(s.u, s.v);
}

double nuclear_norm(const Matrix& p) {
    if (p.rows() == 0 || p.cols() == 0) throw std::invalid_argument("nuclear_norm: empty matrix");
    Matrix gram = p.rows() > p.cols() ? multiply_at_b(p, p) : multiply_a_bt(p, p);
    EigenPairs eig = eig_sym_all(gram);
    double total = 0.0;
    for (double v : eig.values) total += std::sqrt(std::max(v, 0.0));
    return total;
}

Matrix partial_principal_components(const Matrix& y, std::size_t count, std::uint64_t seed) {
    const std::size_t n = y.rows();
    if (count == 0 || count > n)
        throw std::invalid_argument("partial_principal_components: count out of range");

    Matrix gram = multiply_a_bt(y, y);

    Rng rng(seed);
    Matrix b(n, count);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < count; ++j) b(i, j) = rng.normal();
    b = orthonormalize_with_completion(b);

    for (int iter = 0; iter < 100; ++iter) {
        Matrix next = orthonormalize_with_completion(multiply(gram, b));
        // Subspace change: residual of the new basis against the old span.
        Matrix overlap = multiply_at_b(b, next);
        Matrix proj = multiply(b, overlap);
        double delta = 0.0;
        for (std::size_t i = 0; i < proj.storage().size(); ++i) {
            const double r = next.storage()[i] - proj.storage()[i];
            delta += r * r;
        }
        b = std::move(next);
        if (std::sqrt(delta / static_cast<double>(count)) < 1e-10) break;
    }

    // Rayleigh-Ritz finish aligns columns with individual components.
    Matrix projected = multiply_at_b(b, multiply(gram, b));
    EigenPairs ritz = eig_sym_all(projected);
    Matrix w(count, count);
    for (std::size_t j = 0; j < count; ++j)  // descending variance
        for (std::size_t i = 0; i < count; ++i) w(i, j) = ritz.vectors(i, count - 1 - j);
    Matrix out = multiply(b, w);
    mgs_polish(out);
    normalize_column_signs(out);
    return out;
}

} // namespace hhdl
