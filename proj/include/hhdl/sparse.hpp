#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hhdl/matrix.hpp"

namespace hhdl {

struct SparseEntry {
    std::uint32_t index;
    double value;
};

// Column-compressed code matrix: at most `budget` nonzeros per column,
// entries sorted by strictly increasing row index, values nonzero.
struct SparseCodeMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t budget = 0;
    std::vector<std::vector<SparseEntry>> columns;

    Matrix to_dense() const;
    double frob_sq() const;
    std::size_t nonzeros() const;
};

// Keeps the s largest-magnitude entries of every column (ties broken by
// lowest row index) via an O(n) average partial selection. Exact zeros
// are never stored, so a zero column stays empty.
SparseCodeMatrix hard_threshold_top_s(const Matrix& a, std::size_t s);

struct OmpResult {
    std::vector<SparseEntry> entries;  // sorted by index
    bool breakdown = false;            // Cholesky met a dependent atom
};

// Orthogonal matching pursuit with an incrementally grown Cholesky
// factor. Dictionary columns must be unit norm within 1e-8. Stops at s
// atoms, or earlier when the residual drops below 1e-12 or a dependent
// atom breaks the factorization (flagged).
OmpResult omp_cholesky(const Matrix& dict, std::span<const double> y, std::size_t s);

// Products against the compressed representation.
Matrix sparse_times_dense_t(const SparseCodeMatrix& x, const Matrix& y);  // X Y'
Matrix dense_times_sparse(const Matrix& a, const SparseCodeMatrix& x);    // A X
double inner_with_dense(const SparseCodeMatrix& x, const Matrix& a);      // trace(X' A) = sum X.*A

} // namespace hhdl
