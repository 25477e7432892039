#pragma once

#include <cstdint>
#include <vector>

#include "hhdl/matrix.hpp"

namespace hhdl {

// Eigenvalues in ascending order with matching eigenvector columns.
// Columns are orthonormal and sign-normalized (largest-magnitude entry
// positive, magnitude ties broken by lowest index).
struct EigenPairs {
    std::vector<double> values;
    Matrix vectors;
};

struct Svd {
    Matrix u;                   // rows x k, orthonormal columns
    std::vector<double> sigma;  // descending, clamped at zero below 1e-7 * sigma_max
    Matrix v;                   // cols x k, orthonormal columns
};

// The `count` algebraically smallest eigenpairs of a symmetric matrix.
// Householder tridiagonalization followed by implicit-shift QL; a QL
// sweep cap of 50 per eigenvalue raises a convergence error.
EigenPairs sym_eig_smallest(const Matrix& a, std::size_t count);

// Economy SVD of rank `count`, computed from the Gram matrix of the
// smaller side. Null singular directions are completed to an orthonormal
// basis deterministically.
Svd economy_svd(const Matrix& a, std::size_t count);

// Orthonormalizes the columns of `a` (same span, Gram within 1e-12 of I).
// Throws a degeneracy error naming the offending column when the input
// is rank deficient.
Matrix qr_orthonormalize(const Matrix& a);

// Like qr_orthonormalize, but a dependent or zero column is replaced by a
// deterministic orthonormal completion instead of raising. Never fails.
Matrix orthonormalize_with_completion(const Matrix& a);

// Nearest orthonormal matrix: argmax over orthonormal Q of trace(Q' P).
// Q' P comes out symmetric positive semidefinite.
Matrix procrustes(const Matrix& p);

// Sum of singular values.
double nuclear_norm(const Matrix& p);

// Leading `count` principal directions of the sample matrix Y (n x N),
// by seeded block power iteration on Y Y' with a Rayleigh-Ritz finish.
// Columns ordered by explained variance, descending.
Matrix partial_principal_components(const Matrix& y, std::size_t count, std::uint64_t seed);

// Flips column signs in place to the shared convention.
void normalize_column_signs(Matrix& m);

} // namespace hhdl
