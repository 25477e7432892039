#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hhdl/matrix.hpp"

namespace hhdl {

// A Householder reflector I - 2uu'. The vector is either unit norm or
// exactly zero; the zero vector encodes the identity.
struct Reflector {
    std::vector<double> u;
    bool is_zero() const;
};

// Ordered product of reflectors U = U_m ... U_1 acting on R^n, i.e.
// reflectors[0] is applied first when computing U x. When orthogonal_set
// is true the vectors are pairwise orthogonal and U is also symmetric,
// U = I - 2 * sum_j u_j u_j'.
struct HouseholderDictionary {
    std::size_t dim = 0;
    std::vector<Reflector> reflectors;
    bool orthogonal_set = false;
    std::size_t size() const { return reflectors.size(); }
};

struct SignDiagonal {
    std::vector<double> entries;  // each +1 or -1
};

// Validating constructor: every vector must be unit or zero within 1e-8
// and of length dim. Norms within 1e-8 of one are renormalized exactly.
HouseholderDictionary make_reflector_dictionary(std::size_t dim,
                                                std::vector<std::vector<double>> units,
                                                bool orthogonal_set);
void validate_dictionary(const HouseholderDictionary& d);

// Snaps a vector to the storage contract: exact zero below norm 1e-12,
// renormalized when off unit by more than 1e-14, untouched otherwise.
void snap_unit_or_zero(std::vector<double>& u);

std::vector<double> reflect_vector(const Reflector& r, std::span<const double> x);
void reflect_in_place(const Reflector& r, std::span<double> x);
void reflect_columns_in_place(const Reflector& r, Matrix& x);  // X <- (I-2uu')X
void reflect_rows_in_place(const Reflector& r, Matrix& x);     // X <- X(I-2uu')

Matrix dict_apply(const HouseholderDictionary& d, const Matrix& x);          // U X
Matrix dict_apply_adjoint(const HouseholderDictionary& d, const Matrix& y);  // U' Y
void dict_apply_in_place(const HouseholderDictionary& d, Matrix& x);
void dict_apply_adjoint_in_place(const HouseholderDictionary& d, Matrix& y);

Matrix dict_to_dense(const HouseholderDictionary& d);

// Exact factorization of an orthonormal Q into n-1 reflectors and a sign
// diagonal, Q = dense(dictionary) * D. The reflector generated for column
// j carries j-1 leading zeros and lands at dictionary slot n-j, so the
// adjoint application triangularizes Q column by column.
std::pair<HouseholderDictionary, SignDiagonal> factorize_orthonormal(const Matrix& q);

// m reflectors reducing the below-diagonal entries of the first m columns
// of an n x (m+1) orthonormal-columns basis; the first-column annihilator
// sits last (slot m), so the adjoint application performs the reduction.
HouseholderDictionary triangularize_basis(const Matrix& q);

// Orthogonality health of a reflector set: max of pairwise |u_i'u_j| and
// unit-norm deviation over nonzero reflectors.
double reflector_set_drift(const HouseholderDictionary& d);

// --- instrumentation -------------------------------------------------
// Scalar multiply/add/scale operations performed by the reflect kernels
// are tallied into the innermost active scope (per thread). Compiled in
// only when HHDL_OP_COUNTING is defined.

bool op_counting_enabled();

class OpCountScope {
public:
    OpCountScope();
    ~OpCountScope();
    OpCountScope(const OpCountScope&) = delete;
    OpCountScope& operator=(const OpCountScope&) = delete;
    std::uint64_t count() const { return count_; }

private:
    std::uint64_t count_ = 0;
    std::uint64_t* prev_ = nullptr;
};

} // namespace hhdl
