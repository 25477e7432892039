#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hhdl/householder.hpp"
#include "hhdl/matrix.hpp"
#include "hhdl/rng.hpp"
#include "support/oracles.hpp"

using hhdl::HouseholderDictionary;
using hhdl::Matrix;
using hhdl::Reflector;
using hhdl::Rng;

namespace {

std::vector<double> unit_vector(std::size_t n, Rng& rng) {
    std::vector<double> u(n);
    for (auto& v : u) v = rng.normal();
    hhdl::scale_in_place(u, 1.0 / hhdl::norm2(u));
    return u;
}

// Dense (I - 2uu')x written out longhand.
std::vector<double> reflect_by_definition(const std::vector<double>& u,
                                          const std::vector<double>& x) {
    const double d = hhdl::dot(u, x);
    std::vector<double> y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= 2.0 * d * u[i];
    return y;
}

Matrix scale_columns(const Matrix& a, const std::vector<double>& s) {
    Matrix out = a;
    for (std::size_t j = 0; j < out.cols(); ++j)
        for (std::size_t i = 0; i < out.rows(); ++i) out(i, j) *= s[j];
    return out;
}

} // namespace

TEST_CASE("reflector construction snaps vectors to unit or zero") {
    std::vector<double> exact(6, 0.0);
    exact[2] = 1.0;
    std::vector<double> near_unit(6, 0.0);
    near_unit[1] = 1.0 + 5e-9;
    std::vector<double> near_zero(6, 1e-13);

    auto d = hhdl::make_reflector_dictionary(6, {exact, near_unit, near_zero}, false);
    REQUIRE(d.size() == 3);
    for (std::size_t i = 0; i < 6; ++i) CHECK(d.reflectors[0].u[i] == exact[i]);
    CHECK(std::abs(hhdl::norm2(d.reflectors[1].u) - 1.0) <= 1e-15);
    CHECK(d.reflectors[2].is_zero());
    for (double v : d.reflectors[2].u) CHECK(v == 0.0);

    std::vector<double> half(6, 0.0);
    half[0] = 0.5;
    CHECK_THROWS_AS(hhdl::make_reflector_dictionary(6, {half}, false), std::invalid_argument);
    CHECK_THROWS_AS(hhdl::make_reflector_dictionary(6, {std::vector<double>(5, 0.0)}, false),
                    std::invalid_argument);
    CHECK_NOTHROW(hhdl::validate_dictionary(d));
}

TEST_CASE("single reflection matches the dense definition and is an involution") {
    Rng rng(41);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 16;
        Reflector r{unit_vector(n, rng)};
        std::vector<double> x(n);
        for (auto& v : x) v = rng.normal();

        auto got = hhdl::reflect_vector(r, x);
        auto want = reflect_by_definition(r.u, x);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-14);

        auto back = hhdl::reflect_vector(r, got);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(back[i] - x[i]) < 1e-13);
    }

    Reflector zero{std::vector<double>(16, 0.0)};
    std::vector<double> x(16, 3.25);
    auto same = hhdl::reflect_vector(zero, x);
    for (std::size_t i = 0; i < 16; ++i) CHECK(same[i] == x[i]);
}

TEST_CASE("columnwise and rowwise kernels agree with the vector kernel bitwise") {
    Rng rng(42);
    const std::size_t n = 16, cols = 7;
    Reflector r{unit_vector(n, rng)};
    Matrix x = oracle::random_matrix(n, cols, 7001);

    Matrix by_columns = x;
    hhdl::reflect_columns_in_place(r, by_columns);
    for (std::size_t j = 0; j < cols; ++j) {
        auto col = hhdl::reflect_vector(r, x.column(j));
        for (std::size_t i = 0; i < n; ++i) CHECK(by_columns(i, j) == col[i]);
    }

    Matrix wide = oracle::random_matrix(5, n, 7002);
    Matrix by_rows = wide;
    hhdl::reflect_rows_in_place(r, by_rows);
    for (std::size_t i = 0; i < 5; ++i) {
        std::vector<double> row(wide.row(i), wide.row(i) + n);
        auto want = hhdl::reflect_vector(r, row);
        for (std::size_t j = 0; j < n; ++j) CHECK(by_rows(i, j) == want[j]);
    }
}

TEST_CASE("dictionary application matches the dense reflector product") {
    Rng rng(43);
    const std::size_t n = 16, m = 8;
    std::vector<std::vector<double>> units;
    for (std::size_t k = 0; k < m; ++k)
        units.push_back(k == 3 ? std::vector<double>(n, 0.0) : unit_vector(n, rng));
    auto d = hhdl::make_reflector_dictionary(n, units, false);
    Matrix dense = oracle::dense_reflector_product(d);

    Matrix x = oracle::random_matrix(n, 5, 7003);
    CHECK(hhdl::max_abs(hhdl::subtract(hhdl::dict_apply(d, x), hhdl::multiply(dense, x))) < 1e-11);
    CHECK(hhdl::max_abs(hhdl::subtract(hhdl::dict_apply_adjoint(d, x),
                                       hhdl::multiply_at_b(dense, x))) < 1e-11);

    // Adjoint inverts the product, and the in-place forms share the math.
    Matrix round = hhdl::dict_apply_adjoint(d, hhdl::dict_apply(d, x));
    CHECK(hhdl::max_abs(hhdl::subtract(round, x)) < 1e-12);
    Matrix in_place = x;
    hhdl::dict_apply_in_place(d, in_place);
    Matrix out_of_place = hhdl::dict_apply(d, x);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 5; ++j) CHECK(in_place(i, j) == out_of_place(i, j));

    CHECK_THROWS_AS(hhdl::dict_apply(d, oracle::random_matrix(n + 1, 2, 1)),
                    std::invalid_argument);
}

TEST_CASE("dense form of an orthogonal reflector set is exactly symmetric") {
    Rng rng(44);
    const std::size_t n = 8, m = 3;
    Matrix q = oracle::random_orthonormal(n, rng);
    std::vector<std::vector<double>> units;
    for (std::size_t k = 0; k < m; ++k) units.push_back(q.column(k));
    auto d = hhdl::make_reflector_dictionary(n, units, true);

    Matrix b = hhdl::dict_to_dense(d);
    CHECK(hhdl::symmetry_gap(b) == 0.0);
    // Orthogonal factors commute, so the sum form equals the product form,
    // and a symmetric orthogonal matrix squares to the identity.
    CHECK(hhdl::max_abs(hhdl::subtract(b, oracle::dense_reflector_product(d))) < 1e-12);
    Matrix sq = hhdl::multiply(b, b);
    CHECK(hhdl::max_abs(hhdl::subtract(sq, Matrix::identity(n))) < 1e-12);

    auto loose = hhdl::make_reflector_dictionary(n, units, false);
    CHECK(hhdl::max_abs(hhdl::subtract(hhdl::dict_to_dense(loose), b)) < 1e-12);
}

TEST_CASE("orthonormal factorization reconstructs its input") {
    for (std::size_t n : {8, 64}) {
        for (std::uint64_t seed : {1, 2, 3}) {
            Rng rng(hhdl::mix_seed(91, seed * 10 + n));
            Matrix q = oracle::random_orthonormal(n, rng);
            auto [d, signs] = hhdl::factorize_orthonormal(q);
            REQUIRE(d.size() == n - 1);
            REQUIRE(signs.entries.size() == n);
            for (double s : signs.entries) CHECK(std::abs(s) == 1.0);

            Matrix rebuilt = scale_columns(hhdl::dict_to_dense(d), signs.entries);
            CHECK(hhdl::max_abs(hhdl::subtract(rebuilt, q)) < 1e-10);
        }
    }
    CHECK_THROWS_AS(hhdl::factorize_orthonormal(oracle::random_matrix(6, 6, 5)),
                    std::invalid_argument);
    CHECK_THROWS_AS(hhdl::factorize_orthonormal(oracle::random_matrix(4, 3, 5)),
                    std::invalid_argument);
}

TEST_CASE("factorization reflectors carry the leading-zero ladder") {
    Rng rng(45);
    const std::size_t n = 12;
    Matrix q = oracle::random_orthonormal(n, rng);
    auto [d, signs] = hhdl::factorize_orthonormal(q);

    // Slot k annihilated column n-2-k, so it starts with n-2-k exact zeros.
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t i = 0; i < n - 2 - k; ++i) CHECK(d.reflectors[k].u[i] == 0.0);

    Matrix t = hhdl::dict_apply_adjoint(d, q);
    Matrix want(n, n);
    for (std::size_t j = 0; j < n; ++j) want(j, j) = signs.entries[j];
    CHECK(hhdl::max_abs(hhdl::subtract(t, want)) < 1e-10);
}

TEST_CASE("identity and sign diagonals factor into zero reflectors") {
    auto [di, si] = hhdl::factorize_orthonormal(Matrix::identity(5));
    for (const auto& r : di.reflectors) CHECK(r.is_zero());
    for (double s : si.entries) CHECK(s == 1.0);
    CHECK(hhdl::max_abs(hhdl::subtract(hhdl::dict_to_dense(di), Matrix::identity(5))) == 0.0);

    Matrix flip = Matrix::identity(5);
    flip(1, 1) = -1.0;
    flip(4, 4) = -1.0;
    auto [df, sf] = hhdl::factorize_orthonormal(flip);
    for (const auto& r : df.reflectors) CHECK(r.is_zero());
    CHECK(sf.entries == std::vector<double>{1.0, -1.0, 1.0, 1.0, -1.0});
}

TEST_CASE("basis triangularization reduces every reachable entry") {
    Rng rng(46);
    const std::size_t n = 8, m = 3;
    Matrix full = oracle::random_orthonormal(n, rng);
    Matrix basis(n, m + 1);
    for (std::size_t j = 0; j <= m; ++j) basis.set_column(j, full.column(j));

    auto d = hhdl::triangularize_basis(basis);
    REQUIRE(d.size() == m);
    Matrix t = hhdl::dict_apply_adjoint(d, basis);
    for (std::size_t j = 0; j < m; ++j) {
        CHECK(std::abs(std::abs(t(j, j)) - 1.0) < 1e-10);
        for (std::size_t i = j + 1; i < n; ++i) CHECK(std::abs(t(i, j)) < 1e-10);
    }
    // The trailing column is orthogonal to the reduced ones, so its first
    // m entries vanish even though no reflector targets it.
    for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(t(i, m)) < 1e-10);

    // Square case: n-1 reflectors triangularize the whole matrix.
    auto dn = hhdl::triangularize_basis(full);
    REQUIRE(dn.size() == n - 1);
    Matrix tn = hhdl::dict_apply_adjoint(dn, full);
    for (std::size_t j = 0; j < n; ++j) {
        CHECK(std::abs(std::abs(tn(j, j)) - 1.0) < 1e-10);
        for (std::size_t i = j + 1; i < n; ++i) CHECK(std::abs(tn(i, j)) < 1e-10);
    }

    CHECK_THROWS_AS(hhdl::triangularize_basis(Matrix(4, 0)), std::invalid_argument);
    CHECK_THROWS_AS(hhdl::triangularize_basis(oracle::random_matrix(3, 4, 9)),
                    std::invalid_argument);
}

TEST_CASE("reflector drift reports the worst overlap or norm deviation") {
    const std::size_t n = 4;
    std::vector<double> a(n, 0.0), b(n, 0.0);
    a[0] = 1.0;
    b[0] = 0.3;
    b[1] = std::sqrt(1.0 - 0.09);
    auto d = hhdl::make_reflector_dictionary(n, {a, b, std::vector<double>(n, 0.0)}, false);
    CHECK(hhdl::reflector_set_drift(d) == doctest::Approx(0.3).epsilon(1e-12));

    Rng rng(47);
    Matrix q = oracle::random_orthonormal(6, rng);
    auto ortho = hhdl::make_reflector_dictionary(6, {q.column(0), q.column(1), q.column(2)}, true);
    CHECK(hhdl::reflector_set_drift(ortho) < 1e-14);

    HouseholderDictionary raw;
    raw.dim = n;
    std::vector<double> off(n, 0.0);
    off[2] = 1.0 + 1e-6;
    raw.reflectors.push_back(Reflector{off});
    CHECK(hhdl::reflector_set_drift(raw) == doctest::Approx(1e-6).epsilon(1e-6));
}

TEST_CASE("reflect kernels tally four scalar ops per entry") {
    REQUIRE(hhdl::op_counting_enabled());
    Rng rng(48);
    const std::size_t n = 16;
    Reflector r{unit_vector(n, rng)};
    std::vector<double> x(n, 1.0);

    {
        hhdl::OpCountScope scope;
        hhdl::reflect_vector(r, x);
        CHECK(scope.count() == 4 * n);
        hhdl::reflect_vector(r, x);
        CHECK(scope.count() == 8 * n);
    }
    {
        // The zero reflector is applied literally, not short-circuited.
        hhdl::OpCountScope scope;
        hhdl::reflect_vector(Reflector{std::vector<double>(n, 0.0)}, x);
        CHECK(scope.count() == 4 * n);
    }
    {
        hhdl::OpCountScope scope;
        Matrix tall = oracle::random_matrix(n, 5, 7004);
        hhdl::reflect_columns_in_place(r, tall);
        CHECK(scope.count() == 4 * n * 5);
        Matrix wide = oracle::random_matrix(7, n, 7005);
        hhdl::reflect_rows_in_place(r, wide);
        CHECK(scope.count() == 4 * n * 5 + 4 * n * 7);
    }
    {
        // A product of m reflectors costs exactly 4nm per column.
        hhdl::OpCountScope scope;
        std::vector<std::vector<double>> units;
        for (int k = 0; k < 3; ++k) units.push_back(unit_vector(n, rng));
        units[1].assign(n, 0.0);
        auto d = hhdl::make_reflector_dictionary(n, units, false);
        Matrix probe = oracle::random_matrix(n, 6, 7006);
        hhdl::dict_apply_in_place(d, probe);
        CHECK(scope.count() == 4 * n * 3 * 6);
    }
}

TEST_CASE("op count scopes nest without leaking") {
    Rng rng(49);
    const std::size_t n = 8;
    Reflector r{unit_vector(n, rng)};
    std::vector<double> x(n, 2.0);

    hhdl::OpCountScope outer;
    hhdl::reflect_vector(r, x);
    CHECK(outer.count() == 4 * n);
    {
        hhdl::OpCountScope inner;
        hhdl::reflect_vector(r, x);
        hhdl::reflect_vector(r, x);
        CHECK(inner.count() == 8 * n);
    }
    CHECK(outer.count() == 4 * n);
    hhdl::reflect_vector(r, x);
    CHECK(outer.count() == 8 * n);
}
