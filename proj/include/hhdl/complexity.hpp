#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hhdl/householder.hpp"

namespace hhdl {

// Per-column multiply/add counts: a dense orthonormal product costs
// (2n-1)n, a fast cosine transform 5/2 n log2 n - 3n + 6, and a product
// of m reflectors 4nm. Speed-ups are the ratios against 4nm.
double speedup_vs_dense(std::size_t n, std::size_t m);
double speedup_vs_fct(std::size_t n, std::size_t m);  // n must be a power of two

// Matches the published table typography: values >= 2 round to the
// nearest integer; smaller values round to one decimal, with a trailing
// ".0" collapsed to the bare integer.
std::string display_speedup(double value);

// Cholesky-based OMP cost 2sn^2 + 2s^2 n + 4sn + s^3.
std::uint64_t omp_flop_count(std::uint64_t n, std::uint64_t s);

// Applies the dictionary to `columns` probe columns under the operation
// counter and returns counted ops per column (exactly 4nm). Requires an
// instrumented build; throws otherwise.
std::uint64_t measure_apply_cost(const HouseholderDictionary& d, std::size_t columns = 16);

struct SpeedupRow {
    std::size_t m = 0;
    double vs_dense = 0.0;
    double vs_fct = 0.0;
    std::string display_dense;
    std::string display_fct;
};

std::vector<SpeedupRow> speedup_table(std::size_t n, const std::vector<std::size_t>& ms);

// CSV columns: m,speedup_qdla,speedup_fct,display_qdla,display_fct.
void write_speedup_csv(std::ostream& os, const std::vector<SpeedupRow>& rows);

} // namespace hhdl
