#include "hhdl/complexity.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "hhdl/matrix.hpp"
#include "hhdl/text.hpp"

namespace hhdl {

namespace {

void check_counts(std::size_t n, std::size_t m, const char* where) {
    if (n == 0 || m == 0) throw std::invalid_argument(std::string(where) + ": n and m must be positive");
}

} // namespace

double speedup_vs_dense(std::size_t n, std::size_t m) {
    check_counts(n, m, "speedup_vs_dense");
    const double nd = static_cast<double>(n);
    return (2.0 * nd - 1.0) * nd / (4.0 * nd * static_cast<double>(m));
}

double speedup_vs_fct(std::size_t n, std::size_t m) {
    check_counts(n, m, "speedup_vs_fct");
    if ((n & (n - 1)) != 0) throw std::domain_error("speedup_vs_fct: n must be a power of two");
    const double nd = static_cast<double>(n);
    const double fct = 2.5 * nd * std::log2(nd) - 3.0 * nd + 6.0;
    return fct / (4.0 * nd * static_cast<double>(m));
}

std::string display_speedup(double value) {
    if (value >= 2.0) return std::to_string(std::llround(value));
    const long long tenths = std::llround(value * 10.0);
    if (tenths % 10 == 0) return std::to_string(tenths / 10);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

std::uint64_t omp_flop_count(std::uint64_t n, std::uint64_t s) {
    if (n == 0 || s == 0) throw std::invalid_argument("omp_flop_count: n and s must be positive");
    return 2 * s * n * n + 2 * s * s * n + 4 * s * n + s * s * s;
}

std::uint64_t measure_apply_cost(const HouseholderDictionary& d, std::size_t columns) {
    if (!op_counting_enabled())
        throw std::logic_error("measure_apply_cost: operation counting is compiled out");
    if (columns == 0) throw std::invalid_argument("measure_apply_cost: need at least one column");

    Matrix probe(d.dim, columns);
    for (double& v : probe.storage()) v = 1.0;
    OpCountScope scope;
    dict_apply_in_place(d, probe);
    return scope.count() / columns;
}

std::vector<SpeedupRow> speedup_table(std::size_t n, const std::vector<std::size_t>& ms) {
    std::vector<SpeedupRow> rows;
    rows.reserve(ms.size());
    for (std::size_t m : ms) {
        SpeedupRow row;
        row.m = m;
        row.vs_dense = speedup_vs_dense(n, m);
        row.vs_fct = speedup_vs_fct(n, m);
        row.display_dense = display_speedup(row.vs_dense);
        row.display_fct = display_speedup(row.vs_fct);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_speedup_csv(std::ostream& os, const std::vector<SpeedupRow>& rows) {
    os << "m,speedup_qdla,speedup_fct,display_qdla,display_fct\n";
    for (const SpeedupRow& r : rows)
        os << r.m << ',' << format_double(r.vs_dense) << ',' << format_double(r.vs_fct) << ','
           << r.display_dense << ',' << r.display_fct << '\n';
}

} // namespace hhdl
