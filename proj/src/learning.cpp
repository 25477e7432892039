#include "hhdl/learning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "hhdl/linalg.hpp"
#include "hhdl/rng.hpp"
#include "hhdl/text.hpp"

namespace hhdl {

namespace {

constexpr double kEarlyStopRel = 1e-10;
constexpr int kEarlyStopRuns = 3;
constexpr double kDriftFlag = 1e-8;

// Relative threshold below which an eigenvalue counts as negative.
double negative_cutoff(const Matrix& z) { return -1e-12 * frobenius_norm(z); }

void check_dataset(const Matrix& y, const char* where) {
    if (y.rows() == 0 || y.cols() == 0)
        throw std::invalid_argument(std::string(where) + ": empty dataset");
}

void check_pair(const Matrix& y, std::size_t dim, const SparseCodeMatrix& x, const char* where) {
    if (y.rows() != dim)
        throw std::invalid_argument(std::string(where) + ": dictionary/data dimension mismatch");
    if (x.rows != y.rows() || x.cols != y.cols())
        throw std::invalid_argument(std::string(where) + ": code matrix shape mismatch");
}

} // namespace

LearnedDictionary LearnedDictionary::dense(Matrix q, TrainConfig provenance) {
    if (q.rows() != q.cols()) throw std::invalid_argument("dense dictionary must be square");
    LearnedDictionary d;
    d.rep_ = std::move(q);
    d.provenance = provenance;
    return d;
}

LearnedDictionary LearnedDictionary::reflectors(HouseholderDictionary h, TrainConfig provenance) {
    validate_dictionary(h);
    LearnedDictionary d;
    d.rep_ = std::move(h);
    d.provenance = provenance;
    return d;
}

std::size_t LearnedDictionary::dim() const {
    return is_dense() ? dense_rep().rows() : reflector_rep().dim;
}

std::size_t LearnedDictionary::reflector_count() const {
    return is_dense() ? 0 : reflector_rep().size();
}

Matrix LearnedDictionary::apply(const Matrix& x) const {
    if (is_dense()) return multiply(dense_rep(), x);
    return dict_apply(reflector_rep(), x);
}

Matrix LearnedDictionary::apply_adjoint(const Matrix& y) const {
    if (is_dense()) return multiply_at_b(dense_rep(), y);
    return dict_apply_adjoint(reflector_rep(), y);
}

Matrix LearnedDictionary::to_dense() const {
    return is_dense() ? dense_rep() : dict_to_dense(reflector_rep());
}

double TrainReport::final_rmse() const {
    if (objectives.empty() || dim == 0 || sample_count == 0) return 0.0;
    return std::sqrt(objectives.back() / (static_cast<double>(dim) * static_cast<double>(sample_count)));
}

double objective(const Matrix& y, const LearnedDictionary& d, const SparseCodeMatrix& x) {
    check_pair(y, d.dim(), x, "objective");
    Matrix approx;
    if (d.is_dense()) {
        approx = dense_times_sparse(d.dense_rep(), x);
    } else {
        approx = x.to_dense();
        dict_apply_in_place(d.reflector_rep(), approx);
    }
    double acc = 0.0;
    const auto& ys = y.storage();
    const auto& as = approx.storage();
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double r = ys[i] - as[i];
        acc += r * r;
    }
    return acc;
}

SparseCodeMatrix sparse_code(const Matrix& y, const LearnedDictionary& d, std::size_t s) {
    check_dataset(y, "sparse_code");
    if (y.rows() != d.dim())
        throw std::invalid_argument("sparse_code: dictionary/data dimension mismatch");
    return hard_threshold_top_s(d.apply_adjoint(y), s);
}

SparseCodeMatrix sparse_step(const Matrix& y, const LearnedDictionary& d) {
    if (d.provenance.s == 0)
        throw std::invalid_argument("sparse_step: dictionary carries no sparsity target; pass s explicitly");
    return sparse_code(y, d, d.provenance.s);
}

Matrix qdla_init(const Matrix& y, std::uint64_t seed) {
    check_dataset(y, "qdla_init");
    const std::size_t n = y.rows();
    const std::size_t lead = std::min<std::size_t>(n, 16);
    Matrix pcs = partial_principal_components(y, lead, seed);
    if (lead == n) return pcs;

    Matrix full(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < lead; ++j) full(i, j) = pcs(i, j);
    Rng rng(mix_seed(seed, 1));
    for (std::size_t j = lead; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) full(i, j) = rng.normal();
    return qr_orthonormalize(full);
}

Matrix build_z_orthogonal(const Matrix& y, const SparseCodeMatrix& x) {
    check_pair(y, y.rows(), x, "build_z_orthogonal");
    Matrix a = sparse_times_dense_t(x, y);  // X Y'
    Matrix z(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) z(i, j) = a(i, j) + a(j, i);
    return z;
}

namespace {

Matrix symmetrize_sum(const Matrix& m) {
    Matrix z(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) z(i, j) = m(i, j) + m(j, i);
    return z;
}

// M_j = (U_{j-1}...U_0) XY' (U_{m-1}...U_{j+1}) computed with reflector
// applications only.
Matrix transformed_product(const Matrix& a, const HouseholderDictionary& d, std::size_t j) {
    Matrix m = a;
    for (std::size_t k = 0; k < j; ++k) reflect_columns_in_place(d.reflectors[k], m);
    for (std::size_t k = d.size(); k-- > j + 1;) reflect_rows_in_place(d.reflectors[k], m);
    return m;
}

} // namespace

Matrix hm_build_z(const Matrix& y, const SparseCodeMatrix& x, const HouseholderDictionary& d,
                  std::size_t j) {
    if (j >= d.size()) throw std::invalid_argument("hm_build_z: reflector index out of range");
    check_pair(y, d.dim, x, "hm_build_z");
    Matrix a = sparse_times_dense_t(x, y);
    return symmetrize_sum(transformed_product(a, d, j));
}

QhUpdate qhm_dictionary_update(const Matrix& y, const SparseCodeMatrix& x, std::size_t m) {
    check_pair(y, y.rows(), x, "qhm_dictionary_update");
    const std::size_t n = y.rows();
    if (m == 0 || m >= n)
        throw std::invalid_argument("qhm_dictionary_update: m must lie in [1, n-1]");

    Matrix a = sparse_times_dense_t(x, y);  // X Y'
    Matrix z = symmetrize_sum(a);
    EigenPairs eig = sym_eig_smallest(z, m);
    const double cutoff = negative_cutoff(z);

    QhUpdate up;
    up.trace_xyt = trace(a);
    std::vector<std::vector<double>> units(m, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        if (eig.values[i] < cutoff) {
            // Lowest eigenvalue lands in the last slot.
            units[m - 1 - i] = eig.vectors.column(i);
            up.selected.push_back(eig.values[i]);
            up.predicted_decrease += 2.0 * std::abs(eig.values[i]);
        }
    }
    up.dictionary = make_reflector_dictionary(n, std::move(units), true);
    return up;
}

SpectrumSnapshot spectrum_report(const Matrix& z) {
    if (z.rows() != z.cols()) throw std::invalid_argument("spectrum_report: matrix not square");
    EigenPairs eig = sym_eig_smallest(z, z.rows());
    SpectrumSnapshot snap;
    snap.normalized.resize(eig.values.size());
    double peak = 0.0;
    for (double v : eig.values) peak = std::max(peak, std::abs(v));
    snap.max_abs = peak;
    if (peak == 0.0) {
        snap.zero_matrix = true;  // degenerate all-zero spectrum, not NaN
        return snap;
    }
    for (std::size_t i = 0; i < eig.values.size(); ++i)
        snap.normalized[i] = eig.values[eig.values.size() - 1 - i] / peak;
    return snap;
}

GershgorinReport gershgorin_check(const Matrix& y, const LearnedDictionary& d,
                                  const SparseCodeMatrix& x) {
    check_pair(y, d.dim(), x, "gershgorin_check");
    Matrix analysis = d.apply_adjoint(y);                  // U'Y
    Matrix r = sparse_times_dense_t(x, analysis);          // R = X (U'Y)'
    GershgorinReport rep;
    rep.margins.resize(r.rows());
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.rows(); ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < r.cols(); ++j)
            if (j != i) off += std::abs(r(i, j));
        rep.margins[i] = r(i, i) - off;
        lowest = std::min(lowest, rep.margins[i]);
    }
    rep.min_margin = lowest;
    rep.diagonally_dominant = lowest >= -1e-10;
    return rep;
}

double local_min_gap(const Matrix& y, const SparseCodeMatrix& x) {
    check_pair(y, y.rows(), x, "local_min_gap");
    Matrix yxt = transpose(sparse_times_dense_t(x, y));
    return nuclear_norm(yxt) - x.frob_sq();
}

StationarityReport stationarity_check(const Matrix& y, const Matrix& dict_dense,
                                      const SparseCodeMatrix& x) {
    if (dict_dense.rows() != dict_dense.cols() || dict_dense.rows() != y.rows())
        throw std::invalid_argument("stationarity_check: dictionary shape mismatch");
    check_pair(y, y.rows(), x, "stationarity_check");
    Matrix dx = dense_times_sparse(dict_dense, x);
    Matrix z1 = multiply_a_bt(dx, y);  // DX Y'
    StationarityReport rep;
    Matrix z = symmetrize_sum(z1);     // DX Y' + Y (DX)'
    EigenPairs eig = sym_eig_smallest(z, 1);
    rep.lambda_min = eig.values[0];
    rep.psd = rep.lambda_min >= -1e-10;
    return rep;
}

namespace {

struct IterationTracker {
    double previous = 0.0;
    int stable_runs = 0;
    bool should_stop(double current) {
        const double rel = std::abs(current - previous) / std::max(previous, 1e-30);
        stable_runs = rel < kEarlyStopRel ? stable_runs + 1 : 0;
        previous = current;
        return stable_runs >= kEarlyStopRuns;
    }
};

void validate_config(const TrainConfig& cfg, const Matrix& y) {
    const std::size_t n = y.rows();
    if (cfg.s == 0 || cfg.s > n)
        throw std::invalid_argument("train: s must lie in [1, n]");
    if (cfg.iterations == 0) throw std::invalid_argument("train: iteration count must be positive");
    if (cfg.variant != Variant::qdla) {
        if (cfg.m == 0 || cfg.m >= n)
            throw std::invalid_argument("train: reflector count m must lie in [1, n-1]");
        if (cfg.init == InitKind::svd && cfg.m + 1 > std::min(n, y.cols()))
            throw std::invalid_argument("train: dataset too small for an m+1 column basis");
    }
}

// Orthogonalizes reflector vectors in slot order; dependent or zero slots
// become the zero reflector (identity) instead of failing.
std::vector<std::vector<double>> orthogonalize_reflector_set(
    const std::vector<std::vector<double>>& units) {
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> accepted;
    for (const auto& uin : units) {
        std::vector<double> u = uin;
        const double orig = norm2(u);
        if (orig < 1e-12) {
            out.push_back(std::vector<double>(u.size(), 0.0));
            continue;
        }
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t q : accepted) axpy(-dot(out[q], u), out[q], u);
        const double nrm = norm2(u);
        if (nrm < 1e-10 * orig) {
            out.push_back(std::vector<double>(u.size(), 0.0));
            continue;
        }
        if (std::abs(nrm - 1.0) > 1e-14) scale_in_place(u, 1.0 / nrm);
        out.push_back(std::move(u));
        accepted.push_back(out.size() - 1);
    }
    return out;
}

std::vector<std::vector<double>> svd_reflector_init(const Matrix& y, std::size_t m) {
    Svd svd = economy_svd(y, m + 1);
    HouseholderDictionary tri = triangularize_basis(svd.u);
    std::vector<std::vector<double>> units;
    units.reserve(m);
    for (const Reflector& r : tri.reflectors) units.push_back(r.u);
    return units;
}

std::vector<std::vector<double>> random_reflector_init(std::size_t n, std::size_t m,
                                                       std::uint64_t seed, bool orthogonal) {
    Rng rng(mix_seed(seed, 2));
    Matrix g(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) g(i, j) = rng.normal();
    std::vector<std::vector<double>> units;
    // A single column is trivially an orthogonal set; sharing the plain
    // path keeps the two single-reflector variants on identical bits.
    if (orthogonal && m > 1) {
        Matrix q = qr_orthonormalize(g);
        for (std::size_t j = 0; j < m; ++j) units.push_back(q.column(j));
    } else {
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> u = g.column(j);
            scale_in_place(u, 1.0 / norm2(u));
            units.push_back(std::move(u));
        }
    }
    return units;
}

HouseholderDictionary reflector_init(const Matrix& y, const TrainConfig& cfg,
                                     const LearnedDictionary* warm_start, bool orthogonal) {
    const std::size_t n = y.rows();
    std::vector<std::vector<double>> units;
    switch (cfg.init) {
        case InitKind::svd:
            units = svd_reflector_init(y, cfg.m);
            if (orthogonal) units = orthogonalize_reflector_set(units);
            break;
        case InitKind::random:
            units = random_reflector_init(n, cfg.m, cfg.seed, orthogonal);
            break;
        case InitKind::given: {
            if (!warm_start || warm_start->is_dense())
                throw std::invalid_argument("train: given init requires a reflector dictionary");
            const HouseholderDictionary& g = warm_start->reflector_rep();
            if (g.dim != n || g.size() != cfg.m)
                throw std::invalid_argument("train: given dictionary shape does not match config");
            if (orthogonal && reflector_set_drift(g) > kDriftFlag)
                throw std::invalid_argument("train: given reflectors are not an orthogonal set");
            for (const Reflector& r : g.reflectors) units.push_back(r.u);
            break;
        }
    }
    return make_reflector_dictionary(n, std::move(units), orthogonal);
}

struct ReportTimer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void finalize_reflector_diagnostics(const Matrix& y, const LearnedDictionary& dict,
                                    const SparseCodeMatrix& x, TrainReport& report) {
    const HouseholderDictionary& d = dict.reflector_rep();
    std::size_t active = 0;
    for (const Reflector& r : d.reflectors)
        if (!r.is_zero()) ++active;
    report.diagnostics.effective_m = active;
    report.diagnostics.nuclear_gap = local_min_gap(y, x);
    GershgorinReport g = gershgorin_check(y, dict, x);
    report.diagnostics.gershgorin_dominant = g.diagonally_dominant;
    report.diagnostics.min_gershgorin_margin = g.min_margin;
    if (d.orthogonal_set) {
        report.diagnostics.reflector_drift = reflector_set_drift(d);
        report.diagnostics.drift_flagged = report.diagnostics.reflector_drift > kDriftFlag;
    }
    report.spectra.push_back(spectrum_report(build_z_orthogonal(y, x)));
    report.spectra.back().iteration = report.iterations_run;
}

} // namespace

TrainResult qdla_train(const Matrix& y, TrainConfig cfg, const LearnedDictionary* warm_start) {
    cfg.variant = Variant::qdla;
    check_dataset(y, "qdla_train");
    validate_config(cfg, y);
    ReportTimer timer;
    const std::size_t n = y.rows();

    Matrix q;
    switch (cfg.init) {
        case InitKind::svd:
            q = qdla_init(y, cfg.seed);
            break;
        case InitKind::random: {
            Rng rng(mix_seed(cfg.seed, 2));
            Matrix g(n, n);
            for (double& v : g.storage()) v = rng.normal();
            q = qr_orthonormalize(g);
            break;
        }
        case InitKind::given: {
            if (!warm_start) throw std::invalid_argument("train: given init requires a dictionary");
            q = warm_start->to_dense();
            Matrix gram = multiply_at_b(q, q);
            for (std::size_t i = 0; i < n; ++i) gram(i, i) -= 1.0;
            if (max_abs(gram) > 1e-6)
                throw std::invalid_argument("train: given dense dictionary is not orthonormal");
            break;
        }
    }

    TrainReport report;
    report.dim = n;
    report.sample_count = y.cols();
    report.y_norm_sq = frobenius_norm_sq(y);

    LearnedDictionary dict = LearnedDictionary::dense(std::move(q), cfg);
    SparseCodeMatrix x = sparse_code(y, dict, cfg.s);
    report.objectives.push_back(objective(y, dict, x));

    IterationTracker tracker;
    tracker.previous = report.objectives.back();
    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
        Matrix p = transpose(sparse_times_dense_t(x, y));  // Y X'
        Matrix qnew = procrustes(p);
        // trace(Q'P) is the elementwise overlap of Q with YX'.
        double overlap = 0.0;
        for (std::size_t i = 0; i < qnew.storage().size(); ++i)
            overlap += qnew.storage()[i] * p.storage()[i];
        report.substeps.push_back(report.y_norm_sq + x.frob_sq() - 2.0 * overlap);
        dict = LearnedDictionary::dense(std::move(qnew), cfg);

        x = sparse_code(y, dict, cfg.s);
        report.objectives.push_back(objective(y, dict, x));
        report.iterations_run = it;
        if (tracker.should_stop(report.objectives.back())) {
            report.early_stopped = true;
            break;
        }
    }

    report.diagnostics.nuclear_gap = local_min_gap(y, x);
    GershgorinReport g = gershgorin_check(y, dict, x);
    report.diagnostics.gershgorin_dominant = g.diagonally_dominant;
    report.diagnostics.min_gershgorin_margin = g.min_margin;
    report.wall_seconds = timer.elapsed();
    return {std::move(dict), std::move(report)};
}

TrainResult qhm_train(const Matrix& y, TrainConfig cfg, const LearnedDictionary* warm_start) {
    cfg.variant = Variant::qhm;
    check_dataset(y, "qhm_train");
    validate_config(cfg, y);
    ReportTimer timer;
    const std::size_t n = y.rows();
    const std::size_t m = cfg.m;

    HouseholderDictionary d = reflector_init(y, cfg, warm_start, true);
    TrainReport report;
    report.dim = n;
    report.sample_count = y.cols();
    report.y_norm_sq = frobenius_norm_sq(y);

    LearnedDictionary dict = LearnedDictionary::reflectors(d, cfg);
    SparseCodeMatrix x = sparse_code(y, dict, cfg.s);
    report.objectives.push_back(objective(y, dict, x));

    IterationTracker tracker;
    tracker.previous = report.objectives.back();
    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
        QhUpdate up = qhm_dictionary_update(y, x, m);
        if (up.selected.empty()) report.diagnostics.identity_fixed_point = true;
        report.substeps.push_back(report.y_norm_sq + x.frob_sq() - 2.0 * up.trace_xyt -
                                  up.predicted_decrease);
        dict = LearnedDictionary::reflectors(std::move(up.dictionary), cfg);

        x = sparse_code(y, dict, cfg.s);
        report.objectives.push_back(objective(y, dict, x));
        report.iterations_run = it;
        if (tracker.should_stop(report.objectives.back())) {
            report.early_stopped = true;
            break;
        }
    }

    finalize_reflector_diagnostics(y, dict, x, report);
    report.wall_seconds = timer.elapsed();
    return {std::move(dict), std::move(report)};
}

TrainResult hm_train(const Matrix& y, TrainConfig cfg, const LearnedDictionary* warm_start) {
    cfg.variant = Variant::hm;
    check_dataset(y, "hm_train");
    validate_config(cfg, y);
    ReportTimer timer;
    const std::size_t n = y.rows();
    const std::size_t m = cfg.m;

    HouseholderDictionary cur = reflector_init(y, cfg, warm_start, false);
    TrainReport report;
    report.dim = n;
    report.sample_count = y.cols();
    report.y_norm_sq = frobenius_norm_sq(y);

    LearnedDictionary dict = LearnedDictionary::reflectors(cur, cfg);
    SparseCodeMatrix x = sparse_code(y, dict, cfg.s);
    report.objectives.push_back(objective(y, dict, x));

    Rng order_rng(mix_seed(cfg.seed, 3));
    IterationTracker tracker;
    tracker.previous = report.objectives.back();
    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
        Matrix a = sparse_times_dense_t(x, y);  // X Y'

        std::vector<std::size_t> slots(m);
        std::iota(slots.begin(), slots.end(), 0);
        const bool sequential = cfg.update_order == UpdateOrder::sequential || m == 1;
        if (!sequential) order_rng.shuffle(slots);

        bool any_selected = false;
        const double x2 = x.frob_sq();
        if (sequential) {
            // Running product M_j, advanced by U_j (updated) on the left and
            // U_{j+1} (pending) on the right after each slot.
            Matrix mj = a;
            for (std::size_t k = m; k-- > 1;) reflect_rows_in_place(cur.reflectors[k], mj);
            for (std::size_t j = 0; j < m; ++j) {
                Matrix z = symmetrize_sum(mj);
                EigenPairs eig = sym_eig_smallest(z, 1);
                const double cutoff = negative_cutoff(z);
                double gain = 0.0;
                if (eig.values[0] < cutoff) {
                    cur.reflectors[j].u = eig.vectors.column(0);
                    snap_unit_or_zero(cur.reflectors[j].u);
                    gain = eig.values[0];
                    any_selected = true;
                } else {
                    cur.reflectors[j].u.assign(n, 0.0);
                }
                report.substeps.push_back(report.y_norm_sq + x2 - 2.0 * trace(mj) + 2.0 * gain);
                if (j + 1 < m) {
                    reflect_columns_in_place(cur.reflectors[j], mj);
                    reflect_rows_in_place(cur.reflectors[j + 1], mj);
                }
            }
        } else {
            for (std::size_t j : slots) {
                Matrix mj = transformed_product(a, cur, j);
                Matrix z = symmetrize_sum(mj);
                EigenPairs eig = sym_eig_smallest(z, 1);
                const double cutoff = negative_cutoff(z);
                double gain = 0.0;
                if (eig.values[0] < cutoff) {
                    cur.reflectors[j].u = eig.vectors.column(0);
                    snap_unit_or_zero(cur.reflectors[j].u);
                    gain = eig.values[0];
                    any_selected = true;
                } else {
                    cur.reflectors[j].u.assign(n, 0.0);
                }
                report.substeps.push_back(report.y_norm_sq + x2 - 2.0 * trace(mj) + 2.0 * gain);
            }
        }
        if (!any_selected) report.diagnostics.identity_fixed_point = true;
        dict = LearnedDictionary::reflectors(cur, cfg);

        x = sparse_code(y, dict, cfg.s);
        report.objectives.push_back(objective(y, dict, x));
        report.iterations_run = it;
        if (tracker.should_stop(report.objectives.back())) {
            report.early_stopped = true;
            break;
        }
    }

    finalize_reflector_diagnostics(y, dict, x, report);
    report.wall_seconds = timer.elapsed();
    return {std::move(dict), std::move(report)};
}

TrainResult train(const Matrix& y, const TrainConfig& cfg, const LearnedDictionary* warm_start) {
    switch (cfg.variant) {
        case Variant::qdla:
            return qdla_train(y, cfg, warm_start);
        case Variant::qhm:
            return qhm_train(y, cfg, warm_start);
        case Variant::hm:
            return hm_train(y, cfg, warm_start);
    }
    throw std::invalid_argument("train: unknown variant");
}

void write_report_csv(std::ostream& os, const TrainReport& report) {
    os << "iter,objective,relative_error\n";
    const double denom = static_cast<double>(report.dim) * static_cast<double>(report.sample_count);
    for (std::size_t i = 0; i < report.objectives.size(); ++i) {
        const double obj = report.objectives[i];
        const double rel = denom > 0.0 ? std::sqrt(obj / denom) : 0.0;
        os << i << ',' << format_double(obj) << ',' << format_double(rel) << '\n';
    }
}

void write_spectrum_csv(std::ostream& os, const SpectrumSnapshot& snap) {
    os << "index,normalized_eigenvalue\n";
    for (std::size_t i = 0; i < snap.normalized.size(); ++i)
        os << i << ',' << format_double(snap.normalized[i]) << '\n';
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::qdla: return "qdla";
        case Variant::hm: return "hm";
        case Variant::qhm: return "qhm";
    }
    return "unknown";
}

} // namespace hhdl
