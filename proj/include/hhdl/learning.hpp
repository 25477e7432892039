#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "hhdl/householder.hpp"
#include "hhdl/matrix.hpp"
#include "hhdl/sparse.hpp"

namespace hhdl {

enum class Variant { qdla, hm, qhm };
enum class UpdateOrder { sequential, randomized };
enum class InitKind { svd, random, given };

struct TrainConfig {
    Variant variant = Variant::qdla;
    std::size_t m = 0;        // reflector count; ignored (with a warning) for qdla
    std::size_t s = 4;        // nonzeros per sample
    std::size_t iterations = 100;
    std::uint64_t seed = 0;
    UpdateOrder update_order = UpdateOrder::sequential;  // hm only
    InitKind init = InitKind::svd;
};

// Either a dense orthonormal matrix or a reflector product; carries the
// config that produced it.
class LearnedDictionary {
public:
    LearnedDictionary() : rep_(Matrix::identity(1)) {}
    static LearnedDictionary dense(Matrix q, TrainConfig provenance = {});
    static LearnedDictionary reflectors(HouseholderDictionary d, TrainConfig provenance = {});

    bool is_dense() const { return std::holds_alternative<Matrix>(rep_); }
    const Matrix& dense_rep() const { return std::get<Matrix>(rep_); }
    const HouseholderDictionary& reflector_rep() const {
        return std::get<HouseholderDictionary>(rep_);
    }

    std::size_t dim() const;
    std::size_t reflector_count() const;  // 0 for dense
    Matrix apply(const Matrix& x) const;
    Matrix apply_adjoint(const Matrix& y) const;
    Matrix to_dense() const;

    TrainConfig provenance;

private:
    std::variant<Matrix, HouseholderDictionary> rep_;
};

struct TrainDiagnostics {
    bool identity_fixed_point = false;  // a dictionary update found no descent direction
    std::size_t effective_m = 0;        // nonzero reflectors in the final dictionary
    double nuclear_gap = 0.0;           // ||YX'||_* - ||X||_F^2, >= 0 up to rounding
    bool gershgorin_dominant = false;
    double min_gershgorin_margin = 0.0;
    double reflector_drift = 0.0;       // orthogonal sets only
    bool drift_flagged = false;         // drift exceeded 1e-8
};

struct SpectrumSnapshot {
    std::size_t iteration = 0;
    std::vector<double> normalized;  // descending, divided by the largest magnitude
    double max_abs = 0.0;
    bool zero_matrix = false;
};

struct TrainReport {
    std::vector<double> objectives;  // [0] is the post-init objective
    std::vector<double> substeps;    // objective after each dictionary sub-step
    std::vector<SpectrumSnapshot> spectra;
    TrainDiagnostics diagnostics;
    std::size_t iterations_run = 0;
    bool early_stopped = false;
    double y_norm_sq = 0.0;
    std::size_t dim = 0;
    std::size_t sample_count = 0;
    double wall_seconds = 0.0;

    double final_rmse() const;  // sqrt(final objective / (dim * samples))
};

struct TrainResult {
    LearnedDictionary dictionary;
    TrainReport report;
};

// Exact residual ||Y - U X||_F^2; reflector dictionaries are applied as
// reflector products, never densified.
double objective(const Matrix& y, const LearnedDictionary& d, const SparseCodeMatrix& x);

// Hard-thresholded analysis coefficients X = T_s(U'Y).
SparseCodeMatrix sparse_code(const Matrix& y, const LearnedDictionary& d, std::size_t s);
// Same, taking s from the dictionary's provenance (errors when unknown).
SparseCodeMatrix sparse_step(const Matrix& y, const LearnedDictionary& d);

// Dense-variant init: leading min(n,16) principal components completed
// with seeded Gaussian columns, then orthonormalized.
Matrix qdla_init(const Matrix& y, std::uint64_t seed);

// Z = XY' + YX', exactly symmetric by construction.
Matrix build_z_orthogonal(const Matrix& y, const SparseCodeMatrix& x);

// Symmetrized transformed product for reflector slot j (0-based):
// M = (U_{j-1}...U_0) XY' (U_{m-1}...U_{j+1}), Z = M + M'.
Matrix hm_build_z(const Matrix& y, const SparseCodeMatrix& x, const HouseholderDictionary& d,
                  std::size_t j);

// One closed-form dictionary update for the orthogonal-reflector variant:
// eigenvectors of the m most negative eigenvalues of XY' + YX' become the
// reflector set (lowest eigenvalue in the last slot), non-negative slots
// stay zero.
struct QhUpdate {
    HouseholderDictionary dictionary;
    std::vector<double> selected;     // eigenvalues actually used, ascending
    double predicted_decrease = 0.0;  // 2 * sum |selected|, exact objective drop vs U = I
    double trace_xyt = 0.0;           // tr(XY'), reused by the trainer's substep record
};
QhUpdate qhm_dictionary_update(const Matrix& y, const SparseCodeMatrix& x, std::size_t m);

TrainResult train(const Matrix& y, const TrainConfig& cfg,
                  const LearnedDictionary* warm_start = nullptr);
TrainResult qdla_train(const Matrix& y, TrainConfig cfg,
                       const LearnedDictionary* warm_start = nullptr);
TrainResult qhm_train(const Matrix& y, TrainConfig cfg,
                      const LearnedDictionary* warm_start = nullptr);
TrainResult hm_train(const Matrix& y, TrainConfig cfg,
                     const LearnedDictionary* warm_start = nullptr);

struct GershgorinReport {
    std::vector<double> margins;  // R_jj - sum_{i != j} |R_ji|, one per row
    double min_margin = 0.0;
    bool diagonally_dominant = false;  // all margins >= -1e-10
};
GershgorinReport gershgorin_check(const Matrix& y, const LearnedDictionary& d,
                                  const SparseCodeMatrix& x);

// ||YX'||_* - ||X||_F^2; nonnegative (up to 1e-8) whenever X came from a
// sparse step, zero at a converged dense-variant fixed point.
double local_min_gap(const Matrix& y, const SparseCodeMatrix& x);

struct StationarityReport {
    double lambda_min = 0.0;
    bool psd = false;  // no single extra reflector can improve the fit
};
StationarityReport stationarity_check(const Matrix& y, const Matrix& dict_dense,
                                      const SparseCodeMatrix& x);

SpectrumSnapshot spectrum_report(const Matrix& z);

void write_report_csv(std::ostream& os, const TrainReport& report);
void write_spectrum_csv(std::ostream& os, const SpectrumSnapshot& snap);

const char* variant_name(Variant v);

} // namespace hhdl
