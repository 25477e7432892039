// End-to-end acceptance checks. Each criterion prints one line:
//   [PASS|FAIL|SKIP] <n>. <title> (<seconds>) -- detail
// The process exits nonzero when any criterion fails; skips (missing
// optional test images) do not fail the run.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hhdl/complexity.hpp"
#include "hhdl/dictionary_io.hpp"
#include "hhdl/imaging.hpp"
#include "hhdl/learning.hpp"
#include "hhdl/linalg.hpp"
#include "hhdl/matrix.hpp"
#include "hhdl/rng.hpp"
#include "hhdl/sparse.hpp"
#include "hhdl/text.hpp"
#include "support/oracles.hpp"

using namespace hhdl;

namespace {

namespace fs = std::filesystem;

// Pinned tolerances. These are the contract; loosening them to make a
// failing build pass is not an option.
constexpr double kMonotoneSlackRel = 1e-9;    // per step, times ||Y||_F^2
constexpr double kTrajectoryRel = 1e-12;      // single-reflector variant divergence
constexpr double kTraceIdentityRel = 1e-8;    // trace vs nuclear norm at the fixed point
constexpr double kEnergyIdentityRel = 1e-6;   // code energy vs nuclear norm, times ||Y||_F^2
constexpr double kDecreaseRel = 1e-9;         // closed-form update decrease
constexpr double kApplyTol = 1e-11;           // reflector apply vs dense product
constexpr double kFactorizeTol = 1e-10;       // factorization roundtrip
constexpr double kNuclearSlack = 1e-10;       // symmetrized-product nuclear bound
constexpr double kErrorTableBand = 0.15;      // desk-scale error-table envelope
constexpr double kInpaintFactor = 2.0;        // inpaint MAE vs encode MAE

struct Outcome {
    enum Status { pass, fail, skip } status = pass;
    std::string detail;
};

Outcome ok(std::string detail = "") { return {Outcome::pass, std::move(detail)}; }
Outcome bad(std::string detail) { return {Outcome::fail, std::move(detail)}; }
Outcome skipped(std::string detail) { return {Outcome::skip, std::move(detail)}; }

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "hhdl_acceptance";
    fs::create_directories(dir);
    return dir;
}

std::string wpath(const std::string& name) { return (work_dir() / name).string(); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HHDL_CLI_PATH) + " " + args + " 2>" + wpath("cli_err.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

GrayImage make_noise_image(std::size_t w, std::size_t h, std::uint64_t seed) {
    GrayImage img = make_image(w, h);
    Rng rng(seed);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
    return img;
}

std::string camera_path() { return std::string(HHDL_TEST_DATA) + "/camera.pgm"; }

// Objective values in the exact order they were recorded: the post-init
// value, then each iteration's sub-steps followed by its end-of-iteration
// value.
std::vector<double> recorded_sequence(const TrainReport& r, std::size_t per_iteration) {
    std::vector<double> seq;
    seq.push_back(r.objectives.at(0));
    std::size_t si = 0;
    for (std::size_t it = 1; it <= r.iterations_run; ++it) {
        for (std::size_t k = 0; k < per_iteration; ++k) seq.push_back(r.substeps.at(si++));
        seq.push_back(r.objectives.at(it));
    }
    if (si != r.substeps.size())
        throw std::logic_error("unexpected sub-step count in training report");
    return seq;
}

TrainConfig config(Variant v, std::size_t m, std::size_t s, std::size_t iters,
                   std::uint64_t seed) {
    TrainConfig cfg;
    cfg.variant = v;
    cfg.m = m;
    cfg.s = s;
    cfg.iterations = iters;
    cfg.seed = seed;
    return cfg;
}

std::string fmt(double v) { return format_double(v); }

// ---- criterion bodies -------------------------------------------------

Outcome check_speedup_table() {
    const std::string out = wpath("speedups.csv");
    if (run_cli("speedups --n 64 >" + out) != 0) return bad("speedups command failed");

    std::ifstream in(out);
    std::string line;
    if (!std::getline(in, line) || line != "m,speedup_qdla,speedup_fct,display_qdla,display_fct")
        return bad("unexpected csv header: " + line);

    const std::vector<std::string> dense = {"32", "16", "11", "8", "5",
                                            "4",  "3",  "2",  "1.6", "1.3"};
    const std::vector<std::string> fct = {"3",   "1.5", "1",   "0.8", "0.5",
                                          "0.4", "0.3", "0.2", "0.2", "0.1"};
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (!std::getline(in, line)) return bad("table has fewer than 10 rows");
        auto f = split_csv(line);
        if (f.size() != 5) return bad("malformed row: " + line);
        if (f[3] != dense[i] || f[4] != fct[i])
            return bad("row m=" + f[0] + " shows " + f[3] + "/" + f[4] + ", expected " +
                       dense[i] + "/" + fct[i]);
    }
    if (std::getline(in, line)) return bad("table has more than 10 rows");
    return ok("all 20 displayed cells match");
}

Outcome check_monotone_objective() {
    struct Setup {
        Variant v;
        std::size_t m;
        std::size_t per;
    };
    const std::vector<Setup> setups = {{Variant::qdla, 0, 1}, {Variant::hm, 1, 1},
                                       {Variant::hm, 6, 6},   {Variant::hm, 12, 12},
                                       {Variant::qhm, 1, 1},  {Variant::qhm, 6, 1},
                                       {Variant::qhm, 12, 1}};

    std::vector<std::pair<std::string, Matrix>> datasets;
    datasets.emplace_back("random", oracle::random_matrix(16, 512, 42));
    datasets.emplace_back("image", patchify(load_pgm(camera_path())).y);

    double worst = 0.0;
    std::size_t runs = 0;
    for (const auto& [name, y] : datasets) {
        const std::size_t iters = name == "image" ? 30 : 100;
        for (const Setup& su : setups) {
            TrainResult res = train(y, config(su.v, su.m, 4, iters, 3));
            const double slack = kMonotoneSlackRel * res.report.y_norm_sq;
            auto seq = recorded_sequence(res.report, su.per);
            for (std::size_t i = 1; i < seq.size(); ++i) {
                const double rise = seq[i] - seq[i - 1];
                worst = std::max(worst, rise / res.report.y_norm_sq);
                if (rise > slack)
                    return bad(variant_name(su.v) + std::string(" m=") + std::to_string(su.m) +
                               " on " + name + " rose by " + fmt(rise) + " at step " +
                               std::to_string(i));
            }
            ++runs;
        }
    }
    return ok(std::to_string(runs) + " runs, worst relative rise " + fmt(worst));
}

Outcome check_single_reflector_equivalence() {
    double worst = 0.0;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        Matrix y = oracle::random_matrix(16, 512, 100 + seed);
        TrainResult a = train(y, config(Variant::hm, 1, 4, 30, seed));
        TrainResult b = train(y, config(Variant::qhm, 1, 4, 30, seed));
        if (a.report.objectives.size() != b.report.objectives.size())
            return bad("trajectory lengths differ on seed " + std::to_string(seed));
        for (std::size_t i = 0; i < a.report.objectives.size(); ++i) {
            const double oa = a.report.objectives[i], ob = b.report.objectives[i];
            const double rel = std::abs(oa - ob) / std::max({std::abs(oa), std::abs(ob), 1e-300});
            worst = std::max(worst, rel);
            if (rel > kTrajectoryRel)
                return bad("objectives diverge by " + fmt(rel) + " at iteration " +
                           std::to_string(i) + " on seed " + std::to_string(seed));
        }
    }
    return ok("worst relative divergence " + fmt(worst));
}

Outcome check_dense_fixed_point() {
    Matrix y = oracle::random_matrix(16, 512, 7);
    TrainResult res = train(y, config(Variant::qdla, 0, 4, 300, 7));
    SparseCodeMatrix x = sparse_step(y, res.dictionary);

    Matrix yxt = transpose(sparse_times_dense_t(x, y));
    const double nuclear = oracle::nuclear_norm(yxt);
    const double tr = trace(multiply_at_b(res.dictionary.dense_rep(), yxt));
    const double trace_gap = std::abs(tr - nuclear);
    if (trace_gap > kTraceIdentityRel * nuclear)
        return bad("trace identity off by " + fmt(trace_gap) + " vs bound " +
                   fmt(kTraceIdentityRel * nuclear));

    const double y_sq = frobenius_norm_sq(y);
    const double energy_gap = std::abs(x.frob_sq() - nuclear);
    if (energy_gap > kEnergyIdentityRel * y_sq)
        return bad("energy identity off by " + fmt(energy_gap) + " vs bound " +
                   fmt(kEnergyIdentityRel * y_sq));
    return ok("trace gap " + fmt(trace_gap) + ", energy gap " + fmt(energy_gap) + " after " +
              std::to_string(res.report.iterations_run) + " iterations");
}

Outcome check_update_decrease() {
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        Matrix y = oracle::random_matrix(12, 80, 500 + t);
        SparseCodeMatrix x = oracle::random_sparse(12, 80, 3, 900 + t);
        QhUpdate upd = qhm_dictionary_update(y, x, 4);

        auto identity = LearnedDictionary::dense(Matrix::identity(12));
        auto updated = LearnedDictionary::reflectors(upd.dictionary);
        const double before = objective(y, identity, x);
        const double after = objective(y, updated, x);
        const double gap = std::abs((before - after) - upd.predicted_decrease);
        worst = std::max(worst, gap);
        if (gap > kDecreaseRel * std::max(1.0, before))
            return bad("instance " + std::to_string(t) + ": realized decrease misses the " +
                       "prediction by " + fmt(gap));
    }
    return ok("10 instances, worst absolute gap " + fmt(worst));
}

Outcome check_reflector_algebra() {
    Rng rng(60);
    double worst_apply = 0.0, worst_rebuild = 0.0;
    for (std::size_t n : {std::size_t{8}, std::size_t{64}}) {
        for (int t = 0; t < 20; ++t) {
            Matrix q = oracle::random_orthonormal(n, rng);
            auto [dict, signs] = factorize_orthonormal(q);

            Matrix rebuilt = dict_to_dense(dict);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) rebuilt(i, j) *= signs.entries[j];
            worst_rebuild = std::max(worst_rebuild, max_abs(subtract(rebuilt, q)));
            if (worst_rebuild > kFactorizeTol)
                return bad("factorization roundtrip off by " + fmt(worst_rebuild) + " at n=" +
                           std::to_string(n));

            Matrix probe = oracle::random_matrix(n, 4, 7000 + t);
            Matrix via_dict = dict_apply(dict, probe);
            Matrix via_dense = multiply(oracle::dense_reflector_product(dict), probe);
            worst_apply = std::max(worst_apply, max_abs(subtract(via_dict, via_dense)));
            if (worst_apply > kApplyTol)
                return bad("reflector apply deviates from the dense product by " +
                           fmt(worst_apply));

            const std::uint64_t cost = measure_apply_cost(dict);
            if (cost != 4 * n * dict.size())
                return bad("apply cost " + std::to_string(cost) + " != 4nm at n=" +
                           std::to_string(n));
        }
    }
    return ok("roundtrip <= " + fmt(worst_rebuild) + ", apply <= " + fmt(worst_apply) +
              ", cost exactly 4nm");
}

Outcome check_sparse_coding_oracles() {
    // Hard thresholding against a full-sort reference, bit for bit.
    Matrix a = oracle::random_matrix(16, 10000, 88);
    SparseCodeMatrix ours = hard_threshold_top_s(a, 4);
    SparseCodeMatrix ref = oracle::full_sort_threshold(a, 4);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        if (ours.columns[j].size() != ref.columns[j].size())
            return bad("threshold support size differs in column " + std::to_string(j));
        for (std::size_t k = 0; k < ours.columns[j].size(); ++k)
            if (ours.columns[j][k].index != ref.columns[j][k].index ||
                ours.columns[j][k].value != ref.columns[j][k].value)
                return bad("threshold entry differs in column " + std::to_string(j));
    }

    // Greedy pursuit against the naive reference.
    Rng rng(61);
    for (int t = 0; t < 100; ++t) {
        Matrix dict = oracle::random_unit_columns(8, 12, 6000 + t);
        std::vector<double> y(8);
        for (double& v : y) v = rng.normal();
        OmpResult fast = omp_cholesky(dict, y, 4);
        oracle::NaiveOmp slow = oracle::naive_omp(dict, y, 4);
        std::set<std::uint32_t> support;
        for (const auto& e : fast.entries) support.insert(e.index);
        if (support != std::set<std::uint32_t>(slow.support.begin(), slow.support.end()))
            return bad("pursuit support differs from the reference on instance " +
                       std::to_string(t));
    }

    // On an orthonormal dictionary the pursuit picks the thresholding support.
    for (int t = 0; t < 50; ++t) {
        Matrix d = oracle::random_orthonormal(16, rng);
        Matrix y(16, 1);
        for (std::size_t i = 0; i < 16; ++i) y(i, 0) = rng.normal();
        OmpResult omp = omp_cholesky(d, y.column(0), 4);
        SparseCodeMatrix thr = hard_threshold_top_s(multiply_at_b(d, y), 4);
        std::set<std::uint32_t> a_set, b_set;
        for (const auto& e : omp.entries) a_set.insert(e.index);
        for (const auto& e : thr.columns[0]) b_set.insert(e.index);
        if (a_set != b_set)
            return bad("orthonormal-dictionary supports differ on instance " + std::to_string(t));
    }
    return ok("threshold bit-exact on 10000 columns; pursuit matches on 100 + 50 instances");
}

Outcome check_nuclear_bound() {
    double worst = -1e300;
    for (int t = 0; t < 100; ++t) {
        Matrix y = oracle::random_matrix(10, 50, 300 + t);
        SparseCodeMatrix x = oracle::random_sparse(10, 50, 3, 700 + t);
        const double lhs = oracle::nuclear_norm(build_z_orthogonal(y, x));
        const double rhs = 2.0 * oracle::nuclear_norm(transpose(sparse_times_dense_t(x, y)));
        worst = std::max(worst, lhs - rhs);
        if (lhs > rhs + kNuclearSlack)
            return bad("bound violated by " + fmt(lhs - rhs) + " on instance " +
                       std::to_string(t));
    }
    return ok("100 pairs, max lhs-rhs " + fmt(worst));
}

Outcome check_error_table() {
    std::vector<std::string> candidates = {std::string(HHDL_TEST_DATA) + "/peppers.pgm"};
    if (const char* dir = std::getenv("HHDL_IMAGE_DIR"))
        candidates.push_back(std::string(dir) + "/peppers.pgm");
    std::string peppers;
    for (const std::string& c : candidates)
        if (fs::exists(c)) {
            peppers = c;
            break;
        }
    if (peppers.empty())
        return skipped("peppers.pgm not found in testdata/ or $HHDL_IMAGE_DIR; "
                       "desk-scale error-table checks need the standard 512x512 image");

    PatchDataset ds = patchify(load_pgm(peppers));
    auto dct = LearnedDictionary::dense(dct_dictionary());
    const double rmse_dct = dataset_rmse(ds.y, dct, sparse_code(ds.y, dct, 4));
    if (std::abs(rmse_dct - 0.0395) > kErrorTableBand * 0.0395)
        return bad("cosine-basis rmse " + fmt(rmse_dct) + " outside the 0.0395 +-15% band");

    auto rmse_of = [&](Variant v, std::size_t m) {
        TrainResult r = train(ds.y, config(v, m, 4, 100, 0));
        return r.report.final_rmse();
    };
    const double rmse_h6 = rmse_of(Variant::hm, 6);
    const double rmse_h12 = rmse_of(Variant::hm, 12);
    if (!(rmse_h12 < rmse_h6 && rmse_h6 < rmse_dct))
        return bad("expected rmse(m=12) < rmse(m=6) < rmse(dct), got " + fmt(rmse_h12) + ", " +
                   fmt(rmse_h6) + ", " + fmt(rmse_dct));

    const double rmse_h32 = rmse_of(Variant::hm, 32);
    const double rmse_qd = rmse_of(Variant::qdla, 0);
    if (std::abs(rmse_h32 - rmse_qd) > kErrorTableBand * rmse_qd)
        return bad("rmse(m=32) " + fmt(rmse_h32) + " not within 15% of the dense variant " +
                   fmt(rmse_qd));
    return ok("dct " + fmt(rmse_dct) + ", m6 " + fmt(rmse_h6) + ", m12 " + fmt(rmse_h12) +
              ", m32 " + fmt(rmse_h32) + ", dense " + fmt(rmse_qd));
}

Outcome check_inpainting() {
    GrayImage cam = load_pgm(camera_path());
    auto dct = LearnedDictionary::dense(dct_dictionary());

    CorruptionResult whole = corrupt(cam, 0.0, 1);
    InpaintResult untouched = inpaint(whole.image, whole.mask, dct, 4);
    if (untouched.image.pixels != cam.pixels)
        return bad("inpainting with nothing missing changed the image");

    PatchDataset ds = patchify(cam);
    TrainResult trained = train(ds.y, config(Variant::hm, 14, 6, 40, 0));

    CorruptionResult cor = corrupt(cam, 0.4, 9);
    InpaintResult rec = inpaint(cor.image, cor.mask, trained.dictionary, 6);

    double missing_err = 0.0;
    std::size_t missing_count = 0;
    for (std::size_t i = 0; i < cam.pixel_count(); ++i)
        if (!cor.mask.observed[i]) {
            missing_err += std::abs(double(rec.image.pixels[i]) - cam.pixels[i]) / 255.0;
            ++missing_count;
        }
    const double mae_missing = missing_err / double(missing_count);
    if (!std::isfinite(mae_missing)) return bad("reconstruction error is not finite");

    SparseCodeMatrix x = sparse_code(ds.y, trained.dictionary, 6);
    GrayImage encdec = depatchify(ds, trained.dictionary.apply(x.to_dense()));
    double observed_err = 0.0;
    std::size_t observed_count = 0;
    for (std::size_t i = 0; i < cam.pixel_count(); ++i)
        if (cor.mask.observed[i]) {
            observed_err += std::abs(double(encdec.pixels[i]) - cam.pixels[i]) / 255.0;
            ++observed_count;
        }
    const double mae_encode = observed_err / double(observed_count);

    if (mae_missing > kInpaintFactor * mae_encode)
        return bad("missing-pixel mae " + fmt(mae_missing) + " exceeds " + fmt(kInpaintFactor) +
                   "x the encode/decode mae " + fmt(mae_encode));
    return ok("missing-pixel mae " + fmt(mae_missing) + " vs encode/decode mae " +
              fmt(mae_encode) + " (ratio " + fmt(mae_missing / mae_encode) + ")");
}

Outcome check_determinism() {
    GrayImage img = make_noise_image(32, 32, 11);
    const std::string input = wpath("det_input.pgm");
    save_pgm(img, input);

    struct Job {
        std::string args;
        std::vector<std::string> outputs;
    };
    const std::string dict = wpath("det_dict.bin"), report = wpath("det_report.csv");
    const std::string inp = wpath("det_inp.pgm"), inp_cor = wpath("det_inp_corrupted.pgm");
    const std::string inp_csv = wpath("det_inp.csv"), spec = wpath("det_spec.csv");
    const std::string speed = wpath("det_speed.csv");
    const std::vector<Job> jobs = {
        {"train --input " + input + " --variant qhm --m 2 --s 3 --iters 3 --seed 4 --out " +
             dict + " --report " + report,
         {dict, report, dict + ".manifest.json"}},
        {"inpaint --input " + input + " --missing 0.3 --seed 5 --dict dct --s 4 --out " + inp +
             " --metrics " + inp_csv,
         {inp, inp_cor, inp_csv, inp + ".manifest.json"}},
        {"spectrum --input " + input + " --dict dct --s 4 --out " + spec,
         {spec, spec + ".manifest.json"}},
        {"speedups --out " + speed, {speed, speed + ".manifest.json"}},
    };

    std::size_t files = 0;
    for (const Job& job : jobs) {
        if (run_cli(job.args + " >/dev/null") != 0) return bad("command failed: " + job.args);
        std::vector<std::string> first;
        for (const std::string& p : job.outputs) {
            if (!fs::exists(p)) return bad("missing output " + p);
            first.push_back(slurp(p));
        }
        if (run_cli(job.args + " >/dev/null") != 0)
            return bad("second run failed: " + job.args);
        for (std::size_t i = 0; i < job.outputs.size(); ++i, ++files)
            if (slurp(job.outputs[i]) != first[i])
                return bad("rerun changed " + job.outputs[i]);
    }
    return ok(std::to_string(files) + " output files byte-identical across reruns");
}

} // namespace

int main() {
    struct Criterion {
        int number;
        const char* title;
        double budget_seconds;  // 0 = no budget
        std::function<Outcome()> body;
    };
    const std::vector<Criterion> criteria = {
        {1, "published speed-up table reproduces cell for cell", 1.0, check_speedup_table},
        {2, "objective is monotone for every variant on random and image data", 120.0,
         check_monotone_objective},
        {3, "single-reflector variants follow identical trajectories", 0.0,
         check_single_reflector_equivalence},
        {4, "dense-variant fixed point satisfies the trace and energy identities", 0.0,
         check_dense_fixed_point},
        {5, "closed-form update realizes its predicted decrease", 0.0, check_update_decrease},
        {6, "reflector algebra matches dense oracles at exact cost", 0.0,
         check_reflector_algebra},
        {7, "sparse coding matches full-sort and naive-pursuit oracles", 0.0,
         check_sparse_coding_oracles},
        {8, "symmetrized product obeys the nuclear-norm bound", 0.0, check_nuclear_bound},
        {9, "desk-scale error table reproduces on the standard image", 600.0, check_error_table},
        {10, "inpainting recovers missing pixels within the encode envelope", 0.0,
         check_inpainting},
        {11, "cli reruns are byte-identical", 0.0, check_determinism},
    };

    int failed = 0, skipped_count = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = bad(std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.status == Outcome::pass && c.budget_seconds > 0.0 && secs > c.budget_seconds) {
            o = bad("over time budget: " + std::to_string(secs) + "s > " +
                    std::to_string(c.budget_seconds) + "s");
        }
        const char* tag = o.status == Outcome::pass ? "[PASS]"
                          : o.status == Outcome::fail ? "[FAIL]"
                                                      : "[SKIP]";
        std::printf("%s %2d. %s (%.2fs)%s%s\n", tag, c.number, c.title, secs,
                    o.detail.empty() ? "" : " -- ", o.detail.c_str());
        std::fflush(stdout);
        failed += o.status == Outcome::fail;
        skipped_count += o.status == Outcome::skip;
    }

    std::printf("acceptance: %zu criteria, %d failed, %d skipped\n", criteria.size(), failed,
                skipped_count);
    return failed == 0 ? 0 : 1;
}
