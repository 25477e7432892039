#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hhdl/complexity.hpp"
#include "hhdl/dictionary_io.hpp"
#include "hhdl/imaging.hpp"
#include "hhdl/learning.hpp"
#include "hhdl/manifest.hpp"
#include "hhdl/text.hpp"

namespace {

using namespace hhdl;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PatchDataset load_corpus(const std::vector<std::string>& paths) {
    std::vector<PatchDataset> parts;
    parts.reserve(paths.size());
    for (const std::string& p : paths) {
        bool cropped = false;
        GrayImage img = load_pgm(p, &cropped);
        if (cropped)
            std::cerr << "warning: " << p << " center-cropped to a multiple of 8\n";
        parts.push_back(patchify(img));
    }
    return concat_datasets(parts);
}

struct NamedDictionary {
    LearnedDictionary dict;
    std::string method;  // dct, qdla, hm, qhm
    bool from_file = false;
};

NamedDictionary resolve_dictionary(const std::string& spec) {
    NamedDictionary nd;
    if (spec == "dct") {
        nd.dict = LearnedDictionary::dense(dct_dictionary());
        nd.method = "dct";
        return nd;
    }
    nd.dict = read_dictionary(spec);
    nd.from_file = true;
    if (nd.dict.is_dense())
        nd.method = "qdla";
    else
        nd.method = nd.dict.reflector_rep().orthogonal_set ? "qhm" : "hm";
    return nd;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string metrics_csv(const std::string& image, const std::string& method, std::size_t m,
                        std::size_t s, double rmse, double mae, double mse) {
    std::ostringstream os;
    os << "image,method,m,s,rmse,mae,mse\n"
       << image << ',' << method << ',' << m << ',' << s << ',' << format_double(rmse) << ','
       << format_double(mae) << ',' << format_double(mse) << '\n';
    return os.str();
}

void emit(const std::string& body, const std::string& path_or_empty) {
    if (path_or_empty.empty())
        std::cout << body;
    else
        write_text_file(path_or_empty, body);
}

std::string derived_corrupted_path(const std::string& out) {
    const std::filesystem::path p(out);
    std::filesystem::path q = p.parent_path();
    q /= p.stem().string() + "_corrupted" + p.extension().string();
    return q.string();
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
    std::vector<std::string> inputs;
    std::string variant;
    std::size_t m = 0;
    std::size_t s = 4;
    std::size_t iters = 100;
    std::uint64_t seed = 0;
    std::string order = "seq";
    std::string out;
    std::string report;
    bool m_given = false;
};

int run_train(const TrainArgs& a) {
    TrainConfig cfg;
    if (a.variant == "qdla") {
        cfg.variant = Variant::qdla;
        if (a.m_given) std::cerr << "warning: --m is ignored for variant qdla\n";
    } else {
        cfg.variant = a.variant == "hm" ? Variant::hm : Variant::qhm;
        if (!a.m_given) throw UsageError("--m is required for variant " + a.variant);
        cfg.m = a.m;
    }
    cfg.s = a.s;
    cfg.iterations = a.iters;
    cfg.seed = a.seed;
    cfg.update_order = a.order == "rand" ? UpdateOrder::randomized : UpdateOrder::sequential;

    PatchDataset ds = load_corpus(a.inputs);
    TrainResult result = train(ds.y, cfg);
    write_dictionary(a.out, result.dictionary);

    std::vector<std::string> outputs{a.out};
    if (!a.report.empty()) {
        std::ostringstream os;
        write_report_csv(os, result.report);
        write_text_file(a.report, os.str());
        outputs.push_back(a.report);
    }

    RunManifest man;
    man.command = "train";
    man.config = {{"variant", a.variant},
                  {"m", std::to_string(cfg.m)},
                  {"s", std::to_string(a.s)},
                  {"iters", std::to_string(a.iters)},
                  {"seed", std::to_string(a.seed)},
                  {"update-order", a.order}};
    for (const std::string& p : a.inputs) man.input_hashes.push_back({p, fingerprint_file(p)});
    man.outputs = outputs;
    write_manifest(man, a.out + ".manifest.json");

    std::cerr << "trained " << a.variant << " dictionary in " << result.report.iterations_run
              << " iterations, final rmse " << format_double(result.report.final_rmse()) << "\n";
    return kExitOk;
}

// ---- encode ---------------------------------------------------------------

struct EncodeArgs {
    std::string input;
    std::string dict;
    std::size_t s = 4;
    std::string metrics;
    std::string recon;
};

int run_encode(const EncodeArgs& a) {
    bool cropped = false;
    GrayImage img = load_pgm(a.input, &cropped);
    if (cropped) std::cerr << "warning: " << a.input << " center-cropped to a multiple of 8\n";
    PatchDataset ds = patchify(img);
    NamedDictionary nd = resolve_dictionary(a.dict);
    if (nd.dict.dim() != kPatchDim)
        throw std::runtime_error("dictionary dimension " + std::to_string(nd.dict.dim()) +
                                 " does not match the 64-sample patch size");

    SparseCodeMatrix x = sparse_code(ds.y, nd.dict, a.s);
    const double rmse = dataset_rmse(ds.y, nd.dict, x);
    GrayImage recon = depatchify(ds, nd.dict.apply(x.to_dense()));
    PixelMetrics pm = pixel_metrics(img, recon);

    const std::string body = metrics_csv(a.input, nd.method, nd.dict.reflector_count(), a.s,
                                         rmse, pm.mae, pm.mse);
    emit(body, a.metrics);

    std::vector<std::string> outputs;
    if (!a.metrics.empty()) outputs.push_back(a.metrics);
    if (!a.recon.empty()) {
        save_pgm(recon, a.recon);
        outputs.push_back(a.recon);
    }
    if (!outputs.empty()) {
        RunManifest man;
        man.command = "encode";
        man.config = {{"dict", a.dict}, {"s", std::to_string(a.s)}};
        man.input_hashes.push_back({a.input, fingerprint_file(a.input)});
        if (nd.from_file) man.input_hashes.push_back({a.dict, fingerprint_file(a.dict)});
        man.outputs = outputs;
        write_manifest(man, outputs.front() + ".manifest.json");
    }
    return kExitOk;
}

// ---- spectrum -------------------------------------------------------------

struct SpectrumArgs {
    std::vector<std::string> inputs;
    std::string dict;
    std::size_t s = 4;
    std::string out;
};

int run_spectrum(const SpectrumArgs& a) {
    PatchDataset ds = load_corpus(a.inputs);
    NamedDictionary nd = resolve_dictionary(a.dict);
    if (nd.dict.dim() != kPatchDim)
        throw std::runtime_error("dictionary dimension does not match the 64-sample patch size");

    SparseCodeMatrix x = sparse_code(ds.y, nd.dict, a.s);
    SpectrumSnapshot snap = spectrum_report(build_z_orthogonal(ds.y, x));
    if (snap.zero_matrix) std::cerr << "notice: spectrum is identically zero\n";

    std::ostringstream os;
    write_spectrum_csv(os, snap);
    write_text_file(a.out, os.str());

    RunManifest man;
    man.command = "spectrum";
    man.config = {{"dict", a.dict}, {"s", std::to_string(a.s)}};
    for (const std::string& p : a.inputs) man.input_hashes.push_back({p, fingerprint_file(p)});
    if (nd.from_file) man.input_hashes.push_back({a.dict, fingerprint_file(a.dict)});
    man.outputs = {a.out};
    write_manifest(man, a.out + ".manifest.json");
    return kExitOk;
}

// ---- speedups -------------------------------------------------------------

struct SpeedupArgs {
    std::size_t n = 64;
    std::vector<std::size_t> ms = {1, 2, 3, 4, 6, 8, 12, 16, 20, 24};
    std::string out;
};

int run_speedups(const SpeedupArgs& a) {
    std::ostringstream os;
    write_speedup_csv(os, speedup_table(a.n, a.ms));
    emit(os.str(), a.out);

    if (!a.out.empty()) {
        RunManifest man;
        man.command = "speedups";
        std::string mlist;
        for (std::size_t m : a.ms) mlist += (mlist.empty() ? "" : " ") + std::to_string(m);
        man.config = {{"n", std::to_string(a.n)}, {"m-list", mlist}};
        man.outputs = {a.out};
        write_manifest(man, a.out + ".manifest.json");
    }
    return kExitOk;
}

// ---- inpaint --------------------------------------------------------------

struct InpaintArgs {
    std::string input;
    double missing = 0.0;
    std::uint64_t seed = 0;
    std::string dict;
    std::size_t s = 4;
    std::string out;
    std::string corrupted;
    std::string metrics;
};

int run_inpaint(const InpaintArgs& a) {
    bool cropped = false;
    GrayImage original = load_pgm(a.input, &cropped);
    if (cropped) std::cerr << "warning: " << a.input << " center-cropped to a multiple of 8\n";
    NamedDictionary nd = resolve_dictionary(a.dict);

    CorruptionResult cor = corrupt(original, a.missing, a.seed);
    InpaintResult res = inpaint(cor.image, cor.mask, nd.dict, a.s);
    if (res.fallback_patches > 0)
        std::cerr << "notice: " << res.fallback_patches
                  << " patches had too few observed pixels for sparse coding\n";

    save_pgm(res.image, a.out);
    const std::string corrupted_path =
        a.corrupted.empty() ? derived_corrupted_path(a.out) : a.corrupted;
    save_pgm(cor.image, corrupted_path);

    PixelMetrics pm = pixel_metrics(original, res.image);
    std::vector<std::string> outputs{a.out, corrupted_path};
    if (!a.metrics.empty()) {
        write_text_file(a.metrics, metrics_csv(a.input, nd.method, nd.dict.reflector_count(),
                                               a.s, pm.rmse, pm.mae, pm.mse));
        outputs.push_back(a.metrics);
    } else {
        std::cout << metrics_csv(a.input, nd.method, nd.dict.reflector_count(), a.s, pm.rmse,
                                 pm.mae, pm.mse);
    }

    RunManifest man;
    man.command = "inpaint";
    man.config = {{"missing", format_double(a.missing)},
                  {"seed", std::to_string(a.seed)},
                  {"dict", a.dict},
                  {"s", std::to_string(a.s)}};
    man.input_hashes.push_back({a.input, fingerprint_file(a.input)});
    if (nd.from_file) man.input_hashes.push_back({a.dict, fingerprint_file(a.dict)});
    man.outputs = outputs;
    write_manifest(man, a.out + ".manifest.json");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orthonormal sparsifying dictionaries factored into Householder reflectors"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "Learn a dictionary from image patches");
    train_cmd->add_option("--input", train_args.inputs, "Input PGM image(s)")->required();
    train_cmd->add_option("--variant", train_args.variant, "Learning variant")
        ->required()
        ->check(CLI::IsMember({"qdla", "hm", "qhm"}));
    auto* m_opt = train_cmd->add_option("--m", train_args.m, "Reflector count");
    train_cmd->add_option("--s", train_args.s, "Nonzeros per patch");
    train_cmd->add_option("--iters", train_args.iters, "Alternation count");
    train_cmd->add_option("--seed", train_args.seed, "Random seed");
    train_cmd->add_option("--update-order", train_args.order, "Reflector sweep order")
        ->check(CLI::IsMember({"seq", "rand"}));
    train_cmd->add_option("--out", train_args.out, "Dictionary output file")->required();
    train_cmd->add_option("--report", train_args.report, "Per-iteration CSV report");

    EncodeArgs encode_args;
    CLI::App* encode_cmd = app.add_subcommand("encode", "Sparse-code an image and report errors");
    encode_cmd->add_option("--input", encode_args.input, "Input PGM image")->required();
    encode_cmd->add_option("--dict", encode_args.dict, "Dictionary file or 'dct'")->required();
    encode_cmd->add_option("--s", encode_args.s, "Nonzeros per patch");
    encode_cmd->add_option("--metrics", encode_args.metrics, "Metrics CSV (default stdout)");
    encode_cmd->add_option("--recon", encode_args.recon, "Reconstructed PGM output");

    SpectrumArgs spectrum_args;
    CLI::App* spectrum_cmd =
        app.add_subcommand("spectrum", "Export the normalized coding spectrum");
    spectrum_cmd->add_option("--input", spectrum_args.inputs, "Input PGM image(s)")->required();
    spectrum_cmd->add_option("--dict", spectrum_args.dict, "Dictionary file or 'dct'")->required();
    spectrum_cmd->add_option("--s", spectrum_args.s, "Nonzeros per patch");
    spectrum_cmd->add_option("--out", spectrum_args.out, "Spectrum CSV output")->required();

    SpeedupArgs speedup_args;
    CLI::App* speedup_cmd =
        app.add_subcommand("speedups", "Tabulate reflector-product speed-up ratios");
    speedup_cmd->add_option("--n", speedup_args.n, "Signal dimension");
    speedup_cmd->add_option("--m-list", speedup_args.ms, "Reflector counts");
    speedup_cmd->add_option("--out", speedup_args.out, "CSV output (default stdout)");

    InpaintArgs inpaint_args;
    CLI::App* inpaint_cmd =
        app.add_subcommand("inpaint", "Blank random pixels and reconstruct them");
    inpaint_cmd->add_option("--input", inpaint_args.input, "Input PGM image")->required();
    inpaint_cmd->add_option("--missing", inpaint_args.missing, "Fraction of pixels to blank")
        ->required();
    inpaint_cmd->add_option("--seed", inpaint_args.seed, "Random seed");
    inpaint_cmd->add_option("--dict", inpaint_args.dict, "Dictionary file or 'dct'")->required();
    inpaint_cmd->add_option("--s", inpaint_args.s, "Nonzeros per patch");
    inpaint_cmd->add_option("--out", inpaint_args.out, "Reconstructed PGM output")->required();
    inpaint_cmd->add_option("--corrupted", inpaint_args.corrupted,
                            "Corrupted PGM output (default derived from --out)");
    inpaint_cmd->add_option("--metrics", inpaint_args.metrics, "Metrics CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return kExitUsage;
    }
    train_args.m_given = m_opt->count() > 0;

    try {
        if (app.got_subcommand(train_cmd)) return run_train(train_args);
        if (app.got_subcommand(encode_cmd)) return run_encode(encode_args);
        if (app.got_subcommand(spectrum_cmd)) return run_spectrum(spectrum_args);
        if (app.got_subcommand(speedup_cmd)) return run_speedups(speedup_args);
        if (app.got_subcommand(inpaint_cmd)) return run_inpaint(inpaint_args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
