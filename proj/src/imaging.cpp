#include "hhdl/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "hhdl/rng.hpp"
#include "hhdl/sparse.hpp"

namespace hhdl {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void format_error(const std::string& path, const std::string& why) {
    throw std::runtime_error(path + ": " + why);
}

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

std::size_t parse_dim(const std::string& tok, const std::string& path) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        format_error(path, "malformed PGM header");
    return static_cast<std::size_t>(std::stoull(tok));
}

GrayImage center_crop(const GrayImage& img, std::size_t w, std::size_t h) {
    GrayImage out = make_image(w, h);
    const std::size_t r0 = (img.height - h) / 2;
    const std::size_t c0 = (img.width - w) / 2;
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) out.at(r, c) = img.at(r0 + r, c0 + c);
    return out;
}

std::uint8_t to_pixel(double v) {
    const double r = std::round(v);
    if (r <= 0.0) return 0;
    if (r >= 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

} // namespace

GrayImage make_image(std::size_t width, std::size_t height, std::uint8_t fill) {
    GrayImage img;
    img.width = width;
    img.height = height;
    img.pixels.assign(width * height, fill);
    return img;
}

GrayImage load_pgm(const std::string& path, bool* cropped) {
    if (cropped) *cropped = false;
    std::ifstream in(path, std::ios::binary);
    if (!in) format_error(path, "cannot open");

    if (next_token(in) != "P5") format_error(path, "not a binary PGM (P5)");
    const std::size_t width = parse_dim(next_token(in), path);
    const std::size_t height = parse_dim(next_token(in), path);
    const std::size_t maxval = parse_dim(next_token(in), path);
    if (width == 0 || height == 0) format_error(path, "empty image");
    if (maxval != 255) format_error(path, "unsupported maxval (need 255)");

    GrayImage img = make_image(width, height);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.pixels.size())
        format_error(path, "truncated pixel payload");

    const std::size_t w8 = (width / kPatchEdge) * kPatchEdge;
    const std::size_t h8 = (height / kPatchEdge) * kPatchEdge;
    if (w8 == 0 || h8 == 0) format_error(path, "smaller than one 8x8 patch");
    if (w8 != width || h8 != height) {
        img = center_crop(img, w8, h8);
        if (cropped) *cropped = true;
    }
    return img;
}

void save_pgm(const GrayImage& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) format_error(path, "cannot open for writing");
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out) format_error(path, "write failed");
}

PatchDataset patchify(const GrayImage& image) {
    if (image.width % kPatchEdge != 0 || image.height % kPatchEdge != 0)
        throw std::invalid_argument("patchify: dimensions must be multiples of 8");
    PatchDataset ds;
    ds.grid_rows = image.height / kPatchEdge;
    ds.grid_cols = image.width / kPatchEdge;
    const std::size_t count = ds.grid_rows * ds.grid_cols;
    ds.y = Matrix(kPatchDim, count);
    ds.means.resize(count);

    for (std::size_t p = 0; p < count; ++p) {
        const std::size_t r0 = (p / ds.grid_cols) * kPatchEdge;
        const std::size_t c0 = (p % ds.grid_cols) * kPatchEdge;
        double sum = 0.0;
        for (std::size_t c = 0; c < kPatchEdge; ++c)
            for (std::size_t r = 0; r < kPatchEdge; ++r) sum += image.at(r0 + r, c0 + c);
        const double mean = sum / static_cast<double>(kPatchDim);
        ds.means[p] = mean;
        for (std::size_t c = 0; c < kPatchEdge; ++c)
            for (std::size_t r = 0; r < kPatchEdge; ++r)
                ds.y(c * kPatchEdge + r, p) = (image.at(r0 + r, c0 + c) - mean) / 255.0;
    }
    return ds;
}

GrayImage depatchify(const PatchDataset& dataset, const Matrix& approx) {
    const std::size_t count = dataset.grid_rows * dataset.grid_cols;
    if (approx.rows() != kPatchDim || approx.cols() != count ||
        dataset.means.size() != count)
        throw std::invalid_argument("depatchify: geometry mismatch");

    GrayImage img = make_image(dataset.grid_cols * kPatchEdge, dataset.grid_rows * kPatchEdge);
    for (std::size_t p = 0; p < count; ++p) {
        const std::size_t r0 = (p / dataset.grid_cols) * kPatchEdge;
        const std::size_t c0 = (p % dataset.grid_cols) * kPatchEdge;
        for (std::size_t c = 0; c < kPatchEdge; ++c)
            for (std::size_t r = 0; r < kPatchEdge; ++r)
                img.at(r0 + r, c0 + c) =
                    to_pixel(approx(c * kPatchEdge + r, p) * 255.0 + dataset.means[p]);
    }
    return img;
}

PatchDataset concat_datasets(const std::vector<PatchDataset>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_datasets: no datasets");
    if (parts.size() == 1) return parts.front();
    std::size_t total = 0;
    for (const auto& p : parts) total += p.y.cols();

    PatchDataset out;
    out.grid_rows = 0;  // concatenated corpora have no single image geometry
    out.grid_cols = 0;
    out.y = Matrix(kPatchDim, total);
    out.means.reserve(total);
    std::size_t at = 0;
    for (const auto& p : parts) {
        for (std::size_t j = 0; j < p.y.cols(); ++j, ++at)
            for (std::size_t i = 0; i < kPatchDim; ++i) out.y(i, at) = p.y(i, j);
        out.means.insert(out.means.end(), p.means.begin(), p.means.end());
    }
    return out;
}

Matrix dct_dictionary() {
    // 8-point orthonormal DCT-II rows: c(k,i) = a_k cos(pi (2i+1) k / 16).
    double c[kPatchEdge][kPatchEdge];
    for (std::size_t k = 0; k < kPatchEdge; ++k) {
        const double a = k == 0 ? std::sqrt(1.0 / kPatchEdge) : std::sqrt(2.0 / kPatchEdge);
        for (std::size_t i = 0; i < kPatchEdge; ++i)
            c[k][i] = a * std::cos(kPi * (2.0 * i + 1.0) * k / (2.0 * kPatchEdge));
    }
    // Synthesis atoms: column (kc*8 + kr) holds the vectorized patch
    // c[kr][r] * c[kc][col], matching the column-major patch layout.
    Matrix q(kPatchDim, kPatchDim);
    for (std::size_t kc = 0; kc < kPatchEdge; ++kc)
        for (std::size_t kr = 0; kr < kPatchEdge; ++kr)
            for (std::size_t pc = 0; pc < kPatchEdge; ++pc)
                for (std::size_t pr = 0; pr < kPatchEdge; ++pr)
                    q(pc * kPatchEdge + pr, kc * kPatchEdge + kr) = c[kr][pr] * c[kc][pc];
    return q;
}

std::size_t PixelMask::observed_count() const {
    std::size_t n = 0;
    for (std::uint8_t v : observed) n += v != 0;
    return n;
}

CorruptionResult corrupt(const GrayImage& image, double missing_fraction, std::uint64_t seed) {
    if (missing_fraction < 0.0 || missing_fraction >= 1.0)
        throw std::invalid_argument("corrupt: missing fraction must lie in [0, 1)");
    CorruptionResult res;
    res.image = image;
    res.mask.width = image.width;
    res.mask.height = image.height;
    res.mask.observed.assign(image.pixel_count(), 1);

    const auto blank_count = static_cast<std::uint64_t>(
        std::llround(missing_fraction * static_cast<double>(image.pixel_count())));
    if (blank_count == 0) return res;

    Rng rng(mix_seed(seed, 5));
    for (std::uint64_t idx : rng.sample_without_replacement(image.pixel_count(), blank_count)) {
        res.image.pixels[idx] = 0;
        res.mask.observed[idx] = 0;
    }
    return res;
}

InpaintResult inpaint(const GrayImage& corrupted, const PixelMask& mask,
                      const LearnedDictionary& d, std::size_t s) {
    if (d.dim() != kPatchDim) throw std::invalid_argument("inpaint: dictionary dimension must be 64");
    if (mask.width != corrupted.width || mask.height != corrupted.height)
        throw std::invalid_argument("inpaint: mask geometry mismatch");
    if (corrupted.width % kPatchEdge != 0 || corrupted.height % kPatchEdge != 0)
        throw std::invalid_argument("inpaint: dimensions must be multiples of 8");
    if (s == 0 || s > kPatchDim) throw std::invalid_argument("inpaint: s must lie in [1, 64]");

    const Matrix dense = d.to_dense();
    InpaintResult res;
    res.image = corrupted;

    const std::size_t grid_rows = corrupted.height / kPatchEdge;
    const std::size_t grid_cols = corrupted.width / kPatchEdge;
    for (std::size_t p = 0; p < grid_rows * grid_cols; ++p) {
        const std::size_t r0 = (p / grid_cols) * kPatchEdge;
        const std::size_t c0 = (p % grid_cols) * kPatchEdge;

        std::vector<std::size_t> observed;  // vectorized in-patch indices
        observed.reserve(kPatchDim);
        double sum = 0.0;
        for (std::size_t c = 0; c < kPatchEdge; ++c)
            for (std::size_t r = 0; r < kPatchEdge; ++r)
                if (mask.is_observed(r0 + r, c0 + c)) {
                    observed.push_back(c * kPatchEdge + r);
                    sum += corrupted.at(r0 + r, c0 + c);
                }
        if (observed.size() == kPatchDim) continue;  // nothing missing

        const double mean =
            observed.empty() ? 0.0 : sum / static_cast<double>(observed.size());

        // Restricted atoms with non-negligible observed energy, renormalized.
        std::vector<std::size_t> kept;
        std::vector<double> norms;
        Matrix restricted(observed.size(), 0);
        if (observed.size() >= s) {
            for (std::size_t a = 0; a < kPatchDim; ++a) {
                double nsq = 0.0;
                for (std::size_t i : observed) nsq += dense(i, a) * dense(i, a);
                if (nsq > 1e-20) {
                    kept.push_back(a);
                    norms.push_back(std::sqrt(nsq));
                }
            }
        }

        std::vector<double> coeff;  // per kept atom, on the renormalized columns
        if (!kept.empty()) {
            restricted = Matrix(observed.size(), kept.size());
            for (std::size_t k = 0; k < kept.size(); ++k)
                for (std::size_t i = 0; i < observed.size(); ++i)
                    restricted(i, k) = dense(observed[i], kept[k]) / norms[k];
            std::vector<double> target(observed.size());
            for (std::size_t i = 0; i < observed.size(); ++i)
                target[i] = (corrupted.at(r0 + observed[i] % kPatchEdge,
                                          c0 + observed[i] / kPatchEdge) -
                             mean) /
                            255.0;
            coeff.assign(kept.size(), 0.0);
            for (const SparseEntry& e : omp_cholesky(restricted, target, s).entries)
                coeff[e.index] = e.value;
        } else {
            ++res.fallback_patches;
        }

        for (std::size_t c = 0; c < kPatchEdge; ++c)
            for (std::size_t r = 0; r < kPatchEdge; ++r) {
                if (mask.is_observed(r0 + r, c0 + c)) continue;
                const std::size_t i = c * kPatchEdge + r;
                double v = 0.0;
                for (std::size_t k = 0; k < kept.size(); ++k)
                    if (coeff[k] != 0.0) v += (coeff[k] / norms[k]) * dense(i, kept[k]);
                res.image.at(r0 + r, c0 + c) = to_pixel(v * 255.0 + mean);
            }
    }
    return res;
}

double dataset_rmse(const Matrix& y, const LearnedDictionary& d, const SparseCodeMatrix& x) {
    const double obj = objective(y, d, x);
    return std::sqrt(obj / (static_cast<double>(y.rows()) * static_cast<double>(y.cols())));
}

PixelMetrics pixel_metrics(const GrayImage& reference, const GrayImage& test) {
    if (reference.width != test.width || reference.height != test.height)
        throw std::invalid_argument("pixel_metrics: image sizes differ");
    PixelMetrics m;
    const std::size_t count = reference.pixel_count();
    for (std::size_t i = 0; i < count; ++i) {
        const double e =
            std::abs(static_cast<double>(reference.pixels[i]) - test.pixels[i]) / 255.0;
        m.mae += e;
        m.mse += e * e;
    }
    m.mae /= static_cast<double>(count);
    m.mse /= static_cast<double>(count);
    m.rmse = std::sqrt(m.mse);
    return m;
}

} // namespace hhdl
