#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hhdl/learning.hpp"
#include "hhdl/matrix.hpp"

namespace hhdl {

inline constexpr std::size_t kPatchEdge = 8;
inline constexpr std::size_t kPatchDim = kPatchEdge * kPatchEdge;

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }
    std::uint8_t& at(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
    std::size_t pixel_count() const { return width * height; }
};

GrayImage make_image(std::size_t width, std::size_t height, std::uint8_t fill = 0);

// Binary PGM (P5), maxval 255 only. Dimensions that are not multiples of
// the patch edge are center-cropped; *cropped reports when that happened.
GrayImage load_pgm(const std::string& path, bool* cropped = nullptr);
void save_pgm(const GrayImage& image, const std::string& path);

// Vectorized non-overlapping patches: column p holds patch (p / grid_cols,
// p % grid_cols), ordered column-major within the patch, mean-removed and
// scaled by 1/255. Means stay in raw pixel units.
struct PatchDataset {
    Matrix y;
    std::vector<double> means;
    std::size_t grid_rows = 0;
    std::size_t grid_cols = 0;
};

PatchDataset patchify(const GrayImage& image);
GrayImage depatchify(const PatchDataset& dataset, const Matrix& approx);

// Concatenates datasets column-wise (one corpus from several images).
PatchDataset concat_datasets(const std::vector<PatchDataset>& parts);

// Orthonormal 2D DCT-II basis for vectorized patches, 64x64; the first
// column is the constant atom with entries 1/8.
Matrix dct_dictionary();

struct PixelMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> observed;  // 1 = observed, row-major

    bool is_observed(std::size_t r, std::size_t c) const { return observed[r * width + c] != 0; }
    std::size_t observed_count() const;
};

struct CorruptionResult {
    GrayImage image;  // blanked pixels set to 0
    PixelMask mask;
};

// Blanks exactly round(fraction * W * H) pixels chosen by seeded uniform
// sampling without replacement.
CorruptionResult corrupt(const GrayImage& image, double missing_fraction, std::uint64_t seed);

struct InpaintResult {
    GrayImage image;
    std::size_t fallback_patches = 0;  // too few observed pixels for sparse coding
};

// Per-patch masked sparse coding: restrict dictionary rows to observed
// pixels, renormalize the restricted atoms, code the observed residual
// around the observed mean, then reconstruct only the missing pixels.
// Observed pixels pass through bit-exact.
InpaintResult inpaint(const GrayImage& corrupted, const PixelMask& mask,
                      const LearnedDictionary& d, std::size_t s);

// Frobenius residual on the normalized patch domain: ||Y - D X||_F / sqrt(n N).
double dataset_rmse(const Matrix& y, const LearnedDictionary& d, const SparseCodeMatrix& x);

struct PixelMetrics {
    double mae = 0.0;   // mean |error| on the [0,1] intensity scale
    double mse = 0.0;   // mean squared error, same scale
    double rmse = 0.0;  // sqrt(mse)
};

PixelMetrics pixel_metrics(const GrayImage& reference, const GrayImage& test);

} // namespace hhdl
