#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rbtr/rb_tensor.hpp"

namespace rbtr {

/// 8-bit RGB image, row-major with interleaved channels.
struct ColorImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> rgb;

    ColorImage() = default;
    ColorImage(std::size_t h, std::size_t w) : height(h), width(w), rgb(h * w * 3, 0) {}

    std::uint8_t& at(std::size_t r, std::size_t c, std::size_t ch) { return rgb[(r * width + c) * 3 + ch]; }
    std::uint8_t at(std::size_t r, std::size_t c, std::size_t ch) const { return rgb[(r * width + c) * 3 + ch]; }
    friend bool operator==(const ColorImage&, const ColorImage&) = default;
};

/// H x W tensor with pixel (R, G, B) mapped to 0 + (R/255) i + (G/255) j + (B/255) k.
RBTensor encode_rb(const ColorImage& img);
/// Clamps the i, j, k components to [0, 1] and rounds to 8 bits. The real part is dropped.
ColorImage decode_rb(const RBTensor& t);

/// Frames stacked as H x W x F.
RBTensor encode_video(const std::vector<ColorImage>& frames);
std::vector<ColorImage> decode_video(const RBTensor& t);

/// Reshapes the leading H x W modes (H = W = 2^n) into n modes of size 4. Pixel
/// (r, c) with binary digits r_l, c_l goes to the 0-based index r_l + 2 c_l of
/// mode l. Any trailing modes are kept after the n new ones.
RBTensor ket_augment(const RBTensor& t);
/// Inverse of ket_augment. `dims` are the dims of the tensor before augmentation.
RBTensor ket_restore(const RBTensor& t, const Dims& dims);

/// Exactly round(sr * prod(dims)) observed entries drawn uniformly without replacement.
IndexMask gen_mask(const Dims& dims, double sr, std::uint64_t seed);

/// |X_hat - X|_F / |X|_F; throws std::invalid_argument if |X|_F = 0.
double rse(const RBTensor& x_hat, const RBTensor& x);

enum class PsnrComponents {
    Color,  ///< the i, j, k components only (three per entry)
    All,    ///< all four real components
};

/// 10 log10(max^2 / MSE), MSE the mean squared component error. +inf on an exact match.
double psnr(const RBTensor& x_hat, const RBTensor& x, double max_val = 1.0,
            PsnrComponents comps = PsnrComponents::Color);

struct MetricReport {
    double rse = 0.0;
    double psnr = 0.0;
    std::optional<std::size_t> storage_cost;
    std::optional<double> compression_ratio;
    std::string psnr_formula = "10*log10(max^2 / (|X_hat - X|_F^2 / N))";

    std::string to_json() const;
};

MetricReport evaluate(const RBTensor& x_hat, const RBTensor& x, PsnrComponents comps = PsnrComponents::Color);

// PNG I/O (8-bit RGB; alpha and palette inputs are converted).
ColorImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ColorImage& img);
/// Every *.png in `dir`, sorted by file name.
std::vector<ColorImage> read_png_frames(const std::filesystem::path& dir);
/// frame_000.png, frame_001.png, ...
void write_png_frames(const std::filesystem::path& dir, const std::vector<ColorImage>& frames);

} // namespace rbtr
