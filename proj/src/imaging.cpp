#include "rbtr/imaging.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "rbtr/errors.hpp"

namespace rbtr {

RBTensor encode_rb(const ColorImage& img) {
    if (img.rgb.size() != img.height * img.width * 3) throw DimensionError("encode_rb: pixel buffer size mismatch");
    RBTensor t({img.height, img.width});
    for (std::size_t c = 0; c < img.width; ++c) {
        for (std::size_t r = 0; r < img.height; ++r) {
            t.set(r + img.height * c, RBScalar::from_coeffs(0.0, img.at(r, c, 0) / 255.0, img.at(r, c, 1) / 255.0,
                                                            img.at(r, c, 2) / 255.0));
        }
    }
    return t;
}

namespace {

std::uint8_t quantize(double v) {
    if (!(v > 0.0)) return 0;
    if (v >= 1.0) return 255;
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

void decode_plane(const RBTensor& t, std::size_t offset, ColorImage& img) {
    for (std::size_t c = 0; c < img.width; ++c) {
        for (std::size_t r = 0; r < img.height; ++r) {
            const auto q = t[offset + r + img.height * c].coeffs();
            for (std::size_t ch = 0; ch < 3; ++ch) img.at(r, c, ch) = quantize(q[ch + 1]);
        }
    }
}

std::size_t log2_exact(std::size_t n) {
    if (n == 0 || !std::has_single_bit(n)) throw DimensionError("image side " + std::to_string(n) + " is not a power of two");
    return static_cast<std::size_t>(std::countr_zero(n));
}

} // namespace

ColorImage decode_rb(const RBTensor& t) {
    if (t.order() != 2) throw DimensionError("decode_rb expects an order-2 tensor");
    ColorImage img(t.dim(0), t.dim(1));
    decode_plane(t, 0, img);
    return img;
}

RBTensor encode_video(const std::vector<ColorImage>& frames) {
    if (frames.empty()) throw DimensionError("encode_video: no frames");
    const std::size_t h = frames[0].height, w = frames[0].width;
    RBTensor t({h, w, frames.size()});
    for (std::size_t f = 0; f < frames.size(); ++f) {
        if (frames[f].height != h || frames[f].width != w) throw DimensionError("encode_video: frame sizes differ");
        const RBTensor plane = encode_rb(frames[f]);
        t.c1().segment(static_cast<Eigen::Index>(f * h * w), static_cast<Eigen::Index>(h * w)) = plane.c1();
        t.c2().segment(static_cast<Eigen::Index>(f * h * w), static_cast<Eigen::Index>(h * w)) = plane.c2();
    }
    return t;
}

std::vector<ColorImage> decode_video(const RBTensor& t) {
    if (t.order() != 3) throw DimensionError("decode_video expects an order-3 tensor");
    std::vector<ColorImage> frames;
    for (std::size_t f = 0; f < t.dim(2); ++f) {
        ColorImage img(t.dim(0), t.dim(1));
        decode_plane(t, f * t.dim(0) * t.dim(1), img);
        frames.push_back(std::move(img));
    }
    return frames;
}

namespace {

// Linear index of pixel (r, c) in the augmented 4 x ... x 4 block.
std::size_t ket_index(std::size_t r, std::size_t c, std::size_t n) {
    std::size_t idx = 0, scale = 1;
    for (std::size_t l = 0; l < n; ++l) {
        idx += (((r >> l) & 1u) + 2 * ((c >> l) & 1u)) * scale;
        scale *= 4;
    }
    return idx;
}

} // namespace

RBTensor ket_augment(const RBTensor& t) {
    if (t.order() < 2) throw DimensionError("ket_augment needs at least two modes");
    const std::size_t h = t.dim(0), w = t.dim(1);
    if (h != w) throw DimensionError("ket_augment needs a square image");
    const std::size_t n = log2_exact(h);
    if (n == 0) throw DimensionError("ket_augment needs a side of at least 2");
    Dims out_dims(n, 4);
    out_dims.insert(out_dims.end(), t.dims().begin() + 2, t.dims().end());
    RBTensor out(out_dims);
    const std::size_t block = h * w;
    const std::size_t rest = t.size() / block;
    for (std::size_t s = 0; s < rest; ++s)
        for (std::size_t c = 0; c < w; ++c)
            for (std::size_t r = 0; r < h; ++r)
                out.set(s * block + ket_index(r, c, n), t[s * block + r + h * c]);
    return out;
}

RBTensor ket_restore(const RBTensor& t, const Dims& dims) {
    if (dims.size() < 2 || dims[0] != dims[1]) throw DimensionError("ket_restore: target must start with a square H x W");
    const std::size_t h = dims[0];
    const std::size_t n = log2_exact(h);
    Dims expect(n, 4);
    expect.insert(expect.end(), dims.begin() + 2, dims.end());
    if (t.dims() != expect) throw DimensionError("ket_restore: tensor dims do not match the target");
    RBTensor out(dims);
    const std::size_t block = h * h;
    const std::size_t rest = t.size() / block;
    for (std::size_t s = 0; s < rest; ++s)
        for (std::size_t c = 0; c < h; ++c)
            for (std::size_t r = 0; r < h; ++r)
                out.set(s * block + r + h * c, t[s * block + ket_index(r, c, n)]);
    return out;
}

namespace {

// Uniform integer in [0, bound) by rejection, identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % bound;
}

} // namespace

IndexMask gen_mask(const Dims& dims, double sr, std::uint64_t seed) {
    if (!(sr > 0.0 && sr <= 1.0)) throw std::invalid_argument("sampling rate must lie in (0, 1]");
    const std::size_t total = num_elements(dims);
    const auto count = static_cast<std::size_t>(std::llround(sr * static_cast<double>(total)));
    std::vector<std::size_t> perm(total);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + uniform_below(gen, total - i);
        std::swap(perm[i], perm[j]);
    }
    IndexMask mask = IndexMask::empty(dims);
    for (std::size_t i = 0; i < count; ++i) mask.observed[perm[i]] = 1;
    return mask;
}

double rse(const RBTensor& x_hat, const RBTensor& x) {
    if (x_hat.dims() != x.dims()) throw DimensionError("rse: dims differ");
    const double ref = tensor_frobenius(x);
    if (ref == 0.0) throw std::invalid_argument("rse: reference tensor has zero norm");
    return tensor_frobenius(x_hat - x) / ref;
}

double psnr(const RBTensor& x_hat, const RBTensor& x, double max_val, PsnrComponents comps) {
    if (x_hat.dims() != x.dims()) throw DimensionError("psnr: dims differ");
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto a = x_hat[i].coeffs();
        const auto b = x[i].coeffs();
        for (std::size_t q = comps == PsnrComponents::Color ? 1 : 0; q < 4; ++q) sq += (a[q] - b[q]) * (a[q] - b[q]);
    }
    if (sq == 0.0) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(x.size() * (comps == PsnrComponents::Color ? 3 : 4));
    return 10.0 * std::log10(max_val * max_val / (sq / n));
}

std::string MetricReport::to_json() const {
    nlohmann::ordered_json j;
    j["rse"] = rse;
    if (std::isfinite(psnr)) j["psnr"] = psnr;
    else j["psnr"] = "inf";
    if (storage_cost) j["storage_cost"] = *storage_cost;
    if (compression_ratio) j["compression_ratio"] = *compression_ratio;
    j["psnr_formula"] = psnr_formula;
    return j.dump(2);
}

MetricReport evaluate(const RBTensor& x_hat, const RBTensor& x, PsnrComponents comps) {
    MetricReport m;
    m.rse = rse(x_hat, x);
    m.psnr = psnr(x_hat, x, 1.0, comps);
    return m;
}

} // namespace rbtr
