#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include "rbtr/rb_tensor.hpp"

namespace rbtr {

// RBT1 tensor blob, all integers and floats little-endian:
//   "RBT1" | u32 N | u64 dims[N] | c1 as (re, im) f64 pairs in linear order | c2 likewise
void write_rbt(std::ostream& os, const RBTensor& t);
RBTensor read_rbt(std::istream& is);

// RBM1 mask blob:
//   "RBM1" | u32 N | u64 dims[N] | u64 seed | f64 sr | u8 observed[prod dims]
struct MaskFile {
    IndexMask mask;
    std::uint64_t seed = 0;
    double sampling_rate = 0.0;
};
void write_mask(std::ostream& os, const MaskFile& m);
MaskFile read_mask(std::istream& is);

/// Writes through a sibling temporary file and renames it into place, so a
/// failed or interrupted write never leaves a partial file at `path`.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

void save_rbt(const std::filesystem::path& path, const RBTensor& t);
RBTensor load_rbt(const std::filesystem::path& path);

} // namespace rbtr
