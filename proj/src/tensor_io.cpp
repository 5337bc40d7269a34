#include "rbtr/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

#include "rbtr/errors.hpp"

namespace rbtr {

namespace {

constexpr std::uint32_t kMaxOrder = 64;

template <typename U>
void put_le(std::ostream& os, U v) {
    std::array<char, sizeof(U)> buf{};
    for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    os.write(buf.data(), buf.size());
}

template <typename U>
U get_le(std::istream& is) {
    std::array<unsigned char, sizeof(U)> buf{};
    is.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (!is) throw IoError("unexpected end of stream");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double d) { put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

void put_header(std::ostream& os, const char* magic, const Dims& dims) {
    os.write(magic, 4);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) put_le<std::uint64_t>(os, d);
}

Dims get_header(std::istream& is, const char* magic) {
    char got[4] = {};
    is.read(got, 4);
    if (!is || std::memcmp(got, magic, 4) != 0) throw IoError(std::string("bad magic, expected ") + magic);
    const auto n = get_le<std::uint32_t>(is);
    if (n == 0 || n > kMaxOrder) throw IoError("implausible tensor order " + std::to_string(n));
    Dims dims(n);
    for (auto& d : dims) {
        d = get_le<std::uint64_t>(is);
        if (d == 0) throw IoError("zero-length mode in header");
    }
    return dims;
}

void put_channel(std::ostream& os, const Eigen::VectorXcd& c) {
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        put_f64(os, c[i].real());
        put_f64(os, c[i].imag());
    }
}

Eigen::VectorXcd get_channel(std::istream& is, std::size_t n) {
    Eigen::VectorXcd c(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        c[i] = cplx{re, im};
    }
    return c;
}

} // namespace

void write_rbt(std::ostream& os, const RBTensor& t) {
    put_header(os, "RBT1", t.dims());
    put_channel(os, t.c1());
    put_channel(os, t.c2());
    if (!os) throw IoError("failed writing RBT1 stream");
}

RBTensor read_rbt(std::istream& is) {
    Dims dims = get_header(is, "RBT1");
    const std::size_t n = num_elements(dims);
    Eigen::VectorXcd c1 = get_channel(is, n);
    Eigen::VectorXcd c2 = get_channel(is, n);
    return {std::move(dims), std::move(c1), std::move(c2)};
}

void write_mask(std::ostream& os, const MaskFile& m) {
    put_header(os, "RBM1", m.mask.dims);
    put_le<std::uint64_t>(os, m.seed);
    put_f64(os, m.sampling_rate);
    for (auto v : m.mask.observed) os.put(static_cast<char>(v ? 1 : 0));
    if (!os) throw IoError("failed writing RBM1 stream");
}

MaskFile read_mask(std::istream& is) {
    MaskFile m;
    m.mask.dims = get_header(is, "RBM1");
    m.seed = get_le<std::uint64_t>(is);
    m.sampling_rate = get_f64(is);
    m.mask.observed.resize(num_elements(m.mask.dims));
    is.read(reinterpret_cast<char*>(m.mask.observed.data()), static_cast<std::streamsize>(m.mask.observed.size()));
    if (!is) throw IoError("truncated RBM1 mask");
    for (auto& v : m.mask.observed) {
        if (v > 1) throw IoError("RBM1 mask entries must be 0 or 1");
    }
    return m;
}

void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
        try {
            writer(os);
            os.flush();
            if (!os) throw IoError("write failed for " + tmp.string());
        } catch (...) {
            os.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw;
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move " + tmp.string() + " into place");
    }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, [&](std::ostream& os) { os << text; });
}

void save_rbt(const std::filesystem::path& path, const RBTensor& t) {
    write_file_atomic(path, [&](std::ostream& os) { write_rbt(os, t); });
}

RBTensor load_rbt(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    return read_rbt(is);
}

} // namespace rbtr
