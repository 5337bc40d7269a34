#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rbtr/errors.hpp"
#include "rbtr/tensor_io.hpp"
#include "test_support.hpp"

using namespace rbtr;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rbtr_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST(TensorIo, RoundTripIsBitExact) {
    std::mt19937_64 gen(41);
    RBTensor t = rbtr::testing::random_tensor(gen, {3, 1, 4});
    t.set(0, RBScalar{cplx(-0.0, 1e-308), cplx(1e300, -3.5)});
    std::stringstream ss;
    write_rbt(ss, t);
    const RBTensor back = read_rbt(ss);
    EXPECT_EQ(back.dims(), t.dims());
    EXPECT_EQ(std::memcmp(back.c1().data(), t.c1().data(), t.size() * sizeof(cplx)), 0);
    EXPECT_EQ(std::memcmp(back.c2().data(), t.c2().data(), t.size() * sizeof(cplx)), 0);
}

TEST(TensorIo, ByteLayout) {
    RBTensor t({2});
    t.set(0, RBScalar{cplx(1.0, 2.0), cplx(3.0, 4.0)});
    std::stringstream ss;
    write_rbt(ss, t);
    const std::string bytes = ss.str();
    ASSERT_EQ(bytes.size(), 4u + 4u + 8u + 2 * 2 * 16u);
    EXPECT_EQ(bytes.substr(0, 4), "RBT1");
    EXPECT_EQ(bytes[4], 1);
    EXPECT_EQ(bytes[8], 2);
    double first = 0.0;
    std::memcpy(&first, bytes.data() + 16, 8);
    EXPECT_EQ(first, 1.0);
    double c2_re = 0.0;
    std::memcpy(&c2_re, bytes.data() + 16 + 32, 8);
    EXPECT_EQ(c2_re, 3.0);
}

TEST(TensorIo, RejectsCorruptStreams) {
    std::stringstream bad_magic("RBT2\x01\x00\x00\x00");
    EXPECT_THROW(read_rbt(bad_magic), IoError);
    RBTensor t({4, 4});
    std::stringstream ss;
    write_rbt(ss, t);
    std::stringstream truncated(ss.str().substr(0, 40));
    EXPECT_THROW(read_rbt(truncated), IoError);
}

TEST(TensorIo, MaskRoundTrip) {
    MaskFile m;
    m.mask = IndexMask::empty({3, 5});
    m.mask.observed[2] = m.mask.observed[7] = 1;
    m.seed = 0xDEADBEEFCAFEull;
    m.sampling_rate = 2.0 / 15.0;
    std::stringstream ss;
    write_mask(ss, m);
    const MaskFile back = read_mask(ss);
    EXPECT_EQ(back.mask.dims, m.mask.dims);
    EXPECT_EQ(back.mask.observed, m.mask.observed);
    EXPECT_EQ(back.seed, m.seed);
    EXPECT_EQ(back.sampling_rate, m.sampling_rate);
}

TEST(TensorIo, AtomicWriteLeavesNothingOnFailure) {
    const fs::path dir = scratch_dir("atomic");
    const fs::path target = dir / "x.rbt";
    EXPECT_THROW(write_file_atomic(target, [](std::ostream& os) {
                     os << "partial";
                     throw IoError("interrupted");
                 }),
                 IoError);
    EXPECT_FALSE(fs::exists(target));
    EXPECT_TRUE(fs::is_empty(dir));

    std::mt19937_64 gen(42);
    const RBTensor t = rbtr::testing::random_tensor(gen, {2, 2});
    save_rbt(target, t);
    EXPECT_EQ(load_rbt(target), t);
    EXPECT_FALSE(fs::exists(dir / "x.rbt.tmp"));
}

TEST(TensorIo, MissingFileIsIoError) {
    EXPECT_THROW(load_rbt("/nonexistent/dir/t.rbt"), IoError);
}
