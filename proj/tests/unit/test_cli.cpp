#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "rbtr/imaging.hpp"
#include "rbtr/tensor_io.hpp"
#include "rbtr/tensor_ring.hpp"
#include "test_support.hpp"

using namespace rbtr;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rbtr_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

const std::string kBaboon = (fs::path(RBTR_TEST_DATA) / "baboon64.png").string();

} // namespace

TEST(Cli, DecomposeNearLossless) {
    const fs::path dir = fresh_dir("lossless");
    std::mt19937_64 gen(101);
    save_rbt(dir / "t.rbt", tr_reconstruct(rbtr::testing::random_cores(gen, {1, 2, 2}, {3, 3, 4})));
    const CliResult r = run_cli({"decompose", "--input", (dir / "t.rbt").string(), "--eps", "1e-12", "--out",
                           (dir / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_LT(j["rse"].get<double>(), 1e-8);
    EXPECT_TRUE(fs::exists(dir / "out" / "reconstruction.rbt"));
    EXPECT_TRUE(fs::exists(dir / "out" / "cores" / "cores.json"));
    EXPECT_EQ(load_cores(dir / "out" / "cores").order(), 3u);
}

TEST(Cli, DecomposeImageMeetsErrorBound) {
    const fs::path dir = fresh_dir("decompose_img");
    const CliResult r = run_cli({"decompose", "--input", kBaboon, "--eps", "0.05", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "metrics.json"));
    EXPECT_LE(j["rse"].get<double>(), 0.05 * 1.05);
    EXPECT_GT(j["compression_ratio"].get<double>(), 1.0);
    EXPECT_EQ(read_png(dir / "reconstruction.png").height, 64u);
}

TEST(Cli, MissingInputLeavesNoOutputs) {
    const fs::path dir = fs::temp_directory_path() / "rbtr_cli_missing";
    fs::remove_all(dir);
    const CliResult r = run_cli({"decompose", "--input", "/nonexistent/in.png", "--eps", "0.1", "--out", dir.string()});
    EXPECT_EQ(r.code, cli::kIo);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, NonPowerOfTwoImageIsUsageError) {
    const fs::path dir = fresh_dir("npot");
    write_png(dir / "odd.png", ColorImage(6, 6));
    const CliResult r = run_cli({"decompose", "--input", (dir / "odd.png").string(), "--eps", "0.1", "--out",
                           (dir / "out").string()});
    EXPECT_EQ(r.code, cli::kUsage);
    EXPECT_NE(r.err.find("power of two"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, cli::kUsage);
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kUsage);
    EXPECT_EQ(run_cli({"decompose", "--input", kBaboon, "--eps", "abc", "--out", "/tmp/x"}).code, cli::kUsage);
    EXPECT_EQ(run_cli({"complete", "--input", kBaboon, "--out", "/tmp/x"}).code, cli::kUsage);
    EXPECT_EQ(run_cli({"complete", "--input", kBaboon, "--sr", "0.5", "--beta1", "-1", "--out", "/tmp/x"}).code,
              cli::kUsage);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, CompleteFullSamplingReproducesInput) {
    const fs::path dir = fresh_dir("full");
    const CliResult r = run_cli({"complete", "--input", kBaboon, "--sr", "1", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_png(dir / "recovered.png"), read_png(kBaboon));
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(report["iterations"].get<int>(), 1);
    EXPECT_EQ(report["rse"].get<double>(), 0.0);
    EXPECT_TRUE(fs::exists(dir / "observed.png"));
    EXPECT_TRUE(fs::exists(dir / "mask.rbm"));
}

TEST(Cli, CompleteIsDeterministic) {
    const fs::path dir = fresh_dir("determinism");
    std::mt19937_64 gen(102);
    save_rbt(dir / "t.rbt", tr_reconstruct(rbtr::testing::random_cores(gen, {1, 2, 2, 1}, {4, 4, 4, 4})));
    auto args = [&](const std::string& out) {
        return std::vector<std::string>{"complete", "--input", (dir / "t.rbt").string(), "--sr", "0.5", "--seed", "7",
                                        "--max-iter", "30", "--out", (dir / out).string()};
    };
    const CliResult a = run_cli(args("a")), b = run_cli(args("b"));
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
    EXPECT_EQ(slurp(dir / "a" / "recovered.rbt"), slurp(dir / "b" / "recovered.rbt"));
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.err.find("iter 10 "), std::string::npos);
    EXPECT_NE(a.err.find("iter 30 "), std::string::npos);
    EXPECT_EQ(a.err.find("iter 5 "), std::string::npos);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
    const fs::path dir = fresh_dir("config");
    std::mt19937_64 gen(103);
    save_rbt(dir / "t.rbt", rbtr::testing::random_tensor(gen, {4, 4, 4}));
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# completion settings\n"
            << "input = " << (dir / "t.rbt").string() << "\n"
            << "sr = 0.5\nmax-iter = 3\nlambda = 0.1\n";
    }
    const CliResult r = run_cli({"complete", "--config", (dir / "run.cfg").string(), "--max-iter", "5", "--out",
                           (dir / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    EXPECT_EQ(report["iterations"].get<int>(), 5);

    {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "sr = 0.5\nwarp_factor = 9\n";
    }
    const CliResult bad = run_cli({"complete", "--config", (dir / "bad.cfg").string(), "--input", (dir / "t.rbt").string(),
                             "--out", (dir / "bad").string()});
    EXPECT_EQ(bad.code, cli::kUsage);
    EXPECT_NE(bad.err.find("warp_factor"), std::string::npos);
}

TEST(Cli, EvalReportsMetrics) {
    const fs::path dir = fresh_dir("eval");
    RBTensor ref({4, 4}), test({4, 4});
    for (std::size_t i = 0; i < ref.size(); ++i) {
        ref.set(i, RBScalar::from_coeffs(0.5, 0.2, 0.3, 0.4));
        test.set(i, RBScalar::from_coeffs(0.6, 0.3, 0.4, 0.5));
    }
    save_rbt(dir / "ref.rbt", ref);
    save_rbt(dir / "test.rbt", test);
    save_rbt(dir / "zero.rbt", RBTensor({4, 4}));

    CliResult r = run_cli({"eval", "--ref", (dir / "ref.rbt").string(), "--test", (dir / "ref.rbt").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out)["rse"].get<double>(), 0.0);

    r = run_cli({"eval", "--ref", (dir / "ref.rbt").string(), "--test", (dir / "zero.rbt").string()});
    EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out)["rse"].get<double>(), 1.0);

    r = run_cli({"eval", "--ref", (dir / "ref.rbt").string(), "--test", (dir / "test.rbt").string()});
    EXPECT_NEAR(nlohmann::json::parse(r.out)["psnr"].get<double>(), 20.0, 1e-9);

    r = run_cli({"eval", "--ref", (dir / "ref.rbt").string(), "--test", (dir / "test.rbt").string(), "--format", "csv"});
    EXPECT_EQ(r.out.rfind("rse,psnr,storage_cost,compression_ratio\n", 0), 0u);

    save_rbt(dir / "other.rbt", RBTensor({2, 8}));
    r = run_cli({"eval", "--ref", (dir / "ref.rbt").string(), "--test", (dir / "other.rbt").string()});
    EXPECT_EQ(r.code, cli::kUsage);
}
