#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbtr/completion.hpp"
#include "rbtr/errors.hpp"
#include "rbtr/imaging.hpp"
#include "rbtr/tensor_io.hpp"
#include "rbtr/tensor_ring.hpp"

namespace rbtr::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Settings = std::map<std::string, std::string>;

const std::map<std::string, std::vector<std::string>> kCommandKeys = {
    {"decompose", {"input", "out", "eps", "format"}},
    {"complete",
     {"input", "out", "sr", "seed", "lambda", "beta1", "beta2", "beta3", "alpha", "d", "max_iter", "tol", "format"}},
    {"eval", {"ref", "test", "format"}},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

Settings read_config(const fs::path& path, const std::vector<std::string>& allowed) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file " + path.string());
    Settings s;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = normalize_key(trim(line.substr(0, eq)));
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        s[key] = trim(line.substr(eq + 1));
    }
    return s;
}

template <typename T>
T parse_number(const Settings& s, const std::string& key, T fallback) {
    const auto it = s.find(key);
    if (it == s.end()) return fallback;
    const std::string& text = it->second;
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw UsageError("invalid value '" + text + "' for " + key);
    }
    return value;
}

const std::string& require(const Settings& s, const std::string& key) {
    const auto it = s.find(key);
    if (it == s.end() || it->second.empty()) throw UsageError("missing required setting --" + key);
    return it->second;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        Settings one{{key, trim(item)}};
        out.push_back(parse_number<double>(one, key, 0.0));
    }
    if (out.empty()) throw UsageError("empty list for " + key);
    return out;
}

enum class Kind { Image, Video, Raw };

struct Input {
    Kind kind = Kind::Raw;
    RBTensor plain;     ///< H x W, H x W x F, or the raw tensor
    RBTensor working;   ///< what the algorithms see (ket-augmented for images)
    Dims original_dims; ///< real-valued dims used for the compression ratio
};

Input load_input(const fs::path& path) {
    std::error_code ec;
    if (!fs::exists(path, ec)) throw IoError("input " + path.string() + " does not exist");
    Input in;
    if (fs::is_directory(path, ec)) {
        in.kind = Kind::Video;
        in.plain = encode_video(read_png_frames(path));
        in.original_dims = {in.plain.dim(0), in.plain.dim(1), 3, in.plain.dim(2)};
    } else if (path.extension() == ".png") {
        in.kind = Kind::Image;
        in.plain = encode_rb(read_png(path));
        in.original_dims = {in.plain.dim(0), in.plain.dim(1), 3};
    } else if (path.extension() == ".rbt") {
        in.kind = Kind::Raw;
        in.plain = load_rbt(path);
        in.working = in.plain;
        in.original_dims = in.plain.dims();
        return in;
    } else {
        throw UsageError("unsupported input " + path.string() + " (expected .png, .rbt or a frame directory)");
    }
    in.working = ket_augment(in.plain);
    return in;
}

RBTensor to_plain(const Input& in, const RBTensor& working) {
    return in.kind == Kind::Raw ? working : ket_restore(working, in.plain.dims());
}

// Re-quantized to 8 bits for images so metrics describe what is written to disk.
RBTensor as_stored(const Input& in, const RBTensor& plain) {
    switch (in.kind) {
    case Kind::Image: return encode_rb(decode_rb(plain));
    case Kind::Video: return encode_video(decode_video(plain));
    case Kind::Raw: break;
    }
    return plain;
}

PsnrComponents components(const Input& in) {
    return in.kind == Kind::Raw ? PsnrComponents::All : PsnrComponents::Color;
}

void write_tensor_output(const Input& in, const fs::path& base, const RBTensor& plain) {
    switch (in.kind) {
    case Kind::Image: write_png(fs::path(base) += ".png", decode_rb(plain)); break;
    case Kind::Video: write_png_frames(base, decode_video(plain)); break;
    case Kind::Raw: save_rbt(fs::path(base) += ".rbt", plain); break;
    }
}

void print_metrics(std::ostream& out, const MetricReport& m, const std::string& format) {
    if (format == "csv") {
        out << "rse,psnr,storage_cost,compression_ratio\n";
        out << m.rse << ',' << m.psnr << ',';
        if (m.storage_cost) out << *m.storage_cost;
        out << ',';
        if (m.compression_ratio) out << *m.compression_ratio;
        out << '\n';
    } else {
        out << m.to_json() << '\n';
    }
}

std::string output_format(const Settings& s) {
    const auto it = s.find("format");
    const std::string f = it == s.end() ? "json" : it->second;
    if (f != "json" && f != "csv") throw UsageError("format must be json or csv");
    return f;
}

int cmd_decompose(const Settings& s, std::ostream& out, std::ostream& err) {
    const double eps = parse_number<double>(s, "eps", -1.0);
    if (!(eps > 0.0) || !(eps < 1.0)) throw UsageError("--eps must lie in (0, 1)");
    const fs::path out_dir = require(s, "out");
    const std::string format = output_format(s);
    const Input in = load_input(require(s, "input"));

    const TRCores cores = rbtr_svd(in.working, eps);
    const RBTensor recon = to_plain(in, tr_reconstruct(cores));
    MetricReport m = evaluate(as_stored(in, recon), in.plain, components(in));
    m.storage_cost = storage_cost(cores);
    m.compression_ratio = compression_ratio(cores, in.original_dims);

    fs::create_directories(out_dir);
    save_cores(out_dir / "cores", cores, eps);
    write_tensor_output(in, out_dir / "reconstruction", recon);
    write_text_atomic(out_dir / "metrics.json", m.to_json() + "\n");
    err << "ranks:";
    for (auto r : cores.ranks()) err << ' ' << r;
    err << '\n';
    print_metrics(out, m, format);
    return kOk;
}

int cmd_complete(const Settings& s, std::ostream& out, std::ostream& err) {
    const double sr = parse_number<double>(s, "sr", -1.0);
    if (!(sr > 0.0 && sr <= 1.0)) throw UsageError("--sr must lie in (0, 1]");
    CompletionConfig cfg;
    cfg.seed = parse_number<std::uint64_t>(s, "seed", 0);
    cfg.lambda = parse_number<double>(s, "lambda", cfg.lambda);
    cfg.beta1 = parse_number<double>(s, "beta1", cfg.beta1);
    cfg.beta2 = parse_number<double>(s, "beta2", cfg.beta2);
    cfg.beta3 = parse_number<double>(s, "beta3", cfg.beta3);
    cfg.d = parse_number<std::size_t>(s, "d", 0);
    cfg.max_iter = parse_number<std::size_t>(s, "max_iter", cfg.max_iter);
    cfg.rel_tol = parse_number<double>(s, "tol", cfg.rel_tol);
    const fs::path out_dir = require(s, "out");
    const std::string format = output_format(s);
    const Input in = load_input(require(s, "input"));
    const std::size_t n = in.working.order();
    if (const auto it = s.find("alpha"); it != s.end()) {
        cfg.alphas = parse_list(it->second, "alpha");
        if (cfg.alphas.size() == 1) cfg.alphas.assign(n, cfg.alphas[0]);
    }
    try {
        cfg = resolve_config(cfg, n);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const IndexMask mask = gen_mask(in.working.dims(), sr, cfg.seed);
    const RBTensor observed = project_mask(in.working, mask);
    SolveResult res = solve(observed, mask, cfg, [&](std::size_t it, double rel, const FeasibilityResiduals& r) {
        if (it % 10 == 0) {
            err << "iter " << it << " rel_change " << rel << " x_a " << r.x_a << " x_z " << r.x_z << " grad_e "
                << r.grad_e << '\n';
        }
    });

    const RBTensor recovered = to_plain(in, res.X);
    MetricReport m = evaluate(as_stored(in, recovered), in.plain, components(in));
    res.report.rse = m.rse;
    res.report.psnr = m.psnr;

    fs::create_directories(out_dir);
    write_tensor_output(in, out_dir / "recovered", recovered);
    write_tensor_output(in, out_dir / "observed", to_plain(in, observed));
    write_file_atomic(out_dir / "mask.rbm", [&](std::ostream& os) { write_mask(os, MaskFile{mask, cfg.seed, sr}); });
    write_text_atomic(out_dir / "report.json", res.report.to_json() + "\n");
    write_text_atomic(out_dir / "metrics.json", m.to_json() + "\n");
    err << "stopped after " << res.report.iterations << " iterations"
        << (res.report.converged ? " (converged)" : " (max_iter reached)") << '\n';
    print_metrics(out, m, format);
    return kOk;
}

int cmd_eval(const Settings& s, std::ostream& out, std::ostream&) {
    const std::string format = output_format(s);
    const Input ref = load_input(require(s, "ref"));
    const Input test = load_input(require(s, "test"));
    if (ref.kind != test.kind) throw UsageError("--ref and --test must be the same kind of input");
    if (ref.plain.dims() != test.plain.dims()) throw UsageError("--ref and --test have different dimensions");
    print_metrics(out, evaluate(test.plain, ref.plain, components(ref)), format);
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reduced biquaternion tensor ring decomposition and completion", "rbtr"};
    app.require_subcommand(1);
    std::map<std::string, std::map<std::string, std::string>> flag_values;
    std::map<std::string, std::string> config_paths;
    std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> options;

    const std::map<std::string, std::string> help = {
        {"input", "PNG image, directory of PNG frames, or .rbt tensor"},
        {"out", "output directory"},
        {"eps", "relative error bound"},
        {"sr", "sampling rate in (0, 1]"},
        {"seed", "mask seed"},
        {"lambda", "TV weight"},
        {"beta1", "penalty for X = A_k"},
        {"beta2", "penalty for X = Z"},
        {"beta3", "penalty for the gradient split"},
        {"alpha", "comma-separated mode weights (uniform by default)"},
        {"d", "circular unfolding width (default round(N/2))"},
        {"max_iter", "iteration limit"},
        {"tol", "relative-change stopping tolerance"},
        {"format", "stdout report format: json or csv"},
        {"ref", "reference input"},
        {"test", "input to compare against the reference"},
    };
    const std::map<std::string, std::string> descriptions = {
        {"decompose", "RBTR-SVD decomposition with reconstruction metrics"},
        {"complete", "RBTR-TV completion from a random sample of entries"},
        {"eval", "RSE and PSNR between two inputs"},
    };

    for (const auto& [cmd, keys] : kCommandKeys) {
        CLI::App* sub = app.add_subcommand(cmd, descriptions.at(cmd));
        sub->add_option("--config", config_paths[cmd], "key=value settings file; flags take precedence");
        for (const auto& key : keys) {
            std::string flag = "--" + key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            options[cmd].emplace_back(key, sub->add_option(flag, flag_values[cmd][key], help.at(key)));
        }
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        const std::string cmd = app.get_subcommands().front()->get_name();
        Settings s;
        if (!config_paths[cmd].empty()) s = read_config(config_paths[cmd], kCommandKeys.at(cmd));
        for (const auto& [key, opt] : options[cmd]) {
            if (opt->count() > 0) s[key] = flag_values[cmd][key];
        }
        if (cmd == "decompose") return cmd_decompose(s, out, err);
        if (cmd == "complete") return cmd_complete(s, out, err);
        return cmd_eval(s, out, err);
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}

} // namespace rbtr::cli
