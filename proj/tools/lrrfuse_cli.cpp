// lrrfuse command-line front end.
//
// Exit codes: 0 success, 1 I/O or partial failure, 2 usage error (including
// mismatched source sizes).

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lrrfuse/lrrfuse.hpp"

namespace {

using namespace lrrfuse;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct FuseOptions {
    std::string input1, input2, output, config, noise, basis, tie_break;
    std::optional<double> lambda;
    std::optional<std::size_t> patch, levels, threads;
    bool raw_high = false;
};

struct DegradeOptions {
    std::string input, outdir, noise = "gaussian:0", focus = "right";
    std::uint64_t seed = 0;
    std::size_t kernel_size = 3;
    double kernel_sigma = 7.0;
};

struct SweepOptions {
    std::vector<double> lambdas{1, 2, 3, 4.5, 10, 20};
    std::vector<std::size_t> patches{16};
    std::vector<std::size_t> levels{2};
    std::vector<std::string> noises;
    std::vector<std::string> corpus;
    std::size_t synthetic = 0;
    std::uint64_t seed = 0;
    std::string out, config;
    bool full = false;
    std::size_t workers = 0;
};

struct EvalOptions {
    std::string manifest, out, config;
    std::vector<std::string> methods{"proposed", "dwt_baseline"};
    std::optional<double> lambda;
};

/// Built-in defaults < lambda table for --noise < config file < explicit flags.
FusionConfig build_fusion_config(const FuseOptions& o) {
    FusionConfig cfg;
    if (!o.noise.empty()) cfg.lambda = default_lambda(parse_noise_spec(o.noise));
    if (!o.config.empty()) load_config(o.config, cfg);
    if (o.lambda) cfg.lambda = *o.lambda;
    if (o.patch) cfg.patch_size = *o.patch;
    if (o.levels) cfg.levels = *o.levels;
    if (o.threads) cfg.threads = *o.threads;
    if (!o.basis.empty()) cfg.basis = o.basis;
    if (!o.tie_break.empty()) cfg.tie_break = parse_tie_break(o.tie_break);
    if (o.raw_high) cfg.high_output = HighPatchOutput::raw;
    cfg.validate();
    return cfg;
}

int cmd_fuse(const FuseOptions& o) {
    FusionConfig cfg;
    try {
        cfg = build_fusion_config(o);
    } catch (const Error& e) {
        std::cerr << "lrrfuse fuse: " << e.what() << '\n';
        return kExitUsage;
    }
    Image i1, i2;
    try {
        i1 = load_image(o.input1);
        i2 = load_image(o.input2);
    } catch (const Error& e) {
        std::cerr << "lrrfuse fuse: " << e.what() << '\n';
        return kExitFailure;
    }
    if (!i1.same_shape(i2)) {
        std::cerr << "lrrfuse fuse: source sizes differ: " << o.input1 << " is "
                  << shape_string(i1) << ", " << o.input2 << " is " << shape_string(i2) << '\n';
        return kExitUsage;
    }
    const std::size_t min_side = std::size_t{1} << cfg.levels;
    if (i1.width() < min_side || i1.height() < min_side) {
        std::cerr << "lrrfuse fuse: image " << shape_string(i1) << " is too small for "
                  << cfg.levels << " wavelet levels\n";
        return kExitUsage;
    }
    try {
        const auto start = std::chrono::steady_clock::now();
        const Image fused = fuse(i1, i2, cfg);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        save_image(fused, o.output);
        std::cout << "fused " << o.input1 << " + " << o.input2 << " -> " << o.output << '\n'
                  << "lambda=" << detail::shortest(cfg.lambda) << " patch=" << cfg.patch_size
                  << " levels=" << cfg.levels << " basis=" << cfg.basis
                  << " time=" << seconds << "s\n";
    } catch (const Error& e) {
        std::cerr << "lrrfuse fuse: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_degrade(const DegradeOptions& o) {
    FocusSpec focus;
    NoiseSpec noise;
    try {
        focus.side = parse_focus_side(o.focus);
        focus.kernel_size = o.kernel_size;
        focus.kernel_sigma = o.kernel_sigma;
        focus.validate();
        noise = parse_noise_spec(o.noise, o.seed);
    } catch (const Error& e) {
        std::cerr << "lrrfuse degrade: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        const ManifestEntry entry = degrade_to_directory(o.input, o.outdir, focus, noise);
        std::cout << entry.source1 << '\n' << entry.source2 << '\n';
    } catch (const Error& e) {
        std::cerr << "lrrfuse degrade: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_sweep(const SweepOptions& o) {
    SweepSpec spec;
    try {
        spec.lambda_grid = o.lambdas;
        spec.patch_grid = o.patches;
        spec.level_grid = o.levels;
        for (const std::string& n : o.noises) spec.noise_specs.push_back(parse_noise_spec(n));
        spec.corpus = o.corpus;
        for (const std::string& p : synthetic_corpus(o.synthetic)) spec.corpus.push_back(p);
        spec.seed = o.seed;
        spec.crop = o.full ? 0 : kSyntheticSide;
        spec.workers = o.workers;
        if (!o.config.empty()) load_config(o.config, spec.base);
        spec.validate();
    } catch (const Error& e) {
        std::cerr << "lrrfuse sweep: " << e.what() << '\n';
        return kExitUsage;
    }
    std::vector<SweepRow> rows;
    try {
        rows = run_sweep(spec);
    } catch (const Error& e) {
        std::cerr << "lrrfuse sweep: " << e.what() << '\n';
        return kExitFailure;
    }
    std::ofstream out(o.out);
    if (!out) {
        std::cerr << "lrrfuse sweep: cannot write " << o.out << '\n';
        return kExitFailure;
    }
    write_sweep_csv(out, rows);
    std::size_t failed = 0, cells = 0;
    for (const SweepRow& r : rows) {
        if (r.is_summary()) {
            std::cout << r.noise_kind.substr(7) << ':' << detail::shortest(r.noise_param)
                      << " best lambda=" << detail::shortest(r.lambda) << " patch=" << r.patch
                      << " level=" << r.level << '\n';
            continue;
        }
        ++cells;
        if (!r.error.empty()) ++failed;
    }
    if (failed > 0) std::cerr << "lrrfuse sweep: " << failed << " of " << cells << " cells failed\n";
    return failed == cells ? kExitFailure : kExitOk;
}

int cmd_eval(const EvalOptions& o) {
    std::vector<Method> methods;
    FusionConfig cfg;
    std::vector<ManifestEntry> entries;
    try {
        for (const std::string& m : o.methods) methods.push_back(parse_method(m));
        if (!o.config.empty()) load_config(o.config, cfg);
    } catch (const Error& e) {
        std::cerr << "lrrfuse eval: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        entries = load_manifest(o.manifest);
    } catch (const Error& e) {
        std::cerr << "lrrfuse eval: " << e.what() << '\n';
        return kExitFailure;
    }
    std::vector<EvalRow> rows;
    try {
        rows = run_eval(entries, methods, cfg, o.lambda);
    } catch (const Error& e) {
        std::cerr << "lrrfuse eval: " << e.what() << '\n';
        return kExitFailure;
    }
    std::ofstream out(o.out);
    if (!out) {
        std::cerr << "lrrfuse eval: cannot write " << o.out << '\n';
        return kExitFailure;
    }
    write_eval_csv(out, rows);
    std::size_t failed = 0, total = 0;
    for (const EvalRow& r : rows) {
        if (r.image == "average") {
            std::cout << method_name(r.method) << ' ' << format_noise_spec(r.noise)
                      << " rmse=" << detail::fixed6(r.metrics->rmse)
                      << " psnr=" << detail::fixed6(r.metrics->psnr)
                      << " ssim=" << detail::fixed6(r.metrics->ssim) << '\n';
            continue;
        }
        ++total;
        if (!r.error.empty()) ++failed;
    }
    return failed == total ? kExitFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-focus noisy image fusion with wavelet-domain low-rank representation"};
    app.require_subcommand(1);

    FuseOptions fuse_opts;
    auto* fuse_cmd = app.add_subcommand("fuse", "Fuse two source images");
    fuse_cmd->add_option("input1", fuse_opts.input1, "First source image")->required();
    fuse_cmd->add_option("input2", fuse_opts.input2, "Second source image")->required();
    fuse_cmd->add_option("output", fuse_opts.output, "Output image (.png or .pgm)")->required();
    fuse_cmd->add_option("--config", fuse_opts.config, "Flat key = value configuration file");
    fuse_cmd->add_option("--lambda", fuse_opts.lambda, "LRR balance coefficient");
    fuse_cmd->add_option("--noise", fuse_opts.noise,
                         "Expected noise (gaussian:<var>, sp:<d>, poisson); picks lambda");
    fuse_cmd->add_option("--patch", fuse_opts.patch, "Patch size n (n x n tiles)");
    fuse_cmd->add_option("--levels", fuse_opts.levels, "Wavelet decomposition levels");
    fuse_cmd->add_option("--basis", fuse_opts.basis, "Wavelet basis (haar, db2)");
    fuse_cmd->add_option("--tie-break", fuse_opts.tie_break, "Tie rule: second or first");
    fuse_cmd->add_flag("--raw-high", fuse_opts.raw_high,
                       "Copy raw winning detail tiles instead of their low-rank part");
    fuse_cmd->add_option("--threads", fuse_opts.threads, "Worker threads (0 = all cores)");

    DegradeOptions degrade_opts;
    auto* degrade_cmd = app.add_subcommand("degrade", "Synthesise a noisy focus pair");
    degrade_cmd->add_option("input", degrade_opts.input,
                            "Ground-truth image, or synthetic:<seed>")->required();
    degrade_cmd->add_option("outdir", degrade_opts.outdir, "Output directory")->required();
    degrade_cmd->add_option("--noise", degrade_opts.noise, "gaussian:<var>, sp:<d> or poisson")
        ->capture_default_str();
    degrade_cmd->add_option("--focus", degrade_opts.focus, "Focus side listed first: left|right")
        ->capture_default_str();
    degrade_cmd->add_option("--seed", degrade_opts.seed, "Noise seed")->capture_default_str();
    degrade_cmd->add_option("--kernel-size", degrade_opts.kernel_size)->capture_default_str();
    degrade_cmd->add_option("--kernel-sigma", degrade_opts.kernel_sigma)->capture_default_str();

    SweepOptions sweep_opts;
    auto* sweep_cmd = app.add_subcommand("sweep", "Average metrics over a parameter grid");
    sweep_cmd->add_option("--lambda", sweep_opts.lambdas, "Lambda grid")->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--patch", sweep_opts.patches, "Patch size grid")->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--level", sweep_opts.levels, "Wavelet level grid")->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--noise", sweep_opts.noises, "Noise setting (repeatable)")->required();
    sweep_cmd->add_option("--corpus", sweep_opts.corpus, "Ground-truth images");
    sweep_cmd->add_option("--synthetic", sweep_opts.synthetic,
                          "Append N generated scenes (synthetic:1..N)");
    sweep_cmd->add_option("--seed", sweep_opts.seed, "Base noise seed")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_opts.out, "Output CSV")->required();
    sweep_cmd->add_option("--config", sweep_opts.config, "Base fusion configuration");
    sweep_cmd->add_flag("--full", sweep_opts.full, "Use full resolution instead of 128x128 crops");
    sweep_cmd->add_option("--workers", sweep_opts.workers, "Parallel cells (0 = all cores)");

    EvalOptions eval_opts;
    auto* eval_cmd = app.add_subcommand("eval", "Compare methods on a pairs manifest");
    eval_cmd->add_option("manifest", eval_opts.manifest, "manifest.tsv written by degrade")
        ->required();
    eval_cmd->add_option("--methods", eval_opts.methods, "proposed,dwt_baseline")
        ->delimiter(',')->capture_default_str();
    eval_cmd->add_option("--out", eval_opts.out, "Output CSV")->required();
    eval_cmd->add_option("--config", eval_opts.config, "Base fusion configuration");
    eval_cmd->add_option("--lambda", eval_opts.lambda, "Override the recommended lambda");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*fuse_cmd) return cmd_fuse(fuse_opts);
    if (*degrade_cmd) return cmd_degrade(degrade_opts);
    if (*sweep_cmd) return cmd_sweep(sweep_opts);
    return cmd_eval(eval_opts);
}
