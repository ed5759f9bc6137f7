#pragma once

// Experiment harness behind the `degrade`, `sweep` and `eval` subcommands:
// recommended lambda per noise model, corpus handling, parameter sweeps,
// method comparison, and their CSV / manifest formats.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "degrade.hpp"
#include "fusion.hpp"
#include "image_io.hpp"
#include "metrics.hpp"
#include "parallel.hpp"

namespace lrrfuse {

// --- recommended lambda ------------------------------------------------------

struct LambdaEntry {
    NoiseKind kind;
    double parameter;
    double lambda;
};

/// Recommended lambda per degradation.
inline const std::vector<LambdaEntry>& lambda_table() {
    static const std::vector<LambdaEntry> table{
        {NoiseKind::gaussian, 0.0005, 4.5}, {NoiseKind::gaussian, 0.001, 3.0},
        {NoiseKind::gaussian, 0.005, 1.0},  {NoiseKind::gaussian, 0.01, 1.0},
        {NoiseKind::salt_pepper, 0.01, 1.5}, {NoiseKind::salt_pepper, 0.02, 1.0},
        {NoiseKind::poisson, 0.0, 2.0},
    };
    return table;
}

/// Table lookup; unlisted Gaussian variances / densities use the entry whose
/// parameter is nearest on a log scale (ties and non-positive values go to
/// the smallest listed parameter).
inline double default_lambda(const NoiseSpec& noise) {
    const LambdaEntry* best = nullptr;
    double best_dist = 0.0;
    const double p = noise.parameter();
    for (const LambdaEntry& e : lambda_table()) {
        if (e.kind != noise.kind) continue;
        if (noise.kind == NoiseKind::poisson) return e.lambda;
        const double dist = p > 0.0 ? std::abs(std::log(p) - std::log(e.parameter)) : 0.0;
        if (best == nullptr || dist < best_dist) {
            best = &e;
            best_dist = dist;
        }
    }
    if (best == nullptr) throw Error("no recommended lambda for this noise kind");
    return best->lambda;
}

// --- corpus ------------------------------------------------------------------

inline constexpr std::string_view kSyntheticPrefix = "synthetic:";
inline constexpr std::size_t kSyntheticSide = 128;

/// Load a ground-truth image; `synthetic:<seed>` yields a generated 128x128 scene.
inline Image load_corpus_image(const std::string& path) {
    if (std::string_view(path).starts_with(kSyntheticPrefix)) {
        const auto seed = detail::parse_count(std::string_view(path).substr(kSyntheticPrefix.size()),
                                              "synthetic seed");
        return synthetic_scene(kSyntheticSide, kSyntheticSide, seed);
    }
    return load_image(path);
}

inline std::vector<std::string> synthetic_corpus(std::size_t count, std::uint64_t first_seed = 1) {
    std::vector<std::string> paths;
    for (std::size_t i = 0; i < count; ++i)
        paths.push_back(std::string(kSyntheticPrefix) + std::to_string(first_seed + i));
    return paths;
}

/// Noisy focus pair for corpus entry `index`: source 1 (focus right) uses
/// seed + 2*index, source 2 (focus left) seed + 2*index + 1.
struct DegradedPair {
    Image truth;
    Image source1;
    Image source2;
};

inline DegradedPair degrade_pair(const Image& truth, NoiseSpec noise, std::uint64_t seed,
                                 std::size_t index, const FocusSpec& focus = {}) {
    const FocusPair pair = make_focus_pair(truth, focus);
    const auto [first, second] = pair.ordered(focus.side);
    noise.seed = seed + 2 * index;
    Image s1 = add_noise(first, noise);
    noise.seed = seed + 2 * index + 1;
    Image s2 = add_noise(second, noise);
    return {truth, std::move(s1), std::move(s2)};
}

// --- sweep -------------------------------------------------------------------

struct SweepSpec {
    std::vector<double> lambda_grid;
    std::vector<std::size_t> patch_grid;
    std::vector<std::size_t> level_grid;
    std::vector<NoiseSpec> noise_specs;
    std::vector<std::string> corpus;
    std::uint64_t seed = 0;
    std::size_t crop = kSyntheticSide;  // 0 keeps full resolution
    FusionConfig base{};                // basis, ALM and tie-break settings
    std::size_t workers = 0;

    void validate() const {
        if (lambda_grid.empty() || patch_grid.empty() || level_grid.empty() ||
            noise_specs.empty())
            throw Error("sweep grids must be non-empty");
        if (corpus.empty()) throw Error("sweep corpus must be non-empty");
    }
};

/// One CSV row. Summary rows carry `argmax:<kind>` in the noise_kind column
/// and repeat the best cell of that noise setting.
struct SweepRow {
    std::string noise_kind;
    double noise_param = 0.0;
    double lambda = 0.0;
    std::size_t patch = 0;
    std::size_t level = 0;
    std::uint64_t seed = 0;
    std::optional<MetricsReport> metrics;
    std::string error;

    [[nodiscard]] bool is_summary() const {
        return std::string_view(noise_kind).starts_with("argmax:");
    }
};

inline constexpr std::string_view kSweepHeader =
    "noise_kind,noise_param,lambda,patch,level,seed,rmse,psnr,ssim,error";

namespace detail {

inline std::string csv_safe(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline MetricsReport average(const std::vector<MetricsReport>& reports) {
    MetricsReport avg{0.0, 0.0, 0.0};
    for (const MetricsReport& r : reports) {
        avg.rmse += r.rmse;
        avg.psnr += r.psnr;
        avg.ssim += r.ssim;
    }
    const auto n = static_cast<double>(reports.size());
    return {avg.rmse / n, avg.psnr / n, avg.ssim / n};
}

}  // namespace detail

/// Average metrics of the proposed method over the corpus for one cell.
inline MetricsReport evaluate_cell(const std::vector<Image>& truths, const NoiseSpec& noise,
                                   double lambda, std::size_t patch, std::size_t level,
                                   std::uint64_t seed, const FusionConfig& base) {
    FusionConfig cfg = base;
    cfg.lambda = lambda;
    cfg.patch_size = patch;
    cfg.levels = level;
    std::vector<MetricsReport> reports;
    for (std::size_t k = 0; k < truths.size(); ++k) {
        const DegradedPair p = degrade_pair(truths[k], noise, seed, k);
        reports.push_back(evaluate(fuse(p.source1, p.source2, cfg), p.truth));
    }
    return detail::average(reports);
}

inline std::vector<Image> load_corpus(const std::vector<std::string>& paths, std::size_t crop) {
    std::vector<Image> images;
    for (const std::string& p : paths) {
        Image img = load_corpus_image(p);
        images.push_back(crop == 0 ? std::move(img) : center_crop(img, crop, crop));
    }
    return images;
}

/// Grid cells in (noise, lambda, patch, level) order, then one summary row per
/// noise setting. Cells run on a worker pool; row order does not depend on it.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<Image> truths = load_corpus(spec.corpus, spec.crop);

    std::vector<SweepRow> rows;
    for (const NoiseSpec& noise : spec.noise_specs)
        for (double lambda : spec.lambda_grid)
            for (std::size_t patch : spec.patch_grid)
                for (std::size_t level : spec.level_grid)
                    rows.push_back({noise_kind_name(noise.kind), noise.parameter(), lambda, patch,
                                    level, spec.seed, std::nullopt, {}});
    const std::size_t cells_per_noise = rows.size() / spec.noise_specs.size();

    FusionConfig base = spec.base;
    if (resolve_workers(spec.workers) > 1) base.threads = 1;
    parallel_for(rows.size(), spec.workers, [&](std::size_t i) {
        SweepRow& row = rows[i];
        try {
            row.metrics = evaluate_cell(truths, spec.noise_specs[i / cells_per_noise], row.lambda,
                                        row.patch, row.level, row.seed, base);
        } catch (const std::exception& e) {
            row.error = detail::csv_safe(e.what());
        }
    });

    for (std::size_t n = 0; n < spec.noise_specs.size(); ++n) {
        const SweepRow* best = nullptr;
        for (std::size_t i = n * cells_per_noise; i < (n + 1) * cells_per_noise; ++i)
            if (rows[i].metrics && (best == nullptr || rows[i].metrics->ssim > best->metrics->ssim))
                best = &rows[i];
        SweepRow summary;
        if (best != nullptr) {
            summary = *best;
        } else {
            summary = rows[n * cells_per_noise];
            summary.error = "no successful cells";
        }
        summary.noise_kind = "argmax:" + summary.noise_kind;
        rows.push_back(summary);
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kSweepHeader << '\n';
    for (const SweepRow& r : rows) {
        out << r.noise_kind << ',' << detail::shortest(r.noise_param) << ','
            << detail::shortest(r.lambda) << ',' << r.patch << ',' << r.level << ',' << r.seed
            << ',';
        if (r.metrics)
            out << detail::fixed6(r.metrics->rmse) << ',' << detail::fixed6(r.metrics->psnr) << ','
                << detail::fixed6(r.metrics->ssim);
        else
            out << ",,";
        out << ',' << detail::csv_safe(r.error) << '\n';
    }
}

inline std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kSweepHeader) throw Error("sweep CSV: bad header");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 10) throw Error("sweep CSV: expected 10 fields in '" + line + "'");
        SweepRow r;
        r.noise_kind = f[0];
        r.noise_param = parse_double(f[1], "noise_param");
        r.lambda = parse_double(f[2], "lambda");
        r.patch = detail::parse_count(f[3], "patch");
        r.level = detail::parse_count(f[4], "level");
        r.seed = detail::parse_count(f[5], "seed");
        if (!f[6].empty())
            r.metrics = MetricsReport{parse_double(f[6], "rmse"), parse_double(f[7], "psnr"),
                                      parse_double(f[8], "ssim")};
        r.error = f[9];
        rows.push_back(std::move(r));
    }
    return rows;
}

// --- degrade / manifest --------------------------------------------------------

/// One tuple of a pairs manifest (tab-separated, with a header line).
struct ManifestEntry {
    std::string ground_truth;
    std::string source1;
    std::string source2;
    NoiseSpec noise;
    FocusSpec focus;

    friend bool operator==(const ManifestEntry& a, const ManifestEntry& b) {
        return a.ground_truth == b.ground_truth && a.source1 == b.source1 &&
               a.source2 == b.source2 && a.noise == b.noise && a.focus.side == b.focus.side &&
               a.focus.kernel_size == b.focus.kernel_size &&
               a.focus.kernel_sigma == b.focus.kernel_sigma;
    }
};

inline constexpr std::string_view kManifestHeader =
    "ground_truth\tsource1\tsource2\tnoise\tseed\tfocus\tkernel_size\tkernel_sigma";

inline std::string manifest_line(const ManifestEntry& e) {
    std::ostringstream s;
    s << e.ground_truth << '\t' << e.source1 << '\t' << e.source2 << '\t'
      << format_noise_spec(e.noise) << '\t' << e.noise.seed << '\t'
      << (e.focus.side == FocusSide::left ? "left" : "right") << '\t' << e.focus.kernel_size
      << '\t' << detail::shortest(e.focus.kernel_sigma);
    return s.str();
}

inline std::vector<ManifestEntry> read_manifest(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line) || line != kManifestHeader)
        throw Error(source + ": missing manifest header");
    std::vector<ManifestEntry> entries;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = detail::split(line, '\t');
        const std::string where = source + ":" + std::to_string(lineno);
        if (f.size() != 8) throw Error(where + ": expected 8 tab-separated fields");
        try {
            ManifestEntry e;
            e.ground_truth = f[0];
            e.source1 = f[1];
            e.source2 = f[2];
            e.noise = parse_noise_spec(f[3], detail::parse_count(f[4], "seed"));
            e.focus.side = parse_focus_side(f[5]);
            e.focus.kernel_size = detail::parse_count(f[6], "kernel_size");
            e.focus.kernel_sigma = parse_double(f[7], "kernel_sigma");
            entries.push_back(std::move(e));
        } catch (const Error& err) {
            throw Error(where + ": " + err.what());
        }
    }
    return entries;
}

inline std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(path + ": cannot open manifest");
    return read_manifest(in, path);
}

/// Blur + noise one ground truth into `outdir`, append the tuple to
/// `outdir/manifest.tsv`, and return it. Source 2 uses seed + 1.
inline ManifestEntry degrade_to_directory(const std::string& input, const std::string& outdir,
                                          const FocusSpec& focus, const NoiseSpec& noise) {
    namespace fs = std::filesystem;
    focus.validate();
    noise.validate();
    const Image truth = load_corpus_image(input);
    const DegradedPair pair = degrade_pair(truth, noise, noise.seed, 0, focus);

    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw Error(outdir + ": cannot create directory: " + ec.message());

    std::string stem = fs::path(input).stem().string();
    std::string tag = format_noise_spec(noise);
    for (std::string* s : {&stem, &tag})
        std::replace_if(s->begin(), s->end(), [](char c) { return c == ':' || c == '/'; }, '-');
    const std::string base = stem + "__" + tag + "__seed" + std::to_string(noise.seed);
    const std::string first = focus.side == FocusSide::left ? "focus_left" : "focus_right";
    const std::string second = focus.side == FocusSide::left ? "focus_right" : "focus_left";

    ManifestEntry entry{input, (fs::path(outdir) / (base + "__" + first + ".png")).string(),
                        (fs::path(outdir) / (base + "__" + second + ".png")).string(), noise,
                        focus};
    save_image(pair.source1, entry.source1);
    save_image(pair.source2, entry.source2);

    const fs::path manifest = fs::path(outdir) / "manifest.tsv";
    const bool fresh = !fs::exists(manifest);
    std::ofstream out(manifest, std::ios::app);
    if (!out) throw Error(manifest.string() + ": cannot open for appending");
    if (fresh) out << kManifestHeader << '\n';
    out << manifest_line(entry) << '\n';
    if (!out) throw Error(manifest.string() + ": write failed");
    return entry;
}

// --- eval ----------------------------------------------------------------------

enum class Method { proposed, dwt_baseline };

inline const char* method_name(Method m) {
    return m == Method::proposed ? "proposed" : "dwt_baseline";
}

inline Method parse_method(std::string_view s) {
    if (s == "proposed") return Method::proposed;
    if (s == "dwt_baseline") return Method::dwt_baseline;
    throw Error("unknown method '" + std::string(s) + "' (expected proposed or dwt_baseline)");
}

struct EvalRow {
    Method method = Method::proposed;
    std::string image;  // ground-truth path, or "average"
    NoiseSpec noise;
    double lambda = 0.0;
    std::size_t patch = 0;
    std::size_t level = 0;
    std::optional<MetricsReport> metrics;
    std::string error;
};

inline constexpr std::string_view kEvalHeader =
    "method,image,noise_kind,noise_param,lambda,patch,level,seed,rmse,psnr,ssim,error";

inline Image run_method(Method m, const Image& s1, const Image& s2, const FusionConfig& cfg) {
    return m == Method::proposed ? fuse(s1, s2, cfg) : fuse_dwt_baseline(s1, s2, cfg);
}

/// Per-image rows (manifest order, methods in the given order), then one
/// "average" row per (method, noise setting) in first-seen order. Lambda comes
/// from default_lambda unless `lambda_override` is set.
inline std::vector<EvalRow> run_eval(const std::vector<ManifestEntry>& entries,
                                     const std::vector<Method>& methods, const FusionConfig& base,
                                     std::optional<double> lambda_override = std::nullopt) {
    if (entries.empty()) throw Error("eval: manifest has no entries");
    if (methods.empty()) throw Error("eval: no methods selected");
    std::vector<EvalRow> rows;
    for (const ManifestEntry& e : entries)
        for (Method m : methods) {
            EvalRow row;
            row.method = m;
            row.image = e.ground_truth;
            row.noise = e.noise;
            row.patch = base.patch_size;
            row.level = base.levels;
            try {
                FusionConfig cfg = base;
                cfg.lambda = lambda_override ? *lambda_override : default_lambda(e.noise);
                row.lambda = cfg.lambda;
                const Image truth = load_corpus_image(e.ground_truth);
                const Image s1 = load_image(e.source1);
                const Image s2 = load_image(e.source2);
                row.metrics = evaluate(run_method(m, s1, s2, cfg), truth);
            } catch (const std::exception& ex) {
                row.error = detail::csv_safe(ex.what());
            }
            rows.push_back(std::move(row));
        }

    std::vector<EvalRow> averages;
    for (Method m : methods) {
        std::vector<std::pair<std::string, std::vector<MetricsReport>>> groups;
        std::vector<NoiseSpec> group_noise;
        for (const EvalRow& r : rows) {
            if (r.method != m || !r.metrics) continue;
            const std::string key = format_noise_spec(r.noise);
            auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const auto& g) { return g.first == key; });
            if (it == groups.end()) {
                groups.push_back({key, {}});
                group_noise.push_back(r.noise);
                it = groups.end() - 1;
            }
            it->second.push_back(*r.metrics);
        }
        for (std::size_t g = 0; g < groups.size(); ++g) {
            EvalRow avg;
            avg.method = m;
            avg.image = "average";
            avg.noise = group_noise[g];
            avg.lambda = lambda_override ? *lambda_override : default_lambda(group_noise[g]);
            avg.patch = base.patch_size;
            avg.level = base.levels;
            avg.metrics = detail::average(groups[g].second);
            averages.push_back(std::move(avg));
        }
    }
    rows.insert(rows.end(), averages.begin(), averages.end());
    return rows;
}

inline void write_eval_csv(std::ostream& out, const std::vector<EvalRow>& rows) {
    out << kEvalHeader << '\n';
    for (const EvalRow& r : rows) {
        out << method_name(r.method) << ',' << detail::csv_safe(r.image) << ','
            << noise_kind_name(r.noise.kind) << ',' << detail::shortest(r.noise.parameter()) << ','
            << detail::shortest(r.lambda) << ',' << r.patch << ',' << r.level << ','
            << (r.image == "average" ? std::string() : std::to_string(r.noise.seed)) << ',';
        if (r.metrics)
            out << detail::fixed6(r.metrics->rmse) << ',' << detail::fixed6(r.metrics->psnr) << ','
                << detail::fixed6(r.metrics->ssim);
        else
            out << ",,";
        out << ',' << detail::csv_safe(r.error) << '\n';
    }
}

}  // namespace lrrfuse
