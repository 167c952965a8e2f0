// histmatch: dataset-average histogram matching, HM augmentation, and the
// split/score machinery around them.
//
// Exit codes: 0 success, 2 usage, 3 data error, 4 partial failure,
// 1 internal error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "histmatch/histmatch.hpp"

namespace fs = std::filesystem;
using namespace histmatch;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::uint64_t seed = 0;
    unsigned workers = default_workers();
    bool verbose = false;
};

std::vector<std::string> class_names() {
    std::vector<std::string> names;
    for (Label l : kAllLabels)
        names.emplace_back(to_string(l));
    return names;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------- build-ref

int cmd_build_ref(const GlobalOptions& g, const fs::path& manifest_path, const fs::path& out,
                  const std::optional<fs::path>& filter_fold, std::optional<int> train_fold,
                  int bins) {
    if (filter_fold.has_value() != train_fold.has_value())
        throw UsageError("--filter-fold and --train-fold must be given together");
    const DatasetManifest manifest = parse_manifest(manifest_path);

    std::vector<fs::path> paths;
    if (filter_fold) {
        const FoldAssignment fa = read_fold_assignment(*filter_fold);
        if (*train_fold < 0 || *train_fold >= fa.k)
            throw UsageError("--train-fold " + std::to_string(*train_fold) +
                             " outside [0, " + std::to_string(fa.k) + ")");
        for (const auto& e : manifest.entries) {
            const auto it = fa.assignment.find(e.path);
            if (it == fa.assignment.end())
                throw ParseError("path missing from fold assignment: " + e.path);
            if (it->second != *train_fold) // keep the training side of fold i
                paths.push_back(manifest.resolve(e.path));
        }
    } else {
        for (const auto& e : manifest.entries)
            paths.push_back(manifest.resolve(e.path));
    }

    const ReferenceProfile profile = build_reference(paths, bins, g.workers);
    save_reference(profile, out);
    std::cerr << "built reference profile from " << profile.image_count << " images -> "
              << out.string() << "\n";
    return 0;
}

// --------------------------------------------------------------- preprocess

int report_batch(const PreprocessReport& report, std::size_t total) {
    for (const auto& [path, err] : report.failed)
        std::cerr << "failed: " << path << ": " << err << "\n";
    std::cerr << "processed " << report.processed << "/" << total << ", "
              << report.failed.size() << " failed, " << fixed4(report.wall_time) << "s\n";
    return report.failed.empty() ? 0 : 4;
}

int cmd_preprocess(const GlobalOptions& g, const fs::path& manifest_path, const fs::path& ref,
                   const fs::path& out_dir, std::optional<int> resize, bool overwrite) {
    const DatasetManifest manifest = parse_manifest(manifest_path);
    PreprocessConfig cfg;
    cfg.reference = load_reference(ref);
    cfg.resize = resize;
    cfg.output_dir = out_dir;
    cfg.overwrite = overwrite;
    cfg.workers = g.workers;
    const PreprocessReport report = preprocess_dataset(manifest, cfg);
    return report_batch(report, manifest.entries.size());
}

// ------------------------------------------------------------------ augment

int cmd_augment(const GlobalOptions& g, const fs::path& manifest_path, const fs::path& pool_path,
                const fs::path& out_dir, double prob, const std::string& emit, bool cache_pool,
                bool overwrite) {
    const DatasetManifest manifest = parse_manifest(manifest_path);
    const DatasetManifest pool_manifest = parse_manifest(pool_path);

    AugmentConfig cfg;
    cfg.probability = prob;
    cfg.seed = g.seed;
    cfg.workers = g.workers;
    if (emit == "copy")
        cfg.emit_untriggered = EmitUntriggered::copy;
    else if (emit == "skip")
        cfg.emit_untriggered = EmitUntriggered::skip;
    else
        throw UsageError("--emit-untriggered must be 'copy' or 'skip'");
    for (const auto& e : pool_manifest.entries)
        cfg.pool.push_back(pool_manifest.resolve(e.path));
    if (cache_pool && !cfg.pool.empty())
        cfg.pool_cdfs = precompute_pool_cdfs(cfg.pool, kDefaultBins, g.workers);

    const PreprocessReport report = augment_dataset(manifest, cfg, out_dir, overwrite);
    return report_batch(report, manifest.entries.size());
}

// -------------------------------------------------------------------- split

int cmd_split(const GlobalOptions& g, const fs::path& manifest_path, int k, const fs::path& out) {
    const DatasetManifest manifest = parse_manifest(manifest_path);
    const FoldAssignment fa = stratified_kfold(manifest, k, g.seed);
    write_fold_assignment(fa, out);
    std::cerr << "assigned " << fa.assignment.size() << " paths to " << k << " folds -> "
              << out.string() << "\n";
    return 0;
}

// -------------------------------------------------------------------- score

std::vector<PredictionRecord> read_predictions(const fs::path& file) {
    std::vector<PredictionRecord> preds;
    for (const auto& row : csv::read_file(file, "path,true_label,pred_label"))
        preds.push_back({row.fields[0], row.fields[1], row.fields[2]});
    return preds;
}

void print_report_text(const MetricReport& r, std::ostream& out) {
    out << "n " << r.n << "\n";
    out << "balanced_accuracy " << fixed4(r.balanced_accuracy) << "\n";
    for (const auto& [cls, recall] : r.per_class_recall)
        out << "recall " << cls << " " << fixed4(recall) << "\n";
}

nlohmann::ordered_json report_json(const MetricReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["balanced_accuracy"] = r.balanced_accuracy;
    j["per_class_recall"] = r.per_class_recall;
    return j;
}

int cmd_score(const std::vector<fs::path>& prediction_files, const std::string& by,
              const std::optional<fs::path>& manifest_path, bool json) {
    const auto classes = class_names();

    if (!by.empty()) {
        if (by != "image_type")
            throw UsageError("--by supports only 'image_type'");
        if (!manifest_path)
            throw UsageError("--by image_type requires --manifest");
        if (prediction_files.size() != 1)
            throw UsageError("--by image_type expects exactly one predictions file");
        const DatasetManifest manifest = parse_manifest(*manifest_path);
        std::map<std::string, ImageType> type_of;
        for (const auto& e : manifest.entries)
            type_of[e.path] = e.image_type;
        std::map<ImageType, std::vector<PredictionRecord>> by_type;
        for (const auto& p : read_predictions(prediction_files[0])) {
            const auto it = type_of.find(p.path);
            if (it == type_of.end())
                throw ParseError("prediction path not in manifest: " + p.path);
            by_type[it->second].push_back(p);
        }
        nlohmann::ordered_json all;
        for (ImageType t : kAllImageTypes) {
            const auto& subset = by_type[t];
            const MetricReport r = make_report(confusion_matrix(subset, classes));
            if (json) {
                all[std::string(to_string(t))] = report_json(r);
            } else {
                std::cout << "[" << to_string(t) << "]\n";
                print_report_text(r, std::cout);
            }
        }
        if (json)
            std::cout << all.dump(2) << "\n";
        return 0;
    }

    if (prediction_files.size() == 1) {
        const MetricReport r =
            make_report(confusion_matrix(read_predictions(prediction_files[0]), classes));
        if (json)
            std::cout << report_json(r).dump(2) << "\n";
        else
            print_report_text(r, std::cout);
        return 0;
    }

    // several runs: aggregate mean +- sample std across files
    std::vector<MetricReport> reports;
    for (const auto& file : prediction_files)
        reports.push_back(make_report(confusion_matrix(read_predictions(file), classes)));
    std::vector<double> balanced;
    std::size_t n = 0;
    for (const auto& r : reports) {
        balanced.push_back(r.balanced_accuracy);
        n += r.n;
    }
    const Aggregate ba = aggregate_runs(balanced);
    std::map<std::string, Aggregate> recalls;
    for (const auto& cls : classes) {
        std::vector<double> values;
        for (const auto& r : reports)
            values.push_back(r.per_class_recall.at(cls));
        recalls[cls] = aggregate_runs(values);
    }
    if (json) {
        nlohmann::ordered_json j;
        j["runs"] = reports.size();
        j["n"] = n;
        j["balanced_accuracy"] = {{"mean", ba.mean}, {"std", ba.std}};
        nlohmann::ordered_json rec;
        for (const auto& [cls, agg] : recalls)
            rec[cls] = {{"mean", agg.mean}, {"std", agg.std}};
        j["per_class_recall"] = rec;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "runs " << reports.size() << "\n";
        std::cout << "n " << n << "\n";
        std::cout << "balanced_accuracy " << fixed4(ba.mean) << " ± " << fixed4(ba.std)
                  << "\n";
        for (const auto& [cls, agg] : recalls)
            std::cout << "recall " << cls << " " << fixed4(agg.mean) << " ± "
                      << fixed4(agg.std) << "\n";
    }
    return 0;
}

// ------------------------------------------------------------------ inspect

int cmd_inspect(const fs::path& input, const std::string& channel, bool cdf,
                const std::optional<fs::path>& out_path) {
    int c = 0;
    if (channel == "r")
        c = 0;
    else if (channel == "g")
        c = 1;
    else if (channel == "b")
        c = 2;
    else
        throw UsageError("--channel must be r, g or b");

    // A profile file starts with '{'; anything else is treated as an image.
    NormalizedHistogram hist;
    {
        std::ifstream probe(input, std::ios::binary);
        char first = 0;
        probe >> first;
        if (first == '{') {
            hist = load_reference(input).channel_hists[static_cast<std::size_t>(c)];
        } else {
            const ImageBuffer img = decode_image(input);
            hist = image_normalized_histograms(img)[static_cast<std::size_t>(c)];
        }
    }

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (out_path) {
        file.open(*out_path);
        if (!file)
            throw IoError("cannot write " + out_path->string());
        out = &file;
    }
    if (cdf)
        dump_csv(cumulative(hist), *out);
    else
        dump_csv(hist, *out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dataset-average histogram matching toolkit"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Seed for all randomized commands")->capture_default_str();
    app.add_option("--workers", g.workers, "Worker threads for batch commands")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_flag("-v,--verbose", g.verbose, "Chatty progress output");

    // build-ref
    auto* build = app.add_subcommand("build-ref", "Build the dataset-average reference profile");
    fs::path build_manifest, build_out;
    std::optional<fs::path> build_filter;
    std::optional<int> build_train_fold;
    int build_bins = kDefaultBins;
    build->add_option("manifest", build_manifest, "Manifest CSV")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--out", build_out, "Output profile path")->required();
    build->add_option("--filter-fold", build_filter, "Fold assignment CSV")
        ->check(CLI::ExistingFile);
    build->add_option("--train-fold", build_train_fold,
                      "Build only from images outside this fold");
    build->add_option("--bins", build_bins, "Histogram bins")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();

    // preprocess
    auto* prep = app.add_subcommand("preprocess", "Match a dataset against a reference profile");
    fs::path prep_manifest, prep_ref, prep_out;
    std::optional<int> prep_resize;
    bool prep_overwrite = false;
    prep->add_option("manifest", prep_manifest, "Manifest CSV")
        ->required()
        ->check(CLI::ExistingFile);
    prep->add_option("--ref", prep_ref, "Reference profile")->required()->check(CLI::ExistingFile);
    prep->add_option("--out", prep_out, "Output directory")->required();
    prep->add_option("--resize", prep_resize, "Squash-resize to side x side (>= 8)");
    prep->add_flag("--overwrite", prep_overwrite, "Replace existing outputs");

    // augment
    auto* aug = app.add_subcommand("augment", "Stochastic histogram-matching augmentation");
    fs::path aug_manifest, aug_pool, aug_out;
    double aug_prob = 0.5;
    std::string aug_emit = "copy";
    bool aug_cache = false;
    bool aug_overwrite = false;
    aug->add_option("manifest", aug_manifest, "Manifest CSV")
        ->required()
        ->check(CLI::ExistingFile);
    aug->add_option("--pool", aug_pool, "Reference pool manifest CSV")
        ->required()
        ->check(CLI::ExistingFile);
    aug->add_option("--out", aug_out, "Output directory")->required();
    aug->add_option("--prob", aug_prob, "Trigger probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    aug->add_option("--emit-untriggered", aug_emit, "copy|skip untriggered images")
        ->capture_default_str();
    aug->add_flag("--cache-pool", aug_cache, "Precompute pool CDFs once");
    aug->add_flag("--overwrite", aug_overwrite, "Replace existing outputs");

    // split
    auto* split = app.add_subcommand("split", "Stratified k-fold assignment");
    fs::path split_manifest, split_out;
    int split_k = 5;
    split->add_option("manifest", split_manifest, "Manifest CSV")
        ->required()
        ->check(CLI::ExistingFile);
    split->add_option("--k", split_k, "Number of folds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    split->add_option("--out", split_out, "Output fold CSV")->required();

    // score
    auto* score = app.add_subcommand("score", "Balanced accuracy and per-class recall");
    std::vector<fs::path> score_files;
    std::string score_by;
    std::optional<fs::path> score_manifest;
    bool score_json = false;
    score->add_option("predictions", score_files, "Predictions CSV (several files aggregate)")
        ->required()
        ->check(CLI::ExistingFile);
    score->add_option("--by", score_by, "Report per subset: image_type");
    score->add_option("--manifest", score_manifest, "Manifest CSV (required for --by)")
        ->check(CLI::ExistingFile);
    score->add_flag("--json", score_json, "Structured JSON output");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Dump a histogram or CDF as CSV");
    fs::path inspect_input;
    std::string inspect_channel = "r";
    bool inspect_cdf = false;
    std::optional<fs::path> inspect_out;
    inspect->add_option("input", inspect_input, "Image or reference profile")
        ->required()
        ->check(CLI::ExistingFile);
    inspect->add_option("--channel", inspect_channel, "r|g|b")->capture_default_str();
    inspect->add_flag("--cdf", inspect_cdf, "Dump the CDF instead of the histogram");
    inspect->add_option("--out", inspect_out, "Output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (g.verbose)
        std::cerr << "seed=" << g.seed << " workers=" << g.workers << "\n";

    try {
        if (build->parsed())
            return cmd_build_ref(g, build_manifest, build_out, build_filter, build_train_fold,
                                 build_bins);
        if (prep->parsed())
            return cmd_preprocess(g, prep_manifest, prep_ref, prep_out, prep_resize,
                                  prep_overwrite);
        if (aug->parsed())
            return cmd_augment(g, aug_manifest, aug_pool, aug_out, aug_prob, aug_emit, aug_cache,
                               aug_overwrite);
        if (split->parsed())
            return cmd_split(g, split_manifest, split_k, split_out);
        if (score->parsed())
            return cmd_score(score_files, score_by, score_manifest, score_json);
        if (inspect->parsed())
            return cmd_inspect(inspect_input, inspect_channel, inspect_cdf, inspect_out);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
