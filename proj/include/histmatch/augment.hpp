#ifndef HISTMATCH_AUGMENT_HPP
#define HISTMATCH_AUGMENT_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "histmatch/dataset.hpp"
#include "histmatch/error.hpp"
#include "histmatch/image.hpp"
#include "histmatch/image_io.hpp"
#include "histmatch/pipeline.hpp"
#include "histmatch/rng.hpp"

namespace histmatch {

enum class EmitUntriggered { copy, skip };

/// Configuration for the stochastic histogram-matching transform: each
/// image is matched, with `probability`, against a reference image drawn
/// uniformly from `pool` (the original, non-matched dataset).
struct AugmentConfig {
    double probability = 0.5;
    std::uint64_t seed = 0;
    std::vector<std::filesystem::path> pool; // resolved reference image paths
    EmitUntriggered emit_untriggered = EmitUntriggered::copy;
    unsigned workers = 1;

    /// Optional precomputed CDFs, index-aligned with `pool`. Trades memory
    /// for not re-decoding pool members on every trigger.
    std::shared_ptr<const std::vector<std::array<Cdf, 3>>> pool_cdfs;
};

inline void check_augment_config(const AugmentConfig& cfg) {
    if (!(cfg.probability >= 0.0 && cfg.probability <= 1.0))
        throw OutOfRange("probability must be in [0, 1]");
    if (cfg.probability > 0.0 && cfg.pool.empty())
        throw EmptyDataset("augmentation pool is empty");
    if (cfg.pool_cdfs && cfg.pool_cdfs->size() != cfg.pool.size())
        throw BinMismatch("pool CDF cache size does not match pool size");
}

struct AugmentDecision {
    bool triggered = false;
    std::uint64_t pool_index = 0;
};

/// One uniform draw gates the transform; a second picks the pool member.
/// Untriggered decisions consume exactly one draw, triggered exactly two.
inline AugmentDecision augment_decision(RandomStream& stream, double probability,
                                        std::size_t pool_size) {
    const double u = stream.next_double();
    if (u >= probability)
        return {false, 0};
    return {true, stream.next_below(pool_size)};
}

/// Precompute per-channel CDFs for every pool member (parallel decode).
inline std::shared_ptr<const std::vector<std::array<Cdf, 3>>>
precompute_pool_cdfs(const std::vector<std::filesystem::path>& pool, int bins = kDefaultBins,
                     unsigned workers = 1) {
    auto cache = std::make_shared<std::vector<std::array<Cdf, 3>>>(pool.size());
    parallel_for(pool.size(), workers, [&](std::size_t i) {
        try {
            (*cache)[i] = channel_cdfs(decode_image(pool[i]), bins);
        } catch (const Error& e) {
            throw PoolLoadError("pool image " + pool[i].string() + ": " + e.what());
        }
    });
    return cache;
}

namespace detail {

inline std::array<Cdf, 3> pool_target_cdfs(const AugmentConfig& cfg, std::uint64_t index,
                                           int bins) {
    if (cfg.pool_cdfs)
        return (*cfg.pool_cdfs)[index];
    const auto& path = cfg.pool[index];
    try {
        return channel_cdfs(decode_image(path), bins);
    } catch (const Error& e) {
        throw PoolLoadError("pool image " + path.string() + ": " + e.what());
    }
}

} // namespace detail

/// The transform itself: with cfg.probability, match `img` against a
/// randomly selected pool image's channel CDFs; otherwise return the input
/// untouched. Randomness comes only from `stream`, so results are a pure
/// function of (image, config, stream).
inline ImageBuffer hm_augment(const ImageBuffer& img, const AugmentConfig& cfg,
                              RandomStream& stream, int bins = kDefaultBins) {
    check_image(img);
    check_augment_config(cfg);
    const AugmentDecision d = augment_decision(stream, cfg.probability, cfg.pool.size());
    if (!d.triggered)
        return img;
    return match_image(img, detail::pool_target_cdfs(cfg, d.pool_index, bins));
}

/// Per-image stream id: namespaced so the same run seed used elsewhere
/// (e.g. fold splitting) cannot correlate with augmentation draws.
inline std::string augment_stream_id(const std::string& entry_path) {
    return "augment/" + entry_path;
}

/// Batch augmentation. Triggered images are matched and re-encoded as PNG;
/// untriggered images are byte-copied (or skipped, per config). Each image
/// owns a stream derived from (seed, path), so outputs are independent of
/// worker count and processing order.
inline PreprocessReport augment_dataset(const DatasetManifest& manifest, const AugmentConfig& cfg,
                                        const std::filesystem::path& output_dir,
                                        bool overwrite = false, int bins = kDefaultBins) {
    check_augment_config(cfg);
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (!std::filesystem::is_directory(output_dir))
        throw IoError("cannot create output directory " + output_dir.string() + ": " +
                      ec.message());

    return detail::run_batch(manifest, cfg.workers, [&](std::size_t i) {
        const ManifestEntry& entry = manifest.entries[i];
        RandomStream stream = derive_stream(cfg.seed, augment_stream_id(entry.path));
        const AugmentDecision d = augment_decision(stream, cfg.probability, cfg.pool.size());
        const auto input = manifest.resolve(entry.path);
        if (!d.triggered) {
            if (cfg.emit_untriggered == EmitUntriggered::skip)
                return;
            const auto out = detail::output_path_for(output_dir, entry.path, "");
            detail::ensure_parent_dir(out);
            detail::check_output_writable(out, overwrite);
            std::error_code copy_ec;
            std::filesystem::copy_file(input, out,
                                       std::filesystem::copy_options::overwrite_existing,
                                       copy_ec);
            if (copy_ec)
                throw IoError("copy failed " + input.string() + " -> " + out.string() + ": " +
                              copy_ec.message());
            return;
        }
        const ImageBuffer img = decode_image(input);
        const ImageBuffer matched =
            match_image(img, detail::pool_target_cdfs(cfg, d.pool_index, bins));
        const auto out = detail::output_path_for(output_dir, entry.path, ".png");
        detail::ensure_parent_dir(out);
        detail::check_output_writable(out, overwrite);
        encode_png(matched, out);
    });
}

} // namespace histmatch

#endif // HISTMATCH_AUGMENT_HPP
