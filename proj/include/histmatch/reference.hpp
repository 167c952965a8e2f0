#ifndef HISTMATCH_REFERENCE_HPP
#define HISTMATCH_REFERENCE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "histmatch/error.hpp"
#include "histmatch/histogram.hpp"
#include "histmatch/image.hpp"
#include "histmatch/image_io.hpp"
#include "histmatch/parallel.hpp"

namespace histmatch {

constexpr int kProfileFormatVersion = 1;

/// Dataset-mean normalized histogram per RGB channel; the matching target
/// used by preprocessing. CDFs are recomputed from it on demand.
struct ReferenceProfile {
    int bins = kDefaultBins;
    std::array<NormalizedHistogram, 3> channel_hists; // R, G, B
    std::uint64_t image_count = 0;
    int format_version = kProfileFormatVersion;

    bool operator==(const ReferenceProfile&) const = default;
};

inline std::array<NormalizedHistogram, 3> image_normalized_histograms(const ImageBuffer& img,
                                                                      int bins = kDefaultBins) {
    check_image(img);
    std::array<NormalizedHistogram, 3> out;
    for (int c = 0; c < 3; ++c)
        out[c] = normalize_histogram(compute_histogram(img.planes[c], bins));
    return out;
}

namespace detail {

/// Unweighted per-image mean of normalized histograms. Every image counts
/// equally regardless of pixel count. Accumulation is Neumaier-compensated
/// and always runs in index order, so the result does not depend on how the
/// per-image histograms were produced (thread count, scheduling).
inline ReferenceProfile
mean_profile(const std::vector<std::array<NormalizedHistogram, 3>>& hists, int bins) {
    if (hists.empty())
        throw EmptyDataset("build_reference: no images");
    ReferenceProfile p;
    p.bins = bins;
    p.image_count = hists.size();
    const double count = static_cast<double>(hists.size());
    for (int c = 0; c < 3; ++c) {
        p.channel_hists[c].bins = bins;
        p.channel_hists[c].probs.assign(static_cast<std::size_t>(bins), 0.0);
        for (int b = 0; b < bins; ++b) {
            double sum = 0.0;
            double comp = 0.0;
            for (const auto& h : hists) {
                const double v = h[c].probs[static_cast<std::size_t>(b)];
                const double t = sum + v;
                if (std::abs(sum) >= std::abs(v))
                    comp += (sum - t) + v;
                else
                    comp += (v - t) + sum;
                sum = t;
            }
            p.channel_hists[c].probs[static_cast<std::size_t>(b)] = (sum + comp) / count;
        }
    }
    return p;
}

} // namespace detail

/// Build the dataset-average profile from decoded images.
inline ReferenceProfile build_reference(std::span<const ImageBuffer> images,
                                        int bins = kDefaultBins, unsigned workers = 1) {
    if (images.empty())
        throw EmptyDataset("build_reference: no images");
    std::vector<std::array<NormalizedHistogram, 3>> hists(images.size());
    parallel_for(images.size(), workers,
                 [&](std::size_t i) { hists[i] = image_normalized_histograms(images[i], bins); });
    return detail::mean_profile(hists, bins);
}

/// Build the profile straight from image files. Decoding fans out across
/// `workers`; a failed decode aborts the build naming the offending file.
inline ReferenceProfile build_reference(const std::vector<std::filesystem::path>& paths,
                                        int bins = kDefaultBins, unsigned workers = 1) {
    if (paths.empty())
        throw EmptyDataset("build_reference: no images");
    std::vector<std::array<NormalizedHistogram, 3>> hists(paths.size());
    parallel_for(paths.size(), workers, [&](std::size_t i) {
        hists[i] = image_normalized_histograms(decode_image(paths[i]), bins);
    });
    return detail::mean_profile(hists, bins);
}

/// Per-channel CDFs of the profile (the actual matching target).
inline std::array<Cdf, 3> profile_cdfs(const ReferenceProfile& p) {
    return {cumulative(p.channel_hists[0]), cumulative(p.channel_hists[1]),
            cumulative(p.channel_hists[2])};
}

namespace detail {

inline void validate_profile(const ReferenceProfile& p, const std::string& context) {
    if (p.bins < 1 || p.bins > 256)
        throw ParseError(context + ": bad bins " + std::to_string(p.bins));
    if (p.image_count < 1)
        throw ParseError(context + ": image_count must be >= 1");
    static const char* names[3] = {"r", "g", "b"};
    for (int c = 0; c < 3; ++c) {
        const auto& probs = p.channel_hists[c].probs;
        if (probs.size() != static_cast<std::size_t>(p.bins))
            throw ParseError(context + ": channel " + names[c] + " has " +
                             std::to_string(probs.size()) + " entries, expected " +
                             std::to_string(p.bins));
        double sum = 0.0;
        for (double v : probs) {
            if (!(v >= 0.0))
                throw ParseError(context + ": channel " + names[c] + " has a negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ParseError(context + ": channel " + names[c] + " sums to " +
                             std::to_string(sum) + ", expected 1");
    }
}

} // namespace detail

/// Serialize as human-readable JSON. Doubles are written with shortest
/// round-trip formatting, so load(save(p)) == p bit for bit.
inline void save_reference(const ReferenceProfile& p, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["format_version"] = p.format_version;
    j["bins"] = p.bins;
    j["image_count"] = p.image_count;
    nlohmann::ordered_json channels;
    channels["r"] = p.channel_hists[0].probs;
    channels["g"] = p.channel_hists[1].probs;
    channels["b"] = p.channel_hists[2].probs;
    j["channels"] = std::move(channels);
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out)
        throw IoError("short write: " + path.string());
}

inline ReferenceProfile load_reference(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    ReferenceProfile p;
    try {
        p.format_version = j.at("format_version").get<int>();
        if (p.format_version != kProfileFormatVersion)
            throw VersionMismatch(path.string() + ": format_version " +
                                  std::to_string(p.format_version) + ", expected " +
                                  std::to_string(kProfileFormatVersion));
        p.bins = j.at("bins").get<int>();
        p.image_count = j.at("image_count").get<std::uint64_t>();
        const auto& channels = j.at("channels");
        p.channel_hists[0].probs = channels.at("r").get<std::vector<double>>();
        p.channel_hists[1].probs = channels.at("g").get<std::vector<double>>();
        p.channel_hists[2].probs = channels.at("b").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    for (auto& h : p.channel_hists)
        h.bins = p.bins;
    detail::validate_profile(p, path.string());
    return p;
}

} // namespace histmatch

#endif // HISTMATCH_REFERENCE_HPP
