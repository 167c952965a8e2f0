#ifndef HISTMATCH_IMAGE_HPP
#define HISTMATCH_IMAGE_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "histmatch/error.hpp"
#include "histmatch/histogram.hpp"

namespace histmatch {

/// Planar RGB image, one intensity plane per channel.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::array<std::vector<Pixel>, 3> planes; // R, G, B

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    bool valid() const {
        if (width <= 0 || height <= 0)
            return false;
        for (const auto& p : planes)
            if (p.size() != pixel_count())
                return false;
        return true;
    }
    bool operator==(const ImageBuffer&) const = default;
};

inline void check_image(const ImageBuffer& img) {
    if (!img.valid())
        throw EmptyInput("image is empty or has mismatched planes");
}

/// Per-channel CDFs of an image (histogram -> normalize -> cumulative).
inline std::array<Cdf, 3> channel_cdfs(const ImageBuffer& img, int bins = kDefaultBins) {
    check_image(img);
    std::array<Cdf, 3> out;
    for (int c = 0; c < 3; ++c)
        out[c] = cumulative(normalize_histogram(compute_histogram(img.planes[c], bins)));
    return out;
}

/// Match each channel of `img` against the corresponding target CDF.
/// Width, height and channel count are preserved.
inline ImageBuffer match_image(const ImageBuffer& img, const std::array<Cdf, 3>& target) {
    check_image(img);
    if (target[0].bins != target[1].bins || target[0].bins != target[2].bins)
        throw BinMismatch("match_image: target channels disagree on bins");
    const int bins = target[0].bins;
    ImageBuffer out;
    out.width = img.width;
    out.height = img.height;
    for (int c = 0; c < 3; ++c) {
        const Cdf src = cumulative(normalize_histogram(compute_histogram(img.planes[c], bins)));
        const MatchingLut lut = build_matching_lut(src, target[c]);
        out.planes[c] = apply_lut(img.planes[c], lut);
    }
    return out;
}

} // namespace histmatch

#endif // HISTMATCH_IMAGE_HPP
