#ifndef HISTMATCH_HISTOGRAM_HPP
#define HISTMATCH_HISTOGRAM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "histmatch/error.hpp"

namespace histmatch {

/// Pixel intensity. 8-bit imagery throughout; `bins` may be any value in
/// [1, 256].
using Pixel = std::uint8_t;

constexpr int kDefaultBins = 256;

/// Slack used when comparing accumulated CDF values. Prefix sums carry
/// rounding error of at most a few ulps; without the slack a tie between
/// mathematically equal CDF values could select a neighbouring bin.
constexpr double kCdfSlack = 1e-12;

/// Raw per-channel intensity counts.
struct ChannelHistogram {
    int bins = kDefaultBins;
    std::vector<std::uint64_t> counts; // counts.size() == bins
    std::uint64_t total = 0;           // sum of counts

    bool operator==(const ChannelHistogram&) const = default;
};

/// Histogram scaled to unit mass.
struct NormalizedHistogram {
    int bins = kDefaultBins;
    std::vector<double> probs; // each >= 0, summing to 1 within 1e-9

    bool operator==(const NormalizedHistogram&) const = default;
};

/// Cumulative distribution: non-decreasing, ending at 1 within 1e-9.
struct Cdf {
    int bins = kDefaultBins;
    std::vector<double> values;

    bool operator==(const Cdf&) const = default;
};

/// Monotone intensity-to-intensity map realizing CDF matching.
struct MatchingLut {
    int bins = kDefaultBins;
    std::vector<Pixel> map; // map.size() == bins, entries in [0, bins)

    bool operator==(const MatchingLut&) const = default;
};

inline void check_bins(int bins) {
    if (bins < 1 || bins > 256)
        throw OutOfRange("bins must be in [1, 256], got " + std::to_string(bins));
}

/// Count intensity occurrences over one pixel plane.
inline ChannelHistogram compute_histogram(std::span<const Pixel> pixels, int bins = kDefaultBins) {
    check_bins(bins);
    if (pixels.empty())
        throw EmptyInput("compute_histogram: empty pixel sequence");
    ChannelHistogram h;
    h.bins = bins;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (Pixel p : pixels) {
        if (static_cast<int>(p) >= bins)
            throw OutOfRange("compute_histogram: intensity " + std::to_string(int(p)) +
                             " >= bins " + std::to_string(bins));
        ++h.counts[p];
    }
    h.total = pixels.size();
    return h;
}

/// Scale counts to probabilities.
inline NormalizedHistogram normalize_histogram(const ChannelHistogram& h) {
    if (h.total == 0)
        throw ZeroTotal("normalize_histogram: histogram total is zero");
    NormalizedHistogram n;
    n.bins = h.bins;
    n.probs.resize(h.counts.size());
    const double total = static_cast<double>(h.total);
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        n.probs[i] = static_cast<double>(h.counts[i]) / total;
    return n;
}

/// Running sum of a normalized histogram, accumulated with Neumaier
/// compensation so the final value lands on 1 within 1e-9.
inline Cdf cumulative(const NormalizedHistogram& h) {
    Cdf c;
    c.bins = h.bins;
    c.values.resize(h.probs.size());
    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t i = 0; i < h.probs.size(); ++i) {
        const double v = h.probs[i];
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
        c.values[i] = sum + comp;
    }
    return c;
}

/// Inverse-CDF matching rule: map[s] is the smallest r whose reference CDF
/// reaches the source CDF at s, i.e. min{ r : ref[r] >= src[s] - slack }.
/// A constant source channel therefore lands on the top of the reference
/// support. Monotone by construction because src is non-decreasing.
inline MatchingLut build_matching_lut(const Cdf& src, const Cdf& ref) {
    if (src.bins != ref.bins)
        throw BinMismatch("build_matching_lut: src bins " + std::to_string(src.bins) +
                          " != ref bins " + std::to_string(ref.bins));
    MatchingLut lut;
    lut.bins = src.bins;
    lut.map.resize(src.values.size());
    const auto begin = ref.values.begin();
    const auto end = ref.values.end();
    for (std::size_t s = 0; s < src.values.size(); ++s) {
        auto it = std::lower_bound(begin, end, src.values[s] - kCdfSlack);
        const std::size_t r = (it == end) ? src.values.size() - 1
                                          : static_cast<std::size_t>(it - begin);
        lut.map[s] = static_cast<Pixel>(r);
    }
    return lut;
}

/// Remap a pixel plane through a lookup table.
inline std::vector<Pixel> apply_lut(std::span<const Pixel> plane, const MatchingLut& lut) {
    std::vector<Pixel> out(plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i) {
        const Pixel p = plane[i];
        if (static_cast<int>(p) >= lut.bins)
            throw OutOfRange("apply_lut: intensity " + std::to_string(int(p)) +
                             " >= bins " + std::to_string(lut.bins));
        out[i] = lut.map[p];
    }
    return out;
}

} // namespace histmatch

#endif // HISTMATCH_HISTOGRAM_HPP
