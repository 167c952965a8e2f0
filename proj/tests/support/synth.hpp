#ifndef HISTMATCH_TESTS_SYNTH_HPP
#define HISTMATCH_TESTS_SYNTH_HPP

// Synthetic fixtures. Generation uses std::mt19937_64, deliberately a
// different generator from the library's RandomStream.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "histmatch/dataset.hpp"
#include "histmatch/histogram.hpp"
#include "histmatch/image.hpp"
#include "histmatch/image_io.hpp"

namespace synth {

namespace fs = std::filesystem;

/// Self-deleting scratch directory.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

inline histmatch::ImageBuffer random_image(std::mt19937_64& rng, int w, int h, int bins = 256) {
    std::uniform_int_distribution<int> dist(0, bins - 1);
    histmatch::ImageBuffer img;
    img.width = w;
    img.height = h;
    for (auto& plane : img.planes) {
        plane.resize(img.pixel_count());
        for (auto& p : plane)
            p = static_cast<histmatch::Pixel>(dist(rng));
    }
    return img;
}

/// Image whose channels occupy every bin at least once, so all channel CDFs
/// are strictly increasing. Requires w*h >= bins.
inline histmatch::ImageBuffer random_image_full_support(std::mt19937_64& rng, int w, int h,
                                                        int bins = 256) {
    std::uniform_int_distribution<int> dist(0, bins - 1);
    histmatch::ImageBuffer img;
    img.width = w;
    img.height = h;
    for (auto& plane : img.planes) {
        plane.resize(img.pixel_count());
        for (int v = 0; v < bins; ++v)
            plane[static_cast<std::size_t>(v)] = static_cast<histmatch::Pixel>(v);
        for (std::size_t i = static_cast<std::size_t>(bins); i < plane.size(); ++i)
            plane[i] = static_cast<histmatch::Pixel>(dist(rng));
        std::shuffle(plane.begin(), plane.end(), rng);
    }
    return img;
}

inline histmatch::ImageBuffer constant_image(int w, int h, histmatch::Pixel value) {
    histmatch::ImageBuffer img;
    img.width = w;
    img.height = h;
    for (auto& plane : img.planes)
        plane.assign(static_cast<std::size_t>(w) * h, value);
    return img;
}

/// Random normalized histogram; roughly `zero_fraction` of the bins empty.
inline histmatch::NormalizedHistogram random_normalized_hist(std::mt19937_64& rng, int bins,
                                                             double zero_fraction = 0.3) {
    std::uniform_real_distribution<double> mass(0.0, 1.0);
    histmatch::NormalizedHistogram h;
    h.bins = bins;
    h.probs.resize(static_cast<std::size_t>(bins));
    double total = 0.0;
    for (auto& p : h.probs) {
        p = (mass(rng) < zero_fraction) ? 0.0 : mass(rng);
        total += p;
    }
    if (total == 0.0) {
        h.probs[0] = 1.0;
        total = 1.0;
    }
    for (auto& p : h.probs)
        p /= total;
    return h;
}

inline histmatch::Cdf random_cdf(std::mt19937_64& rng, int bins, double zero_fraction = 0.3) {
    return histmatch::cumulative(random_normalized_hist(rng, bins, zero_fraction));
}

struct Corpus {
    fs::path manifest; // manifest CSV listing every image
    std::vector<std::string> rel_paths;
};

/// Write `n` random PNG images under dir and a manifest cycling through the
/// label and image-type vocabularies.
inline Corpus write_corpus(const fs::path& dir, int n, std::uint64_t seed, int w = 32,
                           int h = 32) {
    std::mt19937_64 rng(seed);
    fs::create_directories(dir / "img");
    Corpus corpus;
    corpus.manifest = dir / "manifest.csv";
    std::ofstream m(corpus.manifest);
    m << "path,label,image_type\n";
    static const char* labels[3] = {"healthy", "downy_mildew", "spider_mite"};
    static const char* types[2] = {"leaf_focused", "canopy"};
    for (int i = 0; i < n; ++i) {
        const std::string rel = "img/im" + std::to_string(i) + ".png";
        histmatch::encode_png(random_image(rng, w, h), dir / rel);
        m << rel << "," << labels[i % 3] << "," << types[i % 2] << "\n";
        corpus.rel_paths.push_back(rel);
    }
    return corpus;
}

/// Map of relative path -> raw file bytes, for whole-tree comparisons.
inline std::map<std::string, std::string> tree_bytes(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file())
            continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        out[fs::relative(e.path(), root).string()] = std::move(bytes);
    }
    return out;
}

} // namespace synth

#endif // HISTMATCH_TESTS_SYNTH_HPP
