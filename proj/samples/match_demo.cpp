// Minimal library walkthrough: build a reference profile from a few
// in-memory images, match another image against it, and show how far the
// matched CDF sits from the target at a handful of levels.

#include <algorithm>
#include <cstdio>
#include <random>
#include <vector>

#include "histmatch/histogram.hpp"
#include "histmatch/image.hpp"
#include "histmatch/reference.hpp"

using namespace histmatch;

namespace {

ImageBuffer noisy_gradient(std::mt19937_64& rng, int w, int h, int base) {
    std::uniform_int_distribution<int> jitter(-20, 20);
    ImageBuffer img;
    img.width = w;
    img.height = h;
    for (auto& plane : img.planes) {
        plane.resize(img.pixel_count());
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int v = base + (x * 160) / w + jitter(rng);
                plane[static_cast<std::size_t>(y) * w + x] =
                    static_cast<Pixel>(std::clamp(v, 0, 255));
            }
    }
    return img;
}

} // namespace

int main() {
    std::mt19937_64 rng(1);

    // A dark image and a brighter "dataset" whose average becomes the target.
    std::vector<ImageBuffer> dataset;
    for (int i = 0; i < 8; ++i)
        dataset.push_back(noisy_gradient(rng, 96, 96, 60 + 8 * i));
    const ReferenceProfile profile = build_reference(dataset);
    const auto target = profile_cdfs(profile);

    const ImageBuffer dark = noisy_gradient(rng, 96, 96, 5);
    const ImageBuffer matched = match_image(dark, target);

    std::printf("level   target_cdf   before   after\n");
    for (int level : {32, 64, 96, 128, 160, 192, 224}) {
        const auto before = channel_cdfs(dark)[0].values[static_cast<std::size_t>(level)];
        const auto after = channel_cdfs(matched)[0].values[static_cast<std::size_t>(level)];
        std::printf("%5d   %10.4f   %6.4f   %5.4f\n", level,
                    target[0].values[static_cast<std::size_t>(level)], before, after);
    }
    return 0;
}
