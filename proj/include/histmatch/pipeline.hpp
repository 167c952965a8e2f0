#ifndef HISTMATCH_PIPELINE_HPP
#define HISTMATCH_PIPELINE_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "histmatch/dataset.hpp"
#include "histmatch/error.hpp"
#include "histmatch/image.hpp"
#include "histmatch/image_io.hpp"
#include "histmatch/parallel.hpp"
#include "histmatch/reference.hpp"

namespace histmatch {

struct PreprocessConfig {
    ReferenceProfile reference;
    std::optional<int> resize;         // target side length, >= 8
    std::filesystem::path output_dir;
    bool overwrite = false;
    unsigned workers = 1;
};

struct PreprocessReport {
    std::size_t processed = 0;
    std::vector<std::pair<std::string, std::string>> failed; // (path, error), manifest order
    double wall_time = 0.0;                                  // seconds
};

namespace detail {

inline Pixel round_clamp(double v) {
    double r = std::nearbyint(v); // ties to even under the default rounding mode
    if (r < 0.0)
        r = 0.0;
    if (r > 255.0)
        r = 255.0;
    return static_cast<Pixel>(r);
}

/// Bilinear sample with half-pixel centers; edges clamp. Identity when the
/// output grid equals the input grid.
inline std::vector<Pixel> resize_plane(const std::vector<Pixel>& in, int w, int h, int side) {
    std::vector<Pixel> out(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
    const double sx = static_cast<double>(w) / side;
    const double sy = static_cast<double>(h) / side;
    for (int y = 0; y < side; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        const double wy = fy - y0;
        int y1 = y0 + 1;
        y0 = std::clamp(y0, 0, h - 1);
        y1 = std::clamp(y1, 0, h - 1);
        for (int x = 0; x < side; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            const double wx = fx - x0;
            int x1 = x0 + 1;
            x0 = std::clamp(x0, 0, w - 1);
            x1 = std::clamp(x1, 0, w - 1);
            const double top = (1.0 - wx) * in[static_cast<std::size_t>(y0) * w + x0] +
                               wx * in[static_cast<std::size_t>(y0) * w + x1];
            const double bot = (1.0 - wx) * in[static_cast<std::size_t>(y1) * w + x0] +
                               wx * in[static_cast<std::size_t>(y1) * w + x1];
            out[static_cast<std::size_t>(y) * side + x] =
                round_clamp((1.0 - wy) * top + wy * bot);
        }
    }
    return out;
}

/// Map a manifest path into the output tree. Absolute paths collapse to
/// their filename; ".." components are refused so outputs stay inside the
/// output directory. Pass an empty extension to keep the original name.
inline std::filesystem::path output_path_for(const std::filesystem::path& output_dir,
                                             const std::string& entry_path,
                                             const std::string& extension) {
    std::filesystem::path rel(entry_path);
    if (rel.is_absolute())
        rel = rel.filename();
    for (const auto& part : rel)
        if (part == "..")
            throw IoError("refusing '..' in manifest path: " + entry_path);
    if (!extension.empty())
        rel.replace_extension(extension);
    return output_dir / rel;
}

inline void ensure_parent_dir(const std::filesystem::path& file) {
    const auto parent = file.parent_path();
    if (parent.empty())
        return;
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec && !std::filesystem::is_directory(parent))
        throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
}

inline void check_output_writable(const std::filesystem::path& file, bool overwrite) {
    if (!overwrite && std::filesystem::exists(file))
        throw IoError("output exists (pass overwrite): " + file.string());
}

/// Run one job per manifest entry; failures land in the report instead of
/// aborting the batch. Jobs run in parallel but the report is assembled in
/// manifest order afterwards.
template <typename Job>
PreprocessReport run_batch(const DatasetManifest& manifest, unsigned workers, Job&& job) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<std::optional<std::string>> errors(manifest.entries.size());
    parallel_for(manifest.entries.size(), workers, [&](std::size_t i) {
        try {
            job(i);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    PreprocessReport report;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i])
            report.failed.emplace_back(manifest.entries[i].path, *errors[i]);
        else
            ++report.processed;
    }
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

} // namespace detail

/// Squash-resize to side x side with bilinear interpolation (aspect ratio is
/// not preserved). Intensities round half-to-even.
inline ImageBuffer resize_image(const ImageBuffer& img, int side) {
    check_image(img);
    if (side < 1)
        throw OutOfRange("resize side must be >= 1, got " + std::to_string(side));
    if (side == img.width && side == img.height)
        return img;
    ImageBuffer out;
    out.width = side;
    out.height = side;
    for (int c = 0; c < 3; ++c)
        out.planes[c] = detail::resize_plane(img.planes[c], img.width, img.height, side);
    return out;
}

/// Batch preprocessing: decode, match against the reference profile at
/// native resolution, optionally resize, and re-encode losslessly as PNG
/// under cfg.output_dir, mirroring manifest-relative paths. Per-image
/// failures are recorded, not fatal.
inline PreprocessReport preprocess_dataset(const DatasetManifest& manifest,
                                           const PreprocessConfig& cfg) {
    if (cfg.resize && *cfg.resize < 8)
        throw OutOfRange("resize must be >= 8, got " + std::to_string(*cfg.resize));
    detail::validate_profile(cfg.reference, "preprocess reference");
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (!std::filesystem::is_directory(cfg.output_dir))
        throw IoError("cannot create output directory " + cfg.output_dir.string() + ": " +
                      ec.message());

    const std::array<Cdf, 3> target = profile_cdfs(cfg.reference);
    return detail::run_batch(manifest, cfg.workers, [&](std::size_t i) {
        const ManifestEntry& entry = manifest.entries[i];
        const ImageBuffer img = decode_image(manifest.resolve(entry.path));
        ImageBuffer matched = match_image(img, target);
        if (cfg.resize)
            matched = resize_image(matched, *cfg.resize);
        const auto out = detail::output_path_for(cfg.output_dir, entry.path, ".png");
        detail::ensure_parent_dir(out);
        detail::check_output_writable(out, cfg.overwrite);
        encode_png(matched, out);
    });
}

} // namespace histmatch

#endif // HISTMATCH_PIPELINE_HPP
