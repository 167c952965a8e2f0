#ifndef HISTMATCH_DATASET_HPP
#define HISTMATCH_DATASET_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "histmatch/csv.hpp"
#include "histmatch/error.hpp"
#include "histmatch/rng.hpp"

namespace histmatch {

enum class Label { healthy, downy_mildew, spider_mite };
enum class ImageType { leaf_focused, canopy };

constexpr std::array<Label, 3> kAllLabels = {Label::healthy, Label::downy_mildew,
                                             Label::spider_mite};
constexpr std::array<ImageType, 2> kAllImageTypes = {ImageType::leaf_focused, ImageType::canopy};

inline std::string_view to_string(Label l) {
    switch (l) {
    case Label::healthy: return "healthy";
    case Label::downy_mildew: return "downy_mildew";
    case Label::spider_mite: return "spider_mite";
    }
    return "?";
}

inline std::string_view to_string(ImageType t) {
    return t == ImageType::leaf_focused ? "leaf_focused" : "canopy";
}

inline std::optional<Label> label_from_string(std::string_view s) {
    for (Label l : kAllLabels)
        if (s == to_string(l))
            return l;
    return std::nullopt;
}

inline std::optional<ImageType> image_type_from_string(std::string_view s) {
    for (ImageType t : kAllImageTypes)
        if (s == to_string(t))
            return t;
    return std::nullopt;
}

struct ManifestEntry {
    std::string path; // as written in the manifest, relative to its directory
    Label label = Label::healthy;
    ImageType image_type = ImageType::leaf_focused;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::filesystem::path base; // directory the manifest file lives in

    /// Absolute (or base-relative) location of an entry on disk.
    std::filesystem::path resolve(const std::string& entry_path) const {
        std::filesystem::path p(entry_path);
        if (p.is_absolute() || base.empty())
            return p;
        return base / p;
    }
};

/// Parse a manifest CSV (`path,label,image_type`). Paths must be unique and
/// comma-free; label and image_type come from the closed vocabularies.
inline DatasetManifest parse_manifest(const std::filesystem::path& file) {
    DatasetManifest m;
    m.base = file.parent_path();
    std::set<std::string> seen;
    for (const auto& row : csv::read_file(file, "path,label,image_type")) {
        const std::string& path = row.fields[0];
        if (path.empty())
            throw ParseError(file.string() + ":" + std::to_string(row.line_no) + ": empty path");
        const auto label = label_from_string(row.fields[1]);
        if (!label)
            throw UnknownLabel(file.string() + ":" + std::to_string(row.line_no) +
                               ": unknown label '" + row.fields[1] + "'");
        const auto type = image_type_from_string(row.fields[2]);
        if (!type)
            throw UnknownLabel(file.string() + ":" + std::to_string(row.line_no) +
                               ": unknown image_type '" + row.fields[2] + "'");
        if (!seen.insert(path).second)
            throw DuplicatePath(file.string() + ": duplicate path '" + path + "'");
        m.entries.push_back({path, *label, *type});
    }
    return m;
}

struct FoldAssignment {
    int k = 0;
    std::map<std::string, int> assignment; // path -> fold in [0, k)

    bool operator==(const FoldAssignment&) const = default;
};

inline int stratum_ordinal(Label l, ImageType t) {
    return static_cast<int>(l) * 2 + static_cast<int>(t);
}

inline std::string stratum_key(Label l, ImageType t) {
    return std::string(to_string(l)) + "|" + std::string(to_string(t));
}

/// Stratified k-fold split. Strata are the label x image_type cells; each
/// stratum is shuffled by a stream derived from (seed, stratum key) and
/// dealt round-robin starting at fold (stratum ordinal mod k), which keeps
/// the per-stratum remainders spread across folds. Per-stratum fold counts
/// differ by at most one, and the result is a function of
/// (manifest, k, seed) only.
inline FoldAssignment stratified_kfold(const DatasetManifest& manifest, int k = 5,
                                       std::uint64_t seed = 0) {
    if (k < 1)
        throw InvalidK("k must be >= 1, got " + std::to_string(k));
    FoldAssignment fa;
    fa.k = k;
    for (Label l : kAllLabels) {
        for (ImageType t : kAllImageTypes) {
            std::vector<const ManifestEntry*> members;
            for (const auto& e : manifest.entries)
                if (e.label == l && e.image_type == t)
                    members.push_back(&e);
            if (members.empty())
                continue;
            RandomStream stream = derive_stream(seed, "split/" + stratum_key(l, t));
            for (std::size_t i = members.size() - 1; i > 0; --i) {
                const std::size_t j = static_cast<std::size_t>(stream.next_below(i + 1));
                std::swap(members[i], members[j]);
            }
            const int start = stratum_ordinal(l, t) % k;
            for (std::size_t i = 0; i < members.size(); ++i)
                fa.assignment[members[i]->path] =
                    (start + static_cast<int>(i % static_cast<std::size_t>(k))) % k;
        }
    }
    return fa;
}

/// Write a fold assignment as CSV (`path,fold`), rows in path order.
inline void write_fold_assignment(const FoldAssignment& fa, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out)
        throw IoError("cannot write " + file.string());
    out << "path,fold\n";
    for (const auto& [path, fold] : fa.assignment)
        out << path << "," << fold << "\n";
    if (!out)
        throw IoError("short write: " + file.string());
}

/// Read a fold assignment. When `expected_k` is given, folds must lie in
/// [0, expected_k); otherwise k is inferred as the largest fold plus one.
inline FoldAssignment read_fold_assignment(const std::filesystem::path& file,
                                           std::optional<int> expected_k = std::nullopt) {
    FoldAssignment fa;
    int max_fold = -1;
    for (const auto& row : csv::read_file(file, "path,fold")) {
        const std::string& path = row.fields[0];
        if (path.empty())
            throw ParseError(file.string() + ":" + std::to_string(row.line_no) + ": empty path");
        int fold = 0;
        try {
            std::size_t used = 0;
            fold = std::stoi(row.fields[1], &used);
            if (used != row.fields[1].size())
                throw std::invalid_argument("trailing chars");
        } catch (const std::exception&) {
            throw ParseError(file.string() + ":" + std::to_string(row.line_no) +
                             ": bad fold value '" + row.fields[1] + "'");
        }
        if (fold < 0 || (expected_k && fold >= *expected_k))
            throw FoldOutOfRange(file.string() + ":" + std::to_string(row.line_no) + ": fold " +
                                 std::to_string(fold) + " out of range");
        if (fa.assignment.count(path))
            throw DuplicatePath(file.string() + ": duplicate path '" + path + "'");
        fa.assignment[path] = fold;
        max_fold = std::max(max_fold, fold);
    }
    fa.k = expected_k ? *expected_k : max_fold + 1;
    return fa;
}

} // namespace histmatch

#endif // HISTMATCH_DATASET_HPP
