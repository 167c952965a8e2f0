#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <set>

#include "histmatch/dataset.hpp"
#include "support/synth.hpp"

using namespace histmatch;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

/// Manifest with the six strata sized like the study dataset:
/// leaf-focused 308/275/258, canopy 239/221/168.
DatasetManifest table_shaped_manifest(const std::filesystem::path& file) {
    std::ofstream out(file);
    out << "path,label,image_type\n";
    const std::map<std::pair<std::string, std::string>, int> strata = {
        {{"healthy", "leaf_focused"}, 308},      {{"downy_mildew", "leaf_focused"}, 275},
        {{"spider_mite", "leaf_focused"}, 258},  {{"healthy", "canopy"}, 239},
        {{"downy_mildew", "canopy"}, 221},       {{"spider_mite", "canopy"}, 168},
    };
    int n = 0;
    for (const auto& [key, count] : strata) {
        for (int i = 0; i < count; ++i) {
            out << "img/" << key.first << "_" << key.second << "_" << i << ".png," << key.first
                << "," << key.second << "\n";
            ++n;
        }
    }
    out.close();
    REQUIRE(n == 1469);
    return parse_manifest(file);
}

} // namespace

TEST_CASE("parse_manifest handles header-only files") {
    synth::TempDir dir("manifest");
    const auto file = dir.path() / "m.csv";
    write_text(file, "path,label,image_type\n");
    CHECK(parse_manifest(file).entries.empty());
}

TEST_CASE("parse_manifest enforces the vocabulary") {
    synth::TempDir dir("manifest");
    const auto file = dir.path() / "m.csv";
    write_text(file, "path,label,image_type\na.png,mildew,canopy\n");
    CHECK_THROWS_AS(parse_manifest(file), UnknownLabel);

    write_text(file, "path,label,image_type\na.png,healthy,studio\n");
    CHECK_THROWS_AS(parse_manifest(file), UnknownLabel);
}

TEST_CASE("parse_manifest rejects duplicates, bad headers and commas") {
    synth::TempDir dir("manifest");
    const auto file = dir.path() / "m.csv";
    write_text(file, "path,label,image_type\na.png,healthy,canopy\na.png,healthy,canopy\n");
    CHECK_THROWS_AS(parse_manifest(file), DuplicatePath);

    write_text(file, "file,category,kind\n");
    CHECK_THROWS_AS(parse_manifest(file), ParseError);

    // a comma inside the path changes the field count
    write_text(file, "path,label,image_type\na,b.png,healthy,canopy\n");
    CHECK_THROWS_AS(parse_manifest(file), ParseError);

    CHECK_THROWS_AS(parse_manifest(dir.path() / "missing.csv"), IoError);
}

TEST_CASE("parse_manifest keeps Table-shaped stratum totals") {
    synth::TempDir dir("manifest");
    const DatasetManifest m = table_shaped_manifest(dir.path() / "m.csv");
    CHECK(m.entries.size() == 1469);
    std::map<Label, int> by_label;
    std::map<ImageType, int> by_type;
    for (const auto& e : m.entries) {
        ++by_label[e.label];
        ++by_type[e.image_type];
    }
    CHECK(by_label[Label::healthy] == 547);
    CHECK(by_label[Label::downy_mildew] == 496);
    CHECK(by_label[Label::spider_mite] == 426);
    CHECK(by_type[ImageType::leaf_focused] == 841);
    CHECK(by_type[ImageType::canopy] == 628);
}

TEST_CASE("stratified_kfold with k=1 puts everything in fold 0") {
    synth::TempDir dir("kfold");
    const auto corpus = synth::write_corpus(dir.path(), 9, 4, 4, 4);
    const DatasetManifest m = parse_manifest(corpus.manifest);
    const FoldAssignment fa = stratified_kfold(m, 1, 0);
    CHECK(fa.assignment.size() == 9);
    for (const auto& [path, fold] : fa.assignment)
        CHECK(fold == 0);
}

TEST_CASE("stratified_kfold rejects k < 1") {
    synth::TempDir dir("kfold");
    const auto corpus = synth::write_corpus(dir.path(), 3, 4, 4, 4);
    const DatasetManifest m = parse_manifest(corpus.manifest);
    CHECK_THROWS_AS(stratified_kfold(m, 0, 0), InvalidK);
}

TEST_CASE("a stratum of 7 dealt to 5 folds splits as {2,2,1,1,1}") {
    synth::TempDir dir("kfold");
    const auto file = dir.path() / "m.csv";
    std::ofstream out(file);
    out << "path,label,image_type\n";
    for (int i = 0; i < 7; ++i)
        out << "p" << i << ".png,healthy,canopy\n";
    out.close();
    const FoldAssignment fa = stratified_kfold(parse_manifest(file), 5, 3);
    std::map<int, int> fold_counts;
    for (const auto& [path, fold] : fa.assignment)
        ++fold_counts[fold];
    std::multiset<int> sizes;
    for (int f = 0; f < 5; ++f)
        sizes.insert(fold_counts.count(f) ? fold_counts[f] : 0);
    CHECK(sizes == std::multiset<int>{1, 1, 1, 2, 2});
}

TEST_CASE("stratified_kfold balances the Table-shaped manifest") {
    synth::TempDir dir("kfold");
    const DatasetManifest m = table_shaped_manifest(dir.path() / "m.csv");
    const int k = 5;
    const FoldAssignment fa = stratified_kfold(m, k, 11);

    // partition: every path exactly once
    REQUIRE(fa.assignment.size() == m.entries.size());
    for (const auto& e : m.entries) {
        REQUIRE(fa.assignment.count(e.path) == 1);
        const int f = fa.assignment.at(e.path);
        REQUIRE(f >= 0);
        REQUIRE(f < k);
    }

    // per-stratum spread <= 1 and fold totals within +-6 of 1469/5
    std::map<std::string, std::map<int, int>> stratum_folds;
    std::map<int, int> totals;
    for (const auto& e : m.entries) {
        const int f = fa.assignment.at(e.path);
        ++stratum_folds[stratum_key(e.label, e.image_type)][f];
        ++totals[f];
    }
    CHECK(stratum_folds.size() == 6);
    for (const auto& [key, folds] : stratum_folds) {
        int lo = 1 << 30, hi = 0;
        for (int f = 0; f < k; ++f) {
            const int c = folds.count(f) ? folds.at(f) : 0;
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        CHECK(hi - lo <= 1);
    }
    for (int f = 0; f < k; ++f)
        CHECK(std::abs(totals[f] - 1469.0 / 5.0) <= 6.0);
}

TEST_CASE("stratified_kfold is deterministic in the seed") {
    synth::TempDir dir("kfold");
    const auto corpus = synth::write_corpus(dir.path(), 30, 4, 4, 4);
    const DatasetManifest m = parse_manifest(corpus.manifest);
    CHECK(stratified_kfold(m, 5, 9) == stratified_kfold(m, 5, 9));
    CHECK(stratified_kfold(m, 5, 9) != stratified_kfold(m, 5, 10));
}

TEST_CASE("fold assignment round trips through CSV") {
    synth::TempDir dir("folds");
    const auto corpus = synth::write_corpus(dir.path(), 13, 4, 4, 4);
    const FoldAssignment fa = stratified_kfold(parse_manifest(corpus.manifest), 5, 2);
    const auto file = dir.path() / "folds.csv";
    write_fold_assignment(fa, file);
    CHECK(read_fold_assignment(file, 5) == fa);
}

TEST_CASE("empty assignment writes a header-only file") {
    synth::TempDir dir("folds");
    const auto file = dir.path() / "folds.csv";
    write_fold_assignment(FoldAssignment{}, file);
    std::ifstream in(file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == "path,fold\n");
    CHECK(read_fold_assignment(file).assignment.empty());
}

TEST_CASE("fold values outside [0,k) are rejected") {
    synth::TempDir dir("folds");
    const auto file = dir.path() / "folds.csv";
    write_text(file, "path,fold\na.png,5\n");
    CHECK_THROWS_AS(read_fold_assignment(file, 5), FoldOutOfRange);
    write_text(file, "path,fold\na.png,-1\n");
    CHECK_THROWS_AS(read_fold_assignment(file), FoldOutOfRange);
    write_text(file, "path,fold\na.png,two\n");
    CHECK_THROWS_AS(read_fold_assignment(file), ParseError);
}
