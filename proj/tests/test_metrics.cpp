#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "histmatch/metrics.hpp"
#include "support/oracles.hpp"

using namespace histmatch;

namespace {

const std::vector<std::string> kClasses = {"healthy", "downy_mildew", "spider_mite"};

ConfusionMatrix fixture_matrix() {
    // recalls 0.8 / 0.9 / 1.0, balanced accuracy exactly 0.9
    ConfusionMatrix cm;
    cm.classes = kClasses;
    cm.counts = {{8, 2, 0}, {1, 9, 0}, {0, 0, 10}};
    return cm;
}

} // namespace

TEST_CASE("confusion_matrix tallies true/pred pairs") {
    std::vector<PredictionRecord> preds;
    for (int i = 0; i < 5; ++i)
        preds.push_back({"p" + std::to_string(i), "healthy", "healthy"});
    const ConfusionMatrix cm = confusion_matrix(preds, kClasses);
    CHECK(cm.counts[0][0] == 5);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != 0 || j != 0)
                CHECK(cm.counts[i][j] == 0);

    const ConfusionMatrix empty = confusion_matrix(std::vector<PredictionRecord>{}, kClasses);
    for (const auto& row : empty.counts)
        for (auto c : row)
            CHECK(c == 0);
}

TEST_CASE("confusion_matrix matches a naive tally over random records") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> pick(0, 2);
    std::vector<PredictionRecord> preds;
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int i = 0; i < 100; ++i) {
        const auto t = kClasses[pick(rng)];
        const auto p = kClasses[pick(rng)];
        preds.push_back({"r" + std::to_string(i), t, p});
        pairs.emplace_back(t, p);
    }
    const ConfusionMatrix cm = confusion_matrix(preds, kClasses);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            std::uint64_t expect = 0;
            for (const auto& [t, p] : pairs)
                if (t == kClasses[i] && p == kClasses[j])
                    ++expect;
            REQUIRE(cm.counts[i][j] == expect);
        }
    }
}

TEST_CASE("confusion_matrix rejects labels outside the class list") {
    std::vector<PredictionRecord> preds = {{"x", "mildew", "healthy"}};
    CHECK_THROWS_AS(confusion_matrix(preds, kClasses), UnknownLabel);
    preds = {{"x", "healthy", "algo"}};
    CHECK_THROWS_AS(confusion_matrix(preds, kClasses), UnknownLabel);
}

TEST_CASE("balanced accuracy of the worked fixture is exactly 0.9") {
    const ConfusionMatrix cm = fixture_matrix();
    const auto recalls = per_class_recall(cm);
    CHECK(recalls.at("healthy") == 0.8);
    CHECK(recalls.at("downy_mildew") == 0.9);
    CHECK(recalls.at("spider_mite") == 1.0);
    CHECK(balanced_accuracy(cm) == 0.9);
}

TEST_CASE("balanced accuracy is 1 for diagonal matrices of any size") {
    ConfusionMatrix cm;
    cm.classes = kClasses;
    cm.counts = {{3, 0, 0}, {0, 99, 0}, {0, 0, 7}};
    CHECK(balanced_accuracy(cm) == 1.0);
    const auto recalls = per_class_recall(cm);
    for (const auto& [cls, r] : recalls)
        CHECK(r == 1.0);
}

TEST_CASE("one fully misclassified class among c gives (c-1)/c") {
    ConfusionMatrix cm;
    cm.classes = kClasses;
    cm.counts = {{5, 0, 0}, {0, 5, 0}, {5, 0, 0}}; // spider_mite always called healthy
    CHECK(balanced_accuracy(cm) == 2.0 / 3.0);
}

TEST_CASE("single-class matrix has recall 1") {
    ConfusionMatrix cm;
    cm.classes = {"healthy"};
    cm.counts = {{5}};
    CHECK(per_class_recall(cm).at("healthy") == 1.0);
    CHECK(balanced_accuracy(cm) == 1.0);
}

TEST_CASE("a zero row raises EmptyClass") {
    ConfusionMatrix cm;
    cm.classes = kClasses;
    cm.counts = {{5, 0, 0}, {0, 0, 0}, {0, 0, 5}};
    CHECK_THROWS_AS(balanced_accuracy(cm), EmptyClass);
    CHECK_THROWS_AS(per_class_recall(cm), EmptyClass);
}

TEST_CASE("balanced accuracy is invariant to duplicating one class") {
    ConfusionMatrix cm = fixture_matrix();
    const double before = balanced_accuracy(cm);
    for (auto& c : cm.counts[1])
        c *= 4; // duplicate every downy_mildew record 4 times
    CHECK(balanced_accuracy(cm) == before);
}

TEST_CASE("balanced accuracy equals the mean of per-class recalls, bit for bit") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::uint64_t> count(0, 50);
    for (int trial = 0; trial < 500; ++trial) {
        ConfusionMatrix cm;
        cm.classes = kClasses;
        cm.counts.assign(3, std::vector<std::uint64_t>(3, 0));
        for (auto& row : cm.counts) {
            do {
                for (auto& c : row)
                    c = count(rng);
            } while (row[0] + row[1] + row[2] == 0);
        }
        const auto recalls = per_class_recall(cm);
        double sum = 0.0;
        for (const auto& cls : cm.classes)
            sum += recalls.at(cls);
        REQUIRE(balanced_accuracy(cm) == sum / 3.0);

        // against the brute-force tally: rebuild raw pairs from the matrix
        std::vector<std::pair<std::string, std::string>> pairs;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                for (std::uint64_t n = 0; n < cm.counts[i][j]; ++n)
                    pairs.emplace_back(kClasses[i], kClasses[j]);
        const auto expect = oracles::recall_tally(pairs, kClasses);
        long double mean = 0.0L;
        for (const auto& cls : kClasses)
            mean += expect.at(cls);
        mean /= 3.0L;
        REQUIRE(std::abs(static_cast<double>(mean - balanced_accuracy(cm))) < 1e-12);
    }
}

TEST_CASE("aggregate_runs computes mean and sample std") {
    const std::vector<double> constant = {0.9, 0.9, 0.9};
    const Aggregate a = aggregate_runs(constant);
    CHECK(a.mean == 0.9);
    CHECK(a.std == 0.0);

    const std::vector<double> two = {0.8, 1.0};
    const Aggregate b = aggregate_runs(two);
    CHECK(b.mean == 0.9);
    CHECK(b.std == Catch::Approx(0.14142135623730948).epsilon(1e-12));

    CHECK_THROWS_AS(aggregate_runs(std::vector<double>{0.5}), TooFewSamples);
    CHECK_THROWS_AS(mean_of(std::vector<double>{}), TooFewSamples);
}

TEST_CASE("aggregate_runs matches the extended-precision oracle") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    std::vector<double> values(25);
    for (auto& v : values)
        v = value(rng);
    const Aggregate a = aggregate_runs(values);
    const auto expect = oracles::mean_std(values);
    CHECK(std::abs(static_cast<double>(expect.mean - a.mean)) < 1e-12);
    CHECK(std::abs(static_cast<double>(expect.std - a.std)) < 1e-12);
}

TEST_CASE("make_report is internally consistent") {
    const MetricReport r = make_report(fixture_matrix());
    CHECK(r.n == 30);
    CHECK(r.balanced_accuracy == 0.9);
    double sum = 0.0;
    for (const auto& [cls, rec] : r.per_class_recall)
        sum += rec;
    CHECK(std::abs(r.balanced_accuracy - sum / 3.0) < 1e-12);
}
