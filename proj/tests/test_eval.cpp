#include <doctest.h>

#include <algorithm>
#include <json.hpp>
#include <random>

#include "ztac/error.hpp"
#include "ztac/eval.hpp"
#include "ztac/models.hpp"

using namespace ztac;

namespace {

constexpr auto L = SampleLabel::Legit;
constexpr auto M = SampleLabel::Misuse;

// Hand-rolled oracle: counts each cell directly.
ConfusionMatrix oracle_confusion(const std::vector<SampleLabel>& p, const std::vector<SampleLabel>& l) {
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < p.size(); ++i) {
        cm.tp += p[i] == L && l[i] == L;
        cm.fp += p[i] == L && l[i] == M;
        cm.fn += p[i] == M && l[i] == L;
        cm.tn += p[i] == M && l[i] == M;
    }
    return cm;
}

std::vector<SampleLabel> random_labels(std::mt19937_64& rng, std::size_t n) {
    std::vector<SampleLabel> v(n);
    for (auto& x : v) x = rng() % 2 ? L : M;
    return v;
}

}  // namespace

TEST_CASE("classify is inclusive at the threshold") {
    CHECK(classify(1.0, 0.7) == L);
    CHECK(classify(1.0, 1.0) == L);
    CHECK(classify(0.0, 0.7) == M);
    CHECK(classify(0.7, 0.7) == L);
    CHECK(classify(std::nextafter(0.7, 0.0), 0.7) == M);
}

TEST_CASE("metrics by hand arithmetic") {
    auto m = metrics({9, 1, 1, 9});
    CHECK(m.precision == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(m.recall == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(m.f1 == doctest::Approx(0.9).epsilon(1e-15));

    m = metrics({10, 0, 0, 10});
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);

    m = metrics({0, 5, 3, 2});
    CHECK(m.precision == 0.0);
    CHECK(m.f1 == 0.0);

    m = metrics({});
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.f1 == 0.0);

    m = metrics({3, 1, 5, 0});
    CHECK(m.precision == doctest::Approx(0.75));
    CHECK(m.recall == doctest::Approx(3.0 / 8));
    CHECK(m.f1 == doctest::Approx(2 * 0.75 * 0.375 / (0.75 + 0.375)));
}

TEST_CASE("confusion matches the oracle, totals and is permutation invariant") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = rng() % 200;
        auto p = random_labels(rng, n);
        auto l = random_labels(rng, n);
        const auto cm = confusion(p, l);
        CHECK(cm == oracle_confusion(p, l));
        CHECK(cm.total() == n);

        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<SampleLabel> p2(n), l2(n);
        for (std::size_t i = 0; i < n; ++i) {
            p2[i] = p[idx[i]];
            l2[i] = l[idx[i]];
        }
        const auto a = metrics(cm), b = metrics(confusion(p2, l2));
        CHECK(a.precision == b.precision);
        CHECK(a.recall == b.recall);
        CHECK(a.f1 == b.f1);
    }
    const std::vector<SampleLabel> one{L};
    const std::vector<SampleLabel> two{L, M};
    CHECK_THROWS_AS(confusion(one, two), InvalidArgument);
}

TEST_CASE("specialty breakdown") {
    auto ds = generate_labeled_dataset(12, 400, 0.5);
    std::mt19937_64 rng(9);
    const auto preds = random_labels(rng, ds.size());

    SUBCASE("micro-sum equals global and filtered recomputation matches") {
        const auto by = specialty_breakdown(ds, preds);
        ConfusionMatrix sum;
        for (const auto& [name, r] : by) {
            sum += r.confusion;
            std::vector<SampleLabel> p, l;
            for (std::size_t i = 0; i < ds.size(); ++i) {
                if (ds[i].specialty != name) continue;
                p.push_back(preds[i]);
                l.push_back(ds[i].label);
            }
            CHECK(r.confusion == oracle_confusion(p, l));
            CHECK(r.metrics.f1 == metrics(oracle_confusion(p, l)).f1);
        }
        std::vector<SampleLabel> labels;
        for (const auto& s : ds) labels.push_back(s.label);
        CHECK(sum == confusion(preds, labels));
        CHECK(by.size() <= 9);
    }
    SUBCASE("single specialty equals global") {
        for (auto& s : ds) s.specialty = "Cardiology";
        std::vector<SampleLabel> labels;
        for (const auto& s : ds) labels.push_back(s.label);
        const auto by = specialty_breakdown(ds, preds);
        REQUIRE(by.size() == 1);
        CHECK(by.begin()->second.confusion == confusion(preds, labels));
    }
    SUBCASE("one all-correct, one all-wrong") {
        std::vector<LabeledSample> two(4);
        two[0].specialty = two[1].specialty = "A";
        two[2].specialty = two[3].specialty = "B";
        two[0].label = two[2].label = L;
        two[1].label = two[3].label = M;
        const std::vector<SampleLabel> p{L, M, M, L};
        const auto by = specialty_breakdown(two, p);
        CHECK(by.at("A").metrics.f1 == 1.0);
        CHECK(by.at("B").metrics.f1 == 0.0);
    }
    SUBCASE("length mismatch") {
        const std::vector<SampleLabel> p{L};
        CHECK_THROWS_AS(specialty_breakdown(ds, p), InvalidArgument);
    }
}

TEST_CASE("confidence comparison") {
    const auto& models = default_models();
    const ScoringConfig config;

    SUBCASE("legit samples whose report equals history give 1.0 for BLEU and proposed") {
        auto ds = generate_labeled_dataset(5, 40, 0.0);
        for (auto& s : ds) s.candidate_report = s.history.front();
        std::vector<SampleScores> scores;
        for (const auto& s : ds) scores.push_back(score_sample(s, models.view(), config));
        const auto rows = confidence_comparison(ds, scores);
        REQUIRE(rows.size() == kScorerCount);
        for (const auto& r : rows) {
            CHECK(r.legit_count == 40);
            CHECK(r.misuse_count == 0);
            if (r.scorer == Scorer::Bleu) CHECK(r.legit_mean == doctest::Approx(1.0));
            if (r.scorer == Scorer::Gram1) CHECK(r.legit_mean == doctest::Approx(1.0));
        }
        for (std::size_t i = 0; i < ds.size(); ++i) CHECK(scores[i][Scorer::Bleu] == doctest::Approx(1.0));
        const auto prop = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.scorer == Scorer::Proposed; });
        CHECK(prop->legit_mean == doctest::Approx(1.0));
    }
    SUBCASE("single sample equals its own scores") {
        const auto ds = generate_labeled_dataset(8, 1, 0.0);
        const std::vector<SampleScores> scores{score_sample(ds[0], models.view(), config)};
        const auto rows = confidence_comparison(ds, scores);
        for (const auto& r : rows) CHECK(r.legit_mean == scores[0][r.scorer]);
    }
    SUBCASE("synonym-swap misuse scores below legit on the proposed scorer") {
        auto ds = generate_labeled_dataset(21, 800, 0.5);
        std::vector<LabeledSample> kept;
        for (auto& s : ds) {
            if (s.mismatch_kind == MismatchKind::None || s.mismatch_kind == MismatchKind::SynonymSwap) kept.push_back(s);
        }
        std::vector<SampleScores> scores;
        for (const auto& s : kept) scores.push_back(score_sample(s, models.view(), config));
        const auto rows = confidence_comparison(kept, scores);
        const auto& prop = rows[static_cast<std::size_t>(Scorer::Proposed)];
        REQUIRE(prop.scorer == Scorer::Proposed);
        CHECK(prop.misuse_mean < prop.legit_mean);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(confidence_comparison({}, {}), InvalidArgument);
        const auto ds = generate_labeled_dataset(8, 2, 0.0);
        const std::vector<SampleScores> one(1);
        CHECK_THROWS_AS(confidence_comparison(ds, one), InvalidArgument);
    }
}

TEST_CASE("evaluate: single and multi-threaded runs agree; outputs are well formed") {
    const auto& models = default_models();
    const auto ds = generate_labeled_dataset(314, 300, 0.5);
    const auto a = evaluate(ds, models.view(), ScoringConfig{}, 0.7, 1);
    const auto b = evaluate(ds, models.view(), ScoringConfig{}, 0.7, 4);
    CHECK(a.proposed_confusion == b.proposed_confusion);
    CHECK(a.bleu_confusion == b.bleu_confusion);
    CHECK(report_json(a) == report_json(b));
    CHECK(a.samples == 300);
    CHECK(a.proposed_confusion.total() == 300);

    // Independent recomputation of the proposed confusion.
    std::vector<SampleLabel> p, l;
    for (const auto& s : ds) {
        p.push_back(classify(score_sample(s, models.view(), ScoringConfig{})[Scorer::Proposed], 0.7));
        l.push_back(s.label);
    }
    CHECK(a.proposed_confusion == oracle_confusion(p, l));

    const auto j = nlohmann::json::parse(report_json(a));
    CHECK(j.contains("proposed"));
    CHECK(j["samples"] == 300);
    const auto csv = report_csv(a);
    CHECK(csv.find("proposed") != std::string::npos);
    CHECK(csv.find("BLEU") != std::string::npos);
    CHECK(report_table(a).find("4-gram") != std::string::npos);
}

TEST_CASE("scorer names") {
    CHECK(to_string(Scorer::Gram1) == "1-gram");
    CHECK(to_string(Scorer::Gram4) == "4-gram");
    CHECK(to_string(Scorer::Bleu) == "BLEU");
    CHECK(to_string(Scorer::Proposed) == "proposed");
}
