#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "ztac/embedding.hpp"
#include "ztac/error.hpp"
#include "ztac/synth.hpp"
#include "ztac/text.hpp"

using namespace ztac;

namespace {

// Independent oracles.
double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    long double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<long double>(a[i]) * b[i];
        na += static_cast<long double>(a[i]) * a[i];
        nb += static_cast<long double>(b[i]) * b[i];
    }
    return static_cast<double>(dot / (std::sqrt(na) * std::sqrt(nb)));
}

EmbeddingStore random_store(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<EmbeddingVector> v;
    for (std::size_t i = 0; i < n; ++i) {
        EmbeddingVector e{"t" + std::to_string(i), std::vector<double>(dim)};
        for (auto& x : e.values) x = u(rng);
        v.push_back(std::move(e));
    }
    return EmbeddingStore(std::move(v));
}

std::size_t parse_error_line(const std::string& text) {
    std::istringstream in(text);
    try {
        load_embeddings(in);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
    CHECK(tokenize("Blood-Pressure  Monitor!") == std::vector<std::string>{"blood", "pressure", "monitor"});
    CHECK(tokenize("  ").empty());
    CHECK(normalize("User  Consent") == "user consent");
}

TEST_CASE("load_embeddings") {
    std::istringstream ok("2 3\na 1 0 0\nb 0 1 0\n");
    const auto store = load_embeddings(ok);
    CHECK(store.size() == 2);
    CHECK(store.dimension() == 3);
    CHECK(store.at("b").values == std::vector<double>{0, 1, 0});

    CHECK(parse_error_line("2 3\na 1 0\n") == 2);
    CHECK(parse_error_line("x 3\n") == 1);
    CHECK(parse_error_line("2 2\na 1 0\na 0 1\n") == 3);
    CHECK(parse_error_line("2 2\na 1 0\nb 0 0\n") == 3);
    CHECK(parse_error_line("1 2\na 1 zz\n") == 2);
    CHECK(parse_error_line("3 2\na 1 0\nb 0 1\n") == 4);
    CHECK(parse_error_line("1 2\na 1 0\nb 0 1\n") == 3);
    CHECK_THROWS_AS(store.at("zzz"), UnknownToken);
}

TEST_CASE("store constructor validates") {
    CHECK_THROWS_AS(EmbeddingStore({{"a", {1, 0}}, {"b", {1}}}), InvalidArgument);
    CHECK_THROWS_AS(EmbeddingStore({{"a", {0, 0}}}), InvalidArgument);
    CHECK_THROWS_AS(EmbeddingStore({{"a", {1}}, {"a", {2}}}), InvalidArgument);
}

TEST_CASE("write/load round-trip is bit exact on a generated 50-token store") {
    const auto corpus = generate_corpus(kDefaultCorpusSeed, 500);
    std::vector<std::vector<std::string>> tokens;
    for (const auto& d : corpus) tokens.push_back(tokenize(d));
    const auto model = build_cooccurrence(tokens, kDefaultCorpusWindow);
    const auto store = derive_embeddings_from_cooccurrence(model, 50);
    REQUIRE(store.size() == 50);
    std::stringstream buf;
    write_embeddings(buf, store);
    const auto back = load_embeddings(buf);
    REQUIRE(back.size() == 50);
    for (const auto& v : store.vectors()) CHECK(back.at(v.token).values == v.values);
}

TEST_CASE("cosine similarity") {
    CHECK(cosine_similarity(std::vector<double>{3, 4}, std::vector<double>{3, 4}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
    CHECK(cosine_similarity(std::vector<double>{1, 2, 2}, std::vector<double>{2, 1, 2}) ==
          doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK_THROWS_AS(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{1}), InvalidArgument);
    CHECK_THROWS_AS(cosine_similarity(std::vector<double>{0, 0}, std::vector<double>{1, 0}), InvalidArgument);
}

TEST_CASE("cosine properties: self, symmetry, scale invariance") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(7), b(7);
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        CHECK(std::abs(cosine_similarity(a, a) - 1.0) <= 1e-12);
        CHECK(std::abs(cosine_similarity(a, b) - cosine_similarity(b, a)) <= 1e-12);
        auto ca = a;
        const double c = scale(rng);
        for (auto& x : ca) x *= c;
        CHECK(std::abs(cosine_similarity(ca, b) - cosine_similarity(a, b)) <= 1e-12);
        CHECK(std::abs(cosine_similarity(a, b) - oracle_cosine(a, b)) <= 1e-12);
    }
}

TEST_CASE("top_k_context") {
    EmbeddingStore s({{"a", {1, 0}}, {"b", {1, 0}}, {"c", {0, 1}}});
    CHECK(top_k_context(s, "a", 1) == std::vector<Neighbor>{{"b", 1.0}});
    CHECK(top_k_context(s, "a", 2) == std::vector<Neighbor>{{"b", 1.0}, {"c", 0.0}});
    CHECK(top_k_context(s, "a", 10).size() == 2);
    CHECK_THROWS_AS(top_k_context(s, "zz", 1), UnknownToken);
    CHECK_THROWS_AS(top_k_context(s, "a", 0), InvalidArgument);

    // Ties resolve lexicographically.
    EmbeddingStore tie({{"q", {1, 0}}, {"z", {2, 0}}, {"m", {3, 0}}, {"b", {0, 1}}});
    CHECK(top_k_context(tie, "q", 2) == std::vector<Neighbor>{{"m", 1.0}, {"z", 1.0}});
}

TEST_CASE("top_k_context equals exhaustive scan on a 50-token random store") {
    std::mt19937_64 rng(5);
    const auto store = random_store(rng, 50, 8);
    for (const auto& q : store.vectors()) {
        std::vector<Neighbor> all;
        for (const auto& v : store.vectors()) {
            if (v.token != q.token) all.push_back({v.token, cosine_similarity(q, v)});
        }
        std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
            return a.similarity != b.similarity ? a.similarity > b.similarity : a.token < b.token;
        });
        all.resize(3);
        CHECK(top_k_context(store, q.token, 3) == all);
    }
}

TEST_CASE("build_cooccurrence") {
    const auto m1 = build_cooccurrence({{"a", "b"}}, 1);
    CHECK(m1.pair_count("a", "b") == 1);
    CHECK(m1.pair_count("b", "a") == 1);
    CHECK(m1.token_count("a") == 1);

    const auto m2 = build_cooccurrence({{"a", "a", "a"}}, 1);
    CHECK(m2.pair_count("a", "a") == 4);
    CHECK(m2.token_count("a") == 3);

    CHECK_THROWS_AS(build_cooccurrence({{"a"}}, 0), InvalidArgument);
    CHECK(build_cooccurrence({}, 2).empty());
}

TEST_CASE("build_cooccurrence matches brute-force enumeration") {
    std::mt19937_64 rng(3);
    const std::vector<std::string> words{"p", "q", "r", "s", "t"};
    std::vector<std::vector<std::string>> corpus(20);
    for (auto& doc : corpus) {
        doc.resize(1 + rng() % 12);
        for (auto& w : doc) w = words[rng() % words.size()];
    }
    for (std::size_t window : {1u, 2u, 5u}) {
        const auto model = build_cooccurrence(corpus, window);
        std::map<std::pair<std::string, std::string>, std::uint64_t> pairs;
        std::map<std::string, std::uint64_t> counts;
        for (const auto& doc : corpus) {
            for (std::size_t i = 0; i < doc.size(); ++i) {
                ++counts[doc[i]];
                for (std::size_t j = 0; j < doc.size(); ++j) {
                    if (i != j && (i > j ? i - j : j - i) <= window) ++pairs[{doc[i], doc[j]}];
                }
            }
        }
        for (const auto& a : words) {
            CHECK(model.token_count(a) == counts[a]);
            for (const auto& b : words) {
                CHECK(model.pair_count(a, b) == pairs[{a, b}]);
                CHECK(model.pair_count(a, b) == model.pair_count(b, a));
                const double w = attribute_weight(model, a, b);
                CHECK(w >= 0.0);
                CHECK(w <= 1.0);
                CHECK((w == 0.0) == (pairs[{a, b}] == 0));
            }
        }
    }
}

TEST_CASE("attribute_weight") {
    const auto m = build_cooccurrence({{"x", "y"}, {"x", "z"}}, 1);
    CHECK(attribute_weight(m, "x", "y") == doctest::Approx(0.5));
    CHECK(attribute_weight(m, "y", "x") == doctest::Approx(1.0));
    CHECK(attribute_weight(m, "x", "y", WeightOrientation::GivenSecond) == doctest::Approx(1.0));
    CHECK(attribute_weight(m, "y", "z") == 0.0);
    CHECK_THROWS_WITH_AS(attribute_weight(m, "x", "nope"), doctest::Contains("nope"), UnknownToken);
}

TEST_CASE("embed_attribute") {
    EmbeddingStore s({{"blood", {1, 0, 0}}, {"pressure", {0, 1, 0}}, {"monitor", {0, 0, 3}}});
    CHECK(embed_attribute(s, "blood").vector.values == std::vector<double>{1, 0, 0});
    const auto mean = embed_attribute(s, "Blood pressure monitor");
    CHECK(mean.vector.values[0] == doctest::Approx(1.0 / 3));
    CHECK(mean.vector.values[1] == doctest::Approx(1.0 / 3));
    CHECK(mean.vector.values[2] == doctest::Approx(1.0));
    const auto partial = embed_attribute(s, "blood unknown");
    CHECK(partial.skipped_tokens == 1);
    CHECK(partial.vector.values == std::vector<double>{1, 0, 0});
    CHECK_THROWS_WITH_AS(embed_attribute(s, "foo bar"), doctest::Contains("foo, bar"), UnknownToken);
}

TEST_CASE("PPMI embeddings against a direct computation") {
    const std::vector<std::vector<std::string>> corpus{{"a", "b", "c"}, {"a", "b"}, {"c", "d", "e"}, {"d", "e"}};
    const auto model = build_cooccurrence(corpus, 1);
    const auto store = derive_embeddings_from_cooccurrence(model);
    CHECK(store.dimension() == model.vocabulary().size());
    const auto& vocab = model.vocabulary();
    double grand = 0;
    std::map<std::string, double> row;
    for (const auto& a : vocab) {
        for (const auto& b : vocab) {
            row[a] += static_cast<double>(model.pair_count(a, b));
            grand += static_cast<double>(model.pair_count(a, b));
        }
    }
    for (const auto& v : store.vectors()) {
        for (std::size_t j = 0; j < vocab.size(); ++j) {
            const double c = static_cast<double>(model.pair_count(v.token, vocab[j]));
            const double expect = c == 0 ? 0.0 : std::max(0.0, std::log(c * grand / (row[v.token] * row[vocab[j]])));
            CHECK(v.values[j] == doctest::Approx(expect).epsilon(1e-12));
            CHECK(v.values[j] >= 0.0);
        }
    }
    // Disjoint supports.
    CHECK(cosine_similarity(store.at("a"), store.at("e")) == 0.0);
}

TEST_CASE("PPMI: tokens with proportional rows") {
    // x and y always co-occur with k and with nothing else, so their PPMI rows coincide.
    const auto model = build_cooccurrence({{"x", "k"}, {"y", "k"}, {"x", "k"}, {"y", "k"}}, 1);
    const auto store = derive_embeddings_from_cooccurrence(model);
    CHECK(cosine_similarity(store.at("x"), store.at("y")) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(derive_embeddings_from_cooccurrence(CooccurrenceModel{}), InvalidArgument);
}

TEST_CASE("default corpus separates specialties") {
    const auto corpus = generate_corpus(kDefaultCorpusSeed, kDefaultCorpusDocuments);
    std::vector<std::vector<std::string>> tokens;
    for (const auto& d : corpus) tokens.push_back(tokenize(d));
    const auto model = build_cooccurrence(tokens, kDefaultCorpusWindow);
    const auto store = derive_embeddings_from_cooccurrence(model);
    CHECK(cosine_similarity(store.at("cardiologist"), store.at("holter")) >= 0.7);
    CHECK(cosine_similarity(store.at("cardiologist"), store.at("tomograph")) < 0.1);
}
