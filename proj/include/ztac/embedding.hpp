#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ztac {

struct EmbeddingVector {
    std::string token;
    std::vector<double> values;

    std::size_t dimension() const noexcept { return values.size(); }
};

// Immutable token -> vector map. All vectors share one dimension and none is zero.
class EmbeddingStore {
public:
    EmbeddingStore() = default;

    // Validates dimension agreement, duplicates, and non-zero vectors.
    // Throws InvalidArgument on violation.
    explicit EmbeddingStore(std::vector<EmbeddingVector> vectors);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return vectors_.size(); }
    bool empty() const noexcept { return vectors_.empty(); }
    bool contains(std::string_view token) const { return find(token) != nullptr; }

    const EmbeddingVector* find(std::string_view token) const;
    // Throws UnknownToken.
    const EmbeddingVector& at(std::string_view token) const;
    // Euclidean norm of a stored vector (precomputed at construction).
    double norm(std::size_t index) const { return norms_[index]; }

    // Vectors in insertion (file) order.
    std::span<const EmbeddingVector> vectors() const noexcept { return vectors_; }

private:
    std::vector<EmbeddingVector> vectors_;
    std::vector<double> norms_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t dimension_ = 0;
};

/// Reads the word2vec text format: a "<count> <dim>" header, then one
/// "<token> <d floats>" line per vector. Errors are ParseError carrying the line number.
EmbeddingStore load_embeddings(std::istream& in);
EmbeddingStore load_embeddings_file(const std::string& path);

/// Writes the word2vec text format. Floats use the shortest representation that
/// round-trips, so load_embeddings(write_embeddings(s)) reproduces `s` bit-exactly.
void write_embeddings(std::ostream& out, const EmbeddingStore& store);

/// (a.b) / (|a||b|). Throws InvalidArgument on dimension mismatch or a zero-norm input.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

struct Neighbor {
    std::string token;
    double similarity;

    bool operator==(const Neighbor&) const = default;
};

/// The k stored tokens most similar to `token` (the query itself excluded), by
/// descending cosine similarity with ties broken by ascending token. When k exceeds
/// the number of other tokens every neighbor is returned.
std::vector<Neighbor> top_k_context(const EmbeddingStore& store, std::string_view token, std::size_t k);

// Co-occurrence statistics over a tokenized corpus. Pair counts are stored for
// both orientations, so pair_count(a, b) == pair_count(b, a).
class CooccurrenceModel {
public:
    CooccurrenceModel() = default;

    std::size_t window() const noexcept { return window_; }
    bool empty() const noexcept { return vocabulary_.empty(); }
    bool contains(std::string_view token) const { return id_of(token) >= 0; }

    std::uint64_t token_count(std::string_view token) const;
    std::uint64_t pair_count(std::string_view a, std::string_view b) const;
    // Total token occurrences in the corpus.
    std::uint64_t total() const noexcept { return total_; }
    // Sum over all ordered pair counts.
    std::uint64_t total_pairs() const noexcept { return total_pairs_; }

    // Vocabulary in ascending lexicographic order.
    const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
    // Non-zero ordered pair counts as (token index, token index, count), sorted.
    std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> pairs() const;

private:
    friend CooccurrenceModel build_cooccurrence(const std::vector<std::vector<std::string>>&, std::size_t);

    long id_of(std::string_view token) const;

    std::size_t window_ = 1;
    std::vector<std::string> vocabulary_;
    std::unordered_map<std::string, std::size_t> ids_;
    std::vector<std::uint64_t> token_counts_;
    std::unordered_map<std::uint64_t, std::uint64_t> pair_counts_;
    std::uint64_t total_ = 0;
    std::uint64_t total_pairs_ = 0;
};

/// Counts each ordered pair (t_i, t_j), i != j, with |i - j| <= window inside one
/// sequence. Throws InvalidArgument when window == 0. An empty corpus gives an empty model.
CooccurrenceModel build_cooccurrence(const std::vector<std::vector<std::string>>& corpus, std::size_t window);

/// Tokenizes one document per line and builds the model.
CooccurrenceModel build_cooccurrence_from_text(std::istream& in, std::size_t window);

enum class WeightOrientation {
    GivenFirst,   // pair_count(a, b) / token_count(a): probability of b in the context of a
    GivenSecond,  // pair_count(a, b) / token_count(b)
};

/// Co-occurrence weight of b relative to a, clamped to [0, 1]. Throws UnknownToken
/// naming the first token missing from the model.
double attribute_weight(const CooccurrenceModel& model, std::string_view a, std::string_view b,
                        WeightOrientation orientation = WeightOrientation::GivenFirst);

struct AttributeEmbedding {
    EmbeddingVector vector;            // token field holds the attribute text
    std::vector<std::string> tokens;   // in-vocabulary tokens that were averaged
    std::size_t skipped_tokens = 0;    // out-of-vocabulary tokens
};

/// Component-wise mean of the in-vocabulary token vectors of `attribute`.
/// Throws UnknownToken (listing the tokens) when none is in the vocabulary.
AttributeEmbedding embed_attribute(const EmbeddingStore& store, std::string_view attribute);

inline constexpr std::size_t kMaxDerivedVocabulary = 10000;

/// Dense PPMI vectors: component j of token t is max(0, log(c(t,j) * C / (c(t) * c(j))))
/// where c(t,j) are pair counts, c(t) row sums of the pair matrix and C their total.
/// The vocabulary is the `max_vocabulary` most frequent tokens (ties by token order);
/// tokens whose whole row is zero carry no context and are left out of the store.
EmbeddingStore derive_embeddings_from_cooccurrence(const CooccurrenceModel& model,
                                                   std::size_t max_vocabulary = kMaxDerivedVocabulary);

}  // namespace ztac
