#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ztac/embedding.hpp"

namespace ztac {

// ---- critical trust -------------------------------------------------------

// Boolean outcomes of the four security microservices.
struct MicroserviceChecks {
    bool authentication = false;
    bool authorization = false;
    bool encryption = false;
    bool logging = false;
};

// Importance factors of the four checks; they must sum to 1 so CT lies in [0, 1].
struct ScoringFactors {
    double authentication = 0.3;
    double authorization = 0.4;
    double encryption = 0.2;
    double logging = 0.1;

    // Throws InvalidArgument when a factor is negative/non-finite or the sum is not 1 (1e-9).
    void validate() const;
};

/// Weighted sum of the check outcomes, accumulated with compensated summation so
/// factors that sum to 1 give exactly 1 when every check passes.
double critical_trust(const MicroserviceChecks& checks, const ScoringFactors& factors);

enum class CtStatus { Allow, Verify, Deny };

/// Deny when ct == 0, Allow when ct >= threshold, otherwise Verify.
CtStatus ct_status(double ct, double ct_threshold);

std::string_view to_string(CtStatus status);

// ---- attributes and configuration -----------------------------------------

struct Attribute {
    std::string name;
    std::string value;

    bool operator==(const Attribute&) const = default;
};

using AttributeList = std::vector<Attribute>;

// User (x), device (y), and output data (z) attribute sets of one request.
struct AttributeTriple {
    AttributeList user;
    AttributeList device;
    AttributeList data;

    bool operator==(const AttributeTriple&) const = default;
};

enum class BtAMode {
    PaperLiteral,  // sum of the softmax outputs (always 1)
    Normalized,    // mean over components of raw score / weight sum
};

struct ScoringConfig {
    double cosine_threshold = 0.7;  // similar iff cosine >= threshold
    std::size_t ngram_order = 4;
    WeightOrientation weight_orientation = WeightOrientation::GivenFirst;
    BtAMode bt_a_mode = BtAMode::Normalized;

    void validate() const;
};

std::string_view to_string(BtAMode mode);
std::string_view to_string(WeightOrientation orientation);
BtAMode parse_bt_a_mode(std::string_view text);
WeightOrientation parse_weight_orientation(std::string_view text);

// ---- semantic bond trust ---------------------------------------------------

struct AlignedPair {
    std::size_t left_index;
    std::size_t right_index;
    std::string left_value;
    std::string right_value;
    double cosine;
};

struct Alignment {
    std::vector<AlignedPair> pairs;            // in selection order (descending cosine)
    std::vector<std::size_t> unmatched_left;   // embeddable but left over
    std::vector<std::size_t> unmatched_right;
    std::size_t skipped = 0;                   // attributes with no in-vocabulary token
};

/// Greedy matching of attribute values: all left x right cosines are ranked
/// descending (ties by left index, then right index) and a pair is taken when
/// neither side is used yet. Throws InvalidArgument when either list is empty.
Alignment align_attributes(const EmbeddingStore& store, const AttributeList& left, const AttributeList& right);

/// 1 iff cosine >= threshold.
int similarity_logical(double cosine, double threshold);

/// Co-occurrence weight of one aligned pair: the mean attribute_weight over every
/// (left token, right token) combination known to the model, where a token paired
/// with itself weighs 1. Pairs with no token known to the model weigh 1.
double pair_weight(const CooccurrenceModel& model, std::string_view left_value, std::string_view right_value,
                   WeightOrientation orientation);

struct ComponentScore {
    double score = 0.0;       // sum of w_i * Sim_i
    double weight_sum = 0.0;  // sum of w_i
};

/// Sum over pairs of pair_weight * similarity_logical. Throws InvalidArgument on no pairs.
ComponentScore bond_trust_component(std::span<const AlignedPair> pairs, const CooccurrenceModel& model,
                                    const ScoringConfig& config);

std::array<double, 3> softmax_normalize(const std::array<double, 3>& components);

/// Paper-literal: BTN_1 + BTN_2 + BTN_3. Normalized: (1/3) sum raw_i / weight_sum_i,
/// clamped to [0, 1]; throws InvalidArgument when a weight sum is zero.
double bt_a_aggregate(const std::array<double, 3>& btn, const std::array<double, 3>& raw,
                      const std::array<double, 3>& weight_sums, BtAMode mode);

// ---- syntactic bond trust ---------------------------------------------------

struct ReportScore {
    double score = 0.0;
    double brevity = 0.0;
    std::vector<double> precisions;  // modified precision for orders 1..n
    std::size_t candidate_length = 0;
    std::size_t reference_length = 0;
    std::vector<std::string> warnings;
};

/// BLEU-style score of a candidate report against reference reports: brevity penalty
/// min(1, exp(1 - r/c)) with r the reference length closest to c (shorter wins ties),
/// times the geometric mean of clipped n-gram precisions for orders 1..n. No smoothing:
/// any zero precision gives 0. No references gives 0; an empty candidate or one
/// shorter than n tokens gives 0 with a warning.
ReportScore score_report(std::string_view candidate, std::span<const std::string> references, std::size_t n);

double bt_b_score(std::string_view candidate, std::span<const std::string> references, std::size_t n);

/// Clipped (modified) precision of order `order` alone; 0 when the candidate has no n-gram of that order.
double modified_precision(std::span<const std::string> candidate_tokens,
                          std::span<const std::vector<std::string>> reference_tokens, std::size_t order);

/// (bt_a + bt_b) / 2. Throws InvalidArgument when an input is outside [0, 1].
double bond_trust(double bt_a, double bt_b);

// ---- whole-request scoring ------------------------------------------------

struct BondTrustBreakdown {
    std::array<double, 3> components{};   // BT_A(1..3): x-y, x-z, y-z
    std::array<double, 3> weight_sums{};
    std::array<std::size_t, 3> pair_counts{};
    std::array<double, 3> normalized{};   // softmax of components
    double bt_a = 0.0;
    double bt_b = 0.0;
    double bt = 0.0;
    BtAMode mode = BtAMode::Normalized;

    // Component score divided by its weight sum, in [0, 1]; 0 when the weight sum is 0.
    double component_ratio(std::size_t i) const;
};

struct TrustScores {
    double ct = 0.0;
    BondTrustBreakdown bond;
    std::vector<std::string> warnings;
};

struct ScoringModels {
    const EmbeddingStore& store;
    const CooccurrenceModel& cooccurrence;
};

/// Full scoring pipeline: align (x,y), (x,z), (y,z) -> components -> softmax ->
/// bt_a -> bt_b against the history -> bt, plus critical trust. Sub-operation
/// failures are rethrown as StageError naming the stage.
TrustScores score_request(const AttributeTriple& triple, std::span<const std::string> history,
                          std::string_view candidate_report, const MicroserviceChecks& checks,
                          const ScoringFactors& factors, const ScoringModels& models, const ScoringConfig& config);

}  // namespace ztac
