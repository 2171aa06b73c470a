#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ztac/synth.hpp"
#include "ztac/trust.hpp"

namespace ztac {

/// Legit iff score >= threshold.
SampleLabel classify(double score, double threshold);

// Legit is the positive class.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o);
    bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Throws InvalidArgument when the lists differ in length.
ConfusionMatrix confusion(std::span<const SampleLabel> predictions, std::span<const SampleLabel> labels);

/// Ratios with a zero denominator are 0.
ClassMetrics metrics(const ConfusionMatrix& cm);

/// Per-specialty confusion matrices and metrics, keyed by specialty name.
struct SpecialtyResult {
    ConfusionMatrix confusion;
    ClassMetrics metrics;
};
std::map<std::string, SpecialtyResult> specialty_breakdown(std::span<const LabeledSample> samples,
                                                           std::span<const SampleLabel> predictions);

enum class Scorer { Gram1, Gram2, Gram3, Gram4, Bleu, Proposed };
inline constexpr std::size_t kScorerCount = 6;
inline constexpr std::array<Scorer, kScorerCount> kAllScorers{Scorer::Gram1, Scorer::Gram2, Scorer::Gram3,
                                                              Scorer::Gram4, Scorer::Bleu,  Scorer::Proposed};
std::string_view to_string(Scorer s);

// Every scorer's value for one sample. A scoring failure (for example a component
// with zero weight sum) leaves `proposed` at 0 and records the message in `error`,
// so the sample classifies as misuse, matching the engine's refusal to Accept it.
struct SampleScores {
    std::array<double, kScorerCount> values{};
    std::string error;

    double operator[](Scorer s) const { return values[static_cast<std::size_t>(s)]; }
};

SampleScores score_sample(const LabeledSample& sample, const ScoringModels& models, const ScoringConfig& config);

struct ConfidenceRow {
    Scorer scorer;
    double legit_mean = 0.0;   // decision confidence: mean score over legit samples
    double misuse_mean = 0.0;
    std::size_t legit_count = 0;
    std::size_t misuse_count = 0;
};

/// Mean score per scorer over the legit and the misuse samples. Throws InvalidArgument
/// on empty input or a length mismatch.
std::vector<ConfidenceRow> confidence_comparison(std::span<const LabeledSample> samples,
                                                 std::span<const SampleScores> scores);

struct EvalReport {
    double threshold = 0.7;
    std::size_t samples = 0;
    std::size_t scoring_errors = 0;
    ConfusionMatrix proposed_confusion;
    ClassMetrics proposed;
    ConfusionMatrix bleu_confusion;
    ClassMetrics bleu;
    std::map<std::string, SpecialtyResult> by_specialty;  // proposed scorer
    std::vector<ConfidenceRow> confidence;
};

/// Scores every sample (in parallel when `threads` > 1) and aggregates the report.
EvalReport evaluate(std::span<const LabeledSample> samples, const ScoringModels& models,
                    const ScoringConfig& config, double threshold, unsigned threads = 1);

// Output formats.
std::string report_csv(const EvalReport& report);
std::string report_table(const EvalReport& report);
std::string report_json(const EvalReport& report);

}  // namespace ztac
