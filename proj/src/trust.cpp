#include "ztac/trust.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "ztac/error.hpp"
#include "ztac/text.hpp"

namespace ztac {

namespace {

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

void require_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
}

}  // namespace

void ScoringFactors::validate() const {
    CompensatedSum total;
    for (double s : {authentication, authorization, encryption, logging}) {
        if (!std::isfinite(s) || s < 0.0) throw InvalidArgument("scoring factors must be finite and non-negative");
        total.add(s);
    }
    if (std::abs(total.value() - 1.0) > 1e-9) {
        throw InvalidArgument("scoring factors must sum to 1, got " + std::to_string(total.value()));
    }
}

double critical_trust(const MicroserviceChecks& checks, const ScoringFactors& factors) {
    factors.validate();
    CompensatedSum ct;
    if (checks.authentication) ct.add(factors.authentication);
    if (checks.authorization) ct.add(factors.authorization);
    if (checks.encryption) ct.add(factors.encryption);
    if (checks.logging) ct.add(factors.logging);
    return std::clamp(ct.value(), 0.0, 1.0);
}

CtStatus ct_status(double ct, double ct_threshold) {
    if (ct == 0.0) return CtStatus::Deny;
    if (ct >= ct_threshold) return CtStatus::Allow;
    return CtStatus::Verify;
}

std::string_view to_string(CtStatus status) {
    switch (status) {
        case CtStatus::Allow: return "Allow";
        case CtStatus::Verify: return "Verify";
        case CtStatus::Deny: return "Deny";
    }
    return "Unknown";
}

void ScoringConfig::validate() const {
    if (!(cosine_threshold > 0.0 && cosine_threshold <= 1.0)) {
        throw InvalidArgument("cosine_threshold must lie in (0, 1]");
    }
    if (ngram_order == 0) throw InvalidArgument("ngram_order must be at least 1");
}

std::string_view to_string(BtAMode mode) {
    return mode == BtAMode::PaperLiteral ? "paper-literal" : "normalized";
}

std::string_view to_string(WeightOrientation orientation) {
    return orientation == WeightOrientation::GivenFirst ? "given-first" : "given-second";
}

BtAMode parse_bt_a_mode(std::string_view text) {
    if (text == "paper-literal") return BtAMode::PaperLiteral;
    if (text == "normalized") return BtAMode::Normalized;
    throw InvalidArgument("unknown bt_a_mode '" + std::string(text) + "'");
}

WeightOrientation parse_weight_orientation(std::string_view text) {
    if (text == "given-first") return WeightOrientation::GivenFirst;
    if (text == "given-second") return WeightOrientation::GivenSecond;
    throw InvalidArgument("unknown weight_orientation '" + std::string(text) + "'");
}

Alignment align_attributes(const EmbeddingStore& store, const AttributeList& left, const AttributeList& right) {
    if (left.empty() || right.empty()) throw InvalidArgument("attribute alignment needs two non-empty lists");

    Alignment out;
    const auto embed_all = [&](const AttributeList& list) {
        std::vector<std::optional<EmbeddingVector>> vectors;
        vectors.reserve(list.size());
        for (const auto& attr : list) {
            try {
                vectors.emplace_back(embed_attribute(store, attr.value).vector);
            } catch (const UnknownToken&) {
                vectors.emplace_back(std::nullopt);
                ++out.skipped;
            }
        }
        return vectors;
    };
    const auto lv = embed_all(left);
    const auto rv = embed_all(right);

    struct Candidate {
        std::size_t i, j;
        double cosine;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < lv.size(); ++i) {
        if (!lv[i]) continue;
        for (std::size_t j = 0; j < rv.size(); ++j) {
            if (!rv[j]) continue;
            candidates.push_back({i, j, cosine_similarity(*lv[i], *rv[j])});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.cosine > b.cosine; });

    std::vector<bool> used_left(left.size(), false);
    std::vector<bool> used_right(right.size(), false);
    for (const auto& c : candidates) {
        if (used_left[c.i] || used_right[c.j]) continue;
        used_left[c.i] = used_right[c.j] = true;
        out.pairs.push_back({c.i, c.j, left[c.i].value, right[c.j].value, c.cosine});
    }
    for (std::size_t i = 0; i < left.size(); ++i) {
        if (lv[i] && !used_left[i]) out.unmatched_left.push_back(i);
    }
    for (std::size_t j = 0; j < right.size(); ++j) {
        if (rv[j] && !used_right[j]) out.unmatched_right.push_back(j);
    }
    return out;
}

int similarity_logical(double cosine, double threshold) { return cosine >= threshold ? 1 : 0; }

double pair_weight(const CooccurrenceModel& model, std::string_view left_value, std::string_view right_value,
                   WeightOrientation orientation) {
    const auto lt = tokenize(left_value);
    const auto rt = tokenize(right_value);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& a : lt) {
        for (const auto& b : rt) {
            if (a == b) {
                sum += 1.0;
                ++n;
            } else if (model.contains(a) && model.contains(b)) {
                sum += attribute_weight(model, a, b, orientation);
                ++n;
            }
        }
    }
    return n == 0 ? 1.0 : sum / static_cast<double>(n);
}

ComponentScore bond_trust_component(std::span<const AlignedPair> pairs, const CooccurrenceModel& model,
                                    const ScoringConfig& config) {
    if (pairs.empty()) throw InvalidArgument("bond trust component needs at least one aligned pair");
    ComponentScore out;
    for (const auto& p : pairs) {
        const double w = pair_weight(model, p.left_value, p.right_value, config.weight_orientation);
        out.weight_sum += w;
        out.score += w * similarity_logical(p.cosine, config.cosine_threshold);
    }
    return out;
}

std::array<double, 3> softmax_normalize(const std::array<double, 3>& components) {
    const double peak = std::max({components[0], components[1], components[2]});
    std::array<double, 3> out{};
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = std::exp(components[i] - peak);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

double bt_a_aggregate(const std::array<double, 3>& btn, const std::array<double, 3>& raw,
                      const std::array<double, 3>& weight_sums, BtAMode mode) {
    if (mode == BtAMode::PaperLiteral) {
        // Softmax outputs sum to 1 by construction; the literal aggregate is that sum.
        (void)btn;
        return 1.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(weight_sums[i] > 0.0)) {
            throw InvalidArgument("bond trust component " + std::to_string(i + 1) +
                                  " has zero weight sum; request needs verification");
        }
        total += raw[i] / weight_sums[i];
    }
    return std::clamp(total / 3.0, 0.0, 1.0);
}

double bond_trust(double bt_a, double bt_b) {
    require_unit(bt_a, "bt_a");
    require_unit(bt_b, "bt_b");
    return (bt_a + bt_b) / 2.0;
}

double BondTrustBreakdown::component_ratio(std::size_t i) const {
    if (!(weight_sums[i] > 0.0)) return 0.0;
    return std::clamp(components[i] / weight_sums[i], 0.0, 1.0);
}

TrustScores score_request(const AttributeTriple& triple, std::span<const std::string> history,
                          std::string_view candidate_report, const MicroserviceChecks& checks,
                          const ScoringFactors& factors, const ScoringModels& models, const ScoringConfig& config) {
    TrustScores out;
    auto stage = [](const char* name, auto&& fn) -> decltype(fn()) {
        try {
            return fn();
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
    };

    stage("config", [&] {
        config.validate();
        return 0;
    });
    out.ct = stage("critical_trust", [&] { return critical_trust(checks, factors); });

    auto& bond = out.bond;
    bond.mode = config.bt_a_mode;
    const std::array<std::pair<const AttributeList*, const AttributeList*>, 3> sides{{
        {&triple.user, &triple.device},
        {&triple.user, &triple.data},
        {&triple.device, &triple.data},
    }};
    static constexpr std::array<const char*, 3> kAlignStage{"align(x,y)", "align(x,z)", "align(y,z)"};
    static constexpr std::array<const char*, 3> kComponentStage{"component(x,y)", "component(x,z)", "component(y,z)"};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto alignment =
            stage(kAlignStage[i], [&] { return align_attributes(models.store, *sides[i].first, *sides[i].second); });
        if (alignment.skipped > 0) {
            out.warnings.push_back(std::string(kAlignStage[i]) + ": skipped " + std::to_string(alignment.skipped) +
                                   " attribute(s) without in-vocabulary tokens");
        }
        const auto component = stage(kComponentStage[i], [&] {
            return bond_trust_component(alignment.pairs, models.cooccurrence, config);
        });
        bond.components[i] = component.score;
        bond.weight_sums[i] = component.weight_sum;
        bond.pair_counts[i] = alignment.pairs.size();
    }
    bond.normalized = softmax_normalize(bond.components);
    bond.bt_a = stage("bt_a", [&] {
        return bt_a_aggregate(bond.normalized, bond.components, bond.weight_sums, config.bt_a_mode);
    });

    const auto report = stage("bt_b", [&] { return score_report(candidate_report, history, config.ngram_order); });
    bond.bt_b = report.score;
    for (const auto& w : report.warnings) out.warnings.push_back("bt_b: " + w);
    bond.bt = stage("bond_trust", [&] { return bond_trust(bond.bt_a, bond.bt_b); });
    return out;
}

}  // namespace ztac
