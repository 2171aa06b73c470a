#include "ztac/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "ztac/error.hpp"
#include "ztac/text.hpp"

namespace ztac {

SampleLabel classify(double score, double threshold) {
    return score >= threshold ? SampleLabel::Legit : SampleLabel::Misuse;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
}

ConfusionMatrix confusion(std::span<const SampleLabel> predictions, std::span<const SampleLabel> labels) {
    if (predictions.size() != labels.size()) {
        throw InvalidArgument("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                              std::to_string(labels.size()) + " labels");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool predicted = predictions[i] == SampleLabel::Legit;
        const bool actual = labels[i] == SampleLabel::Legit;
        if (predicted && actual) ++cm.tp;
        else if (predicted) ++cm.fp;
        else if (actual) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

ClassMetrics metrics(const ConfusionMatrix& cm) {
    const auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    ClassMetrics m;
    m.precision = ratio(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fp));
    m.recall = ratio(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fn));
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    return m;
}

std::map<std::string, SpecialtyResult> specialty_breakdown(std::span<const LabeledSample> samples,
                                                           std::span<const SampleLabel> predictions) {
    if (samples.size() != predictions.size()) throw InvalidArgument("specialty_breakdown: length mismatch");
    std::map<std::string, SpecialtyResult> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const SampleLabel p[1]{predictions[i]};
        const SampleLabel l[1]{samples[i].label};
        out[samples[i].specialty].confusion += confusion(p, l);
    }
    for (auto& [name, r] : out) r.metrics = metrics(r.confusion);
    return out;
}

std::string_view to_string(Scorer s) {
    switch (s) {
        case Scorer::Gram1: return "1-gram";
        case Scorer::Gram2: return "2-gram";
        case Scorer::Gram3: return "3-gram";
        case Scorer::Gram4: return "4-gram";
        case Scorer::Bleu: return "BLEU";
        case Scorer::Proposed: return "proposed";
    }
    return "unknown";
}

SampleScores score_sample(const LabeledSample& sample, const ScoringModels& models, const ScoringConfig& config) {
    SampleScores out;
    const auto candidate = tokenize(sample.candidate_report);
    std::vector<std::vector<std::string>> refs;
    refs.reserve(sample.history.size());
    for (const auto& h : sample.history) refs.push_back(tokenize(h));
    for (std::size_t order = 1; order <= 4; ++order) {
        out.values[order - 1] = refs.empty() ? 0.0 : modified_precision(candidate, refs, order);
    }
    out.values[static_cast<std::size_t>(Scorer::Bleu)] =
        bt_b_score(sample.candidate_report, sample.history, config.ngram_order);
    try {
        const auto scores = score_request(sample.triple, sample.history, sample.candidate_report,
                                          {true, true, true, true}, ScoringFactors{}, models, config);
        out.values[static_cast<std::size_t>(Scorer::Proposed)] = scores.bond.bt;
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

std::vector<ConfidenceRow> confidence_comparison(std::span<const LabeledSample> samples,
                                                 std::span<const SampleScores> scores) {
    if (samples.empty()) throw InvalidArgument("confidence_comparison needs at least one sample");
    if (samples.size() != scores.size()) throw InvalidArgument("confidence_comparison: length mismatch");
    std::vector<ConfidenceRow> rows;
    for (auto scorer : kAllScorers) {
        ConfidenceRow row{scorer};
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (samples[i].label == SampleLabel::Legit) {
                row.legit_mean += scores[i][scorer];
                ++row.legit_count;
            } else {
                row.misuse_mean += scores[i][scorer];
                ++row.misuse_count;
            }
        }
        if (row.legit_count) row.legit_mean /= static_cast<double>(row.legit_count);
        if (row.misuse_count) row.misuse_mean /= static_cast<double>(row.misuse_count);
        rows.push_back(row);
    }
    return rows;
}

EvalReport evaluate(std::span<const LabeledSample> samples, const ScoringModels& models,
                    const ScoringConfig& config, double threshold, unsigned threads) {
    config.validate();
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidArgument("threshold must lie in [0, 1]");
    std::vector<SampleScores> scores(samples.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(samples.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < samples.size(); ++i) scores[i] = score_sample(samples[i], models, config);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < samples.size(); i += workers) {
                    scores[i] = score_sample(samples[i], models, config);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    EvalReport r;
    r.threshold = threshold;
    r.samples = samples.size();
    std::vector<SampleLabel> labels, proposed, bleu;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        labels.push_back(samples[i].label);
        proposed.push_back(classify(scores[i][Scorer::Proposed], threshold));
        bleu.push_back(classify(scores[i][Scorer::Bleu], threshold));
        if (!scores[i].error.empty()) ++r.scoring_errors;
    }
    r.proposed_confusion = confusion(proposed, labels);
    r.proposed = metrics(r.proposed_confusion);
    r.bleu_confusion = confusion(bleu, labels);
    r.bleu = metrics(r.bleu_confusion);
    r.by_specialty = specialty_breakdown(samples, proposed);
    if (!samples.empty()) r.confidence = confidence_comparison(samples, scores);
    return r;
}

namespace {

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string metrics_csv_row(std::string_view scope, std::string_view name, const ConfusionMatrix& cm,
                            const ClassMetrics& m) {
    return std::string(scope) + "," + std::string(name) + "," + std::to_string(cm.tp) + "," +
           std::to_string(cm.fp) + "," + std::to_string(cm.fn) + "," + std::to_string(cm.tn) + "," +
           fixed(m.precision) + "," + fixed(m.recall) + "," + fixed(m.f1) + "\n";
}

nlohmann::json to_json(const ConfusionMatrix& cm, const ClassMetrics& m) {
    return {{"tp", cm.tp},           {"fp", cm.fp},         {"fn", cm.fn}, {"tn", cm.tn},
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

}  // namespace

std::string report_csv(const EvalReport& r) {
    std::string out = "scope,name,tp,fp,fn,tn,precision,recall,f1\n";
    out += metrics_csv_row("overall", "proposed", r.proposed_confusion, r.proposed);
    out += metrics_csv_row("overall", "BLEU", r.bleu_confusion, r.bleu);
    for (const auto& [name, s] : r.by_specialty) out += metrics_csv_row("specialty", name, s.confusion, s.metrics);
    out += "\nscorer,legit_mean,misuse_mean,legit_count,misuse_count\n";
    for (const auto& c : r.confidence) {
        out += std::string(to_string(c.scorer)) + "," + fixed(c.legit_mean) + "," + fixed(c.misuse_mean) + "," +
               std::to_string(c.legit_count) + "," + std::to_string(c.misuse_count) + "\n";
    }
    return out;
}

std::string report_table(const EvalReport& r) {
    char line[256];
    std::string out;
    std::snprintf(line, sizeof line, "samples %zu, threshold %.2f, scoring errors %zu\n\n", r.samples, r.threshold,
                  r.scoring_errors);
    out += line;
    std::snprintf(line, sizeof line, "%-14s %6s %6s %6s %6s %9s %9s %9s\n", "class", "tp", "fp", "fn", "tn",
                  "precision", "recall", "f1");
    out += line;
    const auto row = [&](std::string_view name, const ConfusionMatrix& cm, const ClassMetrics& m) {
        std::snprintf(line, sizeof line, "%-14.*s %6zu %6zu %6zu %6zu %9.4f %9.4f %9.4f\n",
                      static_cast<int>(name.size()), name.data(), cm.tp, cm.fp, cm.fn, cm.tn, m.precision, m.recall,
                      m.f1);
        out += line;
    };
    for (const auto& [name, s] : r.by_specialty) row(name, s.confusion, s.metrics);
    row("overall", r.proposed_confusion, r.proposed);
    row("BLEU only", r.bleu_confusion, r.bleu);
    std::snprintf(line, sizeof line, "\n%-14s %11s %11s\n", "scorer", "legit mean", "misuse mean");
    out += line;
    for (const auto& c : r.confidence) {
        const auto name = to_string(c.scorer);
        std::snprintf(line, sizeof line, "%-14.*s %11.4f %11.4f\n", static_cast<int>(name.size()), name.data(),
                      c.legit_mean, c.misuse_mean);
        out += line;
    }
    return out;
}

std::string report_json(const EvalReport& r) {
    nlohmann::json j;
    j["samples"] = r.samples;
    j["threshold"] = r.threshold;
    j["scoring_errors"] = r.scoring_errors;
    j["proposed"] = to_json(r.proposed_confusion, r.proposed);
    j["bleu"] = to_json(r.bleu_confusion, r.bleu);
    auto& spec = j["by_specialty"] = nlohmann::json::object();
    for (const auto& [name, s] : r.by_specialty) spec[name] = to_json(s.confusion, s.metrics);
    auto& conf = j["confidence"] = nlohmann::json::array();
    for (const auto& c : r.confidence) {
        conf.push_back({{"scorer", to_string(c.scorer)},
                        {"legit_mean", c.legit_mean},
                        {"misuse_mean", c.misuse_mean},
                        {"legit_count", c.legit_count},
                        {"misuse_count", c.misuse_count}});
    }
    return j.dump(2);
}

}  // namespace ztac
