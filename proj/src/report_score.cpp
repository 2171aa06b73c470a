#include <algorithm>
#include <cmath>
#include <map>

#include "ztac/error.hpp"
#include "ztac/text.hpp"
#include "ztac/trust.hpp"

namespace ztac {

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(std::span<const std::string> tokens, std::size_t order) {
    NgramCounts counts;
    if (tokens.size() < order) return counts;
    for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
        ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                          tokens.begin() + static_cast<std::ptrdiff_t>(i + order))];
    }
    return counts;
}

}  // namespace

double modified_precision(std::span<const std::string> candidate_tokens,
                          std::span<const std::vector<std::string>> reference_tokens, std::size_t order) {
    if (order == 0) throw InvalidArgument("n-gram order must be at least 1");
    const auto candidate = count_ngrams(candidate_tokens, order);
    if (candidate.empty()) return 0.0;

    // Clip each candidate n-gram at its largest count in any single reference.
    std::map<std::vector<std::string>, std::size_t> max_ref;
    for (const auto& ref : reference_tokens) {
        for (const auto& [gram, count] : count_ngrams(ref, order)) {
            auto& slot = max_ref[gram];
            slot = std::max(slot, count);
        }
    }
    std::size_t matched = 0;
    std::size_t total = 0;
    for (const auto& [gram, count] : candidate) {
        total += count;
        auto it = max_ref.find(gram);
        if (it != max_ref.end()) matched += std::min(count, it->second);
    }
    return static_cast<double>(matched) / static_cast<double>(total);
}

ReportScore score_report(std::string_view candidate, std::span<const std::string> references, std::size_t n) {
    if (n == 0) throw InvalidArgument("n-gram order must be at least 1");
    ReportScore out;
    const auto cand = tokenize(candidate);
    out.candidate_length = cand.size();

    std::vector<std::vector<std::string>> refs;
    for (const auto& r : references) refs.push_back(tokenize(r));
    refs.erase(std::remove_if(refs.begin(), refs.end(), [](const auto& r) { return r.empty(); }), refs.end());

    if (refs.empty()) {
        out.warnings.emplace_back("no patient history; syntactic score is zero");
        return out;
    }
    if (cand.empty()) {
        out.warnings.emplace_back("empty candidate report");
        return out;
    }

    // Closest reference length; the shorter one wins a tie.
    out.reference_length = refs.front().size();
    for (const auto& r : refs) {
        const auto d = [&](std::size_t len) { return len > cand.size() ? len - cand.size() : cand.size() - len; };
        if (d(r.size()) < d(out.reference_length) ||
            (d(r.size()) == d(out.reference_length) && r.size() < out.reference_length)) {
            out.reference_length = r.size();
        }
    }
    out.brevity = std::min(1.0, std::exp(1.0 - static_cast<double>(out.reference_length) /
                                                   static_cast<double>(cand.size())));

    if (cand.size() < n) {
        out.warnings.push_back("candidate has " + std::to_string(cand.size()) + " tokens, fewer than n-gram order " +
                               std::to_string(n));
        return out;
    }

    double log_sum = 0.0;
    bool any_zero = false;
    for (std::size_t order = 1; order <= n; ++order) {
        const double p = modified_precision(cand, refs, order);
        out.precisions.push_back(p);
        if (p == 0.0) {
            any_zero = true;
        } else {
            log_sum += std::log(p);
        }
    }
    out.score = any_zero ? 0.0 : std::min(1.0, out.brevity * std::exp(log_sum / static_cast<double>(n)));
    return out;
}

double bt_b_score(std::string_view candidate, std::span<const std::string> references, std::size_t n) {
    return score_report(candidate, references, n).score;
}

}  // namespace ztac
