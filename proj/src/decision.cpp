#include "ztac/decision.hpp"

#include "ztac/error.hpp"

namespace ztac {

std::string_view to_string(AccessStatus s) {
    switch (s) {
        case AccessStatus::Accept: return "Accept";
        case AccessStatus::Verify: return "Verify";
        case AccessStatus::Deny: return "Deny";
    }
    return "Unknown";
}

void DecisionThresholds::validate() const {
    if (!(ct > 0.0 && ct <= 1.0)) throw InvalidArgument("ct threshold must lie in (0, 1]");
    if (!(bt > 0.0 && bt <= 1.0)) throw InvalidArgument("bt threshold must lie in (0, 1]");
}

AccessStatus decide(double ct, double bt, const DecisionThresholds& thresholds) {
    if (ct == 0.0 || bt == 0.0) return AccessStatus::Deny;
    if (ct >= thresholds.ct && bt >= thresholds.bt) return AccessStatus::Accept;
    return AccessStatus::Verify;
}

void AccessRequest::validate() const {
    if (requested_level < 0 || requested_level > kMaxAccessLevel) {
        throw InvalidArgument("requested_level must lie in 0-4, got " + std::to_string(requested_level));
    }
    if (requested_ops > kAllOperations) throw InvalidArgument("requested_ops must lie in 0-F");
}

void EngineConfig::validate() const {
    scoring.validate();
    factors.validate();
    thresholds.validate();
}

ComplianceReport compliance_gate(const AccessRequest& request, const IdentifierCatalog& catalog) {
    AttributeList all;
    for (const auto* list : {&request.triple.user, &request.triple.device, &request.triple.data}) {
        all.insert(all.end(), list->begin(), list->end());
    }
    return evaluate_compliance(all, request.candidate_report, catalog);
}

FinalDecision evaluate_request(const AccessRequest& request, const ResourceGrant& resources,
                               const ScoringModels& models, const EngineConfig& config,
                               const IdentifierCatalog& catalog) {
    request.validate();
    config.validate();

    FinalDecision out;
    out.compliance = compliance_gate(request, catalog);
    const double ct = critical_trust(request.checks, config.factors);
    out.scores.ct = ct;

    if (out.compliance.verdict == ComplianceVerdict::Block) {
        out.status = AccessStatus::Deny;
        out.reasons = out.compliance.reasons;
    } else {
        try {
            out.scores = score_request(request.triple, request.patient_history, request.candidate_report,
                                       request.checks, config.factors, models, config.scoring);
            out.scored = true;
            out.status = decide(out.scores.ct, out.scores.bond.bt, config.thresholds);
        } catch (const Error& e) {
            out.reasons.emplace_back(e.what());
            out.status = ct == 0.0 ? AccessStatus::Deny : AccessStatus::Verify;
        }
        if (ct == 0.0) out.reasons.emplace_back("critical trust is zero: every microservice check failed");
    }

    // Each component carries the mean of the two pairwise ratios it takes part in.
    const auto& bond = out.scores.bond;
    const std::array<double, 3> component_score{
        out.scored ? (bond.component_ratio(0) + bond.component_ratio(1)) / 2.0 : 0.0,  // user: x-y, x-z
        out.scored ? (bond.component_ratio(0) + bond.component_ratio(2)) / 2.0 : 0.0,  // device: x-y, y-z
        out.scored ? (bond.component_ratio(1) + bond.component_ratio(2)) / 2.0 : 0.0,  // output: x-z, y-z
    };
    for (std::size_t i = 0; i < 3; ++i) {
        out.components[i] = encode_component({request.group_ids[i], static_cast<std::uint8_t>(request.requested_level),
                                              request.requested_ops, score_bucket(component_score[i]),
                                              out.compliance.consent_present});
    }
    out.context = build_context_array(out.components[0], out.components[1], out.components[2], ct);

    FinalFieldValues values;
    switch (out.status) {
        case AccessStatus::Accept:
            values = {request.requested_level, resources.compute_id, resources.storage_id, resources.expiry,
                      resources.constraints.pack(), request.requested_ops};
            break;
        case AccessStatus::Verify:
            values = {request.requested_level, 0, 0, resources.expiry, resources.constraints.pack(), 0};
            break;
        case AccessStatus::Deny:
            values = {};
            break;
    }
    out.fields = encode_final(values);
    return out;
}

}  // namespace ztac
