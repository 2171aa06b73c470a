#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ztac/compliance.hpp"
#include "ztac/encoding.hpp"
#include "ztac/trust.hpp"

namespace ztac {

enum class AccessStatus { Deny, Verify, Accept };  // ordered by increasing trust

std::string_view to_string(AccessStatus s);

struct DecisionThresholds {
    double ct = 0.99;
    double bt = 0.7;

    void validate() const;
};

/// Deny when ct or bt is 0; Accept when both reach their thresholds; otherwise Verify.
AccessStatus decide(double ct, double bt, const DecisionThresholds& thresholds);

struct AccessRequest {
    AttributeTriple triple;
    OperationMask requested_ops = 0;
    std::string candidate_report;
    std::vector<std::string> patient_history;
    MicroserviceChecks checks;
    std::array<std::uint8_t, 3> group_ids{};  // user, device, output
    int requested_level = 0;                  // 0-4

    // Throws InvalidArgument on out-of-range fields.
    void validate() const;
};

// Resources and constraints granted on Accept.
struct ResourceGrant {
    std::uint16_t compute_id = 0;
    std::uint16_t storage_id = 0;
    std::int64_t expiry = 0;  // UTC epoch seconds
    AccessConstraints constraints;
};

struct EngineConfig {
    ScoringConfig scoring;
    ScoringFactors factors;
    DecisionThresholds thresholds;

    void validate() const;
};

struct FinalDecision {
    AccessStatus status = AccessStatus::Deny;
    FinalFields fields;
    std::array<std::string, 3> components;  // user, device, output encodings
    std::string context;                    // 32-digit context array
    ComplianceReport compliance;
    bool scored = false;                    // false when scoring was skipped or failed
    TrustScores scores;
    std::vector<std::string> reasons;
};

/// Stage-one regulatory check over every attribute of the request and its candidate report.
ComplianceReport compliance_gate(const AccessRequest& request,
                                 const IdentifierCatalog& catalog = IdentifierCatalog::builtin());

/// Compliance gate, critical trust, bond trust scoring, decision, and encodings.
/// A compliance Block is a Deny that skips scoring. Scoring failures degrade to
/// Verify (Deny when CT is 0) with the failure recorded in `reasons`.
FinalDecision evaluate_request(const AccessRequest& request, const ResourceGrant& resources,
                               const ScoringModels& models, const EngineConfig& config,
                               const IdentifierCatalog& catalog = IdentifierCatalog::builtin());

}  // namespace ztac
