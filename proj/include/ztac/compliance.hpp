#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "ztac/trust.hpp"

namespace ztac {

// The 18 HIPAA protected identifier classes, in table row order (row = value + 1).
enum class IdentifierClass : std::uint8_t {
    Name,
    SSN,
    SubStateGeography,
    Phone,
    Fax,
    DeviceId,
    Email,
    WebUrl,
    VehicleId,
    IpAddress,
    MedicalRecordNumber,
    Biometric,
    HealthPlanNumber,
    FacePhoto,
    AccountNumber,
    OtherUniqueId,
    CertificateLicense,
    DateElement,
};

inline constexpr std::size_t kIdentifierClassCount = 18;

std::string_view to_string(IdentifierClass c);
std::optional<IdentifierClass> parse_identifier_class(std::string_view text);
const std::array<IdentifierClass, kIdentifierClassCount>& all_identifier_classes();

// One row of the identifier catalog.
struct IdentifierRule {
    IdentifierClass cls;
    std::string description;
    std::vector<std::string> name_keywords;  // normalized token sequences
    std::string value_pattern;               // ECMAScript regex, empty when name-keyed only
};

// Attribute-name keywords and value patterns for every identifier class. The
// default catalog mirrors data/identifiers.json; deployments may load their own.
class IdentifierCatalog {
public:
    static const IdentifierCatalog& builtin();
    // Throws ParseError on malformed JSON or an unknown class.
    static IdentifierCatalog from_json(std::string_view json_text);
    static IdentifierCatalog from_file(const std::string& path);

    const std::string& version() const noexcept { return version_; }
    const std::vector<IdentifierRule>& rules() const noexcept { return rules_; }
    std::string to_json() const;

    // Class whose keyword matches the normalized name with the most tokens.
    std::optional<IdentifierClass> classify_name(std::string_view attribute_name) const;

    struct ValueMatch {
        IdentifierClass cls;
        std::size_t offset;
        std::string excerpt;
    };
    std::vector<ValueMatch> match_values(std::string_view text) const;

private:
    IdentifierCatalog(std::string version, std::vector<IdentifierRule> rules);

    std::string version_;
    std::vector<IdentifierRule> rules_;
    std::vector<std::pair<IdentifierClass, std::regex>> patterns_;
};

/// Canonical value of class `c` in the exact format the scanner's value patterns and
/// name keywords are defined for; `n` selects the instance. Used by the data generator.
std::string format_identifier(IdentifierClass c, std::uint64_t n);

struct Finding {
    IdentifierClass cls;
    std::string source;   // "attribute:<name>" or "text:<byte offset>"
    std::string excerpt;

    bool operator==(const Finding&) const = default;
};

/// Name-keyed findings for attributes whose name maps to a class; value patterns
/// for the remaining attributes and for `free_text`.
std::vector<Finding> scan_identifiers(const AttributeList& attributes, std::string_view free_text,
                                      const IdentifierCatalog& catalog = IdentifierCatalog::builtin());

/// True iff a "patient consent" or "user consent" attribute carries true/1/yes/granted.
bool check_consent(const AttributeList& attributes);

enum class ComplianceVerdict { Pass, Block };

std::string_view to_string(ComplianceVerdict v);

struct ComplianceReport {
    std::vector<Finding> findings;
    bool consent_present = false;
    ComplianceVerdict verdict = ComplianceVerdict::Pass;
    std::vector<std::string> reasons;
};

/// Block iff identifiers were found and consent is absent.
ComplianceReport evaluate_compliance(const AttributeList& attributes, std::string_view free_text,
                                     const IdentifierCatalog& catalog = IdentifierCatalog::builtin());

}  // namespace ztac
