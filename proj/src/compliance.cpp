#include "ztac/compliance.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ztac/error.hpp"
#include "ztac/text.hpp"

namespace ztac {

namespace {

constexpr std::array<std::string_view, kIdentifierClassCount> kClassNames{
    "Name",         "SSN",       "SubStateGeography",   "Phone",          "Fax",
    "DeviceId",     "Email",     "WebUrl",              "VehicleId",      "IpAddress",
    "MedicalRecordNumber",       "Biometric",           "HealthPlanNumber",
    "FacePhoto",    "AccountNumber",                    "OtherUniqueId",  "CertificateLicense",
    "DateElement",
};

std::vector<IdentifierRule> builtin_rules() {
    using C = IdentifierClass;
    return {
        {C::Name, "Names", {"name", "patient name", "full name", "first name", "last name", "surname"}, ""},
        {C::SSN, "Social security number", {"ssn", "social security", "social security number"},
         R"(\b\d{3}-\d{2}-\d{4}\b)"},
        {C::SubStateGeography, "Geographic locations smaller than states",
         {"address", "home address", "street", "street address", "city", "zip", "zip code", "postal code", "county"},
         ""},
        {C::Phone, "Telephone numbers", {"phone", "telephone", "phone number", "mobile"},
         R"((\(\d{3}\) ?|\b\d{3}[-.])\d{3}[-.]\d{4}\b)"},
        {C::Fax, "Fax numbers", {"fax", "fax number"}, ""},
        {C::DeviceId, "Device identifiers and serial numbers",
         {"device id", "serial number", "device serial number", "mac address"}, ""},
        {C::Email, "Email address", {"email", "e mail", "email address"},
         R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})"},
        {C::WebUrl, "Web URLs", {"url", "web url", "website"}, R"(\bhttps?://[^\s]+|\bwww\.[A-Za-z0-9.-]+[^\s]*)"},
        {C::VehicleId, "Vehicle identifiers", {"vehicle id", "vehicle identifier", "license plate", "vin"}, ""},
        {C::IpAddress, "IP address", {"ip", "ip address"},
         R"(\b(25[0-5]|2[0-4]\d|1?\d?\d)(\.(25[0-5]|2[0-4]\d|1?\d?\d)){3}\b)"},
        {C::MedicalRecordNumber, "Medical record number", {"mrn", "medical record", "medical record number"}, ""},
        {C::Biometric, "Biometric identifiers", {"biometric", "fingerprint", "retina scan", "voiceprint"}, ""},
        {C::HealthPlanNumber, "Health plan beneficiary numbers",
         {"insurance number", "health plan", "health plan number", "beneficiary number"}, ""},
        {C::FacePhoto, "Full face photographs", {"photo", "face photo", "photograph"}, ""},
        {C::AccountNumber, "Account numbers", {"account", "account number"}, ""},
        {C::OtherUniqueId, "Any other unique identifying numbers", {"id", "identifier", "unique id"}, ""},
        {C::CertificateLicense, "Certificate and license numbers",
         {"certificate", "certificate number", "license", "license number"}, ""},
        {C::DateElement, "All elements of dates except years",
         {"dob", "date of birth", "birth date", "admission date", "discharge date", "date of death"},
         R"(\b(\d{4}-\d{2}-\d{2}|\d{1,2}/\d{1,2}/\d{4})\b)"},
    };
}

// Number of tokens of `keyword` when it occurs as a contiguous token run in `name`, else 0.
std::size_t keyword_match(const std::vector<std::string>& name, const std::vector<std::string>& keyword) {
    if (keyword.empty() || keyword.size() > name.size()) return 0;
    for (std::size_t i = 0; i + keyword.size() <= name.size(); ++i) {
        if (std::equal(keyword.begin(), keyword.end(), name.begin() + static_cast<std::ptrdiff_t>(i))) {
            return keyword.size();
        }
    }
    return 0;
}

}  // namespace

std::string_view to_string(IdentifierClass c) { return kClassNames[static_cast<std::size_t>(c)]; }

std::optional<IdentifierClass> parse_identifier_class(std::string_view text) {
    for (std::size_t i = 0; i < kClassNames.size(); ++i) {
        if (kClassNames[i] == text) return static_cast<IdentifierClass>(i);
    }
    return std::nullopt;
}

const std::array<IdentifierClass, kIdentifierClassCount>& all_identifier_classes() {
    static const auto classes = [] {
        std::array<IdentifierClass, kIdentifierClassCount> out{};
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<IdentifierClass>(i);
        return out;
    }();
    return classes;
}

IdentifierCatalog::IdentifierCatalog(std::string version, std::vector<IdentifierRule> rules)
    : version_(std::move(version)), rules_(std::move(rules)) {
    for (auto& rule : rules_) {
        for (auto& kw : rule.name_keywords) kw = normalize(kw);
        if (rule.value_pattern.empty()) continue;
        try {
            patterns_.emplace_back(rule.cls, std::regex(rule.value_pattern, std::regex::ECMAScript | std::regex::optimize));
        } catch (const std::regex_error& e) {
            throw ParseError("invalid value pattern for " + std::string(to_string(rule.cls)) + ": " + e.what(), 0);
        }
    }
}

const IdentifierCatalog& IdentifierCatalog::builtin() {
    static const IdentifierCatalog catalog("1", builtin_rules());
    return catalog;
}

IdentifierCatalog IdentifierCatalog::from_json(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("identifier catalog: ") + e.what(), 0);
    }
    try {
        std::vector<IdentifierRule> rules;
        for (const auto& row : doc.at("classes")) {
            const auto name = row.at("class").get<std::string>();
            const auto cls = parse_identifier_class(name);
            if (!cls) throw ParseError("identifier catalog: unknown class '" + name + "'", 0);
            IdentifierRule rule{*cls, row.value("description", std::string()),
                                row.value("name_keywords", std::vector<std::string>{}),
                                row.value("value_pattern", std::string())};
            rules.push_back(std::move(rule));
        }
        return IdentifierCatalog(doc.at("version").get<std::string>(), std::move(rules));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("identifier catalog: ") + e.what(), 0);
    }
}

IdentifierCatalog IdentifierCatalog::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open identifier catalog '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string IdentifierCatalog::to_json() const {
    nlohmann::ordered_json doc;
    doc["version"] = version_;
    doc["classes"] = nlohmann::ordered_json::array();
    for (const auto& rule : rules_) {
        nlohmann::ordered_json row;
        row["row"] = static_cast<int>(rule.cls) + 1;
        row["class"] = std::string(to_string(rule.cls));
        row["description"] = rule.description;
        row["name_keywords"] = rule.name_keywords;
        row["value_pattern"] = rule.value_pattern;
        doc["classes"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

std::optional<IdentifierClass> IdentifierCatalog::classify_name(std::string_view attribute_name) const {
    const auto name = tokenize(attribute_name);
    std::optional<IdentifierClass> best;
    std::size_t best_len = 0;
    for (const auto& rule : rules_) {
        for (const auto& kw : rule.name_keywords) {
            const auto len = keyword_match(name, tokenize(kw));
            if (len > best_len) {
                best_len = len;
                best = rule.cls;
            }
        }
    }
    return best;
}

std::vector<IdentifierCatalog::ValueMatch> IdentifierCatalog::match_values(std::string_view text) const {
    std::vector<ValueMatch> out;
    const std::string owned(text);
    for (const auto& [cls, re] : patterns_) {
        for (auto it = std::sregex_iterator(owned.begin(), owned.end(), re); it != std::sregex_iterator(); ++it) {
            out.push_back({cls, static_cast<std::size_t>(it->position()), it->str()});
        }
    }
    std::sort(out.begin(), out.end(), [](const ValueMatch& a, const ValueMatch& b) {
        return a.offset != b.offset ? a.offset < b.offset : a.cls < b.cls;
    });
    return out;
}

std::string format_identifier(IdentifierClass c, std::uint64_t n) {
    static constexpr std::array<const char*, 16> kFirst{"Alice", "Bruno",  "Chen",  "Dalia", "Emeka", "Farah",
                                                        "Goran", "Hana",   "Ivan",  "Jamal", "Keiko", "Lena",
                                                        "Mateo", "Nadia",  "Omar",  "Priya"};
    static constexpr std::array<const char*, 16> kLast{"Abbott", "Brandt", "Castro", "Dunn",   "Eriksen", "Fischer",
                                                       "Garcia", "Haddad", "Ito",    "Jensen", "Kowalski", "Lund",
                                                       "Moreau", "Novak",  "Okafor", "Petrov"};
    char buf[96];
    const auto u = [](std::uint64_t v) { return static_cast<unsigned long long>(v); };
    switch (c) {
        case IdentifierClass::Name:
            std::snprintf(buf, sizeof buf, "%s %s", kFirst[n % 16], kLast[(n / 16) % 16]);
            break;
        case IdentifierClass::SSN:
            std::snprintf(buf, sizeof buf, "%03llu-%02llu-%04llu", u(100 + n % 800), u(10 + (n / 800) % 90),
                          u(1000 + n % 9000));
            break;
        case IdentifierClass::SubStateGeography:
            std::snprintf(buf, sizeof buf, "%llu Maple Street", u(100 + n % 900));
            break;
        case IdentifierClass::Phone:
        case IdentifierClass::Fax:
            std::snprintf(buf, sizeof buf, "(555) %03llu-%04llu", u(200 + n % 800), u(n % 10000));
            break;
        case IdentifierClass::DeviceId:
            std::snprintf(buf, sizeof buf, "02:1A:%02llX:%02llX:%02llX:%02llX", u((n >> 24) & 0xff), u((n >> 16) & 0xff),
                          u((n >> 8) & 0xff), u(n & 0xff));
            break;
        case IdentifierClass::Email:
            std::snprintf(buf, sizeof buf, "user%llu@clinic.example.org", u(n % 100000));
            break;
        case IdentifierClass::WebUrl:
            std::snprintf(buf, sizeof buf, "https://portal.example.org/patients/%llu", u(n % 100000));
            break;
        case IdentifierClass::VehicleId:
            std::snprintf(buf, sizeof buf, "PLT-%04llu", u(n % 10000));
            break;
        case IdentifierClass::IpAddress:
            std::snprintf(buf, sizeof buf, "10.%llu.%llu.%llu", u((n / 65536) % 256), u((n / 256) % 256), u(n % 256));
            break;
        case IdentifierClass::MedicalRecordNumber:
            std::snprintf(buf, sizeof buf, "MRN-%08llu", u(n % 100000000));
            break;
        case IdentifierClass::Biometric:
            std::snprintf(buf, sizeof buf, "fingerprint-template-%06llu", u(n % 1000000));
            break;
        case IdentifierClass::HealthPlanNumber:
            std::snprintf(buf, sizeof buf, "HP-%09llu", u(n % 1000000000));
            break;
        case IdentifierClass::FacePhoto:
            std::snprintf(buf, sizeof buf, "face_%06llu.jpg", u(n % 1000000));
            break;
        case IdentifierClass::AccountNumber:
            std::snprintf(buf, sizeof buf, "ACCT-%010llu", u(n % 10000000000ULL));
            break;
        case IdentifierClass::OtherUniqueId:
            std::snprintf(buf, sizeof buf, "U%07llu", u(n % 10000000));
            break;
        case IdentifierClass::CertificateLicense:
            std::snprintf(buf, sizeof buf, "LIC-%06llu", u(n % 1000000));
            break;
        case IdentifierClass::DateElement:
            std::snprintf(buf, sizeof buf, "%04llu-%02llu-%02llu", u(1940 + n % 70), u(1 + (n / 70) % 12),
                          u(1 + (n / 840) % 28));
            break;
    }
    return buf;
}

std::vector<Finding> scan_identifiers(const AttributeList& attributes, std::string_view free_text,
                                      const IdentifierCatalog& catalog) {
    std::vector<Finding> findings;
    for (const auto& attr : attributes) {
        if (const auto cls = catalog.classify_name(attr.name)) {
            findings.push_back({*cls, "attribute:" + attr.name, attr.value});
            continue;
        }
        for (auto& m : catalog.match_values(attr.value)) {
            findings.push_back({m.cls, "attribute:" + attr.name, std::move(m.excerpt)});
        }
    }
    for (auto& m : catalog.match_values(free_text)) {
        findings.push_back({m.cls, "text:" + std::to_string(m.offset), std::move(m.excerpt)});
    }
    return findings;
}

bool check_consent(const AttributeList& attributes) {
    for (const auto& attr : attributes) {
        const auto name = normalize(attr.name);
        if (name != "patient consent" && name != "user consent") continue;
        const auto value = normalize(attr.value);
        if (value == "true" || value == "1" || value == "yes" || value == "granted") return true;
    }
    return false;
}

std::string_view to_string(ComplianceVerdict v) { return v == ComplianceVerdict::Pass ? "Pass" : "Block"; }

ComplianceReport evaluate_compliance(const AttributeList& attributes, std::string_view free_text,
                                     const IdentifierCatalog& catalog) {
    ComplianceReport report;
    report.findings = scan_identifiers(attributes, free_text, catalog);
    report.consent_present = check_consent(attributes);
    if (!report.findings.empty() && !report.consent_present) {
        report.verdict = ComplianceVerdict::Block;
        for (const auto& f : report.findings) {
            report.reasons.push_back(std::string(to_string(f.cls)) + " identifier in " + f.source +
                                     " without patient consent");
        }
    }
    return report;
}

}  // namespace ztac
