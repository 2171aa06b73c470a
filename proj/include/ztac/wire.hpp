#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ztac/decision.hpp"
#include "ztac/error.hpp"
#include "ztac/synth.hpp"
#include "ztac/trust.hpp"

namespace ztac {

using Json = nlohmann::json;

// A request body that does not match the published schema. `path` names the
// offending field as a JSON pointer ("" for the document itself).
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what)
        : Error((path.empty() ? std::string("/") : path) + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// `v` rounded to 6 decimal places (round-half-even on the exact binary value),
/// returned as the nearest double. Wire floats pass through this before encoding.
double wire_double(double v);

/// Sorted keys, no insignificant whitespace, UTF-8.
std::string canonical_dump(const Json& j);

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

// Per-request overrides of the service defaults.
struct ConfigOverrides {
    std::optional<double> cosine_threshold;
    std::optional<std::size_t> ngram_order;
    std::optional<WeightOrientation> weight_orientation;
    std::optional<BtAMode> bt_a_mode;
    std::optional<double> ct_threshold;
    std::optional<double> bt_threshold;

    bool empty() const;
    // Applies the overrides and validates the result (InvalidArgument).
    EngineConfig apply(EngineConfig base) const;
};

struct DecideRequest {
    AccessRequest request;
    ResourceGrant resources;
    bool has_expiry = false;  // when false the service fills in now + grant ttl
    ConfigOverrides overrides;
};

struct ScoreRequest {
    AttributeTriple triple;
    std::vector<std::string> history;
    std::string candidate_report;
    MicroserviceChecks checks;
    ConfigOverrides overrides;
};

// Structural problems throw SchemaError; values outside their documented range
// throw InvalidArgument.
DecideRequest parse_decide_request(const Json& body);
ScoreRequest parse_score_request(const Json& body);
Json to_json(const DecideRequest& r);
Json to_json(const ScoreRequest& r);

std::string ops_to_string(OperationMask ops);  // "CRUD" subset in that order

Json to_json(const TrustScores& s);
Json to_json(const ComplianceReport& r);
Json to_json(const FinalDecision& d);

// LabeledSample records, one JSON object per line.
Json to_json(const LabeledSample& s);
LabeledSample parse_sample(const Json& j);
void write_dataset(std::ostream& out, const std::vector<LabeledSample>& samples);
/// Throws ParseError naming the offending line.
std::vector<LabeledSample> read_dataset(std::istream& in);

}  // namespace ztac
