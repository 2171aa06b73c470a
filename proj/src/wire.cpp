#include "ztac/wire.hpp"

#include <openssl/sha.h>

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace ztac {

double wire_double(double v) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite value cannot be encoded");
    char buf[400];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
    double out = 0.0;
    std::from_chars(buf, res.ptr, out);
    return out == 0.0 ? 0.0 : out;
}

std::string canonical_dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::strict); }

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * SHA256_DIGEST_LENGTH);
    for (unsigned char b : digest) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xF]);
    }
    return out;
}

namespace {

std::string type_name(const Json& j) { return j.type_name(); }

// Field access with JSON-pointer paths for error messages.
class Reader {
public:
    Reader(const Json& j, std::string path, std::initializer_list<std::string_view> allowed)
        : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw SchemaError(path_, "expected object, got " + type_name(j));
        for (const auto& [key, value] : j.items()) {
            bool known = false;
            for (auto a : allowed) known = known || a == key;
            if (!known) throw SchemaError(at(key), "unknown field");
        }
    }

    std::string at(std::string_view key) const { return path_ + "/" + std::string(key); }

    const Json* optional(std::string_view key) const {
        auto it = j_.find(std::string(key));
        return it == j_.end() ? nullptr : &*it;
    }

    const Json& required(std::string_view key) const {
        const Json* v = optional(key);
        if (!v) throw SchemaError(at(key), "required field missing");
        return *v;
    }

    std::string string(std::string_view key) const { return as_string(required(key), at(key)); }
    bool boolean(std::string_view key) const {
        const auto& v = required(key);
        if (!v.is_boolean()) throw SchemaError(at(key), "expected boolean, got " + type_name(v));
        return v.get<bool>();
    }
    double number(std::string_view key) const { return as_number(required(key), at(key)); }
    std::int64_t integer(std::string_view key) const { return as_integer(required(key), at(key)); }

    static std::string as_string(const Json& v, const std::string& path) {
        if (!v.is_string()) throw SchemaError(path, "expected string, got " + type_name(v));
        return v.get<std::string>();
    }
    static double as_number(const Json& v, const std::string& path) {
        if (!v.is_number()) throw SchemaError(path, "expected number, got " + type_name(v));
        return v.get<double>();
    }
    static std::int64_t as_integer(const Json& v, const std::string& path) {
        if (v.is_number_integer()) return v.get<std::int64_t>();
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
        }
        throw SchemaError(path, "expected integer, got " + type_name(v));
    }

private:
    const Json& j_;
    std::string path_;
};

std::int64_t in_range(std::int64_t v, std::int64_t lo, std::int64_t hi, const std::string& path) {
    if (v < lo || v > hi) {
        throw InvalidArgument(path + ": value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    }
    return v;
}

std::vector<std::string> string_list(const Json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected array, got " + type_name(v));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(Reader::as_string(v[i], path + "/" + std::to_string(i)));
    return out;
}

AttributeList attribute_list(const Json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected array, got " + type_name(v));
    AttributeList out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        Reader r(v[i], p, {"name", "value"});
        Attribute a{r.string("name"), r.string("value")};
        if (a.name.empty()) throw InvalidArgument(p + "/name: attribute name must not be empty");
        out.push_back(std::move(a));
    }
    return out;
}

AttributeTriple triple_from(const Json& v, const std::string& path) {
    Reader r(v, path, {"user", "device", "data"});
    return {attribute_list(r.required("user"), r.at("user")), attribute_list(r.required("device"), r.at("device")),
            attribute_list(r.required("data"), r.at("data"))};
}

Json to_json(const AttributeList& list) {
    Json out = Json::array();
    for (const auto& a : list) out.push_back({{"name", a.name}, {"value", a.value}});
    return out;
}

Json to_json(const AttributeTriple& t) {
    return {{"user", to_json(t.user)}, {"device", to_json(t.device)}, {"data", to_json(t.data)}};
}

MicroserviceChecks checks_from(const Json& v, const std::string& path) {
    Reader r(v, path, {"authentication", "authorization", "encryption", "logging"});
    return {r.boolean("authentication"), r.boolean("authorization"), r.boolean("encryption"), r.boolean("logging")};
}

Json to_json(const MicroserviceChecks& c) {
    return {{"authentication", c.authentication},
            {"authorization", c.authorization},
            {"encryption", c.encryption},
            {"logging", c.logging}};
}

ConfigOverrides overrides_from(const Json* v, const std::string& path) {
    ConfigOverrides o;
    if (!v) return o;
    Reader r(*v, path, {"cosine_threshold", "ngram_order", "weight_orientation", "bt_a_mode", "ct_threshold",
                        "bt_threshold"});
    if (r.optional("cosine_threshold")) o.cosine_threshold = r.number("cosine_threshold");
    if (r.optional("ngram_order")) {
        o.ngram_order = static_cast<std::size_t>(in_range(r.integer("ngram_order"), 1, 16, r.at("ngram_order")));
    }
    try {
        if (r.optional("weight_orientation")) o.weight_orientation = parse_weight_orientation(r.string("weight_orientation"));
        if (r.optional("bt_a_mode")) o.bt_a_mode = parse_bt_a_mode(r.string("bt_a_mode"));
    } catch (const InvalidArgument& e) {
        throw SchemaError(path, e.what());
    }
    if (r.optional("ct_threshold")) o.ct_threshold = r.number("ct_threshold");
    if (r.optional("bt_threshold")) o.bt_threshold = r.number("bt_threshold");
    return o;
}

Json to_json(const ConfigOverrides& o) {
    Json out = Json::object();
    if (o.cosine_threshold) out["cosine_threshold"] = *o.cosine_threshold;
    if (o.ngram_order) out["ngram_order"] = *o.ngram_order;
    if (o.weight_orientation) out["weight_orientation"] = to_string(*o.weight_orientation);
    if (o.bt_a_mode) out["bt_a_mode"] = to_string(*o.bt_a_mode);
    if (o.ct_threshold) out["ct_threshold"] = *o.ct_threshold;
    if (o.bt_threshold) out["bt_threshold"] = *o.bt_threshold;
    return out;
}

OperationMask ops_from(const Json& v, const std::string& path) {
    const auto text = Reader::as_string(v, path);
    OperationMask mask = 0;
    for (char c : text) {
        Operation op;
        switch (c) {
            case 'C': op = Operation::Create; break;
            case 'R': op = Operation::Read; break;
            case 'U': op = Operation::Update; break;
            case 'D': op = Operation::Delete; break;
            default: throw SchemaError(path, "operations must be letters from CRUD");
        }
        if (mask & static_cast<OperationMask>(op)) throw InvalidArgument(path + ": operation repeated");
        mask |= static_cast<OperationMask>(op);
    }
    return mask;
}

template <std::size_t N>
Json quantized(const std::array<double, N>& values) {
    Json out = Json::array();
    for (double v : values) out.push_back(wire_double(v));
    return out;
}

}  // namespace

bool ConfigOverrides::empty() const {
    return !cosine_threshold && !ngram_order && !weight_orientation && !bt_a_mode && !ct_threshold && !bt_threshold;
}

EngineConfig ConfigOverrides::apply(EngineConfig c) const {
    if (cosine_threshold) c.scoring.cosine_threshold = *cosine_threshold;
    if (ngram_order) c.scoring.ngram_order = *ngram_order;
    if (weight_orientation) c.scoring.weight_orientation = *weight_orientation;
    if (bt_a_mode) c.scoring.bt_a_mode = *bt_a_mode;
    if (ct_threshold) c.thresholds.ct = *ct_threshold;
    if (bt_threshold) c.thresholds.bt = *bt_threshold;
    c.validate();
    return c;
}

std::string ops_to_string(OperationMask ops) {
    std::string out;
    for (auto [op, c] : {std::pair{Operation::Create, 'C'}, {Operation::Read, 'R'}, {Operation::Update, 'U'},
                         {Operation::Delete, 'D'}}) {
        if (ops & static_cast<OperationMask>(op)) out.push_back(c);
    }
    return out;
}

DecideRequest parse_decide_request(const Json& body) {
    Reader r(body, "", {"attributes", "candidate_report", "patient_history", "checks", "requested_ops",
                        "requested_level", "group_ids", "resources", "config"});
    DecideRequest out;
    auto& req = out.request;
    req.triple = triple_from(r.required("attributes"), r.at("attributes"));
    req.candidate_report = r.string("candidate_report");
    req.patient_history = string_list(r.required("patient_history"), r.at("patient_history"));
    req.checks = checks_from(r.required("checks"), r.at("checks"));
    req.requested_ops = ops_from(r.required("requested_ops"), r.at("requested_ops"));
    req.requested_level =
        static_cast<int>(in_range(r.integer("requested_level"), 0, kMaxAccessLevel, r.at("requested_level")));
    if (const Json* g = r.optional("group_ids")) {
        Reader gr(*g, r.at("group_ids"), {"user", "device", "output"});
        const char* keys[] = {"user", "device", "output"};
        for (std::size_t i = 0; i < 3; ++i) {
            if (gr.optional(keys[i])) {
                req.group_ids[i] = static_cast<std::uint8_t>(in_range(gr.integer(keys[i]), 0, 255, gr.at(keys[i])));
            }
        }
    }
    if (const Json* res = r.optional("resources")) {
        Reader rr(*res, r.at("resources"), {"compute_id", "storage_id", "expiry", "constraints"});
        if (rr.optional("compute_id")) {
            out.resources.compute_id = static_cast<std::uint16_t>(in_range(rr.integer("compute_id"), 0, 0xFFF, rr.at("compute_id")));
        }
        if (rr.optional("storage_id")) {
            out.resources.storage_id = static_cast<std::uint16_t>(in_range(rr.integer("storage_id"), 0, 0xFFF, rr.at("storage_id")));
        }
        if (rr.optional("expiry")) {
            out.resources.expiry = in_range(rr.integer("expiry"), 0, 0xFFFFFFFFLL, rr.at("expiry"));
            out.has_expiry = true;
        }
        if (const Json* c = rr.optional("constraints")) {
            Reader cr(*c, rr.at("constraints"),
                      {"location_bound", "trial_limited", "size_capped", "max_trials", "size_cap_mib"});
            auto& k = out.resources.constraints;
            if (cr.optional("location_bound")) k.location_bound = cr.boolean("location_bound");
            if (cr.optional("trial_limited")) k.trial_limited = cr.boolean("trial_limited");
            if (cr.optional("size_capped")) k.size_capped = cr.boolean("size_capped");
            if (cr.optional("max_trials")) {
                k.max_trials = static_cast<std::uint8_t>(in_range(cr.integer("max_trials"), 0, 255, cr.at("max_trials")));
            }
            if (cr.optional("size_cap_mib")) {
                k.size_cap_mib =
                    static_cast<std::uint16_t>(in_range(cr.integer("size_cap_mib"), 0, 0xFFFF, cr.at("size_cap_mib")));
            }
        }
    }
    out.overrides = overrides_from(r.optional("config"), r.at("config"));
    return out;
}

ScoreRequest parse_score_request(const Json& body) {
    Reader r(body, "", {"attributes", "candidate_report", "patient_history", "checks", "config"});
    ScoreRequest out;
    out.triple = triple_from(r.required("attributes"), r.at("attributes"));
    out.candidate_report = r.string("candidate_report");
    out.history = string_list(r.required("patient_history"), r.at("patient_history"));
    out.checks = checks_from(r.required("checks"), r.at("checks"));
    out.overrides = overrides_from(r.optional("config"), r.at("config"));
    return out;
}

Json to_json(const DecideRequest& d) {
    const auto& r = d.request;
    const auto& k = d.resources.constraints;
    Json res{{"compute_id", d.resources.compute_id},
             {"storage_id", d.resources.storage_id},
             {"constraints",
              {{"location_bound", k.location_bound},
               {"trial_limited", k.trial_limited},
               {"size_capped", k.size_capped},
               {"max_trials", k.max_trials},
               {"size_cap_mib", k.size_cap_mib}}}};
    if (d.has_expiry) res["expiry"] = d.resources.expiry;
    Json out{{"attributes", to_json(r.triple)},
             {"candidate_report", r.candidate_report},
             {"patient_history", r.patient_history},
             {"checks", to_json(r.checks)},
             {"requested_ops", ops_to_string(r.requested_ops)},
             {"requested_level", r.requested_level},
             {"group_ids", {{"user", r.group_ids[0]}, {"device", r.group_ids[1]}, {"output", r.group_ids[2]}}},
             {"resources", std::move(res)}};
    if (!d.overrides.empty()) out["config"] = to_json(d.overrides);
    return out;
}

Json to_json(const ScoreRequest& s) {
    Json out{{"attributes", to_json(s.triple)},
             {"candidate_report", s.candidate_report},
             {"patient_history", s.history},
             {"checks", to_json(s.checks)}};
    if (!s.overrides.empty()) out["config"] = to_json(s.overrides);
    return out;
}

Json to_json(const TrustScores& s) {
    const auto& b = s.bond;
    return {{"ct", wire_double(s.ct)},
            {"bt_a_components", quantized(b.components)},
            {"weight_sums", quantized(b.weight_sums)},
            {"pair_counts", b.pair_counts},
            {"btn", quantized(b.normalized)},
            {"bt_a", wire_double(b.bt_a)},
            {"bt_b", wire_double(b.bt_b)},
            {"bt", wire_double(b.bt)},
            {"mode", to_string(b.mode)},
            {"warnings", s.warnings}};
}

Json to_json(const ComplianceReport& r) {
    Json findings = Json::array();
    for (const auto& f : r.findings) {
        findings.push_back({{"class", to_string(f.cls)}, {"source", f.source}, {"excerpt", f.excerpt}});
    }
    return {{"verdict", to_string(r.verdict)},
            {"consent_present", r.consent_present},
            {"findings", std::move(findings)},
            {"reasons", r.reasons}};
}

Json to_json(const FinalDecision& d) {
    Json out{{"status", to_string(d.status)},
             {"fields",
              {{"f1", d.fields.f1_level},
               {"f2", d.fields.f2_resources},
               {"f3", d.fields.f3_constraints},
               {"f4", d.fields.f4_operations}}},
             {"components", {{"user", d.components[0]}, {"device", d.components[1]}, {"output", d.components[2]}}},
             {"context", d.context},
             {"ct", wire_double(d.scores.ct)},
             {"scored", d.scored},
             {"scores", d.scored ? to_json(d.scores) : Json(nullptr)},
             {"compliance", to_json(d.compliance)},
             {"reasons", d.reasons}};
    if (d.status != AccessStatus::Deny) out["expiry_utc"] = format_utc(decode_final(d.fields).expiry);
    return out;
}

Json to_json(const LabeledSample& s) {
    return {{"id", s.id},
            {"specialty", s.specialty},
            {"label", to_string(s.label)},
            {"mismatch_kind", to_string(s.mismatch_kind)},
            {"attributes", to_json(s.triple)},
            {"patient_history", s.history},
            {"candidate_report", s.candidate_report}};
}

LabeledSample parse_sample(const Json& j) {
    Reader r(j, "", {"id", "specialty", "label", "mismatch_kind", "attributes", "patient_history", "candidate_report"});
    LabeledSample s;
    s.id = static_cast<std::uint64_t>(in_range(r.integer("id"), 0, INT64_MAX, r.at("id")));
    s.specialty = r.string("specialty");
    s.label = parse_sample_label(r.string("label"));
    s.mismatch_kind = parse_mismatch_kind(r.string("mismatch_kind"));
    if ((s.label == SampleLabel::Legit) != (s.mismatch_kind == MismatchKind::None)) {
        throw InvalidArgument("label must be legit exactly when mismatch_kind is none");
    }
    s.triple = triple_from(r.required("attributes"), r.at("attributes"));
    s.history = string_list(r.required("patient_history"), r.at("patient_history"));
    s.candidate_report = r.string("candidate_report");
    return s;
}

void write_dataset(std::ostream& out, const std::vector<LabeledSample>& samples) {
    for (const auto& s : samples) out << canonical_dump(to_json(s)) << '\n';
}

std::vector<LabeledSample> read_dataset(std::istream& in) {
    std::vector<LabeledSample> out;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_sample(Json::parse(line)));
        } catch (const Json::exception& e) {
            throw ParseError(e.what(), line_no);
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return out;
}

}  // namespace ztac
