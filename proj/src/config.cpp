#include "ztac/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ztac {

void ServiceConfig::validate() const {
    engine.validate();
    if (corpus_window == 0) throw InvalidArgument("models.corpus_window must be positive");
    if (port < 0 || port > 65535) throw InvalidArgument("server.port must lie in 0-65535");
    if (grant_ttl_seconds <= 0) throw InvalidArgument("server.grant_ttl_seconds must be positive");
    if (audit_log_path.empty()) throw InvalidArgument("audit.path must not be empty");
}

Json config_to_json(const ServiceConfig& c) {
    const auto& e = c.engine;
    return {{"thresholds", {{"ct", e.thresholds.ct}, {"bt", e.thresholds.bt}, {"cosine", e.scoring.cosine_threshold}}},
            {"factors",
             {{"s1", e.factors.authentication},
              {"s2", e.factors.authorization},
              {"s3", e.factors.encryption},
              {"s4", e.factors.logging}}},
            {"scoring",
             {{"bt_a_mode", to_string(e.scoring.bt_a_mode)},
              {"ngram_order", e.scoring.ngram_order},
              {"weight_orientation", to_string(e.scoring.weight_orientation)}}},
            {"models",
             {{"embeddings", c.embeddings_path},
              {"corpus", c.corpus_path},
              {"corpus_window", c.corpus_window},
              {"identifiers", c.identifiers_path}}},
            {"audit", {{"path", c.audit_log_path}}},
            {"server", {{"host", c.host}, {"port", c.port}, {"grant_ttl_seconds", c.grant_ttl_seconds}}}};
}

namespace {

bool same_kind(const Json& def, const Json& v) {
    if (def.is_number_float()) return v.is_number();
    if (def.is_number_integer()) return v.is_number_integer();
    return def.type() == v.type();
}

// Overlays `src` onto `dst`, which holds the defaults and fixes the allowed keys and types.
void overlay(Json& dst, const Json& src, const std::string& path) {
    if (!src.is_object()) throw SchemaError(path, "expected object");
    for (const auto& [key, value] : src.items()) {
        const std::string p = path + "/" + key;
        auto it = dst.find(key);
        if (it == dst.end()) throw SchemaError(p, "unknown configuration key");
        if (it->is_object()) {
            overlay(*it, value, p);
        } else if (!same_kind(*it, value)) {
            throw SchemaError(p, std::string("expected ") + it->type_name() + ", got " + value.type_name());
        } else {
            *it = value;
        }
    }
}

std::string env_name(const std::string& section, const std::string& key) {
    std::string out = "ZTAC_" + section + "_" + key;
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

void apply_env(Json& tree, const EnvLookup& env) {
    for (auto& [section, leaves] : tree.items()) {
        for (auto& [key, value] : leaves.items()) {
            const auto name = env_name(section, key);
            const char* raw = env(name.c_str());
            if (!raw) continue;
            const std::string text(raw);
            if (value.is_string()) {
                value = text;
            } else if (value.is_number_integer()) {
                long long v = 0;
                const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
                if (ec != std::errc() || ptr != text.data() + text.size()) {
                    throw InvalidArgument(name + ": expected an integer, got '" + text + "'");
                }
                value = v;
            } else {
                char* end = nullptr;
                const double v = std::strtod(text.c_str(), &end);
                if (text.empty() || *end != '\0' || !std::isfinite(v)) {
                    throw InvalidArgument(name + ": expected a number, got '" + text + "'");
                }
                value = v;
            }
        }
    }
}

}  // namespace

ServiceConfig config_from_json(const Json& j, const EnvLookup& env) {
    Json tree = config_to_json(ServiceConfig{});
    overlay(tree, j, "");
    apply_env(tree, env ? env : EnvLookup([](const char* n) { return std::getenv(n); }));

    ServiceConfig c;
    auto& e = c.engine;
    e.thresholds.ct = tree["thresholds"]["ct"].get<double>();
    e.thresholds.bt = tree["thresholds"]["bt"].get<double>();
    e.scoring.cosine_threshold = tree["thresholds"]["cosine"].get<double>();
    e.factors.authentication = tree["factors"]["s1"].get<double>();
    e.factors.authorization = tree["factors"]["s2"].get<double>();
    e.factors.encryption = tree["factors"]["s3"].get<double>();
    e.factors.logging = tree["factors"]["s4"].get<double>();
    e.scoring.bt_a_mode = parse_bt_a_mode(tree["scoring"]["bt_a_mode"].get<std::string>());
    const auto order = tree["scoring"]["ngram_order"].get<long long>();
    if (order < 1) throw InvalidArgument("scoring.ngram_order must be positive");
    e.scoring.ngram_order = static_cast<std::size_t>(order);
    e.scoring.weight_orientation = parse_weight_orientation(tree["scoring"]["weight_orientation"].get<std::string>());
    c.embeddings_path = tree["models"]["embeddings"].get<std::string>();
    c.corpus_path = tree["models"]["corpus"].get<std::string>();
    const auto window = tree["models"]["corpus_window"].get<long long>();
    if (window < 1) throw InvalidArgument("models.corpus_window must be positive");
    c.corpus_window = static_cast<std::size_t>(window);
    c.identifiers_path = tree["models"]["identifiers"].get<std::string>();
    c.audit_log_path = tree["audit"]["path"].get<std::string>();
    c.host = tree["server"]["host"].get<std::string>();
    const auto port = tree["server"]["port"].get<long long>();
    if (port < 0 || port > 65535) throw InvalidArgument("server.port must lie in 0-65535");
    c.port = static_cast<int>(port);
    c.grant_ttl_seconds = tree["server"]["grant_ttl_seconds"].get<std::int64_t>();
    c.validate();
    return c;
}

ServiceConfig load_config(const std::string& path, const EnvLookup& env) {
    Json j = Json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open config file '" + path + "'");
        try {
            j = Json::parse(in);
        } catch (const Json::parse_error& e) {
            throw ParseError(std::string("config file '") + path + "': " + e.what(), 0);
        }
    }
    return config_from_json(j, env);
}

}  // namespace ztac
