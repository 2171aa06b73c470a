#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "ztac/decision.hpp"
#include "ztac/wire.hpp"

namespace ztac {

struct ServiceConfig {
    EngineConfig engine;
    std::string embeddings_path;   // word2vec text file; empty derives PPMI vectors from the corpus
    std::string corpus_path;       // one document per line; empty uses the generated default corpus
    std::size_t corpus_window = 16;
    std::string identifiers_path;  // identifier catalog JSON; empty uses the built-in catalog
    std::string audit_log_path = "ztac-audit.jsonl";
    std::string host = "127.0.0.1";
    int port = 8080;
    std::int64_t grant_ttl_seconds = 3600;  // expiry granted when a request names none

    // Throws InvalidArgument.
    void validate() const;
};

using EnvLookup = std::function<const char*(const char*)>;

/// Config file layout (every key optional, defaults shown by `ztac config`):
///   {"thresholds": {"ct", "bt", "cosine"}, "factors": {"s1".."s4"},
///    "scoring": {"bt_a_mode", "ngram_order", "weight_orientation"},
///    "models": {"embeddings", "corpus", "corpus_window", "identifiers"},
///    "audit": {"path"}, "server": {"host", "port", "grant_ttl_seconds"}}
/// Each leaf can be overridden by the environment variable ZTAC_<SECTION>_<KEY> in
/// upper case, e.g. ZTAC_THRESHOLDS_CT or ZTAC_SERVER_PORT.
Json config_to_json(const ServiceConfig& config);

/// Unknown keys and wrong types throw SchemaError; invalid values InvalidArgument.
ServiceConfig config_from_json(const Json& j, const EnvLookup& env = {});

/// Reads `path` (empty: defaults only), applies environment overrides, validates.
ServiceConfig load_config(const std::string& path, const EnvLookup& env = {});

}  // namespace ztac
