#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "ztac/audit.hpp"
#include "ztac/compliance.hpp"
#include "ztac/config.hpp"
#include "ztac/models.hpp"
#include "ztac/wire.hpp"

namespace ztac {

// Request evaluation over loaded models; no I/O and no audit side effects.
class Engine {
public:
    Engine(ServiceConfig config, ModelBundle models, IdentifierCatalog catalog);

    /// Loads the corpus or embeddings and the identifier catalog named by `config`.
    static Engine from_config(const ServiceConfig& config);

    TrustScores score(const ScoreRequest& request) const;
    /// `now` supplies the expiry (now + grant ttl) when the request names none.
    FinalDecision decide(const DecideRequest& request, std::int64_t now) const;

    // Parse, evaluate, encode. Throw SchemaError or InvalidArgument on bad input.
    Json score_json(const Json& body) const;
    Json decide_json(const Json& body, std::int64_t now) const;

    const ServiceConfig& config() const noexcept { return config_; }
    const ModelBundle& models() const noexcept { return models_; }
    const IdentifierCatalog& catalog() const noexcept { return catalog_; }

private:
    ServiceConfig config_;
    ModelBundle models_;
    IdentifierCatalog catalog_;
};

struct HttpResponse {
    int status = 200;
    std::string body;  // canonical JSON
};

// HTTP front end: /v1/decide, /v1/score, /v1/audit, /v1/health. Handlers are
// callable directly; serve() runs them behind an HTTP/1.1 listener.
//   400 body is not JSON or violates the schema; the error names the field path
//   422 a field is outside its documented range, or /v1/score cannot score the request
//   500 unexpected failure; only an opaque id is returned, details go to stderr
class Gateway {
public:
    Gateway(Engine engine, const std::string& audit_log_path);
    ~Gateway();

    HttpResponse handle_decide(std::string_view body);
    HttpResponse handle_score(std::string_view body) const;
    HttpResponse handle_audit(std::optional<std::string> from, std::optional<std::string> to) const;
    HttpResponse handle_health() const;

    /// Binds the listener; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    void listen();
    void stop();

    const Engine& engine() const noexcept { return engine_; }
    AuditLog& audit() noexcept { return audit_; }

private:
    struct Server;

    Engine engine_;
    AuditLog audit_;
    std::unique_ptr<Server> server_;
};

}  // namespace ztac
