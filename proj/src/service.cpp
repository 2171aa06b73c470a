#include "ztac/service.hpp"

#include <httplib.h>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <limits>

namespace ztac {

Engine::Engine(ServiceConfig config, ModelBundle models, IdentifierCatalog catalog)
    : config_(std::move(config)), models_(std::move(models)), catalog_(std::move(catalog)) {
    config_.validate();
}

Engine Engine::from_config(const ServiceConfig& config) {
    const auto documents = config.corpus_path.empty()
                               ? generate_corpus(kDefaultCorpusSeed, kDefaultCorpusDocuments)
                               : read_corpus_file(config.corpus_path);
    auto catalog =
        config.identifiers_path.empty() ? IdentifierCatalog::builtin() : IdentifierCatalog::from_file(config.identifiers_path);
    return Engine(config, build_models(documents, config.corpus_window, config.embeddings_path), std::move(catalog));
}

TrustScores Engine::score(const ScoreRequest& r) const {
    const auto cfg = r.overrides.apply(config_.engine);
    return score_request(r.triple, r.history, r.candidate_report, r.checks, cfg.factors, models_.view(), cfg.scoring);
}

FinalDecision Engine::decide(const DecideRequest& r, std::int64_t now) const {
    const auto cfg = r.overrides.apply(config_.engine);
    ResourceGrant resources = r.resources;
    if (!r.has_expiry) {
        resources.expiry = std::min<std::int64_t>(now + config_.grant_ttl_seconds, 0xFFFFFFFFLL);
    }
    return evaluate_request(r.request, resources, models_.view(), cfg, catalog_);
}

Json Engine::score_json(const Json& body) const { return to_json(score(parse_score_request(body))); }

Json Engine::decide_json(const Json& body, std::int64_t now) const {
    return to_json(decide(parse_decide_request(body), now));
}

namespace {

std::int64_t now_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

HttpResponse json_response(int status, const Json& j) { return {status, canonical_dump(j)}; }

HttpResponse error_response(int status, std::string code, std::string message, std::string path = {}) {
    Json e{{"code", std::move(code)}, {"message", std::move(message)}};
    if (status == 400) e["path"] = path.empty() ? "/" : path;
    return json_response(status, {{"error", std::move(e)}});
}

HttpResponse internal_error(std::string_view detail) {
    static std::atomic<std::uint64_t> counter{0};
    const std::string id = sha256_hex(std::to_string(now_seconds()) + ":" + std::to_string(++counter)).substr(0, 16);
    std::fprintf(stderr, "ztac: internal error %s: %.*s\n", id.c_str(), static_cast<int>(detail.size()), detail.data());
    return json_response(500, {{"error", {{"code", "internal"}, {"id", id}}}});
}

Json parse_body(std::string_view body) {
    try {
        return Json::parse(body);
    } catch (const Json::parse_error& e) {
        throw SchemaError("", body.empty() ? "empty request body" : std::string("invalid JSON: ") + e.what());
    }
}

template <typename F>
HttpResponse guarded(F&& f) {
    try {
        return f();
    } catch (const SchemaError& e) {
        return error_response(400, "schema_violation", e.what(), e.path());
    } catch (const InvalidArgument& e) {
        return error_response(422, "out_of_range", e.what());
    } catch (const StageError& e) {
        return error_response(422, "unscorable", e.what());
    } catch (const std::exception& e) {
        return internal_error(e.what());
    }
}

std::optional<std::uint64_t> parse_sequence(const std::optional<std::string>& text, const char* name) {
    if (!text) return std::nullopt;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (text->empty() || ec != std::errc() || ptr != text->data() + text->size()) {
        throw SchemaError(std::string("/") + name, "expected a non-negative integer");
    }
    return v;
}

}  // namespace

struct Gateway::Server {
    httplib::Server http;
};

Gateway::Gateway(Engine engine, const std::string& audit_log_path)
    : engine_(std::move(engine)), audit_(audit_log_path), server_(std::make_unique<Server>()) {
    auto& http = server_->http;
    const auto reply = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    http.Post("/v1/decide", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle_decide(req.body));
    });
    http.Post("/v1/score", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle_score(req.body));
    });
    http.Get("/v1/audit", [this, reply](const httplib::Request& req, httplib::Response& res) {
        const auto param = [&](const char* name) -> std::optional<std::string> {
            if (!req.has_param(name)) return std::nullopt;
            return req.get_param_value(name);
        };
        reply(res, handle_audit(param("from"), param("to")));
    });
    http.Get("/v1/health", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, handle_health());
    });
    http.set_exception_handler([reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            reply(res, internal_error(e.what()));
        } catch (...) {
            reply(res, internal_error("unknown exception"));
        }
    });
}

Gateway::~Gateway() { stop(); }

HttpResponse Gateway::handle_decide(std::string_view body) {
    return guarded([&] {
        const Json request = parse_body(body);
        const auto parsed = parse_decide_request(request);
        const auto decision = engine_.decide(parsed, now_seconds());
        audit_.append(request, decision, now_seconds());
        return json_response(200, to_json(decision));
    });
}

HttpResponse Gateway::handle_score(std::string_view body) const {
    return guarded([&] { return json_response(200, engine_.score_json(parse_body(body))); });
}

HttpResponse Gateway::handle_audit(std::optional<std::string> from, std::optional<std::string> to) const {
    return guarded([&] {
        const auto f = parse_sequence(from, "from").value_or(1);
        const auto t = parse_sequence(to, "to").value_or(std::numeric_limits<std::uint64_t>::max());
        Json entries = Json::array();
        for (auto& e : audit_.read(f, t)) entries.push_back(std::move(e));
        return json_response(200, entries);
    });
}

HttpResponse Gateway::handle_health() const {
    return json_response(200, {{"status", "ok"},
                               {"audit_entries", audit_.size()},
                               {"vocabulary", engine_.models().store.size()},
                               {"catalog_version", engine_.catalog().version()}});
}

int Gateway::bind(const std::string& host, int port) {
    auto& http = server_->http;
    if (port == 0) {
        const int bound = http.bind_to_any_port(host);
        if (bound < 0) throw Error("cannot bind " + host);
        return bound;
    }
    if (!http.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void Gateway::listen() { server_->http.listen_after_bind(); }

void Gateway::stop() {
    if (server_ && server_->http.is_running()) server_->http.stop();
}

}  // namespace ztac
