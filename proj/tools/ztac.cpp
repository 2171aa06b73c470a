#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ztac/audit.hpp"
#include "ztac/config.hpp"
#include "ztac/encoding.hpp"
#include "ztac/eval.hpp"
#include "ztac/service.hpp"
#include "ztac/synth.hpp"
#include "ztac/wire.hpp"

using namespace ztac;

namespace {

constexpr int kUsageError = 1;
constexpr int kValidationError = 2;

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SchemaError("", "'" + path + "' is not valid JSON: " + e.what());
    }
}

std::int64_t now_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::int64_t parse_time(const std::string& text) {
    if (text.find('T') != std::string::npos) return parse_utc(text);
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw InvalidArgument("expected epoch seconds or YYYY-MM-DDTHH:MM:SSZ, got '" + text + "'");
    return v;
}

OperationMask parse_ops(const std::string& text) {
    OperationMask mask = 0;
    for (char c : text) mask |= static_cast<OperationMask>(parse_operation(std::string_view(&c, 1)));
    return mask;
}

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

Gateway* g_gateway = nullptr;

extern "C" void on_signal(int) {
    if (g_gateway) g_gateway->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-trust access decision engine"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("-c,--config", config_path, "JSON config file (ZTAC_* environment variables override it)");

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    std::string host;
    int port = -1;
    std::string serve_audit;
    serve->add_option("--host", host, "Listen address (default from config)");
    serve->add_option("--port", port, "Listen port; 0 picks a free one (default from config)");
    serve->add_option("--audit-log", serve_audit, "Audit log path (default from config)");

    // decide / score
    auto* decide = app.add_subcommand("decide", "Evaluate an access request JSON file");
    std::string decide_file, decide_audit;
    std::int64_t decide_now = -1;
    decide->add_option("file", decide_file, "Request JSON")->required();
    decide->add_option("--audit-log", decide_audit, "Append the decision to this audit log");
    decide->add_option("--now", decide_now, "Clock for the default expiry, epoch seconds");

    auto* score = app.add_subcommand("score", "Score a triple, report and history JSON file");
    std::string score_file;
    score->add_option("file", score_file, "Score request JSON")->required();

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "Generate seeded synthetic data");
    std::uint64_t seed = kDefaultCorpusSeed;
    std::size_t count = 5000;
    double rate = 0.5;
    std::string kind = "samples", out_path;
    gen->add_option("--seed", seed, "PRNG seed")->capture_default_str();
    gen->add_option("-n,--count", count, "Samples, attributes per category, or corpus documents")->capture_default_str();
    gen->add_option("--rate", rate, "Mismatch rate for labeled samples")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    gen->add_option("--kind", kind, "samples (JSON lines), attributes (CSV), corpus (text), golden (request JSON)")
        ->capture_default_str()
        ->check(CLI::IsMember({"samples", "attributes", "corpus", "golden"}));
    gen->add_option("-o,--out", out_path, "Output file (default stdout)");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate scorers on a labeled dataset");
    std::string dataset;
    double threshold = 0.7;
    unsigned threads = 1;
    bool eval_json = false, eval_csv = false;
    eval->add_option("dataset", dataset, "JSON-lines dataset from gen-data")->required();
    eval->add_option("--threshold", threshold, "Legit iff score >= threshold")->capture_default_str();
    eval->add_option("--threads", threads, "Worker threads")->capture_default_str();
    eval->add_flag("--json", eval_json, "Machine-readable JSON output");
    eval->add_flag("--csv", eval_csv, "CSV output");

    // encode / decode
    auto* encode = app.add_subcommand("encode", "Encode component or final-decision fields");
    encode->require_subcommand(1);
    auto* enc_comp = encode->add_subcommand("component", "10-digit component encoding");
    int group = 0, level = 0, access_type = 0;
    double bond = 0.0;
    bool consent = false;
    enc_comp->add_option("--group", group)->check(CLI::Range(0, 255));
    enc_comp->add_option("--level", level)->check(CLI::Range(0, kMaxAccessLevel));
    enc_comp->add_option("--type", access_type, "Access type byte")->check(CLI::Range(0, 255));
    enc_comp->add_option("--bond", bond, "Bond score in [0, 1]")->check(CLI::Range(0.0, 1.0));
    enc_comp->add_flag("--consent", consent);
    auto* enc_final = encode->add_subcommand("final", "F1-F4 decision fields");
    int f_level = 0, compute = 0, storage = 0;
    std::string expiry = "0", ops;
    std::uint32_t flags = 0;
    enc_final->add_option("--level", f_level)->check(CLI::Range(0, kMaxAccessLevel));
    enc_final->add_option("--compute", compute)->check(CLI::Range(0, 0xFFF));
    enc_final->add_option("--storage", storage)->check(CLI::Range(0, 0xFFF));
    enc_final->add_option("--expiry", expiry, "Epoch seconds or YYYY-MM-DDTHH:MM:SSZ");
    enc_final->add_option("--flags", flags, "Constraint word");
    enc_final->add_option("--ops", ops, "Letters from CRUD");

    auto* decode = app.add_subcommand("decode", "Decode hex encodings");
    decode->require_subcommand(1);
    auto* dec_comp = decode->add_subcommand("component", "Decode a 10-digit component");
    std::string hex;
    dec_comp->add_option("hex", hex)->required();
    auto* dec_ctx = decode->add_subcommand("context", "Decode a 32-digit context array");
    dec_ctx->add_option("hex", hex)->required();
    auto* dec_final = decode->add_subcommand("final", "Decode F1 F2 F3 F4");
    std::vector<std::string> final_fields;
    dec_final->add_option("fields", final_fields, "F1 F2 F3 F4")->required()->expected(4);

    // audit-verify / config
    auto* verify = app.add_subcommand("audit-verify", "Verify an audit log hash chain");
    std::string log_path;
    verify->add_option("log", log_path, "Audit log (default from config)");
    auto* show_config = app.add_subcommand("config", "Print the effective configuration");
    auto* show_catalog = app.add_subcommand("catalog", "Print the identifier catalog in effect");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        const ServiceConfig config = load_config(config_path);

        if (*show_config) {
            print(config_to_json(config));
        } else if (*show_catalog) {
            std::cout << (config.identifiers_path.empty() ? IdentifierCatalog::builtin()
                                                          : IdentifierCatalog::from_file(config.identifiers_path))
                             .to_json()
                      << '\n';
        } else if (*serve) {
            Gateway gateway(Engine::from_config(config), serve_audit.empty() ? config.audit_log_path : serve_audit);
            const int bound = gateway.bind(host.empty() ? config.host : host, port < 0 ? config.port : port);
            std::fprintf(stderr, "ztac: listening on %s:%d\n", (host.empty() ? config.host : host).c_str(), bound);
            g_gateway = &gateway;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            gateway.listen();
            g_gateway = nullptr;
        } else if (*decide) {
            const Json body = read_json_file(decide_file);
            const auto engine = Engine::from_config(config);
            const auto request = parse_decide_request(body);
            const auto now = decide_now >= 0 ? decide_now : now_seconds();
            const auto decision = engine.decide(request, now);
            if (!decide_audit.empty()) AuditLog(decide_audit).append(body, decision, now);
            std::cout << canonical_dump(to_json(decision)) << '\n';
        } else if (*score) {
            const auto engine = Engine::from_config(config);
            std::cout << canonical_dump(engine.score_json(read_json_file(score_file))) << '\n';
        } else if (*gen) {
            std::ofstream file;
            if (!out_path.empty()) {
                file.open(out_path);
                if (!file) throw Error("cannot write '" + out_path + "'");
            }
            std::ostream& out = out_path.empty() ? std::cout : file;
            if (kind == "samples") {
                write_dataset(out, generate_labeled_dataset(seed, count, rate));
            } else if (kind == "attributes") {
                out << attributes_to_csv(generate_attributes(seed, count));
            } else if (kind == "corpus") {
                for (const auto& d : generate_corpus(seed, count)) out << d << '\n';
            } else {
                DecideRequest r;
                r.request = golden_request(seed);
                r.resources = {0x00A, 0x014, 1679944799, {}};
                r.has_expiry = true;
                out << to_json(r).dump(2) << '\n';
            }
        } else if (*eval) {
            std::ifstream in(dataset);
            if (!in) throw Error("cannot open '" + dataset + "'");
            const auto samples = read_dataset(in);
            const auto engine = Engine::from_config(config);
            auto scoring = config.engine.scoring;
            const auto report = evaluate(samples, engine.models().view(), scoring, threshold, threads);
            std::cout << (eval_json ? report_json(report) + "\n" : eval_csv ? report_csv(report) : report_table(report));
        } else if (*enc_comp) {
            std::cout << encode_component({static_cast<std::uint8_t>(group), static_cast<std::uint8_t>(level),
                                           static_cast<std::uint8_t>(access_type), score_bucket(bond), consent})
                      << '\n';
        } else if (*enc_final) {
            const auto f = encode_final({f_level, static_cast<std::uint16_t>(compute),
                                         static_cast<std::uint16_t>(storage), parse_time(expiry), flags,
                                         parse_ops(ops)});
            print({{"f1", f.f1_level}, {"f2", f.f2_resources}, {"f3", f.f3_constraints}, {"f4", f.f4_operations}});
        } else if (*dec_comp) {
            const auto c = decode_component(hex);
            print({{"group", c.group},
                   {"level", c.level},
                   {"access_type", c.access_type},
                   {"bond_bucket", c.bond_bucket},
                   {"consent", c.consent}});
        } else if (*dec_ctx) {
            const auto p = split_context_array(hex);
            print({{"user", p.user}, {"device", p.device}, {"output", p.output}, {"ct_bucket", p.ct_bucket}});
        } else if (*dec_final) {
            const auto v = decode_final({final_fields[0], final_fields[1], final_fields[2], final_fields[3]});
            const auto k = AccessConstraints::unpack(v.constraint_flags);
            print({{"level", v.level},
                   {"compute_id", v.compute_id},
                   {"storage_id", v.storage_id},
                   {"expiry", v.expiry},
                   {"expiry_utc", format_utc(v.expiry)},
                   {"constraint_flags", v.constraint_flags},
                   {"constraints",
                    {{"location_bound", k.location_bound},
                     {"trial_limited", k.trial_limited},
                     {"size_capped", k.size_capped},
                     {"max_trials", k.max_trials},
                     {"size_cap_mib", k.size_cap_mib}}},
                   {"operations", ops_to_string(v.operations)}});
        } else if (*verify) {
            const auto path = log_path.empty() ? config.audit_log_path : log_path;
            const auto result = verify_audit_log(path);
            if (result.ok) {
                std::cout << "ok: " << result.entries << " entries\n";
            } else {
                std::cout << "broken at sequence " << *result.first_broken << ": " << result.reason << '\n';
                return kValidationError;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "ztac: " << e.what() << '\n';
        return kValidationError;
    }
    return 0;
}
