#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ztac/audit.hpp"
#include "ztac/compliance.hpp"
#include "ztac/decision.hpp"
#include "ztac/encoding.hpp"
#include "ztac/eval.hpp"
#include "ztac/service.hpp"
#include "ztac/synth.hpp"
#include "ztac/text.hpp"
#include "ztac/trust.hpp"
#include "ztac/wire.hpp"

namespace py = pybind11;
using namespace ztac;

namespace {

Json parse(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
}

MicroserviceChecks checks_from(const std::array<bool, 4>& a) { return {a[0], a[1], a[2], a[3]}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Zero-trust access decision engine";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());

    m.def("tokenize", &tokenize, py::arg("text"));
    m.def("cosine_similarity",
          [](const std::vector<double>& a, const std::vector<double>& b) { return cosine_similarity(a, b); });
    m.def(
        "critical_trust",
        [](const std::array<bool, 4>& checks, const std::array<double, 4>& factors) {
            return critical_trust(checks_from(checks), {factors[0], factors[1], factors[2], factors[3]});
        },
        py::arg("checks"), py::arg("factors") = std::array<double, 4>{0.3, 0.4, 0.2, 0.1});
    m.def(
        "ct_status", [](double ct, double threshold) { return std::string(to_string(ct_status(ct, threshold))); },
        py::arg("ct"), py::arg("threshold") = 0.99);
    m.def(
        "decide",
        [](double ct, double bt, double ct_threshold, double bt_threshold) {
            return std::string(to_string(decide(ct, bt, {ct_threshold, bt_threshold})));
        },
        py::arg("ct"), py::arg("bt"), py::arg("ct_threshold") = 0.99, py::arg("bt_threshold") = 0.7);
    m.def("softmax_normalize", &softmax_normalize);
    m.def("bond_trust", &bond_trust);
    m.def(
        "bt_b_score",
        [](const std::string& candidate, const std::vector<std::string>& references, std::size_t n) {
            return bt_b_score(candidate, references, n);
        },
        py::arg("candidate"), py::arg("references"), py::arg("n") = 4);

    m.def(
        "encode_component",
        [](int group, int level, int access_type, double bond, bool consent) {
            if (group < 0 || group > 255 || access_type < 0 || access_type > 255 || level < 0) {
                throw InvalidArgument("group and access_type must lie in 0-255, level in 0-4");
            }
            return encode_component({static_cast<std::uint8_t>(group), static_cast<std::uint8_t>(level),
                                     static_cast<std::uint8_t>(access_type), score_bucket(bond), consent});
        },
        py::arg("group"), py::arg("level"), py::arg("access_type"), py::arg("bond"), py::arg("consent"));
    m.def("decode_component", [](const std::string& hex) {
        const auto c = decode_component(hex);
        py::dict d;
        d["group"] = c.group;
        d["level"] = c.level;
        d["access_type"] = c.access_type;
        d["bond_bucket"] = c.bond_bucket;
        d["consent"] = c.consent;
        return d;
    });
    m.def(
        "encode_final",
        [](int level, int compute_id, int storage_id, std::int64_t expiry, std::uint32_t flags, int ops) {
            if (compute_id < 0 || compute_id > 0xFFF || storage_id < 0 || storage_id > 0xFFF || ops < 0 || ops > 0xF) {
                throw InvalidArgument("compute/storage ids must lie in 0-4095 and ops in 0-15");
            }
            const auto f = encode_final({level, static_cast<std::uint16_t>(compute_id),
                                         static_cast<std::uint16_t>(storage_id), expiry, flags,
                                         static_cast<OperationMask>(ops)});
            return std::array<std::string, 4>{f.f1_level, f.f2_resources, f.f3_constraints, f.f4_operations};
        },
        py::arg("level"), py::arg("compute_id"), py::arg("storage_id"), py::arg("expiry"), py::arg("flags"),
        py::arg("ops"));
    m.def("decode_final", [](const std::array<std::string, 4>& f) {
        const auto v = decode_final({f[0], f[1], f[2], f[3]});
        py::dict d;
        d["level"] = v.level;
        d["compute_id"] = v.compute_id;
        d["storage_id"] = v.storage_id;
        d["expiry"] = v.expiry;
        d["flags"] = v.constraint_flags;
        d["ops"] = v.operations;
        return d;
    });
    m.def("format_utc", &format_utc);
    m.def("parse_utc", [](const std::string& s) { return parse_utc(s); });

    m.def(
        "scan_identifiers",
        [](const std::vector<std::pair<std::string, std::string>>& attributes, const std::string& text) {
            AttributeList list;
            for (const auto& [n, v] : attributes) list.push_back({n, v});
            py::list out;
            for (const auto& f : scan_identifiers(list, text)) {
                py::dict d;
                d["class"] = std::string(to_string(f.cls));
                d["source"] = f.source;
                d["excerpt"] = f.excerpt;
                out.append(d);
            }
            return out;
        },
        py::arg("attributes"), py::arg("text") = "");

    m.def(
        "generate_dataset",
        [](std::uint64_t seed, std::size_t n, double rate) {
            std::ostringstream out;
            write_dataset(out, generate_labeled_dataset(seed, n, rate));
            return out.str();
        },
        py::arg("seed"), py::arg("n"), py::arg("rate"));
    m.def(
        "golden_request",
        [](std::uint64_t seed) {
            DecideRequest r;
            r.request = golden_request(seed);
            return canonical_dump(to_json(r));
        },
        py::arg("seed"));
    m.def("canonical_dump", [](const std::string& json_text) { return canonical_dump(parse(json_text)); });
    m.def("verify_audit_log", [](const std::string& path) {
        const auto r = verify_audit_log(path);
        py::dict d;
        d["ok"] = r.ok;
        d["entries"] = r.entries;
        d["first_broken"] = r.first_broken ? py::cast(*r.first_broken) : py::none();
        d["reason"] = r.reason;
        return d;
    });

    py::class_<Engine>(m, "Engine")
        .def(py::init([](const std::string& config_json) {
                 return Engine::from_config(config_from_json(parse(config_json)));
             }),
             py::arg("config_json") = "{}")
        .def(
            "score", [](const Engine& e, const std::string& body) { return canonical_dump(e.score_json(parse(body))); },
            py::arg("request_json"), py::call_guard<py::gil_scoped_release>())
        .def(
            "decide",
            [](const Engine& e, const std::string& body, std::int64_t now) {
                return canonical_dump(e.decide_json(parse(body), now));
            },
            py::arg("request_json"), py::arg("now"), py::call_guard<py::gil_scoped_release>())
        .def(
            "evaluate",
            [](const Engine& e, const std::string& jsonl, double threshold, unsigned threads) {
                std::istringstream in(jsonl);
                const auto samples = read_dataset(in);
                return report_json(evaluate(samples, e.models().view(), e.config().engine.scoring, threshold, threads));
            },
            py::arg("dataset_jsonl"), py::arg("threshold") = 0.7, py::arg("threads") = 1,
            py::call_guard<py::gil_scoped_release>());
}
