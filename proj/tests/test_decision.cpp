#include <doctest.h>

#include <algorithm>
#include <random>

#include "ztac/decision.hpp"
#include "ztac/error.hpp"
#include "ztac/models.hpp"
#include "ztac/synth.hpp"

using namespace ztac;

namespace {

const ResourceGrant kGrant{0x00A, 0x014, 1679944799, {true, false, false, 0, 0}};

int rank(AccessStatus s) { return static_cast<int>(s); }

void strip_consent(AccessRequest& r) {
    for (auto* list : {&r.triple.user, &r.triple.device, &r.triple.data}) {
        std::erase_if(*list, [](const Attribute& a) { return a.name == "User consent" || a.name == "Patient consent"; });
    }
}

}  // namespace

TEST_CASE("decide reproduces the printed decision table") {
    const DecisionThresholds t;
    struct Row {
        double ct, bt;
        AccessStatus expected;
    };
    const Row rows[] = {
        {0.0, 0.0, AccessStatus::Deny},   {0.99, 0.0, AccessStatus::Deny},  {0.99, 0.5, AccessStatus::Verify},
        {0.99, 0.9, AccessStatus::Accept}, {0.99, 0.83, AccessStatus::Accept}, {0.99, 0.79, AccessStatus::Accept},
    };
    for (const auto& r : rows) {
        INFO(r.ct, " ", r.bt);
        CHECK(decide(r.ct, r.bt, t) == r.expected);
    }
    CHECK(decide(0.0, 1.0, t) == AccessStatus::Deny);
    CHECK(decide(0.6, 1.0, t) == AccessStatus::Verify);
    CHECK(decide(0.99, 0.7, t) == AccessStatus::Accept);
    CHECK(decide(0.98, 0.9, t) == AccessStatus::Verify);
}

TEST_CASE("decide is monotone in ct and bt") {
    const DecisionThresholds t;
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(i / 40.0);
    grid.push_back(0.99);
    grid.push_back(0.7);
    for (double ct1 : grid)
        for (double ct2 : grid)
            for (double bt1 : grid)
                for (double bt2 : grid) {
                    if (ct2 >= ct1 && bt2 >= bt1) CHECK(rank(decide(ct2, bt2, t)) >= rank(decide(ct1, bt1, t)));
                }
}

TEST_CASE("threshold and request validation") {
    CHECK_THROWS_AS((DecisionThresholds{0.0, 0.7}.validate()), InvalidArgument);
    CHECK_THROWS_AS((DecisionThresholds{0.99, 1.5}.validate()), InvalidArgument);
    AccessRequest r;
    r.requested_level = 5;
    CHECK_THROWS_AS(r.validate(), InvalidArgument);
    r.requested_level = -1;
    CHECK_THROWS_AS(r.validate(), InvalidArgument);
    r.requested_level = 4;
    CHECK_NOTHROW(r.validate());
}

TEST_CASE("golden request is accepted with bt >= 0.9") {
    const auto& models = default_models();
    const EngineConfig config;
    const auto req = golden_request(kDefaultCorpusSeed);
    const auto d = evaluate_request(req, kGrant, models.view(), config);
    CHECK(d.status == AccessStatus::Accept);
    CHECK(d.scored);
    CHECK(d.scores.bond.bt >= 0.9);
    CHECK(d.compliance.verdict == ComplianceVerdict::Pass);
    CHECK(d.fields.f1_level == "12");
    CHECK(d.fields.f2_resources == "00A014");
    CHECK(d.fields.f3_constraints == "6421EC5F00000001");
    CHECK(d.fields.f4_operations == "6");
    CHECK(d.context.size() == 32);
    CHECK(d.context.substr(30) == "FF");
    const auto parts = split_context_array(d.context);
    CHECK(parts.user == d.components[0]);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto c = decode_component(d.components[i]);
        CHECK(c.group == i + 1);
        CHECK(c.level == 2);
        CHECK(c.access_type == 0x6);
        CHECK(c.consent);
    }

    // Deterministic.
    const auto again = evaluate_request(req, kGrant, models.view(), config);
    CHECK(again.context == d.context);
    CHECK(again.fields == d.fields);
    CHECK(again.scores.bond.bt == d.scores.bond.bt);
}

TEST_CASE("failing every microservice check denies with no grant") {
    auto req = golden_request(7);
    req.checks = {};
    const auto d = evaluate_request(req, kGrant, default_models().view(), EngineConfig{});
    CHECK(d.status == AccessStatus::Deny);
    CHECK(d.scores.ct == 0.0);
    CHECK(d.fields.f4_operations == "0");
    CHECK(d.fields.f2_resources == "000000");
    CHECK(d.context.substr(30) == "00");
    CHECK_FALSE(d.reasons.empty());
}

TEST_CASE("compliance block skips scoring") {
    auto req = golden_request(11);
    strip_consent(req);
    req.triple.user.push_back({"SSN", "123-45-6789"});
    const auto d = evaluate_request(req, kGrant, default_models().view(), EngineConfig{});
    CHECK(d.status == AccessStatus::Deny);
    CHECK_FALSE(d.scored);
    CHECK(d.compliance.verdict == ComplianceVerdict::Block);
    CHECK(std::any_of(d.reasons.begin(), d.reasons.end(),
                      [](const std::string& r) { return r.find("SSN identifier") != std::string::npos; }));
    CHECK(d.fields.f4_operations == "0");
    CHECK(d.fields.f2_resources == "000000");
    CHECK(d.scores.ct == doctest::Approx(1.0));
    for (const auto& c : d.components) CHECK_FALSE(decode_component(c).consent);
}

TEST_CASE("identifiers with consent pass the gate") {
    auto req = golden_request(11);
    req.triple.user.push_back({"SSN", "123-45-6789"});
    const auto d = evaluate_request(req, kGrant, default_models().view(), EngineConfig{});
    CHECK(d.compliance.verdict == ComplianceVerdict::Pass);
    CHECK(d.scored);
}

TEST_CASE("scoring failure degrades to Verify, never Accept") {
    auto req = golden_request(3);
    req.triple.device = {{"Device type", "zzzz qqqq"}};  // nothing embeddable
    const auto d = evaluate_request(req, kGrant, default_models().view(), EngineConfig{});
    CHECK(d.status == AccessStatus::Verify);
    CHECK_FALSE(d.scored);
    REQUIRE_FALSE(d.reasons.empty());
    CHECK(d.fields.f4_operations == "0");
    CHECK(d.fields.f2_resources == "000000");
    CHECK(d.fields.f3_constraints.substr(0, 8) == "6421EC5F");
}

TEST_CASE("partial checks give Verify; Deny implies no grant") {
    const auto& models = default_models();
    std::mt19937_64 rng(17);
    for (int i = 0; i < 40; ++i) {
        auto req = golden_request(1000 + static_cast<std::uint64_t>(i));
        req.checks = {rng() % 2 == 1, rng() % 2 == 1, rng() % 2 == 1, rng() % 2 == 1};
        const auto d = evaluate_request(req, kGrant, models.view(), EngineConfig{});
        const bool all = req.checks.authentication && req.checks.authorization && req.checks.encryption &&
                         req.checks.logging;
        const bool none = !req.checks.authentication && !req.checks.authorization && !req.checks.encryption &&
                          !req.checks.logging;
        if (none) CHECK(d.status == AccessStatus::Deny);
        if (!all && !none) CHECK(d.status == AccessStatus::Verify);
        if (d.status == AccessStatus::Deny) {
            CHECK(d.fields.f4_operations == "0");
            CHECK(d.fields.f2_resources == "000000");
        }
        if (d.status != AccessStatus::Accept) CHECK(d.fields.f4_operations == "0");
    }
}
