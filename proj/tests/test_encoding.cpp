#include <doctest.h>

#include <cmath>
#include <ctime>
#include <random>
#include <regex>

#include "ztac/encoding.hpp"
#include "ztac/error.hpp"

using namespace ztac;

namespace {

bool is_upper_hex(const std::string& s, std::size_t n) {
    return s.size() == n && std::regex_match(s, std::regex("[0-9A-F]*"));
}

// Independent hex formatter.
std::string oracle_hex(unsigned long long v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*llX", digits, v);
    return buf;
}

ComponentFields random_component(std::mt19937_64& rng) {
    return {static_cast<std::uint8_t>(rng() % 256), static_cast<std::uint8_t>(rng() % 5),
            static_cast<std::uint8_t>(rng() % 256), static_cast<std::uint8_t>(rng() % 256), rng() % 2 == 1};
}

}  // namespace

TEST_CASE("component encoding layout") {
    CHECK(encode_component({}) == "0010000000");
    CHECK(encode_component({0xAB, 4, 0x0F, score_bucket(1.0), true}) == "AB140FFF01");
    CHECK(score_bucket(1.0) == 0xFF);
    CHECK(score_bucket(0.0) == 0);
    CHECK(score_bucket(0.5) == 128);  // round(127.5) rounds half away from zero
    CHECK(score_bucket(2.0) == 0xFF);
    CHECK(score_bucket(-1.0) == 0);
    CHECK_THROWS_AS(encode_component({0, 5, 0, 0, false}), InvalidArgument);
}

TEST_CASE("component round-trip over 1000 random tuples against an snprintf oracle") {
    std::mt19937_64 rng(2023);
    for (int i = 0; i < 1000; ++i) {
        const auto f = random_component(rng);
        const auto hex = encode_component(f);
        CHECK(is_upper_hex(hex, 10));
        CHECK(hex == oracle_hex(f.group, 2) + oracle_hex(0x10 + f.level, 2) + oracle_hex(f.access_type, 2) +
                         oracle_hex(f.bond_bucket, 2) + oracle_hex(f.consent, 2));
        CHECK(decode_component(hex) == f);
    }
}

TEST_CASE("component decode errors") {
    CHECK_THROWS_AS(decode_component("001000000"), ParseError);      // 9 digits
    CHECK_THROWS_AS(decode_component("00100000000"), ParseError);    // 11 digits
    CHECK_THROWS_AS(decode_component("0010000G00"), ParseError);     // non-hex
    CHECK_THROWS_AS(decode_component("00100000a0"), ParseError);     // lowercase
    CHECK_THROWS_AS(decode_component("0015000000"), ParseError);     // level 5
    CHECK_THROWS_AS(decode_component("0009000000"), ParseError);     // below marker
    CHECK_THROWS_AS(decode_component("0010000002"), ParseError);     // consent 02
}

TEST_CASE("context array") {
    const auto z = encode_component({});
    const auto ctx = build_context_array(z, z, z, 0.0);
    CHECK(ctx == "00100000000010000000001000000000");
    CHECK(ctx.size() == kContextDigits);
    CHECK(build_context_array(z, z, z, 1.0).substr(30) == "FF");
    CHECK_THROWS_AS(build_context_array("00", z, z, 0.0), ParseError);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto u = encode_component(random_component(rng));
        const auto d = encode_component(random_component(rng));
        const auto o = encode_component(random_component(rng));
        const double ct = static_cast<double>(rng() % 1001) / 1000.0;
        const auto c = build_context_array(u, d, o, ct);
        CHECK(is_upper_hex(c, 32));
        const auto parts = split_context_array(c);
        CHECK(parts.user == u);
        CHECK(parts.device == d);
        CHECK(parts.output == o);
        CHECK(parts.ct_bucket == static_cast<int>(std::lround(ct * 255)));
        CHECK(c.substr(0, 10) + c.substr(10, 10) + c.substr(20, 10) + c.substr(30, 2) == c);
    }
    CHECK_THROWS_AS(split_context_array(ctx.substr(1)), ParseError);
}

TEST_CASE("final decision fields: printed examples") {
    FinalFieldValues v;
    v.level = 0;
    v.expiry = 1679944799;
    v.operations = kAllOperations;
    const auto f = encode_final(v);
    CHECK(f.f1_level == "10");
    CHECK(f.f4_operations == "F");
    CHECK(f.f3_constraints.substr(0, 8) == "6421EC5F");
    CHECK(format_utc(1679944799) == "2023-03-27T19:19:59Z");
    CHECK(parse_utc("2023-03-27T19:19:59Z") == 1679944799);
    CHECK(decode_final(f) == v);

    CHECK((Operation::Create | Operation::Read | Operation::Update | Operation::Delete) == kAllOperations);
    CHECK((Operation::Read | Operation::Update) == 0x6);

    v.compute_id = 0x00A;
    v.storage_id = 0x014;
    v.constraint_flags = AccessConstraints{true, true, false, 3, 0}.pack();
    const auto g = encode_final(v);
    CHECK(g.f2_resources == "00A014");
    CHECK(g.f3_constraints == "6421EC5F00000303");
}

TEST_CASE("final decision round-trip over 1000 random field sets") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        FinalFieldValues v;
        v.level = static_cast<int>(rng() % 5);
        v.compute_id = static_cast<std::uint16_t>(rng() % 4096);
        v.storage_id = static_cast<std::uint16_t>(rng() % 4096);
        v.expiry = static_cast<std::int64_t>(rng() % (1ULL << 32));
        v.constraint_flags = static_cast<std::uint32_t>(rng());
        v.operations = static_cast<OperationMask>(rng() % 16);
        const auto f = encode_final(v);
        CHECK(is_upper_hex(f.f1_level, 2));
        CHECK(is_upper_hex(f.f2_resources, 6));
        CHECK(is_upper_hex(f.f3_constraints, 16));
        CHECK(is_upper_hex(f.f4_operations, 1));
        CHECK(f.f3_constraints == oracle_hex(static_cast<unsigned long long>(v.expiry), 8) +
                                      oracle_hex(v.constraint_flags, 8));
        CHECK(decode_final(f) == v);
    }
}

TEST_CASE("final decision range and decode errors") {
    FinalFieldValues v;
    v.level = 5;
    CHECK_THROWS_AS(encode_final(v), InvalidArgument);
    v.level = 0;
    v.compute_id = 4096;
    CHECK_THROWS_AS(encode_final(v), InvalidArgument);
    v.compute_id = 0;
    v.expiry = -1;
    CHECK_THROWS_AS(encode_final(v), InvalidArgument);
    v.expiry = std::int64_t{1} << 32;
    CHECK_THROWS_AS(encode_final(v), InvalidArgument);
    v.expiry = (std::int64_t{1} << 32) - 1;
    CHECK(encode_final(v).f3_constraints.substr(0, 8) == "FFFFFFFF");
    v.expiry = 0;
    v.operations = 16;
    CHECK_THROWS_AS(encode_final(v), InvalidArgument);

    const FinalFields ok{"10", "000000", "0000000000000000", "0"};
    CHECK_NOTHROW(decode_final(ok));
    auto bad = ok;
    bad.f1_level = "15";
    CHECK_THROWS_AS(decode_final(bad), ParseError);
    bad = ok;
    bad.f2_resources = "00000";
    CHECK_THROWS_AS(decode_final(bad), ParseError);
    bad = ok;
    bad.f3_constraints = "000000000000000Z";
    CHECK_THROWS_AS(decode_final(bad), ParseError);
    bad = ok;
    bad.f4_operations = "";
    CHECK_THROWS_AS(decode_final(bad), ParseError);
}

TEST_CASE("constraint word packing") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 500; ++i) {
        AccessConstraints c{rng() % 2 == 1, rng() % 2 == 1, rng() % 2 == 1, static_cast<std::uint8_t>(rng()),
                            static_cast<std::uint16_t>(rng())};
        CHECK(AccessConstraints::unpack(c.pack()) == c);
    }
    CHECK(AccessConstraints{false, false, true, 0, 512}.pack() == 0x02000004u);
}

TEST_CASE("UTC formatting matches timegm/gmtime_r and is locale independent") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 2000; ++i) {
        const auto t = static_cast<std::int64_t>(rng() % (1ULL << 32));
        std::tm tm{};
        const std::time_t tt = static_cast<std::time_t>(t);
        gmtime_r(&tt, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        CHECK(format_utc(t) == buf);
        CHECK(parse_utc(buf) == t);
    }
    CHECK(format_utc(0) == "1970-01-01T00:00:00Z");
    CHECK(parse_utc("2024-02-29T00:00:00Z") == 1709164800);
    CHECK_THROWS_AS(parse_utc("2023-02-29T00:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_utc("2023-04-31T00:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_utc("2023-03-27 19:19:59Z"), ParseError);
    CHECK_THROWS_AS(parse_utc("2023-13-01T00:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_utc("2023-03-27T24:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_utc("2023-03-27T19:19:59+02:00"), ParseError);
}

TEST_CASE("operation names") {
    CHECK(parse_operation("create") == Operation::Create);
    CHECK(parse_operation("R") == Operation::Read);
    CHECK(parse_operation("Update") == Operation::Update);
    CHECK(parse_operation("d") == Operation::Delete);
    CHECK_THROWS_AS(parse_operation("x"), InvalidArgument);
    CHECK_THROWS_AS(parse_operation(""), InvalidArgument);
}
