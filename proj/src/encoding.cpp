#include "ztac/encoding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "ztac/error.hpp"
#include "ztac/text.hpp"

namespace ztac {

namespace {

constexpr char kHex[] = "0123456789ABCDEF";

void put_hex(std::string& out, std::uint64_t value, int digits) {
    for (int i = digits - 1; i >= 0; --i) out.push_back(kHex[(value >> (4 * i)) & 0xF]);
}

std::uint64_t read_hex(std::string_view text, const char* what) {
    std::uint64_t value = 0;
    for (char c : text) {
        int d;
        if (c >= '0' && c <= '9') {
            d = c - '0';
        } else if (c >= 'A' && c <= 'F') {
            d = c - 'A' + 10;
        } else {
            throw ParseError(std::string(what) + ": invalid hex digit '" + std::string(1, c) + "'", 0);
        }
        value = (value << 4) | static_cast<std::uint64_t>(d);
    }
    return value;
}

void require_length(std::string_view text, std::size_t n, const char* what) {
    if (text.size() != n) {
        throw ParseError(std::string(what) + ": expected " + std::to_string(n) + " hex digits, got " +
                             std::to_string(text.size()),
                         0);
    }
}

// Days since 1970-01-01 of a proleptic Gregorian date, and back.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2);
}

}  // namespace

Operation parse_operation(std::string_view text) {
    const auto t = normalize(text);
    if (t == "c" || t == "create") return Operation::Create;
    if (t == "r" || t == "read") return Operation::Read;
    if (t == "u" || t == "update") return Operation::Update;
    if (t == "d" || t == "delete") return Operation::Delete;
    throw InvalidArgument("unknown operation '" + std::string(text) + "'");
}

std::string_view to_string(Operation op) {
    switch (op) {
        case Operation::Create: return "Create";
        case Operation::Read: return "Read";
        case Operation::Update: return "Update";
        case Operation::Delete: return "Delete";
    }
    return "Unknown";
}

std::uint8_t score_bucket(double score) {
    const double s = std::isfinite(score) ? std::clamp(score, 0.0, 1.0) : 0.0;
    return static_cast<std::uint8_t>(std::lround(s * 255.0));
}

std::string encode_component(const ComponentFields& f) {
    if (f.level > kMaxAccessLevel) throw InvalidArgument("access level must lie in 0-4, got " + std::to_string(f.level));
    std::string out;
    out.reserve(kComponentDigits);
    put_hex(out, f.group, 2);
    put_hex(out, 0x10u + f.level, 2);
    put_hex(out, f.access_type, 2);
    put_hex(out, f.bond_bucket, 2);
    put_hex(out, f.consent ? 1u : 0u, 2);
    return out;
}

ComponentFields decode_component(std::string_view hex) {
    require_length(hex, kComponentDigits, "component encoding");
    ComponentFields f;
    f.group = static_cast<std::uint8_t>(read_hex(hex.substr(0, 2), "group"));
    const auto level = read_hex(hex.substr(2, 2), "access level");
    if (level < 0x10 || level > 0x10u + kMaxAccessLevel) {
        throw ParseError("access level field must lie in 10-14, got " + std::string(hex.substr(2, 2)), 0);
    }
    f.level = static_cast<std::uint8_t>(level - 0x10);
    f.access_type = static_cast<std::uint8_t>(read_hex(hex.substr(4, 2), "access type"));
    f.bond_bucket = static_cast<std::uint8_t>(read_hex(hex.substr(6, 2), "bond bucket"));
    const auto consent = read_hex(hex.substr(8, 2), "consent");
    if (consent > 1) throw ParseError("consent field must be 00 or 01, got " + std::string(hex.substr(8, 2)), 0);
    f.consent = consent == 1;
    return f;
}

std::string build_context_array(std::string_view user, std::string_view device, std::string_view output, double ct) {
    for (auto part : {user, device, output}) decode_component(part);
    std::string out;
    out.reserve(kContextDigits);
    out.append(user).append(device).append(output);
    put_hex(out, score_bucket(ct), 2);
    return out;
}

ContextParts split_context_array(std::string_view context) {
    require_length(context, kContextDigits, "context array");
    ContextParts parts{std::string(context.substr(0, 10)), std::string(context.substr(10, 10)),
                       std::string(context.substr(20, 10)),
                       static_cast<std::uint8_t>(read_hex(context.substr(30, 2), "ct bucket"))};
    for (const auto& p : {parts.user, parts.device, parts.output}) decode_component(p);
    return parts;
}

std::uint32_t AccessConstraints::pack() const {
    std::uint32_t word = 0;
    if (location_bound) word |= 0x01;
    if (trial_limited) word |= 0x02;
    if (size_capped) word |= 0x04;
    word |= static_cast<std::uint32_t>(max_trials) << 8;
    word |= static_cast<std::uint32_t>(size_cap_mib) << 16;
    return word;
}

AccessConstraints AccessConstraints::unpack(std::uint32_t word) {
    AccessConstraints c;
    c.location_bound = (word & 0x01) != 0;
    c.trial_limited = (word & 0x02) != 0;
    c.size_capped = (word & 0x04) != 0;
    c.max_trials = static_cast<std::uint8_t>((word >> 8) & 0xFF);
    c.size_cap_mib = static_cast<std::uint16_t>(word >> 16);
    return c;
}

std::string encode_epoch(std::int64_t epoch_seconds) {
    if (epoch_seconds < 0 || epoch_seconds >= (std::int64_t{1} << 32)) {
        throw InvalidArgument("expiry must lie in [1970-01-01T00:00:00Z, 2^32 s), got " + std::to_string(epoch_seconds));
    }
    std::string out;
    put_hex(out, static_cast<std::uint64_t>(epoch_seconds), 8);
    return out;
}

FinalFields encode_final(const FinalFieldValues& v) {
    if (v.level < 0 || v.level > kMaxAccessLevel) throw InvalidArgument("access level must lie in 0-4");
    if (v.compute_id > 0xFFF || v.storage_id > 0xFFF) throw InvalidArgument("resource ids must lie in 0-4095");
    if (v.operations > kAllOperations) throw InvalidArgument("operation mask must lie in 0-F");
    FinalFields f;
    put_hex(f.f1_level, 0x10u + static_cast<unsigned>(v.level), 2);
    put_hex(f.f2_resources, v.compute_id, 3);
    put_hex(f.f2_resources, v.storage_id, 3);
    f.f3_constraints = encode_epoch(v.expiry);
    put_hex(f.f3_constraints, v.constraint_flags, 8);
    put_hex(f.f4_operations, v.operations, 1);
    return f;
}

FinalFieldValues decode_final(const FinalFields& f) {
    require_length(f.f1_level, 2, "F1");
    require_length(f.f2_resources, 6, "F2");
    require_length(f.f3_constraints, 16, "F3");
    require_length(f.f4_operations, 1, "F4");
    FinalFieldValues v;
    const auto level = read_hex(f.f1_level, "F1");
    if (level < 0x10 || level > 0x10u + kMaxAccessLevel) throw ParseError("F1 must lie in 10-14", 0);
    v.level = static_cast<int>(level - 0x10);
    v.compute_id = static_cast<std::uint16_t>(read_hex(std::string_view(f.f2_resources).substr(0, 3), "F2"));
    v.storage_id = static_cast<std::uint16_t>(read_hex(std::string_view(f.f2_resources).substr(3, 3), "F2"));
    v.expiry = static_cast<std::int64_t>(read_hex(std::string_view(f.f3_constraints).substr(0, 8), "F3"));
    v.constraint_flags = static_cast<std::uint32_t>(read_hex(std::string_view(f.f3_constraints).substr(8, 8), "F3"));
    v.operations = static_cast<OperationMask>(read_hex(f.f4_operations, "F4"));
    return v;
}

std::string format_utc(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(y), m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::int64_t parse_utc(std::string_view s) {
    // YYYY-MM-DDTHH:MM:SSZ
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != 'Z') {
        throw ParseError("expected YYYY-MM-DDTHH:MM:SSZ, got '" + std::string(s) + "'", 0);
    }
    const auto num = [&](std::size_t pos, std::size_t len) {
        unsigned v = 0;
        auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
        if (ec != std::errc() || ptr != s.data() + pos + len) throw ParseError("bad number in '" + std::string(s) + "'", 0);
        return v;
    };
    const unsigned y = num(0, 4), mo = num(5, 2), d = num(8, 2), h = num(11, 2), mi = num(14, 2), sec = num(17, 2);
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 59) {
        throw ParseError("out-of-range date/time in '" + std::string(s) + "'", 0);
    }
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    static constexpr unsigned kMonthDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (d > kMonthDays[mo - 1] + (mo == 2 && leap ? 1u : 0u)) {
        throw ParseError("no such day in '" + std::string(s) + "'", 0);
    }
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + sec;
}

}  // namespace ztac
