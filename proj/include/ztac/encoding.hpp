#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ztac {

// CRUD operation bits; all four together encode as "F".
enum class Operation : std::uint8_t { Create = 0x8, Read = 0x4, Update = 0x2, Delete = 0x1 };

using OperationMask = std::uint8_t;

inline constexpr OperationMask kAllOperations = 0xF;

constexpr OperationMask operator|(Operation a, Operation b) {
    return static_cast<OperationMask>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}
constexpr OperationMask operator|(OperationMask a, Operation b) {
    return static_cast<OperationMask>(a | static_cast<std::uint8_t>(b));
}

// Accepts "create"/"c", "read"/"r", "update"/"u", "delete"/"d" in any case.
Operation parse_operation(std::string_view text);
std::string_view to_string(Operation op);

inline constexpr int kMaxAccessLevel = 4;

// Five 2-digit hex fields of one zero-trust component (user, device or output).
struct ComponentFields {
    std::uint8_t group = 0;        // 00-FF
    std::uint8_t level = 0;        // 0-4, encoded as 10-14
    std::uint8_t access_type = 0;  // 00-FF
    std::uint8_t bond_bucket = 0;  // round(score * 255)
    bool consent = false;          // 00 or 01

    bool operator==(const ComponentFields&) const = default;
};

/// round(score * 255) of a score clamped to [0, 1].
std::uint8_t score_bucket(double score);

/// 10 uppercase hex digits: group | 10+level | type | bond | consent.
/// Throws InvalidArgument when level > 4.
std::string encode_component(const ComponentFields& fields);

/// Inverse of encode_component. Throws ParseError on wrong length, a non-hex
/// character, a level field outside 10-14, or a consent field other than 00/01.
ComponentFields decode_component(std::string_view hex);

inline constexpr std::size_t kComponentDigits = 10;
inline constexpr std::size_t kContextDigits = 32;

/// user(10) | device(10) | output(10) | ct bucket(2).
std::string build_context_array(std::string_view user, std::string_view device, std::string_view output, double ct);

struct ContextParts {
    std::string user;
    std::string device;
    std::string output;
    std::uint8_t ct_bucket = 0;

    bool operator==(const ContextParts&) const = default;
};

ContextParts split_context_array(std::string_view context);

// Constraint flag word carried in the low 8 digits of F3.
//   bits 0-7   flags: 0x01 location-bound, 0x02 trial-limited, 0x04 size-capped
//   bits 8-15  maximum access trials (meaningful when trial-limited)
//   bits 16-31 transfer size cap in MiB (meaningful when size-capped)
struct AccessConstraints {
    bool location_bound = false;
    bool trial_limited = false;
    bool size_capped = false;
    std::uint8_t max_trials = 0;
    std::uint16_t size_cap_mib = 0;

    std::uint32_t pack() const;
    static AccessConstraints unpack(std::uint32_t word);

    bool operator==(const AccessConstraints&) const = default;
};

struct FinalFieldValues {
    int level = 0;                 // 0-4
    std::uint16_t compute_id = 0;  // 0-4095
    std::uint16_t storage_id = 0;  // 0-4095
    std::int64_t expiry = 0;       // UTC epoch seconds, [0, 2^32)
    std::uint32_t constraint_flags = 0;
    OperationMask operations = 0;

    bool operator==(const FinalFieldValues&) const = default;
};

struct FinalFields {
    std::string f1_level;        // 2 digits, 10-14
    std::string f2_resources;    // 3 compute + 3 storage
    std::string f3_constraints;  // 8 expiry + 8 flags
    std::string f4_operations;   // 1 digit

    bool operator==(const FinalFields&) const = default;
};

/// Throws InvalidArgument for out-of-range values.
FinalFields encode_final(const FinalFieldValues& values);

/// Throws ParseError on malformed fields.
FinalFieldValues decode_final(const FinalFields& fields);

/// 8 uppercase hex digits of a UTC epoch; throws InvalidArgument outside [0, 2^32).
std::string encode_epoch(std::int64_t epoch_seconds);
/// ISO-8601 "YYYY-MM-DDTHH:MM:SSZ" of a UTC epoch, independent of locale and time zone.
std::string format_utc(std::int64_t epoch_seconds);
/// Inverse of format_utc; throws ParseError.
std::int64_t parse_utc(std::string_view iso8601);

}  // namespace ztac
