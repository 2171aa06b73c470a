#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ztac/decision.hpp"
#include "ztac/wire.hpp"

namespace ztac {

inline constexpr std::string_view kGenesisHash =
    "0000000000000000000000000000000000000000000000000000000000000000";

/// Audit record of one decision. Fields: sequence (from 1), timestamp (UTC epoch
/// seconds), request_digest (SHA-256 of the canonical request), status, ct, bt_a,
/// bt_b, bt (null when unscored), components, context, fields, prev_hash and
/// entry_hash = SHA-256 of the canonical entry without entry_hash.
Json make_audit_entry(std::uint64_t sequence, std::int64_t timestamp, const std::string& request_digest,
                      const FinalDecision& decision, const std::string& prev_hash);

std::string audit_entry_hash(const Json& entry);

struct AuditVerifyResult {
    bool ok = true;
    std::uint64_t entries = 0;                 // entries checked before the first break
    std::optional<std::uint64_t> first_broken;  // sequence of the first invalid entry
    std::string reason;
};

/// Checks every line is a canonical entry with the expected sequence, a correct
/// entry_hash, and prev_hash equal to the previous entry_hash (genesis: all zeros).
/// A final line without its newline is reported as broken.
AuditVerifyResult verify_audit_text(std::string_view content);
/// Throws Error when the file does not exist or cannot be read.
AuditVerifyResult verify_audit_log(const std::string& path);

// Append-only JSON-lines audit log with a single serialized writer. Each entry is
// written with one write(2) and fsync'd before append returns.
class AuditLog {
public:
    /// Opens or creates `path`. A torn final line left by a crash is truncated;
    /// any other chain break throws Error rather than extending a corrupt log.
    explicit AuditLog(std::string path);
    ~AuditLog();
    AuditLog(const AuditLog&) = delete;
    AuditLog& operator=(const AuditLog&) = delete;

    Json append(const Json& request, const FinalDecision& decision, std::int64_t timestamp);

    /// Entries with from <= sequence <= to; empty when the range is invalid or out of bounds.
    std::vector<Json> read(std::uint64_t from, std::uint64_t to) const;

    std::uint64_t size() const;
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
    int fd_ = -1;
    mutable std::mutex mutex_;
    std::uint64_t last_sequence_ = 0;
    std::string last_hash_;
};

}  // namespace ztac
