#include "ztac/audit.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ztac {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

[[noreturn]] void sys_error(const std::string& what) {
    throw Error(what + ": " + std::strerror(errno));
}

}  // namespace

Json make_audit_entry(std::uint64_t sequence, std::int64_t timestamp, const std::string& request_digest,
                      const FinalDecision& d, const std::string& prev_hash) {
    Json e{{"sequence", sequence},
           {"timestamp", timestamp},
           {"request_digest", request_digest},
           {"status", to_string(d.status)},
           {"ct", wire_double(d.scores.ct)},
           {"bt_a", d.scored ? Json(wire_double(d.scores.bond.bt_a)) : Json(nullptr)},
           {"bt_b", d.scored ? Json(wire_double(d.scores.bond.bt_b)) : Json(nullptr)},
           {"bt", d.scored ? Json(wire_double(d.scores.bond.bt)) : Json(nullptr)},
           {"components", d.components},
           {"context", d.context},
           {"fields",
            {{"f1", d.fields.f1_level},
             {"f2", d.fields.f2_resources},
             {"f3", d.fields.f3_constraints},
             {"f4", d.fields.f4_operations}}},
           {"prev_hash", prev_hash}};
    e["entry_hash"] = audit_entry_hash(e);
    return e;
}

std::string audit_entry_hash(const Json& entry) {
    Json copy = entry;
    copy.erase("entry_hash");
    return sha256_hex(canonical_dump(copy));
}

AuditVerifyResult verify_audit_text(std::string_view content) {
    AuditVerifyResult r;
    std::string prev(kGenesisHash);
    std::uint64_t expected = 1;
    const auto broken = [&](std::string reason) {
        r.ok = false;
        r.first_broken = expected;
        r.reason = std::move(reason);
        return r;
    };
    std::size_t pos = 0;
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        if (nl == std::string_view::npos) return broken("incomplete final line");
        const auto line = content.substr(pos, nl - pos);
        pos = nl + 1;

        Json e;
        try {
            e = Json::parse(line);
        } catch (const Json::exception&) {
            return broken("line is not valid JSON");
        }
        if (!e.is_object()) return broken("line is not a JSON object");
        std::string canonical;
        try {
            canonical = canonical_dump(e);
        } catch (const Json::exception&) {
            return broken("entry is not valid UTF-8");
        }
        if (canonical != line) return broken("entry is not in canonical form");
        const auto seq = e.find("sequence");
        if (seq == e.end() || !seq->is_number_unsigned() || seq->get<std::uint64_t>() != expected) {
            return broken("sequence number out of order");
        }
        const auto ph = e.find("prev_hash");
        if (ph == e.end() || !ph->is_string() || ph->get<std::string>() != prev) {
            return broken("prev_hash does not match the previous entry");
        }
        const auto eh = e.find("entry_hash");
        if (eh == e.end() || !eh->is_string() || eh->get<std::string>() != audit_entry_hash(e)) {
            return broken("entry_hash does not match the entry");
        }
        prev = eh->get<std::string>();
        ++expected;
        ++r.entries;
    }
    return r;
}

AuditVerifyResult verify_audit_log(const std::string& path) {
    struct stat st {};
    if (::stat(path.c_str(), &st) != 0) sys_error("cannot open audit log '" + path + "'");
    return verify_audit_text(read_file(path));
}

AuditLog::AuditLog(std::string path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) sys_error("cannot open audit log '" + path_ + "'");
    std::string content = read_file(path_);
    const auto last_nl = content.rfind('\n');
    const std::size_t complete = last_nl == std::string::npos ? 0 : last_nl + 1;
    if (complete != content.size()) {
        if (::ftruncate(fd_, static_cast<off_t>(complete)) != 0) sys_error("cannot truncate torn audit entry");
        content.resize(complete);
    }
    const auto check = verify_audit_text(content);
    if (!check.ok) {
        ::close(fd_);
        throw Error("audit log '" + path_ + "' is corrupt at sequence " + std::to_string(*check.first_broken) + ": " +
                    check.reason);
    }
    last_sequence_ = check.entries;
    last_hash_ = std::string(kGenesisHash);
    if (complete > 0) {
        const auto prev_nl = complete >= 2 ? content.rfind('\n', complete - 2) : std::string::npos;
        const std::size_t begin = prev_nl == std::string::npos ? 0 : prev_nl + 1;
        last_hash_ = Json::parse(content.substr(begin, complete - 1 - begin)).at("entry_hash").get<std::string>();
    }
}

AuditLog::~AuditLog() {
    if (fd_ >= 0) ::close(fd_);
}

Json AuditLog::append(const Json& request, const FinalDecision& decision, std::int64_t timestamp) {
    const std::string digest = sha256_hex(canonical_dump(request));
    std::lock_guard lock(mutex_);
    Json entry = make_audit_entry(last_sequence_ + 1, timestamp, digest, decision, last_hash_);
    const std::string line = canonical_dump(entry) + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
        const auto n = ::write(fd_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            sys_error("audit append failed");
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) sys_error("audit fsync failed");
    ++last_sequence_;
    last_hash_ = entry["entry_hash"].get<std::string>();
    return entry;
}

std::vector<Json> AuditLog::read(std::uint64_t from, std::uint64_t to) const {
    std::vector<Json> out;
    if (from == 0 || from > to) return out;
    const std::string content = read_file(path_);
    std::uint64_t seq = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        if (nl == std::string::npos) break;  // entry still being written
        ++seq;
        if (seq >= from && seq <= to) out.push_back(Json::parse(content.substr(pos, nl - pos)));
        if (seq >= to) break;
        pos = nl + 1;
    }
    return out;
}

std::uint64_t AuditLog::size() const {
    std::lock_guard lock(mutex_);
    return last_sequence_;
}

}  // namespace ztac
