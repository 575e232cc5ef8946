#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ei/serialization.hpp"

namespace ei {

enum class StoreErrc { invalid_id, duplicate_id, phase_regression, invalid_record, io };

class StoreError : public Error {
 public:
  StoreError(StoreErrc code, const std::string& what) : Error(what), code_(code) {}
  StoreErrc code() const noexcept { return code_; }

 private:
  StoreErrc code_;
};

inline constexpr std::size_t kSessionIdLength = 32;

/// Session ids are 128 random bits written as 32 lowercase hex digits.
inline bool valid_session_id(std::string_view id) {
  return id.size() == kSessionIdLength && std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

inline std::string format_session_id(std::uint64_t hi, std::uint64_t lo) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id(kSessionIdLength, '0');
  for (int i = 0; i < 16; ++i) {
    id[static_cast<std::size_t>(15 - i)] = kHex[(hi >> (4 * i)) & 0xf];
    id[static_cast<std::size_t>(31 - i)] = kHex[(lo >> (4 * i)) & 0xf];
  }
  return id;
}

inline std::string random_session_id() {
  std::random_device rd;
  const auto word = [&] {
    return (static_cast<std::uint64_t>(rd()) << 32) | static_cast<std::uint64_t>(rd());
  };
  const auto hi = word();
  return format_session_id(hi, word());
}

/// Persistence for interview sessions and the feedback baseline.
///
/// Implementations are safe for concurrent use. Writes for a session must
/// never move its phase backwards.
class SessionStore {
 public:
  using BaselineUpdate = std::function<BaselineStats(const std::optional<BaselineStats>&)>;

  virtual ~SessionStore() = default;

  /// Adds a new session; fails if the id is already taken.
  virtual void insert_session(const SessionRecord& record) = 0;
  /// Inserts or replaces a session, rejecting writes that regress its phase.
  virtual void put_session(const SessionRecord& record) = 0;
  virtual std::optional<SessionRecord> get_session(std::string_view session_id) const = 0;
  /// Snapshot ordered by creation time, then id.
  virtual std::vector<SessionRecord> export_sessions(bool completed_only) const = 0;
  virtual std::optional<BaselineStats> baseline() const = 0;
  /// Atomically replaces the baseline with `update(current)` and returns it.
  virtual BaselineStats update_baseline(const BaselineUpdate& update) = 0;
};

/// In-memory store. Also the index behind FileSessionStore, which persists
/// each accepted write through the `persist` hook before applying it.
class MemorySessionStore : public SessionStore {
 public:
  void insert_session(const SessionRecord& record) override {
    std::lock_guard lock(mutex_);
    check_record(record);
    if (sessions_.count(record.session_id) != 0) {
      throw StoreError(StoreErrc::duplicate_id, "session id already exists");
    }
    persist(session_line(record));
    sessions_[record.session_id] = record;
  }

  void put_session(const SessionRecord& record) override {
    std::lock_guard lock(mutex_);
    check_record(record);
    if (const auto it = sessions_.find(record.session_id); it != sessions_.end()) {
      if (progress_key(record.state) < progress_key(it->second.state)) {
        throw StoreError(StoreErrc::phase_regression,
                         "write would move session back from phase '" +
                             std::string(to_string(it->second.state.phase.kind)) + "'");
      }
    }
    persist(session_line(record));
    sessions_[record.session_id] = record;
  }

  std::optional<SessionRecord> get_session(std::string_view session_id) const override {
    if (!valid_session_id(session_id)) {
      throw StoreError(StoreErrc::invalid_id, "malformed session id");
    }
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<SessionRecord> export_sessions(bool completed_only) const override {
    std::vector<SessionRecord> out;
    {
      std::lock_guard lock(mutex_);
      for (const auto& [id, r] : sessions_) {
        if (!completed_only || r.completed) out.push_back(r);
      }
    }
    std::sort(out.begin(), out.end(), [](const SessionRecord& a, const SessionRecord& b) {
      return std::tie(a.created_at_ms, a.session_id) < std::tie(b.created_at_ms, b.session_id);
    });
    return out;
  }

  std::optional<BaselineStats> baseline() const override {
    std::lock_guard lock(mutex_);
    return baseline_;
  }

  BaselineStats update_baseline(const BaselineUpdate& update) override {
    std::lock_guard lock(mutex_);
    auto next = update(baseline_);
    persist(json{{"type", "baseline"}, {"baseline", baseline_to_json(next)}});
    baseline_ = next;
    return next;
  }

 protected:
  virtual void persist(const json& /*line*/) {}

  static json session_line(const SessionRecord& r) {
    return json{{"type", "session"}, {"record", record_to_json(r)}};
  }

  /// Applies one log line without validation; used when replaying.
  void apply_line(const json& line) {
    const auto type = line.at("type").get<std::string>();
    if (type == "session") {
      auto r = record_from_json(line.at("record"));
      sessions_[r.session_id] = std::move(r);
    } else if (type == "baseline") {
      baseline_ = baseline_from_json(line.at("baseline"));
    } else {
      throw ValidationError("unknown log entry type '" + type + "'");
    }
  }

  mutable std::mutex mutex_;

 private:
  static void check_record(const SessionRecord& r) {
    if (!valid_session_id(r.session_id)) {
      throw StoreError(StoreErrc::invalid_id, "malformed session id");
    }
    if (r.state.session_id != r.session_id || r.completed != r.state.completed()) {
      throw StoreError(StoreErrc::invalid_record, "record fields disagree with session state");
    }
  }

  std::map<std::string, SessionRecord, std::less<>> sessions_;
  std::optional<BaselineStats> baseline_;
};

/// Single-file store: an append-only log of JSON lines, replayed on open.
/// Every accepted write is flushed with fsync before it becomes visible, so
/// a crash loses at most the write in flight. A torn final line left by a
/// crash is discarded on open.
class FileSessionStore : public MemorySessionStore {
 public:
  explicit FileSessionStore(std::string path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0600);
    if (fd_ < 0) fail("cannot open");
    replay();
  }

  FileSessionStore(const FileSessionStore&) = delete;
  FileSessionStore& operator=(const FileSessionStore&) = delete;

  ~FileSessionStore() override {
    if (fd_ >= 0) ::close(fd_);
  }

  const std::string& path() const noexcept { return path_; }

 protected:
  void persist(const json& line) override {
    const std::string data = line.dump() + "\n";
    std::size_t written = 0;
    while (written < data.size()) {
      const auto n = ::write(fd_, data.data() + written, data.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail("write failed on");
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) fail("fsync failed on");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw StoreError(StoreErrc::io, what + " '" + path_ + "': " + std::strerror(errno));
  }

  void replay() {
    std::string content;
    std::array<char, 1 << 16> buf{};
    if (::lseek(fd_, 0, SEEK_SET) < 0) fail("cannot seek");
    while (true) {
      const auto n = ::read(fd_, buf.data(), buf.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        fail("read failed on");
      }
      if (n == 0) break;
      content.append(buf.data(), static_cast<std::size_t>(n));
    }
    const auto complete = content.rfind('\n');
    const std::size_t keep = complete == std::string::npos ? 0 : complete + 1;
    if (keep < content.size()) {
      if (::ftruncate(fd_, static_cast<off_t>(keep)) != 0) fail("cannot truncate torn tail of");
      content.resize(keep);
    }
    std::size_t line_no = 0;
    for (auto line : detail::split_lines(content)) {
      ++line_no;
      if (detail::trim(line).empty()) continue;
      try {
        apply_line(json::parse(line));
      } catch (const std::exception& e) {
        throw StoreError(StoreErrc::io, "corrupt entry at line " + std::to_string(line_no) +
                                            " of '" + path_ + "': " + e.what());
      }
    }
  }

  std::string path_;
  int fd_ = -1;
};

/// Export format: one session record JSON object per line.
inline void write_export(std::ostream& out, const std::vector<SessionRecord>& records) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

struct ExportReadResult {
  std::vector<SessionRecord> records;
  std::size_t corrupt_lines = 0;
};

/// Reads an export stream; lines that do not parse as records are counted
/// and skipped.
inline ExportReadResult read_export(std::istream& in) {
  ExportReadResult result;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    try {
      result.records.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception&) {
      ++result.corrupt_lines;
    }
  }
  return result;
}

}  // namespace ei
