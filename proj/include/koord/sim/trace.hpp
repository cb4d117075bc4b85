#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "koord/motion/vehicle.hpp"

namespace koord::sim {

// Order matters: records at the same (time, pid) sort in this order.
enum class RecordKind { Event, Pose, Msg, Grant, Monitor };

std::string to_string(RecordKind k);
RecordKind parse_record_kind(const std::string& s);

/// Harness-level records (monitor verdicts) use this pid.
constexpr int kHarnessPid = -1;

struct TraceRecord {
    std::int64_t tick = 0;  // multiples of dt
    int pid = 0;
    RecordKind kind = RecordKind::Event;
    std::string payload;
};

class TraceError : public std::runtime_error {
public:
    TraceError(int line, const std::string& msg);
    int line() const { return line_; }

private:
    int line_;
};

/// Buffers the records of one tick, sorts and merges them, then writes
/// `time<TAB>pid<TAB>kind<TAB>payload` lines.
class TraceWriter {
public:
    TraceWriter(std::ostream* out, double dt) : out_(out), dt_(dt) {}

    void header(const std::vector<std::string>& lines);
    void add(std::int64_t tick, int pid, RecordKind kind, std::string payload);
    void flush();

    std::uint64_t lines_written() const { return lines_; }

private:
    std::ostream* out_;
    double dt_;
    std::int64_t tick_ = 0;
    std::vector<TraceRecord> pending_;
    std::uint64_t lines_ = 0;
};

std::string format_pose(const motion::Pose& p);
std::string format_time(double t);

struct ParsedRecord {
    double time = 0.0;
    int pid = 0;
    RecordKind kind = RecordKind::Event;
    std::string payload;
};

struct Trace {
    std::multimap<std::string, std::string> header;  // `# key: value` lines
    std::vector<ParsedRecord> records;

    /// First header value for `key`, or `fallback`.
    std::string header_value(const std::string& key, const std::string& fallback = "") const;
};

/// Throws TraceError on malformed lines or out-of-order records.
Trace read_trace(std::istream& in);

/// Pose payload back to a pose. Throws std::invalid_argument.
motion::Pose parse_pose(const std::string& payload);

/// Parts of a merged payload.
std::vector<std::string> split_payload(const std::string& payload);

} // namespace koord::sim
