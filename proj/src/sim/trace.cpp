#include "koord/sim/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

namespace koord::sim {

std::string to_string(RecordKind k) {
    switch (k) {
        case RecordKind::Event: return "event";
        case RecordKind::Pose: return "pose";
        case RecordKind::Msg: return "msg";
        case RecordKind::Grant: return "grant";
        case RecordKind::Monitor: return "monitor";
    }
    return "?";
}

RecordKind parse_record_kind(const std::string& s) {
    for (auto k : {RecordKind::Event, RecordKind::Pose, RecordKind::Msg, RecordKind::Grant, RecordKind::Monitor}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument(fmt::format("unknown record kind '{}'", s));
}

TraceError::TraceError(int line, const std::string& msg)
    : std::runtime_error(fmt::format("trace line {}: {}", line, msg)), line_(line) {}

std::string format_time(double t) {
    return fmt::format("{:.3f}", t);
}

std::string format_pose(const motion::Pose& p) {
    auto z = [](double v) { return std::abs(v) < 5e-5 ? 0.0 : v; };  // no "-0.0000"
    return fmt::format("{:.4f} {:.4f} {:.4f} {:.4f}", z(p.x), z(p.y), z(p.z), z(p.yaw));
}

void TraceWriter::header(const std::vector<std::string>& lines) {
    if (!out_) return;
    for (const auto& l : lines) *out_ << "# " << l << '\n';
}

void TraceWriter::add(std::int64_t tick, int pid, RecordKind kind, std::string payload) {
    if (tick != tick_) {
        flush();
        tick_ = tick;
    }
    pending_.push_back({tick, pid, kind, std::move(payload)});
}

void TraceWriter::flush() {
    std::stable_sort(pending_.begin(), pending_.end(), [](const TraceRecord& a, const TraceRecord& b) {
        return std::tie(a.tick, a.pid, a.kind) < std::tie(b.tick, b.pid, b.kind);
    });
    std::vector<TraceRecord> merged;
    for (auto& r : pending_) {
        if (!merged.empty() && merged.back().tick == r.tick && merged.back().pid == r.pid && merged.back().kind == r.kind) {
            merged.back().payload += "; " + r.payload;
        } else {
            merged.push_back(std::move(r));
        }
    }
    pending_.clear();
    if (!out_) return;
    for (const auto& r : merged) {
        *out_ << format_time(static_cast<double>(r.tick) * dt_) << '\t' << r.pid << '\t' << to_string(r.kind) << '\t'
              << r.payload << '\n';
        ++lines_;
    }
}

std::string Trace::header_value(const std::string& key, const std::string& fallback) const {
    auto it = header.find(key);
    return it == header.end() ? fallback : it->second;
}

namespace {

template <typename T>
bool parse_number(const std::string& s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

} // namespace

Trace read_trace(std::istream& in) {
    Trace t;
    std::string line;
    int no = 0;
    std::tuple<double, int, int> last{-1.0, 0, 0};
    bool have_last = false;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
            auto colon = body.find(": ");
            if (colon != std::string::npos) t.header.emplace(body.substr(0, colon), body.substr(colon + 2));
            continue;
        }
        std::vector<std::string> cols;
        std::size_t start = 0;
        for (int i = 0; i < 3; ++i) {
            auto tab = line.find('\t', start);
            if (tab == std::string::npos) throw TraceError(no, "expected 4 tab-separated columns");
            cols.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        cols.push_back(line.substr(start));
        ParsedRecord r;
        if (!parse_number(cols[0], r.time) || !std::isfinite(r.time)) throw TraceError(no, fmt::format("bad time '{}'", cols[0]));
        if (!parse_number(cols[1], r.pid) || r.pid < kHarnessPid) throw TraceError(no, fmt::format("bad pid '{}'", cols[1]));
        try {
            r.kind = parse_record_kind(cols[2]);
        } catch (const std::invalid_argument& e) {
            throw TraceError(no, e.what());
        }
        r.payload = cols[3];
        if (r.kind == RecordKind::Pose) {
            try {
                parse_pose(r.payload);
            } catch (const std::invalid_argument& e) {
                throw TraceError(no, e.what());
            }
        }
        std::tuple<double, int, int> key{r.time, r.pid, static_cast<int>(r.kind)};
        if (have_last && !(last < key)) throw TraceError(no, "records out of order");
        last = key;
        have_last = true;
        t.records.push_back(std::move(r));
    }
    return t;
}

motion::Pose parse_pose(const std::string& payload) {
    std::istringstream ss(payload);
    std::string parts[4];
    double v[4];
    for (int i = 0; i < 4; ++i) {
        if (!(ss >> parts[i]) || !parse_number(parts[i], v[i])) {
            throw std::invalid_argument(fmt::format("bad pose '{}'", payload));
        }
    }
    std::string extra;
    if (ss >> extra) throw std::invalid_argument(fmt::format("bad pose '{}'", payload));
    return {v[0], v[1], v[2], v[3]};
}

std::vector<std::string> split_payload(const std::string& payload) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = payload.find("; ", start);
        out.push_back(payload.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 2;
    }
    return out;
}

} // namespace koord::sim
