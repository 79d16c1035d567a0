#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "leasim/domain.hpp"

namespace leasim {

/// One record of a Standard Workload Format log. Fields 1-5 are named;
/// the rest of the record is retained verbatim in `extra`.
struct SwfJob {
    std::int64_t job_number = 0;
    Seconds submit_time = 0;
    Seconds wait_time = -1;
    Seconds run_time = -1;
    std::int64_t allocated_processors = -1;
    std::vector<std::int64_t> extra;  // fields 6..n, -1 where unknown

    bool usable() const { return run_time > 0 && allocated_processors >= 1; }
};

/// Day-granular submit-time window into a log.
struct TraceWindow {
    std::int64_t start_day = 0;
    std::int64_t day_count = 10;

    Seconds start() const { return start_day * 86400; }
    Seconds end() const { return (start_day + day_count) * 86400; }
};

struct MalformedLine : std::runtime_error {
    explicit MalformedLine(std::size_t line_number_)
        : std::runtime_error("malformed SWF line " + std::to_string(line_number_)),
          line_number(line_number_) {}
    std::size_t line_number;
};

struct MalformedTraceLine : std::runtime_error {
    MalformedTraceLine(std::size_t line_number_, std::string reason_)
        : std::runtime_error("malformed trace line " + std::to_string(line_number_) + ": " +
                             reason_),
          line_number(line_number_),
          reason(std::move(reason_)) {}
    std::size_t line_number;
    std::string reason;
};

struct EmptyTrace : std::runtime_error {
    EmptyTrace() : std::runtime_error("conversion produced zero leases") {}
};

namespace detail {

inline bool parse_int(std::string_view token, std::int64_t& out) {
    if (token.empty()) return false;
    std::size_t i = 0;
    bool negative = false;
    if (token[0] == '-' || token[0] == '+') {
        negative = token[0] == '-';
        if (token.size() == 1) return false;
        i = 1;
    }
    std::int64_t value = 0;
    for (; i < token.size(); ++i) {
        char c = token[i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    out = negative ? -value : value;
    return true;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

}  // namespace detail

/// Parses SWF text: ';' lines are header/comments, data lines carry at
/// least 18 whitespace-separated integers in standard field order.
inline std::vector<SwfJob> parse_swf(std::istream& in) {
    std::vector<SwfJob> jobs;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        auto tokens = detail::split_ws(line);
        if (tokens.empty()) continue;
        if (tokens.front().front() == ';') continue;
        if (tokens.size() < 18) throw MalformedLine(line_number);
        std::vector<std::int64_t> fields;
        fields.reserve(tokens.size());
        for (auto t : tokens) {
            std::int64_t v = 0;
            if (!detail::parse_int(t, v)) throw MalformedLine(line_number);
            fields.push_back(v);
        }
        SwfJob job;
        job.job_number = fields[0];
        job.submit_time = fields[1];
        job.wait_time = fields[2];
        job.run_time = fields[3];
        job.allocated_processors = fields[4];
        job.extra.assign(fields.begin() + 5, fields.end());
        jobs.push_back(std::move(job));
    }
    return jobs;
}

struct ConversionResult {
    std::vector<Lease> leases;
    std::size_t dropped_unusable = 0;  // run_time <= 0 or processors <= 0
    std::size_t skipped_out_of_window = 0;
};

/// Converts SWF jobs to best-effort leases: one vnode per allocated
/// processor, arrival rebased to the window start. Job count, arrival
/// order and durations of usable in-window jobs are preserved exactly.
inline ConversionResult convert_to_leases(std::vector<SwfJob> jobs, const TraceWindow& window,
                                          const NodeRequest& node_request) {
    if (window.day_count < 1) throw std::invalid_argument("window day_count must be >= 1");
    std::stable_sort(jobs.begin(), jobs.end(),
                     [](const SwfJob& a, const SwfJob& b) { return a.submit_time < b.submit_time; });
    ConversionResult result;
    LeaseId next_id = 0;
    for (const SwfJob& job : jobs) {
        if (job.submit_time < window.start() || job.submit_time >= window.end()) {
            ++result.skipped_out_of_window;
            continue;
        }
        if (!job.usable()) {
            ++result.dropped_unusable;
            continue;
        }
        Lease lease;
        lease.id = next_id++;
        lease.kind = LeaseKind::BestEffort;
        lease.arrival_time = job.submit_time - window.start();
        lease.duration = job.run_time;
        lease.vnodes.assign(static_cast<std::size_t>(job.allocated_processors), node_request);
        result.leases.push_back(std::move(lease));
    }
    if (result.leases.empty()) throw EmptyTrace();
    return result;
}

/// Lease trace line format:
///   id kind arrival start duration num_nodes cpu_per_node mem_per_node
/// kind is BE or AR; start is -1 for BE; '#' starts a comment line.
inline std::vector<Lease> read_lease_trace(std::istream& in) {
    std::vector<Lease> leases;
    std::vector<LeaseId> seen_ids;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        auto tokens = detail::split_ws(line);
        if (tokens.empty()) continue;
        if (tokens.front().front() == '#') continue;
        if (tokens.size() != 8) throw MalformedTraceLine(line_number, "expected 8 fields");
        std::int64_t id = 0, arrival = 0, start = 0, duration = 0, nodes = 0, cpu = 0, mem = 0;
        if (!detail::parse_int(tokens[0], id) || !detail::parse_int(tokens[2], arrival) ||
            !detail::parse_int(tokens[3], start) || !detail::parse_int(tokens[4], duration) ||
            !detail::parse_int(tokens[5], nodes) || !detail::parse_int(tokens[6], cpu) ||
            !detail::parse_int(tokens[7], mem))
            throw MalformedTraceLine(line_number, "non-integer field");

        Lease lease;
        lease.id = id;
        if (tokens[1] == "BE") {
            lease.kind = LeaseKind::BestEffort;
            if (start != -1) throw MalformedTraceLine(line_number, "BE lease must have start -1");
        } else if (tokens[1] == "AR") {
            lease.kind = LeaseKind::AdvanceReservation;
            lease.requested_start = start;
        } else {
            throw MalformedTraceLine(line_number, "kind must be BE or AR");
        }
        lease.arrival_time = arrival;
        lease.duration = duration;
        if (nodes < 1) throw MalformedTraceLine(line_number, "num_nodes must be >= 1");
        lease.vnodes.assign(static_cast<std::size_t>(nodes),
                            NodeRequest{static_cast<int>(cpu), mem, {}, {}});
        try {
            validate_lease(lease);
        } catch (const InvalidLease& e) {
            throw MalformedTraceLine(line_number, e.what());
        }
        leases.push_back(std::move(lease));
    }
    seen_ids.reserve(leases.size());
    for (const auto& l : leases) seen_ids.push_back(l.id);
    std::sort(seen_ids.begin(), seen_ids.end());
    if (std::adjacent_find(seen_ids.begin(), seen_ids.end()) != seen_ids.end())
        throw MalformedTraceLine(0, "duplicate lease id");
    return leases;
}

inline void write_lease_trace(std::ostream& out, std::span<const Lease> leases) {
    for (const Lease& l : leases) {
        const NodeRequest& n = l.node();
        out << l.id << ' ' << lease_kind_name(l.kind) << ' ' << l.arrival_time << ' '
            << (l.requested_start ? *l.requested_start : -1) << ' ' << l.duration << ' '
            << l.vnodes.size() << ' ' << n.cpu_cores << ' ' << n.memory_mb << '\n';
    }
}

inline std::string write_lease_trace(std::span<const Lease> leases) {
    std::ostringstream out;
    write_lease_trace(out, leases);
    return out.str();
}

}  // namespace leasim
