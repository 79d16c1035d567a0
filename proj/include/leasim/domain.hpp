#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace leasim {

/// Simulation time in integer seconds from the trace epoch (t = 0 at the
/// earliest arrival). Integer seconds keep event ordering exact.
using Seconds = std::int64_t;
using LeaseId = std::int64_t;

enum class LeaseKind { BestEffort, AdvanceReservation };

inline const char* lease_kind_name(LeaseKind kind) {
    return kind == LeaseKind::BestEffort ? "BE" : "AR";
}

/// One requested virtual machine: a resource vector plus an optional
/// disk-image tag. Image attributes are carried, never scheduled.
struct NodeRequest {
    int cpu_cores = 1;
    std::int64_t memory_mb = 1024;
    std::optional<std::string> image_id;
    std::optional<std::int64_t> image_size_mb;

    friend bool operator==(const NodeRequest&, const NodeRequest&) = default;
};

/// One user request: a set of identical vnodes to run for `duration`
/// seconds. `requested_start` is set only for advance reservations;
/// best-effort leases start whenever the scheduler finds room.
struct Lease {
    LeaseId id = 0;
    LeaseKind kind = LeaseKind::BestEffort;
    Seconds arrival_time = 0;
    std::optional<Seconds> requested_start;
    Seconds duration = 0;
    std::vector<NodeRequest> vnodes;

    std::int64_t total_cores() const {
        std::int64_t sum = 0;
        for (const auto& v : vnodes) sum += v.cpu_cores;
        return sum;
    }
    std::int64_t total_memory_mb() const {
        std::int64_t sum = 0;
        for (const auto& v : vnodes) sum += v.memory_mb;
        return sum;
    }
    /// The per-vnode request; valid because all vnodes are identical.
    const NodeRequest& node() const { return vnodes.front(); }

    friend bool operator==(const Lease&, const Lease&) = default;
};

struct InvalidLease : std::runtime_error {
    InvalidLease(std::string field_, std::string reason_)
        : std::runtime_error("invalid lease: " + field_ + ": " + reason_),
          field(std::move(field_)),
          reason(std::move(reason_)) {}
    std::string field;
    std::string reason;
};

/// Returns the lease unchanged if every invariant holds, else throws
/// InvalidLease naming the first violated field.
inline const Lease& validate_lease(const Lease& lease) {
    if (lease.id < 0) throw InvalidLease("id", "must be non-negative");
    if (lease.arrival_time < 0) throw InvalidLease("arrival_time", "must be non-negative");
    if (lease.duration <= 0) throw InvalidLease("duration", "must be positive");
    if (lease.vnodes.empty()) throw InvalidLease("vnodes", "must be non-empty");
    if (lease.kind == LeaseKind::AdvanceReservation) {
        if (!lease.requested_start)
            throw InvalidLease("requested_start", "required for advance reservations");
        if (*lease.requested_start < lease.arrival_time)
            throw InvalidLease("requested_start", "must not precede arrival_time");
    } else if (lease.requested_start) {
        throw InvalidLease("requested_start", "must be absent for best-effort leases");
    }
    for (const auto& v : lease.vnodes) {
        if (v.cpu_cores < 1) throw InvalidLease("cpu_cores", "must be >= 1");
        if (v.memory_mb < 1) throw InvalidLease("memory_mb", "must be >= 1");
        if (v.image_size_mb && !v.image_id)
            throw InvalidLease("image_size_mb", "present without image_id");
        if (v.image_size_mb && *v.image_size_mb < 0)
            throw InvalidLease("image_size_mb", "must be non-negative");
        if (!(v == lease.vnodes.front()))
            throw InvalidLease("vnodes", "all vnodes in a lease must be identical");
    }
    return lease;
}

/// A running vnode on a host.
struct Assignment {
    LeaseId lease_id = 0;
    int vnode_index = 0;
    int cores = 0;
    std::int64_t memory_mb = 0;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// A committed future interval on a host (advance reservations).
struct Reservation {
    LeaseId lease_id = 0;
    Seconds start = 0;
    Seconds end = 0;
    int cores = 0;
    std::int64_t memory_mb = 0;

    friend bool operator==(const Reservation&, const Reservation&) = default;
};

/// One physical machine. Mode is derived, never stored: a host is active
/// exactly when it has at least one running vnode.
struct Host {
    int id = 0;
    int total_cores = 0;
    std::int64_t total_memory_mb = 0;
    std::vector<Assignment> assignments;
    std::vector<Reservation> reservations;  // time-ordered

    bool active() const { return !assignments.empty(); }

    int busy_cores() const {
        int sum = 0;
        for (const auto& a : assignments) sum += a.cores;
        return sum;
    }
    std::int64_t busy_memory_mb() const {
        std::int64_t sum = 0;
        for (const auto& a : assignments) sum += a.memory_mb;
        return sum;
    }
    /// Number of distinct leases with at least one running vnode here.
    int lease_count() const {
        std::vector<LeaseId> ids;
        ids.reserve(assignments.size());
        for (const auto& a : assignments) ids.push_back(a.lease_id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return static_cast<int>(ids.size());
    }
};

struct ClusterConfig {
    int host_count = 1;
    int cores_per_host = 8;
    std::int64_t memory_per_host_mb = 10240;
};

inline void validate_cluster(const ClusterConfig& c) {
    if (c.host_count < 1 || c.cores_per_host < 1 || c.memory_per_host_mb < 1)
        throw std::invalid_argument("cluster config fields must be >= 1");
}

inline std::vector<Host> make_hosts(const ClusterConfig& config) {
    validate_cluster(config);
    std::vector<Host> hosts(static_cast<std::size_t>(config.host_count));
    for (int i = 0; i < config.host_count; ++i) {
        hosts[static_cast<std::size_t>(i)] =
            Host{i, config.cores_per_host, config.memory_per_host_mb, {}, {}};
    }
    return hosts;
}

struct PlacementEntry {
    int vnode_index = 0;
    int host_id = 0;
    int cores = 0;
    std::int64_t memory_mb = 0;

    friend bool operator==(const PlacementEntry&, const PlacementEntry&) = default;
};

/// A complete mapping of one lease's vnodes to hosts. Construction rejects
/// partial mappings: every vnode_index in [0, vnode_count) must appear
/// exactly once, in order.
class Placement {
public:
    Placement(LeaseId lease_id, std::vector<PlacementEntry> entries, std::size_t vnode_count)
        : lease_id_(lease_id), entries_(std::move(entries)) {
        if (entries_.size() != vnode_count)
            throw std::invalid_argument("placement does not cover every vnode");
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].vnode_index != static_cast<int>(i))
                throw std::invalid_argument("placement vnode indices must be 0..n-1 in order");
        }
    }

    LeaseId lease_id() const { return lease_id_; }
    const std::vector<PlacementEntry>& entries() const { return entries_; }

private:
    LeaseId lease_id_;
    std::vector<PlacementEntry> entries_;
};

enum class LeaseState { Completed, Rejected };

/// Per-lease result. waiting_time and slowdown are meaningful for
/// completed leases: waiting = first_start - arrival and
/// slowdown = (waiting + duration) / duration.
struct LeaseOutcome {
    LeaseId lease_id = 0;
    LeaseState state = LeaseState::Completed;
    std::optional<Seconds> first_start;
    std::optional<Seconds> completion;
    Seconds waiting_time = 0;
    int preemption_count = 0;
    double slowdown = 1.0;

    friend bool operator==(const LeaseOutcome&, const LeaseOutcome&) = default;
};

}  // namespace leasim
