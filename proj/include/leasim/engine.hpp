#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "leasim/domain.hpp"
#include "leasim/energy.hpp"
#include "leasim/mapper.hpp"
#include "leasim/policy.hpp"

namespace leasim {

/// Event kinds in processing priority order: ends free capacity before
/// same-instant arrivals, which precede same-instant AR activations.
enum class SimEventKind { LeaseEnd = 0, Arrival = 1, LeaseStart = 2 };

struct SimEvent {
    Seconds time = 0;
    SimEventKind kind = SimEventKind::Arrival;
    std::uint64_t sequence = 0;
    LeaseId lease_id = 0;
    std::uint32_t epoch = 0;
};

enum class RecordKind { Arrival, Reserve, Start, End, Preempt, Reject };

inline const char* record_kind_name(RecordKind kind) {
    switch (kind) {
        case RecordKind::Arrival: return "arrival";
        case RecordKind::Reserve: return "reserve";
        case RecordKind::Start: return "start";
        case RecordKind::End: return "end";
        case RecordKind::Preempt: return "preempt";
        case RecordKind::Reject: return "reject";
    }
    return "?";
}

/// Placement audit log row; vnode/host are -1 for lease-level records.
struct EventRecord {
    Seconds t = 0;
    RecordKind kind = RecordKind::Arrival;
    LeaseId lease_id = 0;
    int vnode = -1;
    int host_id = -1;
    std::int64_t cores = 0;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct ActiveSample {
    Seconds t = 0;
    int active_hosts = 0;

    friend bool operator==(const ActiveSample&, const ActiveSample&) = default;
};

struct SimResult {
    std::int64_t energy_microwatt_seconds = 0;
    std::vector<LeaseOutcome> outcomes;  // sorted by lease id
    std::vector<ActiveSample> active_hosts;  // change points of the step function
    std::int64_t oversubscribed_core_seconds = 0;
    std::int64_t preemption_total = 0;
    std::int64_t rejected_total = 0;
    Seconds makespan = 0;
    std::vector<EnergyInterval> energy_intervals;
    std::vector<EventRecord> events;

    double energy_kwh() const { return static_cast<double>(energy_microwatt_seconds) / 3.6e12; }

    const LeaseOutcome* outcome_of(LeaseId id) const {
        for (const auto& o : outcomes)
            if (o.lease_id == id) return &o;
        return nullptr;
    }
};

namespace detail {

class Simulation {
public:
    Simulation(const ClusterConfig& config, const PowerModel& power, PolicyKind policy,
               ConsolidationRatio theta, std::span<const Lease> leases, MapOrder map_order)
        : hosts_(make_hosts(config)),
          ledger_(power),
          policy_(policy),
          theta_(theta),
          map_order_(map_order) {
        validate_ratio(theta);
        eff_cores_.reserve(hosts_.size());
        eff_mem_.reserve(hosts_.size());
        for (const Host& h : hosts_) {
            eff_cores_.push_back(effective_capacity(h.total_cores, theta_));
            eff_mem_.push_back(effective_capacity(h.total_memory_mb, theta_));
            cluster_eff_cores_ += eff_cores_.back();
            cluster_eff_mem_ += eff_mem_.back();
        }
        runtimes_.reserve(leases.size());
        for (const Lease& lease : leases) {
            validate_lease(lease);
            if (index_of_.count(lease.id))
                throw std::invalid_argument("duplicate lease id " + std::to_string(lease.id));
            index_of_[lease.id] = runtimes_.size();
            LeaseRt entry;
            entry.lease = lease;
            entry.remaining = lease.duration;
            runtimes_.push_back(std::move(entry));
        }
    }

    SimResult run() {
        for (const LeaseRt& r : runtimes_)
            push_event(r.lease.arrival_time, SimEventKind::Arrival, r.lease.id, 0);
        series_.push_back({0, 0});

        while (!events_.empty()) {
            SimEvent ev = events_.top();
            if (is_stale(ev)) {
                events_.pop();
                continue;
            }
            if (ev.time > clock_) {
                account(clock_, ev.time);
                clock_ = ev.time;
            }
            events_.pop();
            switch (ev.kind) {
                case SimEventKind::LeaseEnd: end_lease(rt(ev.lease_id)); break;
                case SimEventKind::Arrival: handle_arrival(rt(ev.lease_id)); break;
                case SimEventKind::LeaseStart: start_reserved(rt(ev.lease_id)); break;
            }
            sample_active();
        }

        return finish();
    }

private:
    enum class St { Pending, Queued, Reserved, Running, Completed, Rejected };

    struct LeaseRt {
        Lease lease;
        Seconds remaining = 0;
        std::optional<Seconds> first_start;
        std::optional<Seconds> completion;
        Seconds last_start = -1;
        Seconds scheduled_end = -1;
        int preempt_count = 0;
        St st = St::Pending;
        std::uint32_t epoch = 0;  // bumped on preemption to void the old end event
        std::vector<PlacementEntry> placed;  // while Running
        std::vector<PlacementEntry> reserved;  // while Reserved
    };

    LeaseRt& rt(LeaseId id) { return runtimes_[index_of_.at(id)]; }

    void push_event(Seconds time, SimEventKind kind, LeaseId lease_id, std::uint32_t epoch) {
        events_.push(SimEvent{time, kind, next_sequence_++, lease_id, epoch});
    }

    bool is_stale(const SimEvent& ev) {
        if (ev.kind != SimEventKind::LeaseEnd) return false;
        const LeaseRt& r = rt(ev.lease_id);
        return r.st != St::Running || ev.epoch != r.epoch;
    }

    // -- event handlers -----------------------------------------------------

    void handle_arrival(LeaseRt& r) {
        record(RecordKind::Arrival, r.lease.id, -1, -1, r.lease.total_cores());
        if (r.lease.kind == LeaseKind::BestEffort) {
            if (never_fits(r.lease)) {
                // Does not fit even on an idle cluster; queueing it would
                // never terminate.
                reject(r);
                return;
            }
            r.st = St::Queued;
            be_queue_.emplace(r.lease.arrival_time, r.lease.id);
            try_schedule_queue();
        } else {
            reserve_ar(r);
        }
    }

    void reserve_ar(LeaseRt& r) {
        Seconds start = *r.lease.requested_start;
        if (start < clock_) {
            reject(r);
            return;
        }
        auto order = order_hosts(policy_, score_hosts(policy_, hosts_), map_order_);
        auto loads = window_loads(order, start, start + r.lease.duration, /*ar_only=*/true);
        MapResult result = first_fit_map(r.lease, loads, theta_);
        if (std::holds_alternative<MapFailure>(result)) {
            reject(r);
            return;
        }
        const Placement& placement = std::get<Placement>(result);
        r.reserved = placement.entries();
        r.st = St::Reserved;
        for (const PlacementEntry& e : r.reserved) {
            Host& h = host_by_id(e.host_id);
            h.reservations.push_back(
                {r.lease.id, start, start + r.lease.duration, e.cores, e.memory_mb});
            std::sort(h.reservations.begin(), h.reservations.end(),
                      [](const Reservation& a, const Reservation& b) {
                          return std::tie(a.start, a.end, a.lease_id) <
                                 std::tie(b.start, b.end, b.lease_id);
                      });
            record(RecordKind::Reserve, r.lease.id, e.vnode_index, e.host_id, e.cores);
        }
        push_event(start, SimEventKind::LeaseStart, r.lease.id, r.epoch);
    }

    /// AR activation at its reserved instant: preempt just enough running
    /// best-effort leases on the reserved hosts (youngest lease id first,
    /// whole leases), then convert the reservation into assignments.
    void start_reserved(LeaseRt& r) {
        assert(r.st == St::Reserved);
        std::map<int, std::pair<std::int64_t, std::int64_t>> needed;  // host -> cores, mem
        for (const PlacementEntry& e : r.reserved) {
            needed[e.host_id].first += e.cores;
            needed[e.host_id].second += e.memory_mb;
        }
        std::set<LeaseId> victims;
        for (const auto& [host_id, need] : needed) {
            Host& h = host_by_id(host_id);
            while (true) {
                std::int64_t busy_c = 0, busy_m = 0;
                LeaseId youngest = -1;
                for (const Assignment& a : h.assignments) {
                    if (victims.count(a.lease_id)) continue;
                    busy_c += a.cores;
                    busy_m += a.memory_mb;
                    if (rt(a.lease_id).lease.kind == LeaseKind::BestEffort &&
                        a.lease_id > youngest)
                        youngest = a.lease_id;
                }
                std::size_t idx = static_cast<std::size_t>(host_id);
                if (eff_cores_[idx] - busy_c >= need.first &&
                    eff_mem_[idx] - busy_m >= need.second)
                    break;
                if (youngest < 0)
                    throw std::logic_error("reserved capacity unavailable at AR start");
                victims.insert(youngest);
            }
        }
        for (LeaseId v : victims) preempt(rt(v));

        for (Host& h : hosts_) {
            std::erase_if(h.reservations,
                          [&](const Reservation& res) { return res.lease_id == r.lease.id; });
        }
        commit(r, r.reserved);
        r.reserved.clear();
        try_schedule_queue();
    }

    void preempt(LeaseRt& r) {
        assert(r.st == St::Running && r.lease.kind == LeaseKind::BestEffort);
        Seconds ran = clock_ - r.last_start;
        r.remaining -= ran;
        assert(r.remaining > 0);
        ++r.epoch;
        for (const PlacementEntry& e : r.placed) {
            remove_assignment(e.host_id, r.lease.id, e.vnode_index);
            record(RecordKind::Preempt, r.lease.id, e.vnode_index, e.host_id, e.cores);
        }
        r.placed.clear();
        r.st = St::Queued;
        r.preempt_count += 1;
        preemption_total_ += 1;
        be_queue_.emplace(r.lease.arrival_time, r.lease.id);
    }

    /// FIFO scan over the best-effort queue; unschedulable leases are
    /// skipped, not blocking. The host order is reused across failed
    /// attempts and recomputed after each placement (scores only change
    /// when assignments do).
    void try_schedule_queue() {
        if (be_queue_.empty()) return;
        // Instantaneous free capacity as a cheap sound bound. Assignments
        // whose lease ends exactly now occupy [.., clock) only, so they do
        // not count against [clock, ..) windows.
        std::int64_t free_now_cores = 0, free_now_mem = 0;
        for (const Host& h : hosts_) {
            std::int64_t busy_c = 0, busy_m = 0;
            for (const Assignment& a : h.assignments) {
                if (rt(a.lease_id).scheduled_end <= clock_) continue;
                busy_c += a.cores;
                busy_m += a.memory_mb;
            }
            std::size_t idx = static_cast<std::size_t>(h.id);
            free_now_cores += std::max<std::int64_t>(0, eff_cores_[idx] - busy_c);
            free_now_mem += std::max<std::int64_t>(0, eff_mem_[idx] - busy_m);
        }
        std::vector<int> order;
        auto it = be_queue_.begin();
        while (it != be_queue_.end()) {
            LeaseRt& r = rt(it->second);
            if (r.lease.total_cores() > free_now_cores ||
                r.lease.total_memory_mb() > free_now_mem) {
                ++it;
                continue;
            }
            if (order.empty()) order = order_hosts(policy_, score_hosts(policy_, hosts_), map_order_);
            auto loads = window_loads(order, clock_, clock_ + r.remaining, /*ar_only=*/false);
            MapResult result = first_fit_map(r.lease, loads, theta_);
            if (std::holds_alternative<MapFailure>(result)) {
                ++it;
                continue;
            }
            const auto& entries = std::get<Placement>(result).entries();
            for (const PlacementEntry& e : entries) {
                free_now_cores -= e.cores;
                free_now_mem -= e.memory_mb;
            }
            commit(r, entries);
            order.clear();
            it = be_queue_.erase(it);
        }
    }

    void commit(LeaseRt& r, std::vector<PlacementEntry> entries) {
        for (const PlacementEntry& e : entries) {
            host_by_id(e.host_id).assignments.push_back(
                {r.lease.id, e.vnode_index, e.cores, e.memory_mb});
            record(RecordKind::Start, r.lease.id, e.vnode_index, e.host_id, e.cores);
        }
        r.placed = std::move(entries);
        r.st = St::Running;
        r.last_start = clock_;
        if (!r.first_start) r.first_start = clock_;
        r.scheduled_end = clock_ + r.remaining;
        push_event(r.scheduled_end, SimEventKind::LeaseEnd, r.lease.id, r.epoch);
    }

    void end_lease(LeaseRt& r) {
        assert(r.st == St::Running && r.scheduled_end == clock_);
        for (const PlacementEntry& e : r.placed) {
            remove_assignment(e.host_id, r.lease.id, e.vnode_index);
            record(RecordKind::End, r.lease.id, e.vnode_index, e.host_id, e.cores);
        }
        r.placed.clear();
        r.remaining = 0;
        r.st = St::Completed;
        r.completion = clock_;
        try_schedule_queue();
    }

    void reject(LeaseRt& r) {
        r.st = St::Rejected;
        rejected_total_ += 1;
        record(RecordKind::Reject, r.lease.id, -1, -1, r.lease.total_cores());
    }

    // -- capacity queries ---------------------------------------------------

    /// Exact idle-cluster fit test: the number of vnodes each empty host
    /// can take, summed, is what First-Fit places on an empty cluster.
    bool never_fits(const Lease& lease) const {
        const NodeRequest& n = lease.node();
        std::int64_t fits = 0;
        for (std::size_t i = 0; i < hosts_.size(); ++i) {
            if (eff_cores_[i] < n.cpu_cores || eff_mem_[i] < n.memory_mb) continue;
            fits += std::min(eff_cores_[i] / n.cpu_cores, eff_mem_[i] / n.memory_mb);
            if (fits >= static_cast<std::int64_t>(lease.vnodes.size())) return false;
        }
        return true;
    }

    /// Peak committed cores and memory on `h` anywhere in [begin, end):
    /// running assignments occupy until their lease's scheduled end, and
    /// reservations occupy their own interval. With ar_only, best-effort
    /// occupancy is invisible (it is preemptible).
    std::pair<std::int64_t, std::int64_t> window_peak(const Host& h, Seconds begin, Seconds end,
                                                      bool ar_only) {
        deltas_.clear();
        for (const Assignment& a : h.assignments) {
            const LeaseRt& r = rt(a.lease_id);
            if (ar_only && r.lease.kind != LeaseKind::AdvanceReservation) continue;
            Seconds stop = std::min(r.scheduled_end, end);
            if (stop <= begin) continue;
            deltas_.push_back({begin, a.cores, a.memory_mb});
            if (stop < end) deltas_.push_back({stop, -a.cores, -a.memory_mb});
        }
        for (const Reservation& res : h.reservations) {
            if (res.start >= end || res.end <= begin) continue;
            deltas_.push_back({std::max(res.start, begin), res.cores, res.memory_mb});
            if (res.end < end) deltas_.push_back({res.end, -res.cores, -res.memory_mb});
        }
        std::sort(deltas_.begin(), deltas_.end(),
                  [](const Delta& a, const Delta& b) { return a.t < b.t; });
        std::int64_t cur_c = 0, cur_m = 0, max_c = 0, max_m = 0;
        std::size_t i = 0;
        while (i < deltas_.size()) {
            Seconds t = deltas_[i].t;
            for (; i < deltas_.size() && deltas_[i].t == t; ++i) {
                cur_c += deltas_[i].cores;
                cur_m += deltas_[i].mem;
            }
            max_c = std::max(max_c, cur_c);
            max_m = std::max(max_m, cur_m);
        }
        return {max_c, max_m};
    }

    std::vector<HostWindowLoad> window_loads(std::span<const int> order, Seconds begin,
                                             Seconds end, bool ar_only) {
        std::vector<HostWindowLoad> loads;
        loads.reserve(order.size());
        for (int host_id : order) {
            const Host& h = host_by_id(host_id);
            auto [peak_c, peak_m] = window_peak(h, begin, end, ar_only);
            loads.push_back({host_id, h.total_cores, h.total_memory_mb, peak_c, peak_m});
        }
        return loads;
    }

    // -- bookkeeping ----------------------------------------------------------

    Host& host_by_id(int id) { return hosts_[static_cast<std::size_t>(id)]; }

    void remove_assignment(int host_id, LeaseId lease_id, int vnode_index) {
        auto& v = host_by_id(host_id).assignments;
        auto pos = std::find_if(v.begin(), v.end(), [&](const Assignment& a) {
            return a.lease_id == lease_id && a.vnode_index == vnode_index;
        });
        assert(pos != v.end());
        v.erase(pos);
    }

    void account(Seconds t1, Seconds t2) {
        ledger_.accumulate(hosts_, t1, t2);
        std::int64_t over = 0;
        for (const Host& h : hosts_) over += std::max(0, h.busy_cores() - h.total_cores);
        oversubscribed_core_seconds_ += over * (t2 - t1);
    }

    int active_count() const {
        int n = 0;
        for (const Host& h : hosts_) n += h.active() ? 1 : 0;
        return n;
    }

    void sample_active() {
        int n = active_count();
        ActiveSample& last = series_.back();
        if (last.t == clock_) {
            last.active_hosts = n;
            if (series_.size() >= 2 && series_[series_.size() - 2].active_hosts == n)
                series_.pop_back();
        } else if (last.active_hosts != n) {
            series_.push_back({clock_, n});
        }
    }

    void record(RecordKind kind, LeaseId lease_id, int vnode, int host_id, std::int64_t cores) {
        events_log_.push_back({clock_, kind, lease_id, vnode, host_id, cores});
    }

    SimResult finish() {
        SimResult result;
        result.energy_microwatt_seconds = ledger_.total_microwatt_seconds();
        result.energy_intervals = ledger_.intervals();
        result.active_hosts = std::move(series_);
        result.oversubscribed_core_seconds = oversubscribed_core_seconds_;
        result.preemption_total = preemption_total_;
        result.rejected_total = rejected_total_;
        result.makespan = clock_;
        result.events = std::move(events_log_);
        result.outcomes.reserve(runtimes_.size());
        for (const LeaseRt& r : runtimes_) {
            LeaseOutcome o;
            o.lease_id = r.lease.id;
            o.preemption_count = r.preempt_count;
            if (r.st == St::Completed) {
                o.state = LeaseState::Completed;
                o.first_start = r.first_start;
                o.completion = r.completion;
                o.waiting_time = *r.first_start - r.lease.arrival_time;
                o.slowdown = static_cast<double>(o.waiting_time + r.lease.duration) /
                             static_cast<double>(r.lease.duration);
            } else if (r.st == St::Rejected) {
                o.state = LeaseState::Rejected;
                o.waiting_time = 0;
                o.slowdown = 0.0;
            } else {
                throw std::logic_error("lease " + std::to_string(r.lease.id) +
                                       " did not quiesce");
            }
            result.outcomes.push_back(o);
        }
        std::sort(result.outcomes.begin(), result.outcomes.end(),
                  [](const LeaseOutcome& a, const LeaseOutcome& b) {
                      return a.lease_id < b.lease_id;
                  });
        return result;
    }

    struct Delta {
        Seconds t;
        std::int64_t cores;
        std::int64_t mem;
    };

    struct EventOrder {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            return std::tie(a.time, a.kind, a.sequence) > std::tie(b.time, b.kind, b.sequence);
        }
    };

    std::vector<Host> hosts_;
    EnergyLedger ledger_;
    PolicyKind policy_;
    ConsolidationRatio theta_;
    MapOrder map_order_;
    std::vector<std::int64_t> eff_cores_;
    std::vector<std::int64_t> eff_mem_;
    std::int64_t cluster_eff_cores_ = 0;
    std::int64_t cluster_eff_mem_ = 0;

    std::vector<LeaseRt> runtimes_;
    std::map<LeaseId, std::size_t> index_of_;
    std::set<std::pair<Seconds, LeaseId>> be_queue_;  // FIFO by (arrival, id)
    std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> events_;
    std::uint64_t next_sequence_ = 0;
    Seconds clock_ = 0;

    std::vector<ActiveSample> series_;
    std::vector<EventRecord> events_log_;
    std::vector<Delta> deltas_;
    std::int64_t oversubscribed_core_seconds_ = 0;
    std::int64_t preemption_total_ = 0;
    std::int64_t rejected_total_ = 0;
};

}  // namespace detail

/// Replays the lease collection on a simulated cluster and returns the
/// complete accounting. Deterministic: identical inputs give identical
/// results, including the audit log byte for byte.
inline SimResult run(const ClusterConfig& config, const PowerModel& power, PolicyKind policy,
                     ConsolidationRatio theta, std::span<const Lease> leases,
                     MapOrder map_order = MapOrder::Ascending) {
    detail::Simulation sim(config, power, policy, theta, leases, map_order);
    return sim.run();
}

}  // namespace leasim
