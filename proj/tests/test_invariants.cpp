#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "instance_gen.hpp"
#include "leasim/engine.hpp"
#include "reference_sim.hpp"

using namespace leasim;

namespace {

struct Segment {
    Seconds start;
    Seconds stop;
    int host;
};

// Per (lease, vnode) run segments recovered from the audit log.
std::map<std::pair<LeaseId, int>, std::vector<Segment>> segments_of(const SimResult& result) {
    std::map<std::pair<LeaseId, int>, std::vector<Segment>> segments;
    std::map<std::pair<LeaseId, int>, std::pair<Seconds, int>> open;  // -> (start, host)
    for (const EventRecord& e : result.events) {
        auto key = std::make_pair(e.lease_id, e.vnode);
        if (e.kind == RecordKind::Start) {
            REQUIRE_FALSE(open.count(key));  // no double-start while running
            open[key] = {e.t, e.host_id};
        } else if (e.kind == RecordKind::End || e.kind == RecordKind::Preempt) {
            REQUIRE(open.count(key));
            auto [start, host] = open.at(key);
            REQUIRE(host == e.host_id);  // a running vnode never moves
            segments[key].push_back({start, e.t, host});
            open.erase(key);
        }
    }
    REQUIRE(open.empty());
    return segments;
}

void check_against_reference(const testgen::RandomInstance& inst) {
    auto engine = run(inst.config, inst.power, inst.policy, inst.theta, inst.leases,
                      inst.map_order);
    auto ref = refsim::run_reference(inst.config, inst.power, inst.policy, inst.theta,
                                     inst.leases, inst.map_order);
    REQUIRE(engine.energy_microwatt_seconds == ref.energy_microwatt_seconds);
    REQUIRE(engine.outcomes == ref.outcomes);
    REQUIRE(engine.active_hosts == ref.active_hosts);
    REQUIRE(engine.oversubscribed_core_seconds == ref.oversubscribed_core_seconds);
    REQUIRE(engine.preemption_total == ref.preemption_total);
    REQUIRE(engine.rejected_total == ref.rejected_total);
}

}  // namespace

TEST_CASE("engine matches the 1-second-step reference on random instances") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        INFO("seed " << seed);
        check_against_reference(testgen::make_instance(seed));
    }
}

TEST_CASE("engine matches the reference when events collide on the same instants") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        INFO("colliding seed " << seed);
        check_against_reference(testgen::make_colliding_instance(seed));
    }
}

TEST_CASE("capacity safety: theta = 1 never exceeds physical cores") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        INFO("seed " << seed);
        auto inst = testgen::make_instance(seed);
        inst.theta = ConsolidationRatio::none();
        auto result = run(inst.config, inst.power, inst.policy, inst.theta, inst.leases,
                          inst.map_order);
        std::map<int, std::int64_t> busy;
        for (const EventRecord& e : result.events) {
            if (e.kind == RecordKind::Start) busy[e.host_id] += e.cores;
            if (e.kind == RecordKind::End || e.kind == RecordKind::Preempt)
                busy[e.host_id] -= e.cores;
            for (const auto& [host, cores] : busy) {
                REQUIRE(cores >= 0);
                REQUIRE(cores <= inst.config.cores_per_host);
            }
        }
    }
}

TEST_CASE("conservation of service: completed leases run exactly their duration") {
    for (std::uint64_t seed = 200; seed < 230; ++seed) {
        INFO("seed " << seed);
        auto inst = testgen::make_instance(seed);
        auto result = run(inst.config, inst.power, inst.policy, inst.theta, inst.leases,
                          inst.map_order);
        auto segments = segments_of(result);
        for (const Lease& lease : inst.leases) {
            const LeaseOutcome* o = result.outcome_of(lease.id);
            REQUIRE(o != nullptr);
            if (o->state != LeaseState::Completed) continue;
            for (int v = 0; v < static_cast<int>(lease.vnodes.size()); ++v) {
                Seconds total = 0;
                for (const Segment& s : segments[{lease.id, v}]) total += s.stop - s.start;
                REQUIRE(total == lease.duration);
            }
        }
    }
}

TEST_CASE("AR punctuality: accepted reservations run exactly on time, unpreempted") {
    for (std::uint64_t seed = 300; seed < 330; ++seed) {
        INFO("seed " << seed);
        auto inst = testgen::make_instance(seed);
        auto result = run(inst.config, inst.power, inst.policy, inst.theta, inst.leases,
                          inst.map_order);
        for (const Lease& lease : inst.leases) {
            if (lease.kind != LeaseKind::AdvanceReservation) continue;
            const LeaseOutcome* o = result.outcome_of(lease.id);
            if (o->state != LeaseState::Completed) continue;
            REQUIRE(o->first_start == *lease.requested_start);
            REQUIRE(o->completion == *lease.requested_start + lease.duration);
            REQUIRE(o->preemption_count == 0);
        }
        for (const EventRecord& e : result.events) {
            if (e.kind != RecordKind::Preempt) continue;
            // Only best-effort leases ever appear in preempt records.
            for (const Lease& lease : inst.leases)
                if (lease.id == e.lease_id) REQUIRE(lease.kind == LeaseKind::BestEffort);
        }
    }
}

TEST_CASE("passive hosts draw zero power in every interval") {
    for (std::uint64_t seed = 400; seed < 420; ++seed) {
        auto inst = testgen::make_instance(seed);
        auto result = run(inst.config, inst.power, inst.policy, inst.theta, inst.leases,
                          inst.map_order);
        for (const EnergyInterval& iv : result.energy_intervals) {
            if (iv.active_hosts == 0) REQUIRE(iv.total_microwatts == 0);
            if (iv.total_microwatts > 0) REQUIRE(iv.active_hosts > 0);
        }
    }
    // Explicit gap: nothing runs between the two leases.
    std::vector<Lease> leases;
    Lease a;
    a.id = 0, a.arrival_time = 0, a.duration = 10;
    a.vnodes.assign(1, NodeRequest{});
    Lease b = a;
    b.id = 1, b.arrival_time = 1000;
    leases = {a, b};
    auto result = run({1, 8, 10240}, {250.0, 0.7}, PolicyKind::Map, ConsolidationRatio::none(),
                      leases);
    bool saw_gap = false;
    for (const EnergyInterval& iv : result.energy_intervals) {
        if (iv.t_start >= 10 && iv.t_end <= 1000) {
            REQUIRE(iv.total_microwatts == 0);
            saw_gap = true;
        }
    }
    REQUIRE(saw_gap);
}

TEST_CASE("energy cross-check: closed form from the audit log") {
    // With 8-core hosts at 250 W / k = 0.7 and theta = 1, both the idle and
    // the per-core power are whole microwatt quantities, so the ledger must
    // equal  175e6 * active_host_seconds + 9.375e6 * busy_core_seconds.
    for (std::uint64_t seed = 500; seed < 520; ++seed) {
        INFO("seed " << seed);
        auto inst = testgen::make_instance(seed);
        inst.config.cores_per_host = 8;
        inst.config.memory_per_host_mb = 10240;
        inst.power = {250.0, 0.7};
        inst.theta = ConsolidationRatio::none();
        for (auto& lease : inst.leases) {
            for (auto& v : lease.vnodes) v.memory_mb = std::min<std::int64_t>(v.memory_mb, 10240);
        }
        auto result = run(inst.config, inst.power, inst.policy, inst.theta, inst.leases,
                          inst.map_order);

        std::map<int, std::int64_t> busy;
        std::map<Seconds, std::vector<const EventRecord*>> by_time;
        std::int64_t busy_core_s = 0, active_host_s = 0;
        Seconds prev = 0;
        for (const EventRecord& e : result.events) by_time[e.t].push_back(&e);
        for (const auto& [t, recs] : by_time) {
            std::int64_t busy_now = 0, active_now = 0;
            for (const auto& [host, cores] : busy) {
                busy_now += cores;
                active_now += cores > 0 ? 1 : 0;
            }
            busy_core_s += busy_now * (t - prev);
            active_host_s += active_now * (t - prev);
            prev = t;
            for (const EventRecord* e : recs) {
                if (e->kind == RecordKind::Start) busy[e->host_id] += e->cores;
                if (e->kind == RecordKind::End || e->kind == RecordKind::Preempt)
                    busy[e->host_id] -= e->cores;
            }
        }
        REQUIRE(result.energy_microwatt_seconds ==
                175'000'000 * active_host_s + 9'375'000 * busy_core_s);
    }
}

TEST_CASE("identical inputs give identical results, bit for bit") {
    for (std::uint64_t seed = 600; seed < 610; ++seed) {
        auto inst = testgen::make_instance(seed);
        auto a = run(inst.config, inst.power, inst.policy, inst.theta, inst.leases,
                     inst.map_order);
        auto b = run(inst.config, inst.power, inst.policy, inst.theta, inst.leases,
                     inst.map_order);
        REQUIRE(a.energy_microwatt_seconds == b.energy_microwatt_seconds);
        REQUIRE(a.outcomes == b.outcomes);
        REQUIRE(a.active_hosts == b.active_hosts);
        REQUIRE(a.events == b.events);
        REQUIRE(a.oversubscribed_core_seconds == b.oversubscribed_core_seconds);
    }
}
