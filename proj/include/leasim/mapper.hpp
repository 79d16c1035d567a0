#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "leasim/domain.hpp"

namespace leasim {

/// Consolidation ratio theta >= 1: a host may take up to theta times its
/// nominal capacity, in both cores and memory.
struct ConsolidationRatio {
    double theta = 1.0;

    static ConsolidationRatio none() { return {1.0}; }
    static ConsolidationRatio half_pi() { return {std::numbers::pi / 2.0}; }
    static ConsolidationRatio pi() { return {std::numbers::pi}; }
};

inline void validate_ratio(const ConsolidationRatio& r) {
    if (!(r.theta >= 1.0)) throw std::invalid_argument("consolidation ratio must be >= 1");
}

/// floor(theta * total); floor keeps theta = 1 exactly physical.
inline std::int64_t effective_capacity(std::int64_t total, ConsolidationRatio ratio) {
    return static_cast<std::int64_t>(std::floor(ratio.theta * static_cast<double>(total)));
}

/// Load figures for one host over a candidate lease's whole interval:
/// committed_* is the peak of running assignments plus overlapping future
/// reservations anywhere in the window.
struct HostWindowLoad {
    int host_id = 0;
    int total_cores = 0;
    std::int64_t total_memory_mb = 0;
    std::int64_t committed_cores = 0;
    std::int64_t committed_memory_mb = 0;
};

struct MapFailure {
    std::int64_t placed_possible = 0;  // vnodes that would have fit
};

using MapResult = std::variant<Placement, MapFailure>;

/// First-Fit over the given host order: on each host that fits at least one
/// whole vnode, place as many remaining vnodes as fit, then move on. The
/// result is all-or-nothing; a partial placement is never returned.
inline MapResult first_fit_map(const Lease& lease, std::span<const HostWindowLoad> ordered_hosts,
                               ConsolidationRatio ratio) {
    validate_ratio(ratio);
    const NodeRequest& need = lease.node();
    const auto total_vnodes = static_cast<std::int64_t>(lease.vnodes.size());

    std::vector<PlacementEntry> entries;
    entries.reserve(lease.vnodes.size());
    std::int64_t placed = 0;
    for (const HostWindowLoad& h : ordered_hosts) {
        if (placed == total_vnodes) break;
        std::int64_t free_cores = effective_capacity(h.total_cores, ratio) - h.committed_cores;
        std::int64_t free_mem = effective_capacity(h.total_memory_mb, ratio) - h.committed_memory_mb;
        if (free_cores < need.cpu_cores || free_mem < need.memory_mb) continue;
        std::int64_t fit = std::min(free_cores / need.cpu_cores, free_mem / need.memory_mb);
        std::int64_t take = std::min(fit, total_vnodes - placed);
        for (std::int64_t i = 0; i < take; ++i) {
            entries.push_back({static_cast<int>(placed + i), h.host_id, need.cpu_cores,
                               need.memory_mb});
        }
        placed += take;
    }
    if (placed < total_vnodes) return MapFailure{placed};
    return Placement(lease.id, std::move(entries), lease.vnodes.size());
}

}  // namespace leasim
