#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leasim/domain.hpp"

namespace leasim {

enum class PolicyKind { GreedyBaseline, Map, MapH2L };

/// Direction in which MAP ranks active hosts. The default keeps the
/// least-loaded active host first; Descending flips it (exposed through
/// the CLI flag --map-order for side-by-side comparison).
enum class MapOrder { Ascending, Descending };

inline std::optional<PolicyKind> policy_from_name(std::string_view name) {
    if (name == "greedy") return PolicyKind::GreedyBaseline;
    if (name == "ff-map") return PolicyKind::Map;
    if (name == "ff-map-h2l") return PolicyKind::MapH2L;
    return std::nullopt;
}

inline const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::GreedyBaseline: return "greedy";
        case PolicyKind::Map: return "ff-map";
        case PolicyKind::MapH2L: return "ff-map-h2l";
    }
    return "?";
}

struct HostScore {
    int host_id = 0;
    int lease_count = 0;  // distinct leases with a running vnode
    int busy_cores = 0;
    int score = 0;
};

/// Scores every host for the given policy. Under Map/MapH2L a passive host
/// scores -1 so that it sorts to the tail; the greedy baseline scores every
/// host by its lease count, which puts idle hosts (score 0) first.
inline std::vector<HostScore> score_hosts(PolicyKind policy, std::span<const Host> hosts) {
    std::vector<HostScore> scores;
    scores.reserve(hosts.size());
    for (const Host& h : hosts) {
        HostScore s;
        s.host_id = h.id;
        s.lease_count = h.lease_count();
        s.busy_cores = h.busy_cores();
        if (policy == PolicyKind::GreedyBaseline) {
            s.score = s.lease_count;
        } else {
            s.score = h.active() ? s.lease_count : -1;
        }
        scores.push_back(s);
    }
    return scores;
}

/// Produces the host scan order for the mapper. Ties always break by
/// ascending host id so equal inputs give identical orderings.
inline std::vector<int> order_hosts(PolicyKind policy, std::vector<HostScore> scores,
                                    MapOrder map_order = MapOrder::Ascending) {
    switch (policy) {
        case PolicyKind::GreedyBaseline:
            std::sort(scores.begin(), scores.end(), [](const HostScore& a, const HostScore& b) {
                if (a.score != b.score) return a.score < b.score;
                return a.host_id < b.host_id;
            });
            break;
        case PolicyKind::Map:
            // Active hosts by score, every passive host after them.
            std::sort(scores.begin(), scores.end(),
                      [map_order](const HostScore& a, const HostScore& b) {
                          bool a_passive = a.score < 0;
                          bool b_passive = b.score < 0;
                          if (a_passive != b_passive) return b_passive;
                          if (!a_passive && a.score != b.score) {
                              return map_order == MapOrder::Ascending ? a.score < b.score
                                                                      : a.score > b.score;
                          }
                          return a.host_id < b.host_id;
                      });
            break;
        case PolicyKind::MapH2L:
            // Active hosts from highest workload (busy cores) to lowest.
            std::sort(scores.begin(), scores.end(), [](const HostScore& a, const HostScore& b) {
                bool a_passive = a.score < 0;
                bool b_passive = b.score < 0;
                if (a_passive != b_passive) return b_passive;
                if (!a_passive && a.busy_cores != b.busy_cores) return a.busy_cores > b.busy_cores;
                return a.host_id < b.host_id;
            });
            break;
    }
    std::vector<int> order;
    order.reserve(scores.size());
    for (const auto& s : scores) order.push_back(s.host_id);
    return order;
}

}  // namespace leasim
