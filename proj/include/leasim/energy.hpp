#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "leasim/domain.hpp"

namespace leasim {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Linear host power model: P(u) = p_max * (k + (1 - k) * u), so the idle
/// host draws k * p_max and a fully utilized one draws p_max.
struct PowerModel {
    double p_max_w = 250.0;
    double k = 0.7;

    double idle_w() const { return k * p_max_w; }
};

inline void validate_power_model(const PowerModel& m) {
    if (!(m.p_max_w > 0.0)) throw DomainError("p_max must be positive");
    if (!(m.k >= 0.0 && m.k <= 1.0)) throw DomainError("k must be in [0, 1]");
}

/// CPU utilization of a host: busy cores over total cores, capped at 1
/// when oversubscription packs more virtual cores than physical ones.
inline double utilization(const Host& host) {
    assert(host.total_cores > 0);
    double u = static_cast<double>(host.busy_cores()) / static_cast<double>(host.total_cores);
    return u > 1.0 ? 1.0 : u;
}

inline double power_w(const PowerModel& model, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("utilization outside [0, 1]");
    // idle + (busy - idle) * u; this shape keeps round figures exact.
    double idle = model.k * model.p_max_w;
    return idle + (model.p_max_w - idle) * u;
}

/// Power quantized to integer microwatts. All energy bookkeeping uses this
/// quantized level so that integrating over an interval equals summing the
/// same level second by second.
inline std::int64_t power_microwatts(const PowerModel& model, double u) {
    return std::llround(power_w(model, u) * 1e6);
}

struct EnergyInterval {
    Seconds t_start = 0;
    Seconds t_end = 0;
    int active_hosts = 0;
    std::int64_t total_microwatts = 0;
};

/// Accumulates energy in integer microwatt-seconds. Host states must be
/// constant on each accumulated interval; passive hosts contribute nothing.
class EnergyLedger {
public:
    explicit EnergyLedger(PowerModel model) : model_(model) { validate_power_model(model); }

    void accumulate(std::span<const Host> hosts, Seconds t1, Seconds t2) {
        if (t2 < t1) throw DomainError("energy interval must not be reversed");
        std::int64_t watts_uw = 0;
        int active = 0;
        for (const Host& h : hosts) {
            if (!h.active()) continue;
            assert(h.busy_cores() > 0);
            ++active;
            watts_uw += power_microwatts(model_, utilization(h));
        }
        total_uws_ += watts_uw * (t2 - t1);
        intervals_.push_back({t1, t2, active, watts_uw});
    }

    const PowerModel& model() const { return model_; }
    std::int64_t total_microwatt_seconds() const { return total_uws_; }
    double total_wh() const { return static_cast<double>(total_uws_) / 3.6e9; }
    double total_kwh() const { return static_cast<double>(total_uws_) / 3.6e12; }
    const std::vector<EnergyInterval>& intervals() const { return intervals_; }

private:
    PowerModel model_;
    std::int64_t total_uws_ = 0;
    std::vector<EnergyInterval> intervals_;
};

}  // namespace leasim
