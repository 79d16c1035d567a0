#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "leasim/domain.hpp"
#include "leasim/energy.hpp"
#include "leasim/engine.hpp"
#include "leasim/mapper.hpp"
#include "leasim/policy.hpp"

namespace leasim {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& path_)
        : std::runtime_error("cannot write " + path_), path(path_) {}
    std::string path;
};

struct CellError : std::runtime_error {
    CellError(const std::string& cell_, const std::string& what_)
        : std::runtime_error("cell " + cell_ + ": " + what_), cell(cell_) {}
    std::string cell;
};

/// One experiment cell: a policy plus a consolidation ratio, with the
/// name used in report file names and the summary table.
struct MatrixCell {
    std::string name;
    PolicyKind policy = PolicyKind::GreedyBaseline;
    ConsolidationRatio theta;
};

/// The five standard comparison cells: the greedy baseline, both MAP
/// variants at theta = 1, and FF-MAP at theta = pi/2 and pi.
inline std::vector<MatrixCell> standard_matrix_cells() {
    return {
        {"greedy", PolicyKind::GreedyBaseline, ConsolidationRatio::none()},
        {"ff_map", PolicyKind::Map, ConsolidationRatio::none()},
        {"ff_map_h2l", PolicyKind::MapH2L, ConsolidationRatio::none()},
        {"halfpi_ff_map", PolicyKind::Map, ConsolidationRatio::half_pi()},
        {"pi_ff_map", PolicyKind::Map, ConsolidationRatio::pi()},
    };
}

struct ExperimentSpec {
    ClusterConfig cluster;
    PowerModel power;
    std::vector<MatrixCell> cells;
    MapOrder map_order = MapOrder::Ascending;
    std::string out_dir = "out";
};

struct CellResult {
    MatrixCell cell;
    SimResult sim;
};

struct SummaryRow {
    std::string algorithm;
    double theta = 1.0;
    double energy_kwh = 0.0;
    double decrease_kwh = 0.0;
    double decrease_pct = 0.0;
    double mean_wait_s = 0.0;
    double mean_slowdown = 0.0;
    std::int64_t oversub_core_s = 0;
    std::int64_t rejected = 0;
    std::int64_t preemptions = 0;
};

inline std::vector<CellResult> run_matrix(const ExperimentSpec& spec,
                                          std::span<const Lease> leases) {
    if (spec.cells.empty()) throw std::invalid_argument("experiment needs at least one cell");
    std::vector<CellResult> results;
    results.reserve(spec.cells.size());
    for (const MatrixCell& cell : spec.cells) {
        try {
            SimResult sim = run(spec.cluster, spec.power, cell.policy, cell.theta, leases,
                                spec.map_order);
            results.push_back({cell, std::move(sim)});
        } catch (const std::exception& e) {
            throw CellError(cell.name, e.what());
        }
    }
    return results;
}

/// Baseline for percent-decrease reporting: the first (greedy, theta = 1)
/// cell, or the first cell when no such denominator exists.
inline std::size_t baseline_index(std::span<const CellResult> results) {
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].cell.policy == PolicyKind::GreedyBaseline &&
            results[i].cell.theta.theta == 1.0)
            return i;
    }
    return 0;
}

inline std::vector<SummaryRow> summarize(std::span<const CellResult> results) {
    std::vector<SummaryRow> rows;
    if (results.empty()) return rows;
    double base_kwh = results[baseline_index(results)].sim.energy_kwh();
    for (const CellResult& r : results) {
        SummaryRow row;
        row.algorithm = r.cell.name;
        row.theta = r.cell.theta.theta;
        row.energy_kwh = r.sim.energy_kwh();
        row.decrease_kwh = base_kwh - row.energy_kwh;
        row.decrease_pct = base_kwh > 0.0 ? (base_kwh - row.energy_kwh) / base_kwh * 100.0 : 0.0;
        std::int64_t completed = 0;
        double wait_sum = 0.0, slowdown_sum = 0.0;
        for (const LeaseOutcome& o : r.sim.outcomes) {
            if (o.state != LeaseState::Completed) continue;
            ++completed;
            wait_sum += static_cast<double>(o.waiting_time);
            slowdown_sum += o.slowdown;
        }
        row.mean_wait_s = completed > 0 ? wait_sum / static_cast<double>(completed) : 0.0;
        row.mean_slowdown = completed > 0 ? slowdown_sum / static_cast<double>(completed) : 0.0;
        row.oversub_core_s = r.sim.oversubscribed_core_seconds;
        row.rejected = r.sim.rejected_total;
        row.preemptions = r.sim.preemption_total;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace detail {

inline std::string fmt(const char* format, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, value);
    return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string());
    out << contents;
    if (!out) throw IoError(path.string());
}

}  // namespace detail

inline std::string summary_csv(std::span<const SummaryRow> rows) {
    std::string text =
        "algorithm,theta,energy_kwh,decrease_kwh,decrease_pct,mean_wait_s,mean_slowdown,"
        "oversub_core_s,rejected,preemptions\n";
    for (const SummaryRow& r : rows) {
        text += r.algorithm;
        text += ',' + detail::fmt("%.2f", r.theta);
        text += ',' + detail::fmt("%.2f", r.energy_kwh);
        text += ',' + detail::fmt("%.2f", r.decrease_kwh);
        text += ',' + detail::fmt("%.2f", r.decrease_pct);
        text += ',' + detail::fmt("%.3f", r.mean_wait_s);
        text += ',' + detail::fmt("%.4f", r.mean_slowdown);
        text += ',' + std::to_string(r.oversub_core_s);
        text += ',' + std::to_string(r.rejected);
        text += ',' + std::to_string(r.preemptions);
        text += '\n';
    }
    return text;
}

inline std::string active_hosts_csv(const SimResult& sim) {
    std::string text = "t_s,active_hosts\n";
    for (const ActiveSample& s : sim.active_hosts)
        text += std::to_string(s.t) + ',' + std::to_string(s.active_hosts) + '\n';
    return text;
}

inline std::string leases_csv(const SimResult& sim, std::span<const Lease> leases) {
    std::string text = "lease_id,kind,arrival_s,start_s,end_s,wait_s,slowdown,state,preemptions\n";
    for (const LeaseOutcome& o : sim.outcomes) {
        const Lease* lease = nullptr;
        for (const Lease& l : leases) {
            if (l.id == o.lease_id) {
                lease = &l;
                break;
            }
        }
        text += std::to_string(o.lease_id);
        text += ',';
        text += lease ? lease_kind_name(lease->kind) : "?";
        text += ',' + std::to_string(lease ? lease->arrival_time : -1);
        if (o.state == LeaseState::Completed) {
            text += ',' + std::to_string(*o.first_start);
            text += ',' + std::to_string(*o.completion);
            text += ',' + std::to_string(o.waiting_time);
            text += ',' + detail::fmt("%.6f", o.slowdown);
            text += ",completed";
        } else {
            text += ",-1,-1,-1,-1,rejected";
        }
        text += ',' + std::to_string(o.preemption_count) + '\n';
    }
    return text;
}

inline std::string events_csv(const SimResult& sim) {
    std::string text = "t_s,event,lease_id,vnode,host_id,cores\n";
    for (const EventRecord& e : sim.events) {
        text += std::to_string(e.t);
        text += ',';
        text += record_kind_name(e.kind);
        text += ',' + std::to_string(e.lease_id);
        text += ',' + std::to_string(e.vnode);
        text += ',' + std::to_string(e.host_id);
        text += ',' + std::to_string(e.cores);
        text += '\n';
    }
    return text;
}

/// Writes summary.csv plus per-cell active-host, lease-outcome and event
/// CSVs. Output is byte-identical across repeated runs of the same spec.
inline void emit_reports(std::span<const CellResult> results, std::span<const Lease> leases,
                         const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError(out_dir);
    auto rows = summarize(results);
    detail::write_file(fs::path(out_dir) / "summary.csv", summary_csv(rows));
    for (const CellResult& r : results) {
        detail::write_file(fs::path(out_dir) / ("active_hosts_" + r.cell.name + ".csv"),
                           active_hosts_csv(r.sim));
        detail::write_file(fs::path(out_dir) / ("leases_" + r.cell.name + ".csv"),
                           leases_csv(r.sim, leases));
        detail::write_file(fs::path(out_dir) / ("events_" + r.cell.name + ".csv"),
                           events_csv(r.sim));
    }
}

}  // namespace leasim
