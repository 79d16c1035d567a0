// Command-line front end: replays a workload trace on a simulated cluster
// under one policy/theta cell or the full five-cell comparison matrix, and
// writes the summary and time-series reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "leasim/leasim.hpp"

namespace {

leasim::ConsolidationRatio parse_theta(const std::string& text) {
    if (text == "pi") return leasim::ConsolidationRatio::pi();
    if (text == "half-pi") return leasim::ConsolidationRatio::half_pi();
    leasim::ConsolidationRatio ratio{std::stod(text)};
    leasim::validate_ratio(ratio);
    return ratio;
}

std::string cell_name(const std::string& policy, const std::string& theta_arg) {
    std::string name = policy;
    for (char& c : name)
        if (c == '-') c = '_';
    if (theta_arg == "pi") return "pi_" + name;
    if (theta_arg == "half-pi") return "halfpi_" + name;
    if (theta_arg != "1" && theta_arg != "1.0") {
        std::string suffix = theta_arg;
        for (char& c : suffix)
            if (c == '.') c = '_';
        name += "_t" + suffix;
    }
    return name;
}

std::vector<leasim::Lease> load_trace(const std::string& path, std::string format,
                                      std::int64_t start_day, std::int64_t days) {
    if (format == "auto")
        format = std::filesystem::path(path).extension() == ".swf" ? "swf" : "lease";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace " + path);
    if (format == "swf") {
        auto jobs = leasim::parse_swf(in);
        auto converted =
            leasim::convert_to_leases(std::move(jobs), {start_day, days}, leasim::NodeRequest{});
        std::fprintf(stderr, "converted %zu leases (%zu unusable dropped, %zu outside window)\n",
                     converted.leases.size(), converted.dropped_unusable,
                     converted.skipped_out_of_window);
        return std::move(converted.leases);
    }
    return leasim::read_lease_trace(in);
}

void print_summary(const std::vector<leasim::SummaryRow>& rows) {
    std::printf("%-16s %6s %12s %14s %10s %12s %10s %12s %9s %12s\n", "algorithm", "theta",
                "energy_kwh", "decrease_kwh", "decrease%", "mean_wait_s", "slowdown",
                "oversub_c_s", "rejected", "preemptions");
    for (const auto& r : rows) {
        std::printf("%-16s %6.2f %12.2f %14.2f %10.2f %12.3f %10.4f %12lld %9lld %12lld\n",
                    r.algorithm.c_str(), r.theta, r.energy_kwh, r.decrease_kwh, r.decrease_pct,
                    r.mean_wait_s, r.mean_slowdown, static_cast<long long>(r.oversub_core_s),
                    static_cast<long long>(r.rejected), static_cast<long long>(r.preemptions));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"leasim: power-aware lease scheduling simulator"};

    std::string trace_path;
    std::string format = "auto";
    std::int64_t start_day = 0;
    std::int64_t days = 10;
    int hosts = 1000;
    int cores = 8;
    std::int64_t mem_mb = 10240;
    double pmax = 250.0;
    double k = 0.7;
    std::string policy_arg = "greedy";
    std::string theta_arg = "1";
    std::string map_order_arg = "asc";
    std::string out_dir = "out";
    bool matrix = false;

    app.add_option("--trace", trace_path, "workload trace path")->required();
    app.add_option("--format", format, "trace format: swf, lease or auto (by extension)")
        ->check(CLI::IsMember({"swf", "lease", "auto"}));
    app.add_option("--start-day", start_day, "window start day within an SWF log");
    app.add_option("--days", days, "window length in days for SWF conversion");
    app.add_option("--hosts", hosts, "number of hosts");
    app.add_option("--cores", cores, "cores per host");
    app.add_option("--mem-mb", mem_mb, "memory per host in MiB");
    app.add_option("--pmax", pmax, "host power at full utilization, watts");
    app.add_option("--k", k, "idle-to-peak power ratio");
    app.add_option("--policy", policy_arg, "host selection policy")
        ->check(CLI::IsMember({"greedy", "ff-map", "ff-map-h2l"}));
    app.add_option("--theta", theta_arg, "consolidation ratio: decimal, pi or half-pi");
    app.add_flag("--matrix", matrix, "run the five-cell comparison matrix");
    app.add_option("--map-order", map_order_arg, "MAP active-host order")
        ->check(CLI::IsMember({"asc", "desc"}));
    app.add_option("--out", out_dir, "report output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        leasim::ExperimentSpec spec;
        spec.cluster = {hosts, cores, mem_mb};
        spec.power = {pmax, k};
        leasim::validate_cluster(spec.cluster);
        leasim::validate_power_model(spec.power);
        spec.map_order =
            map_order_arg == "desc" ? leasim::MapOrder::Descending : leasim::MapOrder::Ascending;
        spec.out_dir = out_dir;
        if (matrix) {
            spec.cells = leasim::standard_matrix_cells();
        } else {
            auto policy = leasim::policy_from_name(policy_arg);
            spec.cells = {{cell_name(policy_arg, theta_arg), *policy, parse_theta(theta_arg)}};
        }

        auto leases = load_trace(trace_path, format, start_day, days);
        auto results = leasim::run_matrix(spec, leases);
        leasim::emit_reports(results, leases, spec.out_dir);
        print_summary(leasim::summarize(results));
        std::printf("reports written to %s\n", spec.out_dir.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
