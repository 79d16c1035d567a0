// Generates the bundled synthetic SWF workload: a 10-day window of batch
// jobs whose arrival clustering, size mix and duration spread are shaped
// like large-cluster logs from the Parallel Workloads Archive. The output
// is deterministic for a given seed.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

struct Job {
    std::int64_t submit = 0;
    std::int64_t run = 0;
    std::int64_t procs = 0;
};

// Size mix: whole-node multiples of 8 for the batch traffic plus a large
// share of small and off-node-boundary requests (interactive and student
// VMs) that leave partial hosts behind.
constexpr struct {
    int procs;
    double weight;
} kSizeMix[] = {
    {1, 0.10},  {2, 0.10},  {3, 0.04},  {4, 0.08},  {5, 0.03},   {6, 0.05},
    {8, 0.16},  {12, 0.08}, {16, 0.08}, {20, 0.06}, {28, 0.04},  {32, 0.05},
    {36, 0.04}, {52, 0.02}, {64, 0.03}, {100, 0.015}, {128, 0.02}, {132, 0.005},
};

int draw_procs(std::mt19937_64& rng) {
    double total = 0;
    for (const auto& s : kSizeMix) total += s.weight;
    std::uniform_real_distribution<double> pick(0.0, total);
    double x = pick(rng);
    for (const auto& s : kSizeMix) {
        x -= s.weight;
        if (x <= 0) return s.procs;
    }
    return kSizeMix[0].procs;
}

// Node-multiple jobs skew short (batch turnaround); fragment-size jobs
// skew long (interactive sessions holding part of a host).
std::int64_t draw_duration(std::mt19937_64& rng, int procs) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double which = u01(rng);
    bool fragment = procs % 8 != 0;
    double short_w = fragment ? 0.25 : 0.55;
    double mid_w = fragment ? 0.45 : 0.35;
    double lo, hi;
    if (which < short_w) {
        lo = 600, hi = 3600;  // minutes-scale
    } else if (which < short_w + mid_w) {
        lo = 3600, hi = 6.0 * 3600;  // hours-scale
    } else {
        lo = 6.0 * 3600, hi = 36.0 * 3600;  // long tail
    }
    double log_lo = std::log(lo), log_hi = std::log(hi);
    return static_cast<std::int64_t>(std::exp(log_lo + (log_hi - log_lo) * u01(rng)));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generate a synthetic SWF batch workload"};
    std::string out_path = "data/synthetic-10d.swf";
    std::uint64_t seed = 42;
    std::int64_t jobs = 1750;
    std::int64_t days = 10;
    app.add_option("--out", out_path, "output SWF path");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--jobs", jobs, "usable jobs inside the window");
    app.add_option("--days", days, "window length in days");
    CLI11_PARSE(app, argc, argv);

    std::mt19937_64 rng(seed);
    const std::int64_t horizon = days * 86400;

    // Submission times cluster around campaign centers: half the jobs
    // arrive in bursts, the rest are background traffic.
    std::vector<std::int64_t> centers;
    std::uniform_int_distribution<std::int64_t> anywhere(0, horizon - 1);
    for (int i = 0; i < 400; ++i) centers.push_back(anywhere(rng));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> burst_spread(0.0, 600.0);

    std::vector<Job> all;
    for (std::int64_t i = 0; i < jobs; ++i) {
        Job job;
        if (u01(rng) < 0.5) {
            std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
            double t = static_cast<double>(centers[pick(rng)]) + burst_spread(rng);
            job.submit = std::clamp<std::int64_t>(static_cast<std::int64_t>(t), 0, horizon - 1);
        } else {
            job.submit = anywhere(rng);
        }
        job.procs = draw_procs(rng);
        job.run = draw_duration(rng, static_cast<int>(job.procs));
        all.push_back(job);
    }

    // A few records the converter must drop or skip: unknown runtimes or
    // processor counts inside the window, and jobs past the window end.
    for (int i = 0; i < 15; ++i) {
        Job job;
        job.submit = anywhere(rng);
        job.procs = i % 3 == 0 ? -1 : draw_procs(rng);
        job.run = job.procs == -1 ? draw_duration(rng, 8) : -1;
        all.push_back(job);
    }
    std::uniform_int_distribution<std::int64_t> beyond(horizon, horizon + 86400 - 1);
    for (int i = 0; i < 40; ++i) {
        Job job;
        job.submit = beyond(rng);
        job.procs = draw_procs(rng);
        job.run = draw_duration(rng, static_cast<int>(job.procs));
        all.push_back(job);
    }

    std::stable_sort(all.begin(), all.end(),
                     [](const Job& a, const Job& b) { return a.submit < b.submit; });

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
        return 1;
    }
    out << "; Version: 2.2\n";
    out << "; Computer: synthetic 1000-host cluster, 8 cores per host\n";
    out << "; Note: generated workload, " << jobs << " usable jobs in a " << days
        << "-day window (seed " << seed << ")\n";
    std::uniform_int_distribution<int> uid(1, 50), exe(1, 30);
    std::int64_t number = 1;
    for (const Job& j : all) {
        // job submit wait run procs avgcpu usedmem reqprocs reqtime reqmem
        // status uid gid exe queue partition prevjob thinktime
        out << number++ << ' ' << j.submit << ' ' << -1 << ' ' << j.run << ' ' << j.procs << ' '
            << -1 << ' ' << -1 << ' ' << j.procs << ' ' << (j.run > 0 ? j.run + 60 : -1) << ' '
            << -1 << ' ' << (j.run > 0 ? 1 : 0) << ' ' << uid(rng) << ' ' << 1 << ' ' << exe(rng)
            << ' ' << 1 << ' ' << 1 << ' ' << -1 << ' ' << -1 << '\n';
    }
    std::fprintf(stderr, "wrote %lld records to %s\n", static_cast<long long>(number - 1),
                 out_path.c_str());
    return 0;
}
