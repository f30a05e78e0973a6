#include "ctbn/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "ctbn/error.hpp"
#include "ctbn/parallel.hpp"
#include "ctbn/rng.hpp"
#include "ctbn/select.hpp"
#include "ctbn/simulate.hpp"
#include "ctbn/stats.hpp"

namespace ctbn {

RecoveryScore score(const EdgeSet& truth, const EdgeSet& est) {
    if (truth.empty()) throw Error(ErrorKind::UndefinedBound, "power is undefined for an empty true edge set");
    std::size_t hits = 0;
    std::size_t undirected = 0;
    for (const auto& e : truth) {
        const bool direct = est.count(e) > 0;
        hits += direct ? 1 : 0;
        undirected += (direct || est.count({e.second, e.first}) > 0) ? 1 : 0;
    }
    RecoveryScore s;
    s.md = static_cast<int>(est.size());
    s.power = static_cast<double>(hits) / static_cast<double>(truth.size());
    const std::size_t false_pos = est.size() - std::count_if(est.begin(), est.end(), [&](const Edge& e) {
                                                  return truth.count(e) > 0;
                                              });
    s.fdr = static_cast<double>(false_pos) / static_cast<double>(std::max<std::size_t>(est.size(), 1));
    s.undirected_power = static_cast<double>(undirected) / static_cast<double>(truth.size());
    return s;
}

const char* to_string(Benchmark b) noexcept { return b == Benchmark::M1 ? "M1" : "M2"; }

ExperimentReport run_experiment(const ExperimentSpec& spec, const SolverConfig& cfg, int threads) {
    if (spec.n_reps < 1) throw Error(ErrorKind::InvalidParameter, "n_reps must be at least 1");
    if (!(spec.T > 0.0)) throw Error(ErrorKind::InvalidParameter, "T must be positive");
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    ExperimentReport report;
    report.spec = spec;
    report.reps.resize(static_cast<std::size_t>(spec.n_reps));
    parallel_for(report.reps.size(), threads, [&](std::size_t i) {
        ReplicationResult& r = report.reps[i];
        r.rep = static_cast<int>(i);
        r.seed = derive_seed(spec.seed, i);
        try {
            const std::uint64_t model_seed = derive_seed(r.seed, 0);
            const std::uint64_t path_seed = derive_seed(r.seed, 1);
            const CtbnModel model = spec.model == Benchmark::M1 ? make_m1(spec.d, model_seed) : make_m2(spec.d, model_seed);
            const Trajectory traj = sample_path(model, Stationary{}, spec.T, path_seed);
            const SuffStats stats = extract(traj);
            const StructureFit fit = fit_structure(stats, cfg, 1);
            r.n_jumps = fit.n_jumps;
            r.score = score(model.edges(), fit.edges);
        } catch (const std::exception& e) {
            r.failed = true;
            r.error = e.what();
        }
    });

    double p = 0.0, f = 0.0, m = 0.0, u = 0.0;
    int ok = 0;
    for (const auto& r : report.reps) {
        if (r.failed) {
            ++report.failures;
            continue;
        }
        p += r.score.power;
        f += r.score.fdr;
        m += r.score.md;
        u += r.score.undirected_power;
        ++ok;
    }
    if (ok > 0) {
        report.mean_power = p / ok;
        report.mean_fdr = f / ok;
        report.mean_md = m / ok;
        report.mean_undirected_power = u / ok;
    }
    report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

namespace {

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string report_csv(const ExperimentReport& report) {
    std::string out = "model,d,T,rep,power,fdr,md,undirected_power,failed\n";
    for (const auto& r : report.reps) {
        out += std::string(to_string(report.spec.model)) + "," + std::to_string(report.spec.d) + "," +
               fmt_g(report.spec.T) + "," + std::to_string(r.rep) + "," + fmt_g(r.score.power) + "," +
               fmt_g(r.score.fdr) + "," + std::to_string(r.score.md) + "," + fmt_g(r.score.undirected_power) + "," +
               (r.failed ? "1" : "0") + "\n";
    }
    return out;
}

std::string summary_csv_header() { return "model,d,T,reps,power,fdr,md,undirected_power,failures\n"; }

std::string summary_csv_row(const ExperimentReport& report) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%d,%s,%d,%.4f,%.4f,%.4f,%.4f,%d\n", to_string(report.spec.model),
                  report.spec.d, fmt_g(report.spec.T).c_str(), report.spec.n_reps, report.mean_power, report.mean_fdr,
                  report.mean_md, report.mean_undirected_power, report.failures);
    return buf;
}

} // namespace ctbn
