#pragma once

// Structure-recovery scores and the replicated simulation study.

#include <cstdint>
#include <string>
#include <vector>

#include "ctbn/model.hpp"
#include "ctbn/solver.hpp"

namespace ctbn {

struct RecoveryScore {
    double power = 0.0;
    double fdr = 0.0;
    int md = 0;
    /// Fraction of true edges found in either direction.
    double undirected_power = 0.0;
};

/// power = |true & est| / |true|, fdr = |est \ true| / max(|est|, 1), md = |est|.
/// Throws UndefinedBound when the true edge set is empty.
RecoveryScore score(const EdgeSet& truth, const EdgeSet& est);

enum class Benchmark { M1, M2 };

const char* to_string(Benchmark b) noexcept;

struct ExperimentSpec {
    Benchmark model = Benchmark::M1;
    int d = 20;
    double T = 10.0;
    int n_reps = 100;
    std::uint64_t seed = 1;
};

struct ReplicationResult {
    int rep = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    std::int64_t n_jumps = 0;
    RecoveryScore score;
};

struct ExperimentReport {
    ExperimentSpec spec;
    std::vector<ReplicationResult> reps;
    double mean_power = 0.0;
    double mean_fdr = 0.0;
    double mean_md = 0.0;
    double mean_undirected_power = 0.0;
    int failures = 0;
    double runtime_seconds = 0.0;
};

/// Per replication: draw a fresh model, simulate from the stationary start,
/// extract, fit every triple, select and score. Failures are recorded and
/// excluded from the means.
ExperimentReport run_experiment(const ExperimentSpec& spec, const SolverConfig& cfg, int threads = 1);

/// One row per replication: model,d,T,rep,power,fdr,md,undirected_power,failed
std::string report_csv(const ExperimentReport& report);

/// Table-style summary: model,d,T,reps,power,fdr,md,undirected_power,failures
std::string summary_csv_header();
std::string summary_csv_row(const ExperimentReport& report);

} // namespace ctbn
