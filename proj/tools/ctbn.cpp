// ctbn: simulate, fit, experiment and theory subcommands.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctbn/chain.hpp"
#include "ctbn/error.hpp"
#include "ctbn/io.hpp"
#include "ctbn/metrics.hpp"
#include "ctbn/parallel.hpp"
#include "ctbn/rng.hpp"
#include "ctbn/select.hpp"
#include "ctbn/simulate.hpp"
#include "ctbn/stats.hpp"
#include "ctbn/theory.hpp"
#include "ctbn/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ctbn;

namespace {

struct Common {
    std::string out = "out";
    int threads = 0;
    std::uint64_t seed = 1;
};

struct ModelSource {
    bool m1 = false;
    bool m2 = false;
    int d = 0;
    std::string model_file;
};

struct SolverFlags {
    SolverConfig cfg;
    std::string criterion = "deviance";
};

int threads_of(const Common& c) { return c.threads > 0 ? c.threads : default_threads(); }

void make_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void write_json(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

json solver_json(const SolverFlags& s) {
    return {{"grid_size", s.cfg.grid_size}, {"lambda_min_ratio", s.cfg.lambda_min_ratio},
            {"L0", s.cfg.L0},               {"eta", s.cfg.eta},
            {"max_iter", s.cfg.max_iter},   {"tol", s.cfg.tol},
            {"criterion", s.criterion}};
}

json metadata(const std::string& command, const Common& c) {
    return {{"command", command}, {"version", kVersion}, {"seed", c.seed}, {"threads", c.threads}, {"out", c.out}};
}

void add_model_flags(CLI::App* cmd, ModelSource& m, bool allow_file) {
    auto* m1 = cmd->add_flag("--m1", m.m1, "chain benchmark M1");
    auto* m2 = cmd->add_flag("--m2", m.m2, "random two-parent benchmark M2");
    m1->excludes(m2);
    cmd->add_option("--d", m.d, "number of nodes for --m1/--m2");
    if (allow_file) {
        auto* f = cmd->add_option("--model", m.model_file, "model JSON file");
        f->excludes(m1)->excludes(m2);
    }
}

void add_solver_flags(CLI::App* cmd, SolverFlags& s) {
    cmd->add_option("--grid-size", s.cfg.grid_size, "lambda grid points")->capture_default_str();
    cmd->add_option("--lambda-min-ratio", s.cfg.lambda_min_ratio, "smallest lambda / lambda_max")->capture_default_str();
    cmd->add_option("--tol", s.cfg.tol, "FISTA tolerance")->capture_default_str();
    cmd->add_option("--max-iter", s.cfg.max_iter, "FISTA iteration cap")->capture_default_str();
    cmd->add_option("--criterion", s.criterion, "likelihood weight in BIC/GIC: deviance (2T) or per-jump (n)")
        ->check(CLI::IsMember({"deviance", "per-jump"}))
        ->capture_default_str();
}

void finalize_solver(SolverFlags& s) {
    s.cfg.criterion_scale = s.criterion == "per-jump" ? CriterionScale::PerJump : CriterionScale::Deviance;
    s.cfg.validate();
}

void check_generator(const ModelSource& m) {
    if (m.m1 && (m.d < 2 || m.d > kMaxNodes)) throw Error(ErrorKind::InvalidParameter, "--d must be in [2, 64] for --m1");
    if (m.m2 && (m.d < 5 || m.d > kMaxNodes)) throw Error(ErrorKind::InvalidParameter, "--d must be in [5, 64] for --m2");
}

CtbnModel load_model(const ModelSource& m, std::uint64_t seed) {
    if (!m.model_file.empty()) {
        json j;
        try {
            j = json::parse(read_text_file(m.model_file));
        } catch (const json::exception& e) {
            throw Error(ErrorKind::InvalidInput, "model file '" + m.model_file + "' is not valid JSON: " + e.what());
        }
        return model_from_json(j);
    }
    if (!m.m1 && !m.m2) throw Error(ErrorKind::InvalidParameter, "one of --m1, --m2 or --model is required");
    check_generator(m);
    return m.m1 ? make_m1(m.d, seed) : make_m2(m.d, seed);
}

json source_json(const ModelSource& m) {
    if (!m.model_file.empty()) return {{"model_file", m.model_file}};
    return {{"generator", m.m1 ? "M1" : "M2"}, {"d", m.d}};
}

Trajectory load_trajectory(const std::string& path) {
    try {
        return trajectory_from_json(json::parse(read_text_file(path)));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidInput, "trajectory '" + path + "' is not valid JSON: " + e.what());
    } catch (const Error& e) {
        throw Error(e.kind(), "trajectory '" + path + "': " + e.what());
    }
}

std::string rep_name(const char* stem, std::size_t i, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03zu%s", stem, i, ext);
    return buf;
}

// --- simulate ---

struct SimulateArgs {
    ModelSource src;
    double T = 10.0;
    int reps = 1;
};

void cmd_simulate(const Common& c, const SimulateArgs& a) {
    if (!(a.T > 0.0)) throw Error(ErrorKind::InvalidParameter, "--T must be positive");
    if (a.reps < 1) throw Error(ErrorKind::InvalidParameter, "--reps must be >= 1");
    const CtbnModel model = load_model(a.src, derive_seed(c.seed, 0));
    const auto paths = replicate(model, Stationary{}, a.T, a.reps, derive_seed(c.seed, 1), threads_of(c));

    make_dir(c.out);
    write_json(join(c.out, "model.json"), model_to_json(model));
    json files = json::array();
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const std::string name = rep_name("traj", i, ".json");
        write_text_file(join(c.out, name), trajectory_to_json(paths[i]));
        files.push_back(name);
    }
    json meta = metadata("simulate", c);
    meta["source"] = source_json(a.src);
    meta["T"] = a.T;
    meta["reps"] = a.reps;
    meta["model_seed"] = derive_seed(c.seed, 0);
    meta["path_seeds"] = json::array();
    for (int i = 0; i < a.reps; ++i) meta["path_seeds"].push_back(derive_seed(derive_seed(c.seed, 1), static_cast<std::uint64_t>(i)));
    meta["start"] = model.d() <= kMaxAmalgamatedNodes ? "stationary" : "burn-in";
    meta["files"] = std::move(files);
    write_json(join(c.out, "metadata.json"), meta);
    std::cout << "wrote " << paths.size() << " trajectories to " << c.out << "\n";
}

// --- fit ---

struct FitArgs {
    std::vector<std::string> inputs;
    SolverFlags solver;
};

std::string paths_csv(const StructureFit& fit) {
    std::string out = "w,s,sp,lambda,objective,nnz,kkt_gap,converged\n";
    for (std::size_t i = 0; i < fit.paths.size(); ++i) {
        if (!fit.paths[i]) continue;
        const LambdaPath& lp = *fit.paths[i];
        const std::string prefix = std::to_string(lp.key.w) + "," + std::to_string(lp.key.s()) + "," +
                                   std::to_string(lp.key.sp()) + ",";
        for (std::size_t k = 0; k < lp.size(); ++k) {
            out += prefix + format_double(lp.lambdas[k]) + "," + format_double(lp.objectives[k]) + "," +
                   std::to_string(lp.nnz(k)) + "," + format_double(lp.kkt_gaps[k]) + "," +
                   std::to_string(static_cast<int>(lp.converged[k])) + "\n";
        }
    }
    return out;
}

void cmd_fit(const Common& c, FitArgs& a) {
    finalize_solver(a.solver);
    std::vector<Trajectory> trajs;
    for (const auto& f : a.inputs) trajs.push_back(load_trajectory(f));
    make_dir(c.out);

    json outputs = json::array();
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        const std::string dir = trajs.size() == 1 ? c.out : join(c.out, rep_name("fit", i, ""));
        make_dir(dir);
        const SuffStats stats = extract(trajs[i]);
        const StructureFit fit = fit_structure(stats, a.solver.cfg, threads_of(c));
        json report;
        report["input"] = a.inputs[i];
        report["d"] = fit.d;
        report["n_jumps"] = fit.n_jumps;
        report["triples"] = selection_report_json(fit);
        write_json(join(dir, "selection.json"), report);
        write_text_file(join(dir, "edges.txt"), edge_list(fit.edges));
        write_text_file(join(dir, "paths.csv"), paths_csv(fit));
        outputs.push_back({{"input", a.inputs[i]}, {"dir", dir}, {"n_jumps", fit.n_jumps}, {"edges", fit.edges.size()}});
        std::cout << a.inputs[i] << ": " << fit.edges.size() << " edges\n";
    }
    json meta = metadata("fit", c);
    meta["inputs"] = a.inputs;
    meta["solver"] = solver_json(a.solver);
    meta["outputs"] = std::move(outputs);
    write_json(join(c.out, "metadata.json"), meta);
}

// --- experiment ---

struct ExperimentArgs {
    ModelSource src;
    double T = 10.0;
    int reps = 100;
    SolverFlags solver;
};

void cmd_experiment(const Common& c, ExperimentArgs& a) {
    if (!a.src.m1 && !a.src.m2) throw Error(ErrorKind::InvalidParameter, "one of --m1 or --m2 is required");
    check_generator(a.src);
    if (!(a.T > 0.0)) throw Error(ErrorKind::InvalidParameter, "--T must be positive");
    if (a.reps < 1) throw Error(ErrorKind::InvalidParameter, "--reps must be >= 1");
    finalize_solver(a.solver);

    ExperimentSpec spec;
    spec.model = a.src.m1 ? Benchmark::M1 : Benchmark::M2;
    spec.d = a.src.d;
    spec.T = a.T;
    spec.n_reps = a.reps;
    spec.seed = c.seed;
    const ExperimentReport rep = run_experiment(spec, a.solver.cfg, threads_of(c));

    make_dir(c.out);
    const std::string summary = summary_csv_header() + summary_csv_row(rep);
    write_text_file(join(c.out, "summary.csv"), summary);
    write_text_file(join(c.out, "replications.csv"), report_csv(rep));
    json meta = metadata("experiment", c);
    meta["source"] = source_json(a.src);
    meta["T"] = a.T;
    meta["reps"] = a.reps;
    meta["solver"] = solver_json(a.solver);
    meta["model_per_replication"] = true;
    meta["replication_seeds"] = json::array();
    for (const auto& r : rep.reps) meta["replication_seeds"].push_back(r.seed);
    meta["failures"] = rep.failures;
    write_json(join(c.out, "metadata.json"), meta);
    std::cout << summary;
    std::fprintf(stderr, "runtime %.1f s\n", rep.runtime_seconds);
}

// --- theory ---

struct TheoryArgs {
    ModelSource src;
    double xi = 3.0;
    double epsilon = 0.05;
    double T = 0.0;
    int cone_dirs = 0;
};

void cmd_theory(const Common& c, const TheoryArgs& a) {
    if (!(a.xi > 1.0)) throw Error(ErrorKind::InvalidParameter, "--xi must exceed 1");
    if (!(a.epsilon > 0.0 && a.epsilon < 1.0)) throw Error(ErrorKind::InvalidParameter, "--epsilon must be in (0, 1)");
    const CtbnModel model = load_model(a.src, derive_seed(c.seed, 0));
    if (!model.beta()) throw Error(ErrorKind::Unsupported, "model has no log-linear beta; theory constants need one (M2 has none)");
    if (model.d() > kMaxAmalgamatedNodes) {
        throw Error(ErrorKind::Capacity, "theory needs the full 2^d-state chain, limited to d <= " +
                                             std::to_string(kMaxAmalgamatedNodes));
    }
    const ChainAnalysis chain = analyze_chain(model);
    const TheoremBounds b = theorem_bounds(model, chain, a.xi, a.epsilon, a.T);
    json report = theory_report_json(b);
    if (a.cone_dirs > 0) report["cone_factor_estimate"] = cone_factor_estimate(*model.beta(), a.xi, a.cone_dirs, derive_seed(c.seed, 2));

    make_dir(c.out);
    write_json(join(c.out, "theory.json"), report);
    json meta = metadata("theory", c);
    meta["source"] = source_json(a.src);
    meta["xi"] = a.xi;
    meta["epsilon"] = a.epsilon;
    meta["T"] = a.T;
    meta["cone_dirs"] = a.cone_dirs;
    write_json(join(c.out, "metadata.json"), meta);
    std::cout << report.dump(2) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse structure learning for binary continuous-time Bayesian networks"};
    app.set_config("--config", "", "TOML/INI file with the same keys as the flags");
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common common;
    app.add_option("--out", common.out, "output directory")->capture_default_str();
    app.add_option("--threads", common.threads, "worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--seed", common.seed, "master seed")->capture_default_str();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "simulate trajectories from a model");
    add_model_flags(simulate, sim.src, true);
    simulate->add_option("--T", sim.T, "horizon")->capture_default_str();
    simulate->add_option("--reps", sim.reps, "number of trajectories")->capture_default_str();

    FitArgs fit;
    auto* fitc = app.add_subcommand("fit", "fit the structure from trajectory files");
    fitc->add_option("trajectories", fit.inputs, "trajectory JSON files")->required()->check(CLI::ExistingFile);
    add_solver_flags(fitc, fit.solver);

    ExperimentArgs exp;
    auto* experiment = app.add_subcommand("experiment", "replicated recovery study on M1/M2");
    add_model_flags(experiment, exp.src, false);
    experiment->add_option("--T", exp.T, "horizon")->capture_default_str();
    experiment->add_option("--reps", exp.reps, "replications")->capture_default_str();
    add_solver_flags(experiment, exp.solver);

    TheoryArgs th;
    auto* theory = app.add_subcommand("theory", "consistency constants for a small model");
    add_model_flags(theory, th.src, true);
    theory->add_option("--xi", th.xi, "cone parameter, > 1")->capture_default_str();
    theory->add_option("--epsilon", th.epsilon, "failure probability")->capture_default_str();
    theory->add_option("--T", th.T, "horizon for the lambda window (default T_min)");
    theory->add_option("--cone-dirs", th.cone_dirs, "random directions for the cone-factor estimate");

    for (auto* sub : {simulate, fitc, experiment, theory}) {
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--threads", common.threads, "worker threads (0 = all cores)");
        sub->add_option("--seed", common.seed, "master seed");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) cmd_simulate(common, sim);
        else if (*fitc) cmd_fit(common, fit);
        else if (*experiment) cmd_experiment(common, exp);
        else if (*theory) cmd_theory(common, th);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::InvalidParameter ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
