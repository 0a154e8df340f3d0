// qvmc: annealing experiment driver.
//
// Verbs: generate (instances only), anneal (single run), ensemble,
// sa-baseline, oracle (exact reference runs). Any flag can also come from
// an INI config file (--config), which is mirrored into the output
// directory. Exit codes: 0 success, 2 partial ensemble failure, 1 fatal.
// QVMC_WORKERS bounds the worker count.
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qvmc/observables.hpp"
#include "qvmc/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qvmc;

namespace {

struct ExperimentConfig {
    std::string family = "ri1d";
    int n = 8;                       // sites (ri1d/sk) or ignored for chimera
    int chimera_m = 2, chimera_cells = 2;
    std::string chimera_coupling = "normal";
    std::vector<double> t_list = {4.0};
    double dt = 0.0;                 // <= 0: T/1000
    long samples = 10000;
    int chains = 4;
    int burn_in = -1;
    int thin = 1;
    bool exact_sum = false;
    std::string support = "graph_edges";
    std::string reg_mode = "svd_cutoff";
    double reg_value = 1e-6;
    int output_stride = 10;
    int realizations = 1;
    std::uint64_t base_seed = 1;
    bool oracle_ground = true;       // classical ground solve for P_s / e_residual
    long ps_samples = 20000;         // success-probability sampling budget
    int sa_sweeps = 1000;
    int sa_repeats = 100;
    double beta_start = 0.1, beta_end = 3.0;
    std::string oracle_method = "dense";  // oracle verb: dense | fermion
    std::string out_dir = "runs";
};

ProblemInstance make_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
    if (cfg.family == "ri1d") return gen_ri1d(cfg.n, seed);
    if (cfg.family == "sk") return gen_sk(cfg.n, seed);
    if (cfg.family == "chimera") {
        auto coupling = cfg.chimera_coupling == "pm1" ? ChimeraCoupling::PlusMinusOne
                                                      : ChimeraCoupling::Normal;
        return gen_chimera(cfg.chimera_m, cfg.chimera_cells, coupling, seed);
    }
    throw std::invalid_argument("unknown family: " + cfg.family);
}

// deterministic child streams: instances depend on the realization only,
// run seeds on (realization, T index)
std::uint64_t instance_seed(const ExperimentConfig& cfg, int r) {
    return mix64(cfg.base_seed ^ mix64(0x696e7374ULL + r));
}
std::uint64_t run_seed(const ExperimentConfig& cfg, int r, int ti) {
    return mix64(cfg.base_seed ^ mix64(0x72756eULL + 1000003ULL * r + ti));
}

IntegrationConfig integration_config(const ExperimentConfig& cfg, double T,
                                     std::uint64_t seed, Exec exec,
                                     std::optional<double> e_min) {
    IntegrationConfig ic;
    ic.dt = cfg.dt > 0.0 ? cfg.dt : T / 1000.0;
    ic.exact_sum = cfg.exact_sum;
    ic.plan = {cfg.chains, cfg.burn_in, cfg.samples, cfg.thin};
    ic.reg.mode = cfg.reg_mode == "diagonal_shift" ? RegMode::DiagonalShift
                                                   : RegMode::SvdCutoff;
    ic.reg.value = cfg.reg_value;
    ic.support = cfg.support == "all_pairs" ? ParamSupport::AllPairs
                                            : ParamSupport::GraphEdges;
    ic.output_stride = cfg.output_stride;
    ic.seed = seed;
    ic.e_min = e_min;
    ic.exec = exec;
    return ic;
}

bool ground_solve_feasible(const ProblemInstance& inst) {
    return (inst.family == Family::RI1D && inst.is_chain()) || inst.n_sites <= 32;
}

struct RunResult {
    json result;             // result.json content
    Trajectory traj;
    double T = 0.0;
    int realization = 0;
    bool ok = false;
    std::string error;
};

RunResult run_single(const ExperimentConfig& cfg, int r, int ti, Exec exec,
                     const fs::path& dir) {
    RunResult out;
    out.realization = r;
    out.T = cfg.t_list[ti];
    const double T = out.T;
    try {
        auto inst = make_instance(cfg, instance_seed(cfg, r));
        std::optional<GroundSolution> ground;
        if (cfg.oracle_ground && ground_solve_feasible(inst))
            ground = brute_force_ground(inst);

        const std::uint64_t seed = run_seed(cfg, r, ti);
        auto ic = integration_config(cfg, T, seed, exec,
                                     ground ? std::optional<double>(ground->e_min)
                                            : std::nullopt);
        auto traj = integrate_annealing(inst, {T}, ic);

        fs::create_directories(dir);
        write_trajectory_csv(traj, (dir / "trajectory.csv").string());
        {
            std::ofstream f(dir / "params_final.json");
            f << params_to_json(traj.final_params);
        }
        for (const auto& [t, p] : traj.param_snapshots) {
            std::ostringstream name;
            name << "params_t" << t << ".json";
            std::ofstream f(dir / name.str());
            f << params_to_json(p);
        }
        save_instance(inst, (dir / "instance.json").string());

        const auto& fin = traj.points.back();
        json res;
        res["family"] = family_name(inst.family);
        res["n_sites"] = inst.n_sites;
        res["instance_seed"] = inst.seed;
        res["run_seed"] = seed;
        res["T"] = T;
        res["dt"] = ic.dt;
        res["samples_per_stage"] = cfg.samples;
        res["exact_sum"] = cfg.exact_sum;
        res["support"] = cfg.support;
        res["regularization"] = {{"mode", cfg.reg_mode}, {"value", cfg.reg_value}};
        res["e_final"] = fin.e_inst;
        res["e_final_err"] = fin.e_inst_err;
        res["kink_density_final"] =
            std::isnan(fin.kink_density) ? json() : json(fin.kink_density);
        res["acceptance_final"] = fin.acceptance_rate;
        if (ground) {
            res["e_min"] = ground->e_min;
            res["degeneracy"] = ground->degeneracy;
            res["e_residual_final"] = fin.e_inst - ground->e_min / inst.n_sites;
            auto basis = JastrowBasis::build(inst, ic.support);
            auto mode = cfg.exact_sum && inst.n_sites <= 20 ? SuccessMode::ExactSum
                                                            : SuccessMode::Sampled;
            auto ps = success_probability(
                basis, traj.final_params, inst, *ground, mode,
                {cfg.chains, cfg.burn_in, cfg.ps_samples, cfg.thin}, mix64(seed + 1));
            res["p_success"] = ps.value;
            res["p_success_err"] = ps.error;
            res["n_rep"] = std::isfinite(n_repetitions(ps.value))
                               ? json(n_repetitions(ps.value))
                               : json();
        } else {
            res["e_min"] = nullptr;
            res["e_residual_final"] = nullptr;
            res["p_success"] = nullptr;
            res["n_rep"] = nullptr;
        }
        {
            std::ofstream f(dir / "result.json");
            f << res.dump(2) << '\n';
        }
        out.result = std::move(res);
        out.traj = std::move(traj);
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = std::string("run r=") + std::to_string(r) +
                    " T=" + std::to_string(T) + ": " + e.what();
    }
    return out;
}

// mirror the resolved settings of the invoked verb so any run can be
// reproduced with `qvmc <verb> --config <this file>`
void mirror_config(CLI::App& app, const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    CLI::App* sub = app.get_subcommands().front();
    std::ofstream f(fs::path(cfg.out_dir) / "config_resolved.ini");
    f << '[' << sub->get_name() << "]\n" << sub->config_to_str(true, true);
}

int workers() {
    if (const char* env = std::getenv("QVMC_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) return w;
    }
    return omp_get_max_threads();
}

void write_kde_if_possible(const std::vector<double>& values, const fs::path& path) {
    std::vector<double> finite;
    for (double v : values)
        if (std::isfinite(v)) finite.push_back(v);
    if (finite.size() < 2) return;
    write_kde_csv(kde_density(finite), path.string());
}

std::string t_tag(double T) {
    std::ostringstream s;
    s << "T" << T;
    return s.str();
}

int cmd_generate(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    for (int r = 0; r < cfg.realizations; ++r) {
        auto inst = make_instance(cfg, instance_seed(cfg, r));
        std::ostringstream name;
        name << "instance_r" << r << ".json";
        save_instance(inst, (fs::path(cfg.out_dir) / name.str()).string());
    }
    std::cout << "wrote " << cfg.realizations << " instance(s) to " << cfg.out_dir
              << '\n';
    return 0;
}

int cmd_anneal(const ExperimentConfig& cfg) {
    omp_set_num_threads(workers());
    auto res = run_single(cfg, 0, 0, Exec::OpenMP, cfg.out_dir);
    if (!res.ok) {
        std::cerr << "error: " << res.error << '\n';
        return 1;
    }
    std::cout << res.result.dump(2) << '\n';
    return 0;
}

int cmd_ensemble(const ExperimentConfig& cfg) {
    const int n_workers = workers();
    const int grid = cfg.realizations * static_cast<int>(cfg.t_list.size());
    // ensemble parallelism first; chains go parallel only when the grid
    // cannot fill the workers
    const Exec inner = grid < n_workers ? Exec::OpenMP : Exec::Serial;
    omp_set_num_threads(n_workers);

    std::vector<RunResult> results(grid);
#pragma omp parallel for schedule(dynamic) if (inner == Exec::Serial)
    for (int g = 0; g < grid; ++g) {
        const int r = g / static_cast<int>(cfg.t_list.size());
        const int ti = g % static_cast<int>(cfg.t_list.size());
        std::ostringstream dir;
        dir << "run_r" << r << "_" << t_tag(cfg.t_list[ti]);
        results[g] = run_single(cfg, r, ti, inner, fs::path(cfg.out_dir) / dir.str());
    }

    int failures = 0;
    std::ofstream summary(fs::path(cfg.out_dir) / "summary.csv");
    summary << "realization,T,status,e_final,e_final_err,kink_density_final,"
               "p_success,n_rep\n";
    for (const auto& res : results) {
        if (!res.ok) {
            ++failures;
            std::cerr << "error: " << res.error << '\n';
            summary << res.realization << ',' << res.T << ",failed,,,,,\n";
            continue;
        }
        auto field = [&](const char* key) {
            return res.result[key].is_null() ? std::string()
                                             : res.result[key].dump();
        };
        summary << res.realization << ',' << res.T << ",ok," << field("e_final")
                << ',' << field("e_final_err") << ',' << field("kink_density_final")
                << ',' << field("p_success") << ',' << field("n_rep") << '\n';
    }

    for (std::size_t ti = 0; ti < cfg.t_list.size(); ++ti) {
        const double T = cfg.t_list[ti];
        std::vector<const RunResult*> runs;
        for (const auto& res : results)
            if (res.ok && res.T == T) runs.push_back(&res);
        if (runs.empty()) continue;

        // disorder-mean trajectory on the shared output grid
        const auto& pts0 = runs.front()->traj.points;
        std::ofstream curve(fs::path(cfg.out_dir) / ("mean_curve_" + t_tag(T) + ".csv"));
        curve << "t,s,e_mean,e_err,kink_mean\n";
        for (std::size_t k = 0; k < pts0.size(); ++k) {
            double se = 0.0, se2 = 0.0, sk = 0.0;
            int nk = 0;
            for (const auto* run : runs) {
                double e = run->traj.points[k].e_inst;
                se += e;
                se2 += e * e;
                double kd = run->traj.points[k].kink_density;
                if (std::isfinite(kd)) {
                    sk += kd;
                    ++nk;
                }
            }
            const double m = se / runs.size();
            const double var = std::max(0.0, se2 / runs.size() - m * m);
            const double err =
                runs.size() > 1 ? std::sqrt(var / (runs.size() - 1)) : 0.0;
            curve << pts0[k].t << ',' << pts0[k].s << ',' << m << ',' << err << ','
                  << (nk ? sk / nk : std::nan("")) << '\n';
        }

        // distribution files (log scale where the paper plots log densities)
        std::vector<double> log_kink, log_ps, nrep, nrep_rows;
        std::ofstream nrep_csv(fs::path(cfg.out_dir) / ("nrep_" + t_tag(T) + ".csv"));
        nrep_csv << "instance_seed,p_success,n_rep\n";
        for (const auto* run : runs) {
            const auto& res = run->result;
            if (!res["kink_density_final"].is_null() &&
                res["kink_density_final"].get<double>() > 0.0)
                log_kink.push_back(std::log(res["kink_density_final"].get<double>()));
            if (!res["p_success"].is_null()) {
                double ps = res["p_success"].get<double>();
                if (ps > 0.0) log_ps.push_back(std::log(ps));
                nrep_csv << res["instance_seed"].get<std::uint64_t>() << ',' << ps
                         << ',' << (res["n_rep"].is_null() ? "inf" : res["n_rep"].dump())
                         << '\n';
                if (!res["n_rep"].is_null()) nrep.push_back(res["n_rep"].get<double>());
            }
        }
        write_kde_if_possible(log_kink,
                              fs::path(cfg.out_dir) / ("kde_log_kink_" + t_tag(T) + ".csv"));
        write_kde_if_possible(log_ps,
                              fs::path(cfg.out_dir) / ("kde_log_ps_" + t_tag(T) + ".csv"));
        write_kde_if_possible(nrep,
                              fs::path(cfg.out_dir) / ("kde_nrep_" + t_tag(T) + ".csv"));
    }

    if (failures == grid) return 1;
    return failures > 0 ? 2 : 0;
}

int cmd_sa_baseline(const ExperimentConfig& cfg) {
    if (cfg.sa_repeats < 1) {
        std::cerr << "error: sa-baseline needs at least one repeat\n";
        return 1;
    }
    omp_set_num_threads(workers());
    fs::create_directories(cfg.out_dir);
    std::vector<std::string> rows(cfg.realizations);
    std::vector<int> failed(cfg.realizations, 0);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < cfg.realizations; ++r) {
        try {
            auto inst = make_instance(cfg, instance_seed(cfg, r));
            if (!ground_solve_feasible(inst))
                throw std::invalid_argument("ground solve infeasible at this size");
            auto ground = brute_force_ground(inst);
            int hits = 0;
            for (int k = 0; k < cfg.sa_repeats; ++k) {
                auto res = simulated_annealing(inst, cfg.sa_sweeps, cfg.beta_start,
                                               cfg.beta_end,
                                               mix64(instance_seed(cfg, r) + k),
                                               ground.e_min);
                if (res.hit) ++hits;
            }
            const double ps = double(hits) / cfg.sa_repeats;
            const double nr = n_repetitions(ps);
            std::ostringstream row;
            row << inst.seed << ',' << ps << ','
                << (std::isfinite(nr) ? std::to_string(nr) : std::string("inf"));
            rows[r] = row.str();
        } catch (const std::exception& e) {
            failed[r] = 1;
            rows[r] = std::string("# failed: ") + e.what();
        }
    }

    // same schema as the quantum nrep files
    std::ofstream out(fs::path(cfg.out_dir) / "nrep_sa.csv");
    out << "instance_seed,p_success,n_rep\n";
    std::vector<double> nrep;
    for (int r = 0; r < cfg.realizations; ++r) {
        out << rows[r] << '\n';
        if (!failed[r]) {
            std::istringstream in(rows[r]);
            std::string seed, ps, nr;
            std::getline(in, seed, ',');
            std::getline(in, ps, ',');
            std::getline(in, nr, ',');
            if (nr != "inf") nrep.push_back(std::stod(nr));
        }
    }
    write_kde_if_possible(nrep, fs::path(cfg.out_dir) / "kde_nrep_sa.csv");

    const int n_failed = std::count(failed.begin(), failed.end(), 1);
    std::cout << "sa-baseline: " << (cfg.realizations - n_failed) << '/'
              << cfg.realizations << " instances completed\n";
    if (n_failed == cfg.realizations) return 1;
    return n_failed > 0 ? 2 : 0;
}

int cmd_oracle(const ExperimentConfig& cfg) {
    omp_set_num_threads(workers());
    fs::create_directories(cfg.out_dir);
    for (int r = 0; r < cfg.realizations; ++r) {
        auto inst = make_instance(cfg, instance_seed(cfg, r));
        for (double T : cfg.t_list) {
            const double dt = cfg.dt > 0.0 ? cfg.dt : T / 1000.0;
            std::ostringstream name;
            name << "oracle_" << cfg.oracle_method << "_r" << r << "_" << t_tag(T)
                 << ".csv";
            std::ofstream out(fs::path(cfg.out_dir) / name.str());
            if (cfg.oracle_method == "fermion") {
                auto pts = free_fermion_propagate(inst, {T}, dt, cfg.output_stride);
                out << "# source=fermion\nt,s,gamma,e_inst,kink_density\n";
                for (const auto& p : pts)
                    out << p.t << ',' << p.t / T << ',' << 1.0 - p.t / T << ','
                        << p.energy_density << ',' << p.kink_density << '\n';
            } else if (cfg.oracle_method == "dense") {
                std::optional<GroundSolution> ground;
                if (cfg.oracle_ground && ground_solve_feasible(inst))
                    ground = brute_force_ground(inst);
                auto traj = exact_propagate(inst, {T}, dt, cfg.output_stride,
                                            ground ? &*ground : nullptr);
                out << "# source=dense\nt,s,gamma,e_inst,kink_density,p_success\n";
                for (const auto& p : traj.points)
                    out << p.t << ',' << p.t / T << ',' << 1.0 - p.t / T << ','
                        << p.obs.energy / inst.n_sites << ',' << p.obs.kink_density
                        << ',' << p.obs.p_success << '\n';
            } else {
                throw std::invalid_argument("unknown oracle method: " +
                                            cfg.oracle_method);
            }
        }
    }
    std::cout << "oracle runs written to " << cfg.out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"t-VMC annealing experiments on disordered Ising models"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file; flags override its keys");
    app.allow_config_extras(CLI::config_extras_mode::ignore_all);
    app.option_defaults()->always_capture_default(true);

    ExperimentConfig cfg;
    auto add_common = [&](CLI::App* sub) {
        sub->fallthrough();  // lets --config appear after the verb
        sub->add_option("--family", cfg.family, "ri1d | sk | chimera")
            ->check(CLI::IsMember({"ri1d", "sk", "chimera"}));
        sub->add_option("--n", cfg.n, "number of sites (ri1d, sk)");
        sub->add_option("--chimera-m", cfg.chimera_m, "chimera cell rows");
        sub->add_option("--chimera-n", cfg.chimera_cells, "chimera cell columns");
        sub->add_option("--chimera-coupling", cfg.chimera_coupling, "normal | pm1")
            ->check(CLI::IsMember({"normal", "pm1"}));
        sub->add_option("--realizations", cfg.realizations, "number of disorder draws")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", cfg.base_seed, "base seed for all child streams");
        sub->add_option("--out-dir", cfg.out_dir, "output directory");
        sub->add_option("-T,--t-list", cfg.t_list, "annealing times");
        sub->add_option("--dt", cfg.dt, "time step (default T/1000)");
        sub->add_option("--output-stride", cfg.output_stride, "steps between records");
    };
    auto add_tvmc = [&](CLI::App* sub) {
        sub->add_option("--samples", cfg.samples, "MC samples per stage");
        sub->add_option("--chains", cfg.chains, "Metropolis chains");
        sub->add_option("--burn-in", cfg.burn_in, "burn-in sweeps (-1: 10N)");
        sub->add_option("--thin", cfg.thin, "sweeps between samples");
        sub->add_flag("--exact-sum", cfg.exact_sum, "sum all configs instead of sampling");
        sub->add_option("--support", cfg.support, "graph_edges | all_pairs")
            ->check(CLI::IsMember({"graph_edges", "all_pairs"}));
        sub->add_option("--reg-mode", cfg.reg_mode, "svd_cutoff | diagonal_shift")
            ->check(CLI::IsMember({"svd_cutoff", "diagonal_shift"}));
        sub->add_option("--reg-value", cfg.reg_value, "regularization strength");
        sub->add_flag("--oracle-ground,!--no-oracle-ground", cfg.oracle_ground,
                      "classical ground solve for P_s and residual energy")
            ->default_str("true");
        sub->add_option("--ps-samples", cfg.ps_samples, "success-probability samples");
    };

    auto* generate = app.add_subcommand("generate", "write problem instances");
    add_common(generate);
    auto* anneal = app.add_subcommand("anneal", "single t-VMC annealing run");
    add_common(anneal);
    add_tvmc(anneal);
    auto* ensemble = app.add_subcommand("ensemble", "disorder ensemble over (r, T)");
    add_common(ensemble);
    add_tvmc(ensemble);
    auto* sa = app.add_subcommand("sa-baseline", "classical simulated annealing");
    add_common(sa);
    sa->add_option("--sa-sweeps", cfg.sa_sweeps, "sweeps per SA run")
        ->check(CLI::PositiveNumber);
    sa->add_option("--sa-repeats", cfg.sa_repeats, "SA runs per instance");
    sa->add_option("--beta-start", cfg.beta_start, "initial inverse temperature");
    sa->add_option("--beta-end", cfg.beta_end, "final inverse temperature");
    auto* oracle = app.add_subcommand("oracle", "exact reference trajectories");
    add_common(oracle);
    oracle->add_option("--method", cfg.oracle_method, "dense | fermion")
        ->check(CLI::IsMember({"dense", "fermion"}));
    oracle->add_flag("--oracle-ground,!--no-oracle-ground", cfg.oracle_ground,
                     "track ground-state weight (dense method)")
        ->default_str("true");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        mirror_config(app, cfg);
        if (generate->parsed()) return cmd_generate(cfg);
        if (anneal->parsed()) return cmd_anneal(cfg);
        if (ensemble->parsed()) return cmd_ensemble(cfg);
        if (sa->parsed()) return cmd_sa_baseline(cfg);
        if (oracle->parsed()) return cmd_oracle(cfg);
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
