#include "qvmc/tvmc.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qvmc {

TvmcLinearSystem estimate_system(const SampleStats& stats) {
    if (stats.weight <= 0.0) throw std::runtime_error("estimate_system: no samples");
    TvmcLinearSystem sys;
    Eigen::VectorXd mo = stats.mean_o();
    sys.s = stats.mean_oo() - mo * mo.transpose();
    sys.f = stats.mean_eloc_o() - stats.mean_eloc() * mo.cast<cplx>();
    sys.mc_error_scale =
        stats.block_eloc.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(stats.n_samples));
    return sys;
}

Eigen::VectorXcd solve_parameter_derivative(const TvmcLinearSystem& sys,
                                            const Regularization& reg, SolveInfo* info) {
    if (reg.value < 0.0) throw std::invalid_argument("regularization value must be >= 0");
    const int k = static_cast<int>(sys.s.rows());
    if (sys.s.norm() == 0.0) throw std::runtime_error("degenerate metric: S is zero");

    Eigen::VectorXcd x(k);
    if (reg.mode == RegMode::DiagonalShift) {
        Eigen::MatrixXd shifted = sys.s;
        shifted.diagonal() += reg.value * sys.s.diagonal();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
        Eigen::VectorXd xr = ldlt.solve(sys.f.real());
        Eigen::VectorXd xi = ldlt.solve(sys.f.imag());
        x.real() = xr;
        x.imag() = xi;
        if (info) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.s,
                                                              Eigen::EigenvaluesOnly);
            info->s_min = es.eigenvalues().minCoeff();
            info->s_max = es.eigenvalues().maxCoeff();
            info->rank = k;
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.s);
        const Eigen::VectorXd& lam = es.eigenvalues();
        const Eigen::MatrixXd& v = es.eigenvectors();
        const double lam_max = lam.maxCoeff();
        if (lam_max <= 0.0) throw std::runtime_error("degenerate metric: S has no positive modes");
        const double cut = reg.value * lam_max;
        Eigen::VectorXcd proj = v.transpose().cast<cplx>() * sys.f;
        int rank = 0;
        for (int i = 0; i < k; ++i) {
            if (lam(i) > cut && lam(i) > 0.0) {
                proj(i) /= lam(i);
                ++rank;
            } else {
                proj(i) = 0.0;
            }
        }
        if (rank == 0) throw std::runtime_error("degenerate metric: all modes below cutoff");
        x = v.cast<cplx>() * proj;
        if (info) {
            info->s_min = lam.minCoeff();
            info->s_max = lam_max;
            info->rank = rank;
        }
    }
    return cplx{0.0, -1.0} * x;
}

double vap_residual(const TvmcLinearSystem& sys) {
    const int k = static_cast<int>(sys.f.size());
    return sys.f.norm() / std::sqrt(static_cast<double>(k));
}

namespace {

Eigen::VectorXcd flatten(const JastrowParams& p) {
    Eigen::VectorXcd v(p.j1.size() + p.j2.size());
    for (std::size_t i = 0; i < p.j1.size(); ++i) v(i) = p.j1[i];
    for (std::size_t i = 0; i < p.j2.size(); ++i) v(p.j1.size() + i) = p.j2[i];
    return v;
}

JastrowParams unflatten(const Eigen::VectorXcd& v, const JastrowBasis& basis) {
    JastrowParams p;
    p.j1.assign(v.data(), v.data() + basis.n_sites);
    p.j2.assign(v.data() + basis.n_sites, v.data() + basis.n_params());
    return p;
}

}  // namespace

Trajectory integrate_annealing(const ProblemInstance& inst, const Schedule& sched,
                               const IntegrationConfig& cfg,
                               const std::function<void(const TrajectoryPoint&)>& on_output) {
    const double T = sched.total_time;
    if (T <= 0.0) throw std::invalid_argument("integrate_annealing: T must be > 0");
    double dt = cfg.dt > 0.0 ? cfg.dt : T / 1000.0;
    if (dt > T) throw std::invalid_argument("integrate_annealing: dt > T");
    const long n_steps = std::max<long>(1, std::lround(T / dt));
    dt = T / static_cast<double>(n_steps);  // uniform grid landing exactly on T

    JastrowBasis basis = JastrowBasis::build(inst, cfg.support);
    Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(basis.n_params());
    const double n = static_cast<double>(inst.n_sites);
    const bool on_chain = inst.is_chain();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    Trajectory traj;

    auto stage_stats = [&](const Eigen::VectorXcd& a, double t, std::uint64_t stage_seed) {
        JastrowParams p = unflatten(a, basis);
        double gamma = sched.gamma(t);
        if (cfg.exact_sum)
            return exact_sum_stats(basis, p, inst, gamma, cfg.exec, cfg.e_min);
        return sample_batch(basis, p, inst, gamma, cfg.plan, stage_seed, cfg.exec, cfg.e_min);
    };

    auto record = [&](long step, double t, const SampleStats& stats,
                      const TvmcLinearSystem& sys, const SolveInfo& si) {
        TrajectoryPoint pt;
        pt.t = t;
        pt.s = t / T;
        pt.gamma = sched.gamma(t);
        pt.e_inst = stats.mean_eloc().real() / n;
        pt.e_inst_err = stats.eloc_error() / n;
        pt.e_residual = cfg.e_min ? stats.mean_ecl() / n - *cfg.e_min / n : nan;
        pt.kink_density = on_chain ? stats.mean_kink() / (2.0 * n) : nan;
        pt.vap_residual = vap_residual(sys);
        pt.acceptance_rate = stats.proposals > 0 ? stats.acceptance_rate() : nan;
        pt.s_min = si.s_min;
        pt.s_max = si.s_max;
        traj.points.push_back(pt);
        if (on_output) on_output(pt);
        traj.param_snapshots.push_back({t, unflatten(alpha, basis)});
        (void)step;
    };

    for (long step = 0; step < n_steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        SampleStats stats1 = stage_stats(alpha, t, mix64(cfg.seed ^ (2 * step + 1)));
        TvmcLinearSystem sys1 = estimate_system(stats1);
        SolveInfo si1;
        Eigen::VectorXcd dot1;
        try {
            dot1 = solve_parameter_derivative(sys1, cfg.reg, &si1);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(std::string(e.what()) + " at t=" + std::to_string(t));
        }

        if (step % cfg.output_stride == 0) record(step, t, stats1, sys1, si1);

        Eigen::VectorXcd predictor = alpha + dt * dot1;
        SampleStats stats2 =
            stage_stats(predictor, t + dt, mix64(cfg.seed ^ (2 * step + 2)));
        TvmcLinearSystem sys2 = estimate_system(stats2);
        Eigen::VectorXcd dot2 = solve_parameter_derivative(sys2, cfg.reg);

        alpha += 0.5 * dt * (dot1 + dot2);
        if (!alpha.allFinite())
            throw std::runtime_error("NaN in variational parameters at t=" +
                                     std::to_string(t + dt));
    }

    // closing record at t = T (gamma = 0)
    SampleStats stats_end = stage_stats(alpha, T, mix64(cfg.seed ^ (2 * n_steps + 1)));
    TvmcLinearSystem sys_end = estimate_system(stats_end);
    SolveInfo si_end;
    try {
        solve_parameter_derivative(sys_end, cfg.reg, &si_end);
    } catch (const std::runtime_error&) {
        // final metric may be fully degenerate; still report the state
    }
    record(n_steps, T, stats_end, sys_end, si_end);

    traj.final_params = unflatten(alpha, basis);
    return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          const std::string& source_tag) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "# source=" << source_tag << "\n";
    out << "t,s,gamma,e_inst,e_inst_err,e_residual,kink_density,vap_residual,"
           "acceptance_rate,s_min,s_max\n";
    out.precision(17);
    for (const auto& pt : traj.points) {
        out << pt.t << ',' << pt.s << ',' << pt.gamma << ',' << pt.e_inst << ','
            << pt.e_inst_err << ',' << pt.e_residual << ',' << pt.kink_density << ','
            << pt.vap_residual << ',' << pt.acceptance_rate << ',' << pt.s_min << ','
            << pt.s_max << '\n';
    }
}

std::string params_to_json(const JastrowParams& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const cplx& c : p.j1) arr.push_back({c.real(), c.imag()});
    for (const cplx& c : p.j2) arr.push_back({c.real(), c.imag()});
    nlohmann::json j;
    j["n_sites"] = p.j1.size();
    j["params"] = std::move(arr);
    return j.dump();
}

JastrowParams params_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const std::size_t n = j.at("n_sites").get<std::size_t>();
    JastrowParams p;
    const auto& arr = j.at("params");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        cplx c{arr[i][0].get<double>(), arr[i][1].get<double>()};
        (i < n ? p.j1 : p.j2).push_back(c);
    }
    return p;
}

}  // namespace qvmc
