#ifndef QVMC_TVMC_HPP
#define QVMC_TVMC_HPP

#include <functional>

#include "qvmc/sampler.hpp"

namespace qvmc {

// Linear annealing schedule: gamma(0) = 1, gamma(T) = 0.
struct Schedule {
    double total_time = 1.0;

    double gamma(double t) const { return 1.0 - t / total_time; }
};

enum class RegMode { SvdCutoff, DiagonalShift };

struct Regularization {
    RegMode mode = RegMode::SvdCutoff;
    double value = 1e-6;
};

// S alpha_dot = -i f, estimated from connected sample averages.
struct TvmcLinearSystem {
    Eigen::MatrixXd s;       // real symmetric covariance of the O_k
    Eigen::VectorXcd f;      // connected <E_loc O_k>
    double mc_error_scale = 0.0;  // 1/sqrt(n_samples), 0 for exact summation
};

TvmcLinearSystem estimate_system(const SampleStats& stats);

struct SolveInfo {
    double s_min = 0.0;
    double s_max = 0.0;
    int rank = 0;
};

Eigen::VectorXcd solve_parameter_derivative(const TvmcLinearSystem& sys,
                                            const Regularization& reg,
                                            SolveInfo* info = nullptr);

// ||f||_2 / sqrt(K): stationarity diagnostic, zero at a variational
// fixed point of the instantaneous Hamiltonian.
double vap_residual(const TvmcLinearSystem& sys);

struct IntegrationConfig {
    double dt = 0.0;  // <= 0: use T/1000
    bool exact_sum = false;
    SamplingPlan plan;
    Regularization reg;
    ParamSupport support = ParamSupport::GraphEdges;
    int output_stride = 10;
    std::uint64_t seed = 0;
    std::optional<double> e_min;  // enables e_residual and ground-hit tracking
    Exec exec = Exec::OpenMP;
};

struct TrajectoryPoint {
    double t = 0.0;
    double s = 0.0;
    double gamma = 0.0;
    double e_inst = 0.0;      // Re<E_loc>/N
    double e_inst_err = 0.0;
    double e_residual = 0.0;  // NaN when no e_min supplied
    double kink_density = 0.0;  // NaN off-chain
    double vap_residual = 0.0;
    double acceptance_rate = 0.0;
    double s_min = 0.0;
    double s_max = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    JastrowParams final_params;
    std::vector<std::pair<double, JastrowParams>> param_snapshots;
};

// Heun (2-stage, 2nd order) integration of the t-VMC equations from
// the all-zero parameter point, with a fresh statistics estimate at
// each stage. Optional per-point callback fires at output strides.
Trajectory integrate_annealing(
    const ProblemInstance& inst, const Schedule& sched, const IntegrationConfig& cfg,
    const std::function<void(const TrajectoryPoint&)>& on_output = {});

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          const std::string& source_tag = "tvmc");

std::string params_to_json(const JastrowParams& p);
JastrowParams params_from_json(const std::string& text);

}  // namespace qvmc

#endif
