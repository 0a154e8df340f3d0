#ifndef QVMC_SAMPLER_HPP
#define QVMC_SAMPLER_HPP

#include <Eigen/Dense>
#include <optional>
#include <random>

#include "qvmc/jastrow.hpp"

namespace qvmc {

enum class Exec { Serial, OpenMP };

struct SamplingPlan {
    int n_chains = 4;
    int burn_in_sweeps = -1;  // -1: use 10 * n_sites
    long n_samples = 10000;   // total across chains
    int thin_sweeps = 1;
};

struct ChainState {
    SpinConfig cfg;
    double log_weight = 0.0;  // cached 2 Re log_psi
    std::mt19937_64 rng;
    long proposals = 0;
    long accepts = 0;
};

ChainState make_chain(const JastrowBasis& basis, const JastrowParams& p, std::uint64_t seed);

// n_sites single-flip proposals at uniformly random sites, accepted with
// min(1, exp(2 Re log_ratio_flip)); the log_weight cache is updated
// incrementally.
void metropolis_sweep(ChainState& chain, const JastrowBasis& basis, const JastrowParams& p);

// Accumulated moments for the t-VMC linear system and the observables.
// All fields are plain weighted sums; means are formed on read, so
// merging two stats objects is exact accumulation of the union.
struct SampleStats {
    int k = 0;
    long n_samples = 0;
    double weight = 0.0;  // total sample weight (== n_samples for MC)
    Eigen::VectorXd sum_o;
    Eigen::MatrixXd sum_oo;
    cplx sum_eloc{0.0, 0.0};
    cplx sum_eloc_sq{0.0, 0.0};
    Eigen::VectorXcd sum_eloc_o;
    double sum_kink = 0.0;
    double sum_ecl = 0.0;
    double sum_ground_hit = 0.0;
    long proposals = 0;
    long accepts = 0;
    // per-chain E_loc block sums for jackknife error bars (empty in exact mode)
    std::vector<cplx> block_eloc;
    std::vector<double> block_weight;

    explicit SampleStats(int n_params = 0);

    void add_sample(std::span<const double> o, cplx eloc, double ecl, double kink,
                    bool ground_hit, double w = 1.0);
    void flush();  // fold the pending o-vector buffer into sum_oo
    void merge(const SampleStats& other);

    Eigen::VectorXd mean_o() const;
    Eigen::MatrixXd mean_oo() const;
    cplx mean_eloc() const;
    Eigen::VectorXcd mean_eloc_o() const;
    double mean_ecl() const { return sum_ecl / weight; }
    double mean_kink() const { return sum_kink / weight; }
    double acceptance_rate() const;
    // jackknife-over-blocks standard error of Re mean_eloc (0 if < 2 blocks)
    double eloc_error() const;

  private:
    Eigen::MatrixXd pending_;  // column-buffered o vectors awaiting a rank update
    Eigen::VectorXd pending_w_;
    int n_pending_ = 0;
};

// Per-sample observables besides E_loc: classical energy always, chain
// kink count when the instance is a 1D chain, ground hit when e_min given.
struct SampleContext {
    const ProblemInstance* inst;
    double gamma;
    bool chain_topology;
    std::optional<double> e_min;
    double e_min_tol = 1e-9;
};

SampleStats sample_batch(const JastrowBasis& basis, const JastrowParams& p,
                         const ProblemInstance& inst, double gamma, const SamplingPlan& plan,
                         std::uint64_t seed, Exec exec = Exec::OpenMP,
                         std::optional<double> e_min = std::nullopt);

// Exact summation over all 2^N configurations weighted by |Psi|^2;
// deterministic replacement for sample_batch at small N.
SampleStats exact_sum_stats(const JastrowBasis& basis, const JastrowParams& p,
                            const ProblemInstance& inst, double gamma,
                            Exec exec = Exec::OpenMP,
                            std::optional<double> e_min = std::nullopt);

double kink_count(const SpinConfig& cfg);  // sum over bonds of (1 - s_i s_{i+1})

}  // namespace qvmc

#endif
