#ifndef QVMC_OBSERVABLES_HPP
#define QVMC_OBSERVABLES_HPP

#include "qvmc/sampler.hpp"

namespace qvmc {

struct ValueWithError {
    double value = 0.0;
    double error = 0.0;
};

// Re<E_loc>/N with jackknife-over-chains error bar.
ValueWithError energy_density(const SampleStats& stats, int n_sites);

// rho_k = sum_bonds <1 - s_i s_{i+1}> / (2N), open-boundary chain.
double kink_density(const SampleStats& stats, const ProblemInstance& inst);
double kink_density(const SpinConfig& cfg);

// <E_cl>/N - e0, with e0 the per-site ground energy from an oracle.
double residual_energy(const SampleStats& stats, double e0_per_site, int n_sites);

// N_rep = log(1-p0)/log(1-p_s); clamped to 1 at p_s = 1, +inf at p_s = 0.
double n_repetitions(double p_s, double p0 = 0.99);

enum class SuccessMode { Sampled, ExactSum };

struct GroundSolution;  // oracles

ValueWithError success_probability(const JastrowBasis& basis, const JastrowParams& p,
                                   const ProblemInstance& inst, const GroundSolution& ground,
                                   SuccessMode mode, const SamplingPlan& plan,
                                   std::uint64_t seed);

struct BetaEff {
    double t = 0.0;
    std::vector<int> edge_index;   // indices into inst.edges with V != 0
    std::vector<double> beta;      // -2 Re J2_ij / V_ij
    int n_excluded = 0;            // parameterized pairs without a nonzero coupling
};

BetaEff effective_inverse_temperatures(const JastrowBasis& basis, const JastrowParams& p,
                                       const ProblemInstance& inst, double t);

struct KdeCurve {
    std::vector<double> grid;
    std::vector<double> density;

    double integral() const;  // trapezoid
};

// Gaussian KDE with Silverman's rule-of-thumb bandwidth by default.
// Callers pass log-transformed values where a log-density is wanted.
KdeCurve kde_density(std::span<const double> values, double bandwidth = 0.0,
                     int grid_points = 512);

void write_kde_csv(const KdeCurve& curve, const std::string& path);

}  // namespace qvmc

#endif
