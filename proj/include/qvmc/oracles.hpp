#ifndef QVMC_ORACLES_HPP
#define QVMC_ORACLES_HPP

#include <Eigen/Dense>

#include "qvmc/tvmc.hpp"

namespace qvmc {

// --- dense Schroedinger propagation -------------------------------------

struct DenseState {
    int n_sites = 0;
    Eigen::VectorXcd amplitudes;  // 2^N, computational basis, bit i = spin i
};

DenseState uniform_superposition(int n_sites);

struct GroundSolution {
    double e_min = 0.0;
    std::vector<SpinConfig> ground_set;  // complete for enumerable sizes
    long degeneracy = 0;
};

struct ExactObservables {
    double energy = 0.0;
    double kink_density = 0.0;
    double p_success = 0.0;  // NaN without a ground solution
};

ExactObservables exact_observables(const DenseState& state, const ProblemInstance& inst,
                                   double gamma, const GroundSolution* ground = nullptr);

struct DensePoint {
    double t = 0.0;
    ExactObservables obs;
};

// RK4 on i psi_dot = H(t) psi with matrix-free H application (sigma^x as
// bit flips, cached classical diagonal). Renormalizes each step and
// tracks the worst norm drift.
struct DenseTrajectory {
    std::vector<DensePoint> points;
    DenseState final_state;
    double max_norm_drift = 0.0;
};

DenseTrajectory exact_propagate(const ProblemInstance& inst, const Schedule& sched, double dt,
                                int output_stride = 1, const GroundSolution* ground = nullptr,
                                Exec exec = Exec::OpenMP, int max_sites = 20);

// serial reference / OpenMP kernel for one H(t) application
void apply_hamiltonian(const ProblemInstance& inst, double gamma,
                       const std::vector<double>& diag, const Eigen::VectorXcd& in,
                       Eigen::VectorXcd& out, Exec exec);
std::vector<double> classical_diagonal(const ProblemInstance& inst);

// --- classical ground states --------------------------------------------

// Exhaustive bit enumeration up to max_sites (Gray-code incremental
// energies); RI1D of any size is resolved analytically.
GroundSolution brute_force_ground(const ProblemInstance& inst, int max_sites = 32,
                                  std::size_t max_ground_set = 1024);

// --- free-fermion (Jordan-Wigner) chain dynamics ------------------------

struct FermionPoint {
    double t = 0.0;
    double energy_density = 0.0;
    double kink_density = 0.0;
};

// Time-dependent Bogoliubov-de Gennes evolution of the correlation
// matrices G = <c^dag c>, F = <c c> for an open random-bond chain;
// exact for any chain length.
std::vector<FermionPoint> free_fermion_propagate(const ProblemInstance& inst,
                                                 const Schedule& sched, double dt,
                                                 int output_stride = 1);

// --- classical simulated annealing --------------------------------------

struct SaResult {
    SpinConfig cfg;
    double energy = 0.0;
    bool hit = false;  // reached e_min (when supplied)
};

SaResult simulated_annealing(const ProblemInstance& inst, int n_sweeps, double beta_start,
                             double beta_end, std::uint64_t seed,
                             std::optional<double> e_min = std::nullopt,
                             double e_min_tol = 1e-9);

}  // namespace qvmc

#endif
