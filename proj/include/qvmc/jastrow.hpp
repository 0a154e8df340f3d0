#ifndef QVMC_JASTROW_HPP
#define QVMC_JASTROW_HPP

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "qvmc/instance.hpp"

namespace qvmc {

using cplx = std::complex<double>;

enum class ParamSupport { GraphEdges, AllPairs };

// Two-body parameter geometry for a given instance: which (i,j) pairs
// carry a J^(2) parameter, plus per-site adjacency for O(degree) flip
// ratios. Flat parameter order is all one-body terms followed by the
// two-body terms in pair_params order.
struct JastrowBasis {
    int n_sites = 0;
    std::vector<std::pair<int, int>> pair_params;
    // site -> list of (other site, two-body param index)
    std::vector<std::vector<std::pair<int, int>>> adjacency;

    int n_params() const { return n_sites + static_cast<int>(pair_params.size()); }

    static JastrowBasis build(const ProblemInstance& inst, ParamSupport support);
};

// The variational state: complex one- and two-body log-amplitudes.
struct JastrowParams {
    std::vector<cplx> j1;
    std::vector<cplx> j2;

    static JastrowParams zeros(const JastrowBasis& basis);
    void check_dims(const JastrowBasis& basis) const;
};

// Exponent of the wave function amplitude: sum_i J1_i s_i + sum_(i,j) J2_ij s_i s_j.
cplx log_psi(const JastrowBasis& basis, const JastrowParams& p, const SpinConfig& cfg);

// log Psi(flip site) - log Psi(cfg); O(degree of site).
cplx log_ratio_flip(const JastrowBasis& basis, const JastrowParams& p, const SpinConfig& cfg,
                    int site);

// E_loc = (1-gamma) E_cl(cfg) - gamma sum_i Psi(flip_i cfg)/Psi(cfg).
cplx local_energy(const JastrowBasis& basis, const JastrowParams& p, const SpinConfig& cfg,
                  const ProblemInstance& inst, double gamma);

// Log-derivatives O_k(cfg); entries are exactly +/-1 and independent of
// the parameter values for this log-linear ansatz.
void o_vector(const JastrowBasis& basis, const SpinConfig& cfg, std::span<double> out);

}  // namespace qvmc

#endif
