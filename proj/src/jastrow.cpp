#include "qvmc/jastrow.hpp"

#include <cmath>
#include <stdexcept>

namespace qvmc {

JastrowBasis JastrowBasis::build(const ProblemInstance& inst, ParamSupport support) {
    JastrowBasis basis;
    basis.n_sites = inst.n_sites;
    if (support == ParamSupport::GraphEdges) {
        basis.pair_params.reserve(inst.edges.size());
        for (const Edge& e : inst.edges) basis.pair_params.push_back({e.i, e.j});
    } else {
        for (int i = 0; i < inst.n_sites; ++i)
            for (int j = i + 1; j < inst.n_sites; ++j) basis.pair_params.push_back({i, j});
    }
    basis.adjacency.assign(basis.n_sites, {});
    for (int k = 0; k < static_cast<int>(basis.pair_params.size()); ++k) {
        auto [i, j] = basis.pair_params[k];
        basis.adjacency[i].push_back({j, k});
        basis.adjacency[j].push_back({i, k});
    }
    return basis;
}

JastrowParams JastrowParams::zeros(const JastrowBasis& basis) {
    JastrowParams p;
    p.j1.assign(basis.n_sites, cplx{0.0, 0.0});
    p.j2.assign(basis.pair_params.size(), cplx{0.0, 0.0});
    return p;
}

void JastrowParams::check_dims(const JastrowBasis& basis) const {
    if (static_cast<int>(j1.size()) != basis.n_sites ||
        j2.size() != basis.pair_params.size())
        throw std::invalid_argument("JastrowParams dimensions do not match basis");
}

cplx log_psi(const JastrowBasis& basis, const JastrowParams& p, const SpinConfig& cfg) {
    p.check_dims(basis);
    if (static_cast<int>(cfg.size()) != basis.n_sites)
        throw std::invalid_argument("log_psi: config size mismatch");
    cplx acc{0.0, 0.0};
    for (int i = 0; i < basis.n_sites; ++i) acc += p.j1[i] * static_cast<double>(cfg[i]);
    for (std::size_t k = 0; k < basis.pair_params.size(); ++k) {
        auto [i, j] = basis.pair_params[k];
        acc += p.j2[k] * static_cast<double>(cfg[i] * cfg[j]);
    }
    return acc;
}

cplx log_ratio_flip(const JastrowBasis& basis, const JastrowParams& p, const SpinConfig& cfg,
                    int site) {
    if (site < 0 || site >= basis.n_sites)
        throw std::out_of_range("log_ratio_flip: site index out of range");
    cplx acc = p.j1[site];
    for (auto [other, k] : basis.adjacency[site])
        acc += p.j2[k] * static_cast<double>(cfg[other]);
    return -2.0 * static_cast<double>(cfg[site]) * acc;
}

cplx local_energy(const JastrowBasis& basis, const JastrowParams& p, const SpinConfig& cfg,
                  const ProblemInstance& inst, double gamma) {
    cplx flip_sum{0.0, 0.0};
    for (int i = 0; i < basis.n_sites; ++i)
        flip_sum += std::exp(log_ratio_flip(basis, p, cfg, i));
    return (1.0 - gamma) * classical_energy(inst, cfg) - gamma * flip_sum;
}

void o_vector(const JastrowBasis& basis, const SpinConfig& cfg, std::span<double> out) {
    if (static_cast<int>(out.size()) != basis.n_params())
        throw std::invalid_argument("o_vector: output size mismatch");
    for (int i = 0; i < basis.n_sites; ++i) out[i] = static_cast<double>(cfg[i]);
    for (std::size_t k = 0; k < basis.pair_params.size(); ++k) {
        auto [i, j] = basis.pair_params[k];
        out[basis.n_sites + k] = static_cast<double>(cfg[i] * cfg[j]);
    }
}

}  // namespace qvmc
