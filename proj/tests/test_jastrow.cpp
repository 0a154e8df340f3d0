#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "qvmc/jastrow.hpp"

using namespace qvmc;

namespace {

JastrowParams random_params(const JastrowBasis& basis, std::uint64_t seed, double scale = 0.3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    JastrowParams p = JastrowParams::zeros(basis);
    for (auto& c : p.j1) c = {g(rng), g(rng)};
    for (auto& c : p.j2) c = {g(rng), g(rng)};
    return p;
}

SpinConfig decode(std::uint64_t b, int n) {
    SpinConfig cfg(n);
    for (int i = 0; i < n; ++i) cfg[i] = (b >> i) & 1 ? 1 : -1;
    return cfg;
}

// independent amplitude table: exponent recomputed with explicit loops
// over the parameter lists, no shared code with log_psi
cplx table_exponent(const JastrowBasis& basis, const JastrowParams& p, const SpinConfig& cfg) {
    cplx acc = 0.0;
    for (int i = 0; i < basis.n_sites; ++i)
        acc += p.j1[i] * (cfg[i] > 0 ? 1.0 : -1.0);
    for (std::size_t k = 0; k < basis.pair_params.size(); ++k) {
        double si = cfg[basis.pair_params[k].first] > 0 ? 1.0 : -1.0;
        double sj = cfg[basis.pair_params[k].second] > 0 ? 1.0 : -1.0;
        acc += p.j2[k] * si * sj;
    }
    return acc;
}

}  // namespace

TEST_CASE("log_psi zero params is uniform") {
    auto inst = gen_ri1d(6, 1);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = JastrowParams::zeros(basis);
    for (std::uint64_t b = 0; b < 64; ++b)
        CHECK(std::abs(log_psi(basis, p, decode(b, 6))) == 0.0);
}

TEST_CASE("log_psi two-site substitution") {
    ProblemInstance inst;
    inst.n_sites = 2;
    inst.edges = {{0, 1, -0.5}};
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    JastrowParams p = JastrowParams::zeros(basis);
    p.j1[0] = {0.2, 0.1};
    p.j1[1] = {-0.4, 0.3};
    const cplx c{0.7, -0.2};
    p.j2[0] = c;
    cplx got = log_psi(basis, p, {1, -1});
    cplx want = p.j1[0] - p.j1[1] - c;
    CHECK(std::abs(got - want) < 1e-15);
}

TEST_CASE("log_psi matches independent amplitude table") {
    auto inst = gen_sk(8, 3);
    for (auto support : {ParamSupport::GraphEdges, ParamSupport::AllPairs}) {
        auto basis = JastrowBasis::build(inst, support);
        auto p = random_params(basis, 17);
        for (std::uint64_t b = 0; b < 256; ++b) {
            auto cfg = decode(b, 8);
            cplx want = std::exp(table_exponent(basis, p, cfg));
            cplx got = std::exp(log_psi(basis, p, cfg));
            CHECK(std::abs(got - want) < 1e-12 * std::abs(want));
        }
    }
}

TEST_CASE("log_ratio_flip basics") {
    ProblemInstance inst;
    inst.n_sites = 2;
    inst.edges = {{0, 1, -0.5}};
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto zero = JastrowParams::zeros(basis);
    CHECK(std::abs(log_ratio_flip(basis, zero, {1, 1}, 0)) == 0.0);

    JastrowParams p = JastrowParams::zeros(basis);
    p.j1[0] = {0.3, -0.1};
    const cplx c{0.25, 0.5};
    p.j2[0] = c;
    cplx got = log_ratio_flip(basis, p, {1, 1}, 0);
    CHECK(std::abs(got - (-2.0 * (p.j1[0] + c))) < 1e-15);

    CHECK_THROWS_AS(log_ratio_flip(basis, p, {1, 1}, 2), std::out_of_range);
}

TEST_CASE("log_ratio_flip consistent with full evaluation") {
    auto inst = gen_sk(8, 9);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = random_params(basis, 23);
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        auto cfg = decode(rng(), 8);
        for (int site = 0; site < 8; ++site) {
            SpinConfig flipped = cfg;
            flipped[site] = -flipped[site];
            cplx want = log_psi(basis, p, flipped) - log_psi(basis, p, cfg);
            CHECK(std::abs(log_ratio_flip(basis, p, cfg, site) - want) < 1e-12);
        }
    }
}

TEST_CASE("local_energy limits") {
    auto inst = gen_ri1d(8, 4);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto zero = JastrowParams::zeros(basis);
    auto p = random_params(basis, 31);
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 5; ++rep) {
        auto cfg = decode(rng(), 8);
        // gamma=1, zero params: sigma^x on the uniform superposition
        CHECK(std::abs(local_energy(basis, zero, cfg, inst, 1.0) - cplx{-8.0, 0.0}) < 1e-12);
        // gamma=0: diagonal Hamiltonian, independent of params
        cplx diag = local_energy(basis, p, cfg, inst, 0.0);
        CHECK(std::abs(diag - cplx{classical_energy(inst, cfg), 0.0}) < 1e-12);
    }
}

TEST_CASE("local_energy matches dense matrix oracle") {
    auto inst = gen_sk(8, 13);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = random_params(basis, 41);
    const double gamma = 0.37;
    const int dim = 256;

    // psi vector and H * psi built directly from definitions
    std::vector<cplx> psi(dim);
    for (int b = 0; b < dim; ++b) psi[b] = std::exp(table_exponent(basis, p, decode(b, 8)));
    std::vector<cplx> hpsi(dim, 0.0);
    for (int b = 0; b < dim; ++b) {
        hpsi[b] += (1.0 - gamma) * classical_energy(inst, decode(b, 8)) * psi[b];
        for (int i = 0; i < 8; ++i) hpsi[b] -= gamma * psi[b ^ (1 << i)];
    }
    for (int b = 0; b < dim; ++b) {
        cplx want = hpsi[b] / psi[b];
        cplx got = local_energy(basis, p, decode(b, 8), inst, gamma);
        CHECK(std::abs(got - want) < 1e-10 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("o_vector values and finite differences") {
    ProblemInstance inst;
    inst.n_sites = 2;
    inst.edges = {{0, 1, -0.5}};
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    std::vector<double> o(3);
    o_vector(basis, {1, -1}, o);
    CHECK(o[0] == 1.0);
    CHECK(o[1] == -1.0);
    CHECK(o[2] == -1.0);

    auto sk = gen_sk(6, 8);
    auto skb = JastrowBasis::build(sk, ParamSupport::AllPairs);
    auto p = random_params(skb, 55);
    std::mt19937_64 rng(7);
    std::vector<double> ov(skb.n_params());
    const double h = 1e-5;
    for (int rep = 0; rep < 4; ++rep) {
        auto cfg = decode(rng(), 6);
        o_vector(skb, cfg, ov);
        for (double x : ov) CHECK(std::abs(std::abs(x) - 1.0) < 1e-15);
        // central differences of log_psi in each parameter
        for (int k = 0; k < skb.n_params(); ++k) {
            auto plus = p, minus = p;
            auto& tp = k < 6 ? plus.j1[k] : plus.j2[k - 6];
            auto& tm = k < 6 ? minus.j1[k] : minus.j2[k - 6];
            tp += h;
            tm -= h;
            cplx fd = (log_psi(skb, plus, cfg) - log_psi(skb, minus, cfg)) / (2.0 * h);
            CHECK(std::abs(fd - cplx{ov[k], 0.0}) < 1e-8);
        }
    }
}

TEST_CASE("boltzmann mapping of real two-body parameters") {
    // Re J2 = -beta V / 2 makes |Psi|^2 the Gibbs weight of E_cl
    auto inst = gen_sk(8, 44);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    const double beta = 0.8;
    JastrowParams p = JastrowParams::zeros(basis);
    for (std::size_t k = 0; k < basis.pair_params.size(); ++k)
        p.j2[k] = {-beta * inst.edges[k].v / 2.0, 0.4};  // Im part must not matter

    double z_psi = 0.0, z_gibbs = 0.0;
    std::vector<double> w_psi(256), w_gibbs(256);
    for (int b = 0; b < 256; ++b) {
        auto cfg = decode(b, 8);
        w_psi[b] = std::exp(2.0 * log_psi(basis, p, cfg).real());
        w_gibbs[b] = std::exp(-beta * classical_energy(inst, cfg));
        z_psi += w_psi[b];
        z_gibbs += w_gibbs[b];
    }
    for (int b = 0; b < 256; ++b)
        CHECK(w_psi[b] / z_psi == doctest::Approx(w_gibbs[b] / z_gibbs).epsilon(1e-10));
}

TEST_CASE("dimension mismatches are rejected") {
    auto inst = gen_ri1d(4, 1);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = JastrowParams::zeros(basis);
    p.j1.pop_back();
    CHECK_THROWS_AS(log_psi(basis, p, SpinConfig(4, 1)), std::invalid_argument);
}
