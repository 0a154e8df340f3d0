#include "doctest.h"

#include <cmath>
#include <map>
#include <random>

#include "qvmc/sampler.hpp"
#include "qvmc/stats_tests.hpp"

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

}  // namespace

TEST_CASE("uniform target accepts every proposal") {
    auto inst = gen_ri1d(8, 2);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = JastrowParams::zeros(basis);
    auto stats = sample_batch(basis, p, inst, 1.0, {4, 50, 20000, 1}, 11, Exec::Serial);
    CHECK(stats.acceptance_rate() == doctest::Approx(1.0));
    // each site magnetization ~ 0
    auto mo = stats.mean_o();
    for (int i = 0; i < 8; ++i)
        CHECK(std::abs(mo(i)) < 3.0 / std::sqrt(double(stats.n_samples)) * 3.0);
    // exact ground state of the driver at gamma=1: E_loc = -N identically
    CHECK(stats.mean_eloc().real() / 8.0 == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("strong field pins the chain") {
    auto inst = gen_ri1d(6, 3);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = JastrowParams::zeros(basis);
    for (auto& c : p.j1) c = {10.0, 0.0};
    ChainState chain = make_chain(basis, p, 77);
    for (int s = 0; s < 200; ++s) metropolis_sweep(chain, basis, p);
    for (auto sp : chain.cfg) CHECK(sp == 1);
    CHECK(chain.log_weight ==
          doctest::Approx(2.0 * log_psi(basis, p, chain.cfg).real()).epsilon(1e-10));
}

TEST_CASE("log_weight cache stays consistent over sweeps") {
    auto inst = gen_sk(8, 5);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = random_params(basis, 13, 0.5);
    ChainState chain = make_chain(basis, p, 3);
    for (int s = 0; s < 50; ++s) {
        metropolis_sweep(chain, basis, p);
        CHECK(std::abs(chain.log_weight - 2.0 * log_psi(basis, p, chain.cfg).real()) < 1e-10);
    }
}

TEST_CASE("chi-square against exact |Psi|^2 on 6 sites") {
    auto inst = gen_sk(6, 19);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = random_params(basis, 29, 0.25);

    // exact distribution over the 64 configurations
    std::vector<double> weight(64);
    double z = 0.0;
    for (int b = 0; b < 64; ++b) {
        SpinConfig cfg(6);
        for (int i = 0; i < 6; ++i) cfg[i] = (b >> i) & 1 ? 1 : -1;
        weight[b] = std::exp(2.0 * log_psi(basis, p, cfg).real());
        z += weight[b];
    }

    // chi-square assumes independent draws: decorrelate with deep thinning
    const long n_samples = 1000000;
    const int thin = 12;
    ChainState chain = make_chain(basis, p, 101);
    for (int s = 0; s < 100; ++s) metropolis_sweep(chain, basis, p);
    std::vector<double> counts(64, 0.0);
    for (long s = 0; s < n_samples; ++s) {
        for (int t = 0; t < thin; ++t) metropolis_sweep(chain, basis, p);
        int b = 0;
        for (int i = 0; i < 6; ++i)
            if (chain.cfg[i] > 0) b |= 1 << i;
        counts[b] += 1.0;
    }
    std::vector<double> expected(64);
    for (int b = 0; b < 64; ++b) expected[b] = weight[b] / z * double(n_samples);
    CHECK(chi_square_pvalue(counts, expected) > 0.01);
}

TEST_CASE("sampled moments match exact summation") {
    auto inst = gen_sk(8, 23);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = random_params(basis, 37, 0.2);
    const double gamma = 0.6;

    auto exact = exact_sum_stats(basis, p, inst, gamma, Exec::Serial);
    auto sampled =
        sample_batch(basis, p, inst, gamma, {8, 100, 200000, 2}, 303, Exec::OpenMP);

    auto mo_exact = exact.mean_o();
    auto mo_sampled = sampled.mean_o();
    // bound on 4 standard errors: var(O_k) <= 1, generous autocorrelation factor
    const double tol = 4.0 * std::sqrt(6.0 / double(sampled.n_samples));
    for (int k = 0; k < basis.n_params(); ++k)
        CHECK(std::abs(mo_sampled(k) - mo_exact(k)) < tol);
    CHECK(std::abs(sampled.mean_eloc() - exact.mean_eloc()) < 8.0 * tol);
}

TEST_CASE("merge over chains equals sequential accumulation") {
    auto inst = gen_ri1d(8, 6);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = random_params(basis, 3);

    SamplingPlan plan{4, 40, 4000, 1};
    auto merged_serial = sample_batch(basis, p, inst, 0.5, plan, 909, Exec::Serial);
    auto merged_parallel = sample_batch(basis, p, inst, 0.5, plan, 909, Exec::OpenMP);

    // chains are independent streams, so the execution mode cannot matter
    CHECK(merged_serial.n_samples == merged_parallel.n_samples);
    CHECK(merged_serial.sum_eloc.real() ==
          doctest::Approx(merged_parallel.sum_eloc.real()).epsilon(1e-14));
    CHECK((merged_serial.mean_oo() - merged_parallel.mean_oo()).norm() < 1e-12);
    CHECK((merged_serial.mean_o() - merged_parallel.mean_o()).norm() < 1e-13);
}

TEST_CASE("merge is associative and commutative within roundoff") {
    auto inst = gen_ri1d(6, 8);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = random_params(basis, 9);
    SamplingPlan plan{1, 30, 1500, 1};
    auto a = sample_batch(basis, p, inst, 0.4, plan, 1, Exec::Serial);
    auto b = sample_batch(basis, p, inst, 0.4, plan, 2, Exec::Serial);
    auto c = sample_batch(basis, p, inst, 0.4, plan, 3, Exec::Serial);

    SampleStats ab = a, abc1 = a, bc = b;
    ab.merge(b);
    SampleStats ab_c = ab;
    ab_c.merge(c);
    bc.merge(c);
    abc1.merge(bc);
    CHECK(std::abs(ab_c.sum_eloc - abc1.sum_eloc) <
          1e-12 * std::max(1.0, std::abs(ab_c.sum_eloc)));
    CHECK((ab_c.mean_oo() - abc1.mean_oo()).norm() < 1e-12);

    SampleStats ba = b;
    ba.merge(a);
    CHECK(std::abs(ab.sum_eloc - ba.sum_eloc) < 1e-12 * std::max(1.0, std::abs(ab.sum_eloc)));
}

TEST_CASE("exact summation serial and openmp agree") {
    auto inst = gen_sk(10, 12);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = random_params(basis, 21);
    auto a = exact_sum_stats(basis, p, inst, 0.3, Exec::Serial);
    auto b = exact_sum_stats(basis, p, inst, 0.3, Exec::OpenMP);
    CHECK(std::abs(a.mean_eloc() - b.mean_eloc()) < 1e-12);
    CHECK((a.mean_o() - b.mean_o()).norm() < 1e-12);
    CHECK((a.mean_oo() - b.mean_oo()).norm() < 1e-12);
}

TEST_CASE("standard error shrinks like 1/sqrt(n)") {
    auto inst = gen_ri1d(6, 14);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = random_params(basis, 31, 0.2);
    auto small = sample_batch(basis, p, inst, 0.5, {8, 60, 4000, 1}, 5, Exec::Serial);
    auto large = sample_batch(basis, p, inst, 0.5, {8, 60, 64000, 1}, 5, Exec::Serial);
    // 16x the samples: error should drop by roughly 4, allow slack
    CHECK(large.eloc_error() < small.eloc_error());
    CHECK(large.eloc_error() < small.eloc_error() / 1.8);
}

TEST_CASE("plan validation") {
    auto inst = gen_ri1d(4, 1);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = JastrowParams::zeros(basis);
    CHECK_THROWS_AS(sample_batch(basis, p, inst, 0.5, {0, 1, 10, 1}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_batch(basis, p, inst, 0.5, {1, 1, 0, 1}, 1),
                    std::invalid_argument);
}
