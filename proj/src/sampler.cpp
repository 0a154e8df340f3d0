#include "qvmc/sampler.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qvmc {

namespace {
constexpr int kPendingCapacity = 256;
}

ChainState make_chain(const JastrowBasis& basis, const JastrowParams& p, std::uint64_t seed) {
    ChainState chain;
    chain.rng.seed(seed);
    chain.cfg.resize(basis.n_sites);
    std::uniform_int_distribution<int> coin(0, 1);
    for (auto& s : chain.cfg) s = coin(chain.rng) ? 1 : -1;
    chain.log_weight = 2.0 * log_psi(basis, p, chain.cfg).real();
    return chain;
}

void metropolis_sweep(ChainState& chain, const JastrowBasis& basis, const JastrowParams& p) {
    std::uniform_int_distribution<int> pick(0, basis.n_sites - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int step = 0; step < basis.n_sites; ++step) {
        int site = pick(chain.rng);
        double dlw = 2.0 * log_ratio_flip(basis, p, chain.cfg, site).real();
        ++chain.proposals;
        if (dlw >= 0.0 || unit(chain.rng) < std::exp(dlw)) {
            chain.cfg[site] = static_cast<int8_t>(-chain.cfg[site]);
            chain.log_weight += dlw;
            ++chain.accepts;
        }
    }
}

SampleStats::SampleStats(int n_params)
    : k(n_params),
      sum_o(Eigen::VectorXd::Zero(n_params)),
      sum_oo(Eigen::MatrixXd::Zero(n_params, n_params)),
      sum_eloc_o(Eigen::VectorXcd::Zero(n_params)),
      pending_(n_params, kPendingCapacity),
      pending_w_(kPendingCapacity) {}

void SampleStats::add_sample(std::span<const double> o, cplx eloc, double ecl, double kink,
                             bool ground_hit, double w) {
    Eigen::Map<const Eigen::VectorXd> ov(o.data(), k);
    sum_o.noalias() += w * ov;
    sum_eloc_o.noalias() += (w * eloc) * ov;
    sum_eloc += w * eloc;
    sum_eloc_sq += w * eloc * eloc;
    sum_ecl += w * ecl;
    sum_kink += w * kink;
    if (ground_hit) sum_ground_hit += w;
    weight += w;
    ++n_samples;

    pending_.col(n_pending_) = std::sqrt(w) * ov;
    if (++n_pending_ == kPendingCapacity) flush();
}

void SampleStats::flush() {
    if (n_pending_ == 0) return;
    sum_oo.selfadjointView<Eigen::Lower>().rankUpdate(pending_.leftCols(n_pending_), 1.0);
    n_pending_ = 0;
}

void SampleStats::merge(const SampleStats& other) {
    if (other.k != k) throw std::invalid_argument("SampleStats::merge: size mismatch");
    flush();
    const_cast<SampleStats&>(other).flush();
    n_samples += other.n_samples;
    weight += other.weight;
    sum_o += other.sum_o;
    sum_oo += other.sum_oo;
    sum_eloc += other.sum_eloc;
    sum_eloc_sq += other.sum_eloc_sq;
    sum_eloc_o += other.sum_eloc_o;
    sum_kink += other.sum_kink;
    sum_ecl += other.sum_ecl;
    sum_ground_hit += other.sum_ground_hit;
    proposals += other.proposals;
    accepts += other.accepts;
    block_eloc.insert(block_eloc.end(), other.block_eloc.begin(), other.block_eloc.end());
    block_weight.insert(block_weight.end(), other.block_weight.begin(),
                        other.block_weight.end());
}

Eigen::VectorXd SampleStats::mean_o() const {
    if (weight <= 0.0) throw std::runtime_error("SampleStats: no samples");
    return sum_o / weight;
}

Eigen::MatrixXd SampleStats::mean_oo() const {
    if (weight <= 0.0) throw std::runtime_error("SampleStats: no samples");
    const_cast<SampleStats*>(this)->flush();
    Eigen::MatrixXd m = sum_oo.selfadjointView<Eigen::Lower>();
    return m / weight;
}

cplx SampleStats::mean_eloc() const {
    if (weight <= 0.0) throw std::runtime_error("SampleStats: no samples");
    return sum_eloc / weight;
}

Eigen::VectorXcd SampleStats::mean_eloc_o() const {
    if (weight <= 0.0) throw std::runtime_error("SampleStats: no samples");
    return sum_eloc_o / weight;
}

double SampleStats::acceptance_rate() const {
    return proposals > 0 ? static_cast<double>(accepts) / static_cast<double>(proposals) : 1.0;
}

double SampleStats::eloc_error() const {
    const int b = static_cast<int>(block_eloc.size());
    if (b < 2) return 0.0;
    double total_w = 0.0;
    for (double w : block_weight) total_w += w;
    double full = 0.0;
    for (const cplx& s : block_eloc) full += s.real();
    full /= total_w;
    // delete-one jackknife over chains
    double ss = 0.0;
    for (int i = 0; i < b; ++i) {
        double mi = (full * total_w - block_eloc[i].real()) / (total_w - block_weight[i]);
        ss += (mi - full) * (mi - full);
    }
    return std::sqrt(ss * (b - 1) / static_cast<double>(b));
}

double kink_count(const SpinConfig& cfg) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cfg.size(); ++i)
        acc += 1.0 - static_cast<double>(cfg[i] * cfg[i + 1]);
    return acc;
}

namespace {

SampleStats run_one_chain(const JastrowBasis& basis, const JastrowParams& p,
                          const SampleContext& ctx, const SamplingPlan& plan,
                          long n_samples_chain, std::uint64_t chain_seed) {
    SampleStats stats(basis.n_params());
    ChainState chain = make_chain(basis, p, chain_seed);
    const int burn_in =
        plan.burn_in_sweeps >= 0 ? plan.burn_in_sweeps : 10 * basis.n_sites;
    for (int s = 0; s < burn_in; ++s) metropolis_sweep(chain, basis, p);
    chain.proposals = 0;
    chain.accepts = 0;

    std::vector<double> o(basis.n_params());
    cplx chain_eloc_sum{0.0, 0.0};
    for (long s = 0; s < n_samples_chain; ++s) {
        for (int t = 0; t < plan.thin_sweeps; ++t) metropolis_sweep(chain, basis, p);
        o_vector(basis, chain.cfg, o);
        cplx eloc = local_energy(basis, p, chain.cfg, *ctx.inst, ctx.gamma);
        double ecl = classical_energy(*ctx.inst, chain.cfg);
        double kink = ctx.chain_topology ? kink_count(chain.cfg) : 0.0;
        bool hit = ctx.e_min && std::abs(ecl - *ctx.e_min) <= ctx.e_min_tol;
        stats.add_sample(o, eloc, ecl, kink, hit);
        chain_eloc_sum += eloc;
    }
    stats.flush();
    stats.proposals = chain.proposals;
    stats.accepts = chain.accepts;
    stats.block_eloc.push_back(chain_eloc_sum);
    stats.block_weight.push_back(static_cast<double>(n_samples_chain));
    return stats;
}

}  // namespace

SampleStats sample_batch(const JastrowBasis& basis, const JastrowParams& p,
                         const ProblemInstance& inst, double gamma, const SamplingPlan& plan,
                         std::uint64_t seed, Exec exec, std::optional<double> e_min) {
    if (plan.n_chains < 1 || plan.n_samples < 1 || plan.thin_sweeps < 1)
        throw std::invalid_argument("sample_batch: plan values must be positive");
    p.check_dims(basis);

    SampleContext ctx{&inst, gamma, inst.is_chain(), e_min};
    const int nc = plan.n_chains;
    std::vector<SampleStats> per_chain(nc, SampleStats(basis.n_params()));
    const long base = plan.n_samples / nc;
    const long extra = plan.n_samples % nc;

    auto chain_job = [&](int c) {
        long n_c = base + (c < extra ? 1 : 0);
        if (n_c > 0)
            per_chain[c] = run_one_chain(basis, p, ctx, plan, n_c,
                                         mix64(seed ^ (0x5eedULL + c)));
    };

    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(dynamic)
        for (int c = 0; c < nc; ++c) chain_job(c);
    } else {
        for (int c = 0; c < nc; ++c) chain_job(c);
    }

    SampleStats result(basis.n_params());
    for (int c = 0; c < nc; ++c) result.merge(per_chain[c]);
    return result;
}

SampleStats exact_sum_stats(const JastrowBasis& basis, const JastrowParams& p,
                            const ProblemInstance& inst, double gamma, Exec exec,
                            std::optional<double> e_min) {
    p.check_dims(basis);
    const int n = basis.n_sites;
    if (n > 24) throw std::invalid_argument("exact_sum_stats: system too large");
    const std::uint64_t n_cfg = 1ULL << n;

    // two passes: find the max log-weight first so weights stay finite
    std::vector<double> logw(n_cfg);
    auto decode = [n](std::uint64_t b, SpinConfig& cfg) {
        for (int i = 0; i < n; ++i) cfg[i] = (b >> i) & 1 ? 1 : -1;
    };
    double max_lw = -1e300;
#pragma omp parallel if (exec == Exec::OpenMP)
    {
        SpinConfig cfg(n);
        double local_max = -1e300;
#pragma omp for
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_cfg); ++b) {
            decode(b, cfg);
            logw[b] = 2.0 * log_psi(basis, p, cfg).real();
            local_max = std::max(local_max, logw[b]);
        }
#pragma omp critical
        max_lw = std::max(max_lw, local_max);
    }

    SampleContext ctx{&inst, gamma, inst.is_chain(), e_min};
    SampleStats total(basis.n_params());
    if (exec == Exec::OpenMP) {
#ifdef _OPENMP
        const int nt = omp_get_max_threads();
#else
        const int nt = 1;
#endif
        std::vector<SampleStats> partial(nt, SampleStats(basis.n_params()));
#pragma omp parallel
        {
#ifdef _OPENMP
            const int tid = omp_get_thread_num();
#else
            const int tid = 0;
#endif
            SpinConfig cfg(n);
            std::vector<double> o(basis.n_params());
#pragma omp for schedule(static)
            for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_cfg); ++b) {
                decode(b, cfg);
                double w = std::exp(logw[b] - max_lw);
                o_vector(basis, cfg, o);
                cplx eloc = local_energy(basis, p, cfg, inst, gamma);
                double ecl = classical_energy(inst, cfg);
                double kink = ctx.chain_topology ? kink_count(cfg) : 0.0;
                bool hit = e_min && std::abs(ecl - *e_min) <= ctx.e_min_tol;
                partial[tid].add_sample(o, eloc, ecl, kink, hit, w);
            }
        }
        for (auto& part : partial) total.merge(part);
    } else {
        SpinConfig cfg(n);
        std::vector<double> o(basis.n_params());
        for (std::uint64_t b = 0; b < n_cfg; ++b) {
            decode(b, cfg);
            double w = std::exp(logw[b] - max_lw);
            o_vector(basis, cfg, o);
            cplx eloc = local_energy(basis, p, cfg, inst, gamma);
            double ecl = classical_energy(inst, cfg);
            double kink = ctx.chain_topology ? kink_count(cfg) : 0.0;
            bool hit = e_min && std::abs(ecl - *e_min) <= ctx.e_min_tol;
            total.add_sample(o, eloc, ecl, kink, hit, w);
        }
        total.flush();
    }
    // exact mode carries no jackknife blocks
    total.block_eloc.clear();
    total.block_weight.clear();
    return total;
}

}  // namespace qvmc
