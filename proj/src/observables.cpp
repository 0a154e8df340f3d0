#include "qvmc/observables.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "qvmc/oracles.hpp"

namespace qvmc {

ValueWithError energy_density(const SampleStats& stats, int n_sites) {
    if (stats.weight <= 0.0) throw std::runtime_error("energy_density: no samples");
    const double n = static_cast<double>(n_sites);
    return {stats.mean_eloc().real() / n, stats.eloc_error() / n};
}

double kink_density(const SampleStats& stats, const ProblemInstance& inst) {
    if (!inst.is_chain())
        throw std::invalid_argument("kink_density: instance is not a 1D chain");
    return stats.mean_kink() / (2.0 * inst.n_sites);
}

double kink_density(const SpinConfig& cfg) {
    return kink_count(cfg) / (2.0 * static_cast<double>(cfg.size()));
}

double residual_energy(const SampleStats& stats, double e0_per_site, int n_sites) {
    return stats.mean_ecl() / static_cast<double>(n_sites) - e0_per_site;
}

double n_repetitions(double p_s, double p0) {
    if (p_s < 0.0 || p_s > 1.0) throw std::invalid_argument("n_repetitions: p_s not in [0,1]");
    if (p0 <= 0.0 || p0 >= 1.0) throw std::invalid_argument("n_repetitions: p0 not in (0,1)");
    if (p_s >= 1.0) return 1.0;  // one run suffices
    if (p_s <= 0.0) return std::numeric_limits<double>::infinity();
    return std::log1p(-p0) / std::log1p(-p_s);
}

ValueWithError success_probability(const JastrowBasis& basis, const JastrowParams& p,
                                   const ProblemInstance& inst, const GroundSolution& ground,
                                   SuccessMode mode, const SamplingPlan& plan,
                                   std::uint64_t seed) {
    if (ground.degeneracy == 0 || ground.ground_set.empty())
        throw std::invalid_argument("success_probability: empty ground set");
    if (mode == SuccessMode::Sampled) {
        SampleStats stats = sample_batch(basis, p, inst, /*gamma=*/0.0, plan, seed,
                                         Exec::OpenMP, ground.e_min);
        double ps = stats.sum_ground_hit / stats.weight;
        double err = std::sqrt(std::max(ps * (1.0 - ps), 0.0) /
                               static_cast<double>(stats.n_samples));
        return {ps, err};
    }
    // exact summation over all configurations
    if (inst.n_sites > 20)
        throw std::invalid_argument("success_probability: exact sum needs N <= 20");
    const std::uint64_t n_cfg = 1ULL << inst.n_sites;
    SpinConfig cfg(inst.n_sites);
    double max_lw = -1e300;
    std::vector<double> logw(n_cfg);
    for (std::uint64_t b = 0; b < n_cfg; ++b) {
        for (int i = 0; i < inst.n_sites; ++i) cfg[i] = (b >> i) & 1 ? 1 : -1;
        logw[b] = 2.0 * log_psi(basis, p, cfg).real();
        max_lw = std::max(max_lw, logw[b]);
    }
    double z = 0.0, hit = 0.0;
    for (std::uint64_t b = 0; b < n_cfg; ++b) {
        for (int i = 0; i < inst.n_sites; ++i) cfg[i] = (b >> i) & 1 ? 1 : -1;
        double w = std::exp(logw[b] - max_lw);
        z += w;
        if (std::abs(classical_energy(inst, cfg) - ground.e_min) <= 1e-9) hit += w;
    }
    return {hit / z, 0.0};
}

BetaEff effective_inverse_temperatures(const JastrowBasis& basis, const JastrowParams& p,
                                       const ProblemInstance& inst, double t) {
    p.check_dims(basis);
    BetaEff result;
    result.t = t;
    // coupling lookup by pair
    std::vector<std::pair<std::pair<int, int>, std::pair<double, int>>> coupling;
    coupling.reserve(inst.edges.size());
    for (int e = 0; e < static_cast<int>(inst.edges.size()); ++e)
        coupling.push_back({{inst.edges[e].i, inst.edges[e].j}, {inst.edges[e].v, e}});
    std::sort(coupling.begin(), coupling.end());
    for (std::size_t k = 0; k < basis.pair_params.size(); ++k) {
        auto it = std::lower_bound(coupling.begin(), coupling.end(), basis.pair_params[k],
                                   [](const auto& a, const auto& key) { return a.first < key; });
        if (it == coupling.end() || it->first != basis.pair_params[k] ||
            it->second.first == 0.0) {
            ++result.n_excluded;
            continue;
        }
        result.edge_index.push_back(it->second.second);
        result.beta.push_back(-2.0 * p.j2[k].real() / it->second.first);
    }
    return result;
}

double KdeCurve::integral() const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        acc += 0.5 * (density[i] + density[i + 1]) * (grid[i + 1] - grid[i]);
    return acc;
}

KdeCurve kde_density(std::span<const double> values, double bandwidth, int grid_points) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("kde_density: need at least 2 values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : sorted) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    const double sigma = std::sqrt(var);
    const double iqr = sorted[(3 * n) / 4] - sorted[n / 4];

    double h = bandwidth;
    if (h <= 0.0) {
        double spread = std::min(sigma, iqr / 1.34);
        if (spread <= 0.0) spread = std::max(sigma, 1e-3 * std::max(std::abs(mean), 1.0));
        h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
        if (h <= 0.0) h = 1e-3 * std::max(std::abs(mean), 1.0);
    }

    KdeCurve curve;
    const double lo = sorted.front() - 5.0 * h;
    const double hi = sorted.back() + 5.0 * h;
    curve.grid.resize(grid_points);
    curve.density.resize(grid_points);
    const double norm = 1.0 / (static_cast<double>(n) * h * std::sqrt(2.0 * M_PI));
    for (int g = 0; g < grid_points; ++g) {
        double x = lo + (hi - lo) * g / (grid_points - 1);
        double acc = 0.0;
        for (double v : sorted) {
            double u = (x - v) / h;
            acc += std::exp(-0.5 * u * u);
        }
        curve.grid[g] = x;
        curve.density[g] = norm * acc;
    }
    return curve;
}

void write_kde_csv(const KdeCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "x,density\n";
    out.precision(17);
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out << curve.grid[i] << ',' << curve.density[i] << '\n';
}

}  // namespace qvmc
