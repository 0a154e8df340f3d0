#ifndef QVMC_INSTANCE_HPP
#define QVMC_INSTANCE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace qvmc {

enum class Family { RI1D, SK, Chimera, Custom };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct Edge {
    int i;
    int j;
    double v;
};

// Spin values are strictly +1/-1.
using SpinConfig = std::vector<int8_t>;

// Immutable after construction; generation is a pure function of
// (family parameters, seed) with per-edge counter-based draws, so the
// same inputs give bit-identical couplings independent of build or
// iteration order.
struct ProblemInstance {
    int n_sites = 0;
    std::vector<Edge> edges;
    Family family = Family::Custom;
    std::uint64_t seed = 0;
    std::string coupling_tag;  // extra generator metadata (Chimera distribution)

    bool is_chain() const;
};

enum class ChimeraCoupling { PlusMinusOne, Normal };

ProblemInstance gen_ri1d(int n, std::uint64_t seed);
ProblemInstance gen_sk(int n, std::uint64_t seed);
ProblemInstance gen_chimera(int m, int n, ChimeraCoupling coupling, std::uint64_t seed);

double classical_energy(const ProblemInstance& inst, const SpinConfig& cfg);

std::string instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const std::string& text);
void save_instance(const ProblemInstance& inst, const std::string& path);
ProblemInstance load_instance(const std::string& path);

// splitmix64 output for the given key; used as the counter-based
// generator behind all per-edge coupling draws.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t edge_key(std::uint64_t seed, std::uint64_t i, std::uint64_t j);
double uniform01_from_key(std::uint64_t key);             // in [0,1)
double standard_normal_from_key(std::uint64_t key);       // Box-Muller

}  // namespace qvmc

#endif
