#include "qvmc/instance.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace qvmc {

std::string family_name(Family f) {
    switch (f) {
        case Family::RI1D: return "RI1D";
        case Family::SK: return "SK";
        case Family::Chimera: return "CHIMERA";
        case Family::Custom: return "CUSTOM";
    }
    throw std::logic_error("unknown family");
}

Family family_from_name(const std::string& name) {
    if (name == "RI1D") return Family::RI1D;
    if (name == "SK") return Family::SK;
    if (name == "CHIMERA") return Family::Chimera;
    if (name == "CUSTOM") return Family::Custom;
    throw std::invalid_argument("unknown instance family: " + name);
}

bool ProblemInstance::is_chain() const {
    if (static_cast<int>(edges.size()) != n_sites - 1) return false;
    for (int b = 0; b < n_sites - 1; ++b) {
        if (edges[b].i != b || edges[b].j != b + 1) return false;
    }
    return true;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t edge_key(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
    return mix64(mix64(seed ^ 0x517cc1b727220a95ULL) ^ mix64((i << 32) | j));
}

double uniform01_from_key(std::uint64_t key) {
    return static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
}

double standard_normal_from_key(std::uint64_t key) {
    double u1 = uniform01_from_key(mix64(key ^ 1));
    double u2 = uniform01_from_key(mix64(key ^ 2));
    // guard against log(0)
    u1 = std::max(u1, 0x1.0p-53);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ProblemInstance gen_ri1d(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_ri1d: need at least 2 sites");
    ProblemInstance inst;
    inst.n_sites = n;
    inst.family = Family::RI1D;
    inst.seed = seed;
    inst.edges.reserve(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        double v = uniform01_from_key(edge_key(seed, i, i + 1));
        inst.edges.push_back({i, i + 1, -v});
    }
    return inst;
}

ProblemInstance gen_sk(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_sk: need at least 2 sites");
    ProblemInstance inst;
    inst.n_sites = n;
    inst.family = Family::SK;
    inst.seed = seed;
    inst.edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double v = standard_normal_from_key(edge_key(seed, i, j)) * scale;
            inst.edges.push_back({i, j, v});
        }
    }
    return inst;
}

ProblemInstance gen_chimera(int m, int n, ChimeraCoupling coupling, std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("gen_chimera: need m, n >= 1");
    ProblemInstance inst;
    inst.n_sites = 8 * m * n;
    inst.family = Family::Chimera;
    inst.seed = seed;
    inst.coupling_tag = (coupling == ChimeraCoupling::Normal) ? "normal" : "pm1";

    auto site = [n](int r, int c, int k) { return 8 * (r * n + c) + k; };
    auto draw = [&](int i, int j) {
        std::uint64_t key = edge_key(seed, i, j);
        if (coupling == ChimeraCoupling::Normal) return standard_normal_from_key(key);
        return uniform01_from_key(key) < 0.5 ? -1.0 : 1.0;
    };
    auto add = [&](int i, int j) { inst.edges.push_back({i, j, draw(i, j)}); };

    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) {
            // K_{4,4} cell: left partition 0..3, right partition 4..7
            for (int a = 0; a < 4; ++a)
                for (int b = 4; b < 8; ++b) add(site(r, c, a), site(r, c, b));
            // left partition couples to the vertical neighbor, right to the horizontal one
            if (r + 1 < m)
                for (int a = 0; a < 4; ++a) add(site(r, c, a), site(r + 1, c, a));
            if (c + 1 < n)
                for (int b = 4; b < 8; ++b) add(site(r, c, b), site(r, c + 1, b));
        }
    }
    return inst;
}

double classical_energy(const ProblemInstance& inst, const SpinConfig& cfg) {
    if (static_cast<int>(cfg.size()) != inst.n_sites)
        throw std::invalid_argument("classical_energy: config size mismatch");
    double e = 0.0;
    for (const Edge& ed : inst.edges)
        e += ed.v * static_cast<double>(cfg[ed.i]) * static_cast<double>(cfg[ed.j]);
    return e;
}

std::string instance_to_json(const ProblemInstance& inst) {
    nlohmann::json j;
    j["family"] = family_name(inst.family);
    j["n_sites"] = inst.n_sites;
    j["seed"] = inst.seed;
    if (!inst.coupling_tag.empty()) j["coupling"] = inst.coupling_tag;
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const Edge& e : inst.edges) edges.push_back({e.i, e.j, e.v});
    return j.dump(2);
}

ProblemInstance instance_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ProblemInstance inst;
    inst.family = family_from_name(j.at("family").get<std::string>());
    inst.n_sites = j.at("n_sites").get<int>();
    inst.seed = j.value("seed", std::uint64_t{0});
    inst.coupling_tag = j.value("coupling", std::string{});
    std::set<std::pair<int, int>> seen;
    for (const auto& e : j.at("edges")) {
        Edge ed{e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()};
        if (ed.i < 0 || ed.j >= inst.n_sites || ed.i >= ed.j)
            throw std::invalid_argument("instance edge indices out of order or range");
        if (!seen.insert({ed.i, ed.j}).second)
            throw std::invalid_argument("duplicate edge in instance file");
        inst.edges.push_back(ed);
    }
    return inst;
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << instance_to_json(inst) << "\n";
}

ProblemInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return instance_from_json(text);
}

}  // namespace qvmc
