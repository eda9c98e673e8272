#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hofa/cube.hpp"
#include "hofa/group.hpp"

namespace hofa {

// Dense bit set sized at construction.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(uint64_t n, bool fill = false)
        : n_(n), w_((n + 63) / 64, fill ? ~0ULL : 0ULL) {
        if (fill && n % 64) w_.back() = (~0ULL) >> (64 - n % 64);
    }
    uint64_t size() const { return n_; }
    bool get(uint64_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(uint64_t i, bool v = true) {
        if (v)
            w_[i >> 6] |= 1ULL << (i & 63);
        else
            w_[i >> 6] &= ~(1ULL << (i & 63));
    }
    uint64_t count() const;
    bool operator==(const Bitset& o) const { return n_ == o.n_ && w_ == o.w_; }

private:
    uint64_t n_ = 0;
    std::vector<uint64_t> w_;
};

// Index of a k-cube (x; h_1..h_k) inside H^{k+1}: mixed radix base |H|,
// x most significant, h_k fastest.
struct CubeIndexer {
    const FiniteGroupSpec* G = nullptr;
    int k = 0;

    uint64_t size() const {
        uint64_t n = 1;
        for (int i = 0; i <= k; i++) n *= G->order();
        return n;
    }
    uint64_t index(const CubeConfig& c) const {
        uint64_t idx = c.x;
        for (int i = 0; i < k; i++) idx = idx * G->order() + c.h[i];
        return idx;
    }
    CubeConfig cube(uint64_t idx) const {
        std::vector<uint64_t> h(k);
        for (int i = k - 1; i >= 0; i--) {
            h[i] = idx % G->order();
            idx /= G->order();
        }
        return CubeConfig(*G, idx, std::move(h));
    }
};

// Graded cube sets S_0..S_{s+1} with the symmetry/faces/popularity
// invariants and popularity parameter delta.
struct CubeSystem {
    const FiniteGroupSpec* G = nullptr;
    int s = 0;
    std::vector<Bitset> levels;  // levels[k] over H^{k+1}, k = 0..s+1
    Rat delta;

    CubeSystem() = default;
    CubeSystem(const FiniteGroupSpec& g, int degree);

    CubeIndexer indexer(int k) const { return CubeIndexer{G, k}; }
    bool contains(int k, const CubeConfig& c) const { return levels[k].get(indexer(k).index(c)); }
    void insert(int k, const CubeConfig& c) { levels[k].set(indexer(k).index(c)); }
    Rat density(int k) const {
        return Rat(BigInt((long long)levels[k].count()), BigInt((long long)indexer(k).size()));
    }
    // everything at every level
    static CubeSystem full(const FiniteGroupSpec& g, int degree, const Rat& delta = Rat(1));
};

struct SystemViolation {
    int kind;  // 0 symmetry, 1 faces, 2 popularity
    int level;
    uint64_t cube_index;
    std::string note;
};

struct VerifyReport {
    bool holds = false;
    bool symmetry_ok = false, faces_ok = false, popularity_ok = false;
    Rat worst_popularity;  // min over populated levels; 1 if no cubes to check
    std::vector<SystemViolation> violations;  // capped
};

VerifyReport verify_system(const CubeSystem& S, size_t max_violations = 16);

// Greedy deletion: from sets satisfying symmetry+faces with
// mu(S_{s+1}) >= eps, produce a non-empty system with parameter
// delta = 2^{-2s-4} (s+1)^{-2} eps.
CubeSystem prune(const CubeSystem& input, const Rat& eps);

// Almost-full inputs (mu >= 1-eps at every level) yield a system with
// parameter 1-delta, delta = 4^{s+1} * 2 * eps1^{1/2(s+1)} for
// eps1 = 4^{s+1} 2^{s+1} (s+1)! eps.  When delta >= 1 the certified
// parameter is vacuous; strict mode raises ParameterTooWeakError there,
// the default keeps going and stores the measured worst popularity.
struct DensifyResult {
    CubeSystem system;
    Rat eps, eta, delta;     // inputs of the parameter chain, rounded-up eta
    bool certified = false;  // delta < 1, so the 1-delta parameter is proven
};
DensifyResult densify(const CubeSystem& input, bool strict = false);

// Recover a system after deleting a small fraction from each level.
struct PatchResult {
    CubeSystem system;
    Rat measured_parameter;  // worst popularity of the output
    Rat claimed_parameter;   // delta - eta from the corollary
    Rat eta;                 // densify parameter used on the complement
    bool certified = false;
};
PatchResult patch(const CubeSystem& S, const CubeSystem& S_prime, bool strict = false);

// Intersection (parameter >= alpha + beta - 1 when both are systems).
CubeSystem intersect(const CubeSystem& A, const CubeSystem& B);

// Plain graph on [n].
struct Graph {
    int n = 0;
    std::vector<std::vector<int>> adj;
    std::vector<uint64_t> label;  // optional vertex labels (group elements)

    explicit Graph(int nn = 0) : n(nn), adj(nn) {}
    void add_edge(int a, int b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> components() const;  // component id per vertex
};

struct CheegerResult {
    bool infinite = false;  // one-vertex graph
    bool exact = true;      // false when the sweep heuristic was used
    Rat H;                  // min |E(S, V\S)| / |S|
    Rat h;                  // H / |V|
    std::vector<int> witness;  // minimizing subset (exact mode)
};
CheegerResult cheeger(const Graph& g, int exact_limit = 22);

// Graph with V = S_0 and E = {xy : [x,y] in S_1, x != y}.
Graph component_graph(const CubeSystem& S);

struct SplitResult {
    CubeSystem system;
    std::vector<std::vector<uint64_t>> components;  // group elements per component
    std::vector<CubeSystem> component_systems;
    Rat delta_prime;  // measured parameter of the output system
    int iterations = 0;
};
// Iterative cut removal until every component of the S_1-graph has Cheeger
// constant >= eps |H|; requires eps <= delta^C / C.
SplitResult split(const CubeSystem& S, const Rat& eps, int C = 4);

struct McConnectivity {
    double empirical;
    double bound;  // may be <= 0 (vacuous)
    double sigma;  // binomial std at the bound
    long long trials;
    bool bound_vacuous;
};
// Samples k vertices i.i.d. and checks connectivity of the induced
// multigraph, comparing against the expansion bound.
McConnectivity mc_connectivity(const Graph& g, int k, long long trials, uint64_t seed);

}  // namespace hofa
