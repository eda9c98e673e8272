#pragma once

#include <optional>
#include <vector>

#include "hofa/group.hpp"

namespace hofa {

// System of integer linear forms with a positional complexity witness:
// sets Sigma_1..Sigma_{t+1} covering every index except j, and vectors
// sigma_r annihilating the forms of Sigma_r while phi_j(sigma_r) = q_r is a
// nonzero divisor of Q.
struct LinearFormSystem {
    int d = 0;                               // ambient dimension
    std::vector<std::vector<long long>> forms;  // phi_1..phi_k as integer vectors
    int j = 0;                               // distinguished index (0-based)
    std::vector<std::vector<int>> sigma_sets;   // Sigma_r as index lists (0-based)
    std::vector<std::vector<long long>> sigma;  // sigma_1..sigma_{t+1}
    long long Q = 1;

    int t() const { return (int)sigma_sets.size() - 1; }
    long long apply(int form, const std::vector<long long>& x) const {
        long long acc = 0;
        for (int i = 0; i < d; i++) acc += forms[form][i] * x[i];
        return acc;
    }
};

struct WitnessCheck {
    bool valid = false;
    std::vector<std::string> violations;
};
WitnessCheck verify_witness(const LinearFormSystem& sys);

// Bounded-box search for a witness mirroring the small explicit ones.
std::optional<LinearFormSystem> find_witness(int d, const std::vector<std::vector<long long>>& forms,
                                             int j, int t, long long box);

// |{x : f(x) = g(pi(x))}| >= delta |X|  implies
// |{(x,x') : pi(x) = pi(x'), f(x) = f(x')}| >= delta^2 |X|^2 / |Y|.
struct DiscreteCsResult {
    long long matches = 0;       // x with f(x) = g(pi(x))
    long long pairs = 0;         // coincidence pairs over shared fibers
    long long fiber_pairs = 0;   // (x,x') with pi(x) = pi(x')
    Rat delta;
    bool equal_fibers = false;
    bool inequality_holds = false;
};
DiscreteCsResult discrete_cs_counts(const std::vector<int>& pi, const std::vector<long long>& f,
                                    const std::vector<long long>& g, int ysize);

// Multidimensional version over an abelian group with subgroups K_i given
// by generators: counts the cube configurations x + omega . (h_1..h_k)
// with h_i in K_i on which the alternating sum of f vanishes.
struct MultidimCsResult {
    long long matches = 0;   // x with f(x) = sum_i g_i(x + K_i)
    BigInt vanishing;        // configurations with zero alternating sum
    BigInt total;            // |X| * prod |K_i|
    Rat delta;
    bool inequality_holds = false;
};
MultidimCsResult multidim_cs_counts(const FiniteGroupSpec& X,
                                    const std::vector<uint64_t>& subgroup_gens,
                                    const std::vector<long long>& f,
                                    const std::vector<std::vector<long long>>& g_on_quotients);

// Counting form of the complexity lemma: solution density of
// sum_i f_i(phi_i(x)) = 0 over H^d against the vanishing density of the
// (t+1)-st derivative of f_j.
struct GvnResult {
    BigInt solutions;
    BigInt domain;        // |H|^d
    Rat delta;
    BigInt vanishing;     // cubes with vanishing derivative of f_j
    BigInt cubes;         // |C^{t+1}(H)|
    Rat vanishing_fraction;
    Rat bound;            // delta^{2^{t+1}}
    bool inequality_holds = false;
};
GvnResult gvn_counts(const LinearFormSystem& sys, const std::vector<std::vector<Rat>>& fns,
                     const FiniteGroupSpec& H);

}  // namespace hofa
