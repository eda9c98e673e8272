#pragma once

#include <functional>
#include <vector>

#include "hofa/approx_poly.hpp"
#include "hofa/cube_system.hpp"

namespace hofa {

// Integer-vector function on a cube set, with glueing-defect accounting.
struct CocycleData {
    const FiniteGroupSpec* G = nullptr;
    int k = 0;
    int width = 1;
    Bitset domain;                                 // subset of C^k(H)
    std::vector<std::vector<Rat>> values;          // indexed by cube, size width

    CocycleData() = default;
    CocycleData(const FiniteGroupSpec& g, int kk, int w)
        : G(&g), k(kk), width(w), domain(CubeIndexer{&g, kk}.size()),
          values(CubeIndexer{&g, kk}.size(), std::vector<Rat>(w)) {}
};

// Fraction of glueing triples (c0, c1, c) inside the domain violating
// rho(c) = rho(c0) - rho(c1), per direction.
std::vector<Rat> cocycle_defect(const CocycleData& rho);

// lambda(x) = E_{h} rho((x; h)); for defect-free full-domain data the k-th
// derivative of the output is exactly rho.
std::vector<std::vector<Rat>> avg_integrate(const CocycleData& rho);

// The averaging operator calculus on rational tables.  U = functions on H,
// V = functions on C^k(H), W_i = functions on the direction-i triples.
struct OperatorSuite {
    const FiniteGroupSpec* G;
    int k;

    using Table = std::vector<Rat>;  // V or U by size
    Table deriv(const Table& u) const;                  // U -> V
    Table sigma(const Table& v) const;                  // V -> U
    Table delta_i(const Table& v, int i) const;         // V -> W_i
    Table tau_i(const Table& w, int i) const;           // W_i -> V
    Table Z(const Table& v) const;                      // V -> V
    Table Zprime(const Table& v, const Bitset& S, const std::vector<Bitset>& I) const;

    uint64_t usize() const { return G->order(); }
    uint64_t vsize() const { return CubeIndexer{G, k}.size(); }
    uint64_t wsize() const {
        uint64_t n = 1;
        for (int i = 0; i < k + 2; i++) n *= G->order();
        return n;
    }
    // exact sup-operator norms measured from the dense matrices (for
    // tables small enough to materialize)
    Rat operator_norm(const std::function<Table(const Table&)>& op, uint64_t in_dim) const;
};

// Certified subset construction from the thresholding recipe: triples where
// the glueing law holds, cubes supported by many of them, and a system of
// cubes avoiding the rest.
struct LossyIntegrationSets {
    Bitset S;                  // certified cubes
    std::vector<Bitset> I;     // certified triples per direction
    Rat eta;                   // measured worst exclusion rate
};
LossyIntegrationSets build_integration_sets(const CocycleData& rho, const std::vector<Rat>& defect);

struct LossyIntegrationResult {
    std::vector<std::vector<Rat>> lambda;  // per point, width entries
    Bitset certified;                      // cubes where the derivative equals rho exactly
    Rat contraction;                       // measured ||Z'|| upper bound on the run
    int iterations = 0;
    Rat final_residual;
};
// Neumann iteration g <- f - Z'(g) to the stated tolerance, followed by an
// exact rational correction solve so the derivative matches rho on the
// certified set exactly.
LossyIntegrationResult integrate_lossy(const CocycleData& rho, const Rat& tol,
                                       int max_iterations = 200);

// Round a real-vector function so that every k-th derivative is integral,
// keeping the value wherever most cubes already were integral.
struct IntegerizeResult {
    std::vector<std::vector<Rat>> values;
    std::vector<uint8_t> X;
    Rat integral_density;  // fraction of input cubes with integral derivative
    bool precondition_met = false;
};
IntegerizeResult integerize(const FiniteGroupSpec& G, const std::vector<std::vector<Rat>>& lambda,
                            int k, bool strict = false);

// Generalized integration: from type-r coefficient data on the top level of
// a cube system (degree k-1, levels 0..k), recover a point function whose
// Z_r normal form matches it off a small set.  Per-face cocycles are
// descended, one is integrated, and parallel faces are reconciled against
// it (sign law and global constants verified).
struct GenIntegrateResult {
    std::vector<std::vector<Rat>> lambda;
    Bitset matched;  // cubes where the normal form equals the input everywhere
    Rat matched_fraction;
    int faces_reconciled = 0;
};
GenIntegrateResult gen_integrate(const CubeSystem& S, const BCoeffs& rho, int r, const Rat& tol);

// Lambda(c, w) = sum over w' of Z_r(w', w) lambda(c(w')).
VertexLabelling<std::vector<Rat>> lambda_to_Lambda(const FiniteGroupSpec& G,
                                                   const std::vector<std::vector<Rat>>& lambda,
                                                   int r, const CubeConfig& c);

}  // namespace hofa
