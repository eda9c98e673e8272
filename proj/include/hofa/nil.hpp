#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hofa/approx_poly.hpp"
#include "hofa/group.hpp"
#include "hofa/util.hpp"

namespace hofa {

// Group elements are coordinate tuples of the second kind (exponents in the
// canonical ordered product of the one-parameter generators).
using Elt = std::vector<Rat>;

// Sparse polynomial with rational coefficients.
struct SparsePoly {
    struct Term {
        Rat c;
        std::vector<int> e;  // exponent per variable
    };
    int nvars = 0;
    std::vector<Term> terms;

    Rat eval(const std::vector<Rat>& v) const;
};

// Explicitly presented filtered group: degree s, one coordinate block per
// level, and an integer-valued polynomial multiplication law whose level-i
// coordinate is x_i + y_i plus a polynomial in strictly lower levels.
class Presentation {
public:
    Presentation(int degree, std::vector<int> dims, std::vector<SparsePoly> law, Rat complexity,
                 std::string name, bool builtin);

    int degree() const { return degree_; }
    const std::vector<int>& dims() const { return dims_; }
    int dim() const { return D_; }
    const Rat& complexity() const { return M_; }
    const std::string& name() const { return name_; }
    int level_of(int coord) const { return level_[coord]; }
    int level_offset(int level) const { return offset_[level - 1]; }
    const SparsePoly& law_at(int coord) const { return law_[coord]; }

    Elt identity() const { return Elt(D_); }
    Elt multiply(const Elt& a, const Elt& b) const;
    Elt inverse(const Elt& a) const;
    Elt commutator(const Elt& a, const Elt& b) const;
    Elt generator(int level, int j, const Rat& exponent = Rat(1)) const;

    bool integral(const Elt& a) const;
    // level membership: coordinates below the level vanish
    int filtration_level(const Elt& a) const;

    // h gamma = g with sigma(h) in prod [base, base+1) and gamma integral
    std::pair<Elt, Elt> reduce_fundamental(const Elt& g,
                                           const std::vector<Rat>* shift = nullptr) const;
    Rat metric_upper(const Elt& g) const;  // |sigma(g)|_1

    // structural + sampled validation of the presentation axioms
    void validate(Rng& rng, int samples = 1000) const;

private:
    int degree_, D_;
    std::vector<int> dims_, level_, offset_;
    std::vector<SparsePoly> law_;
    Rat M_;
    std::string name_;
};

Presentation builtin_heisenberg();
Presentation builtin_abelian(const std::vector<int>& dims_per_level);
Presentation direct_product(const Presentation& A, const Presentation& B);

// Taylor data over a weighted integer lattice: values sum alpha_k binom(v,k)
// over multi-indices with weighted degree at most t.
struct AbelianPolyMap {
    std::vector<int> weights;
    int degree = 0;
    int width = 1;
    std::map<std::vector<int>, std::vector<Rat>> alpha;

    std::vector<Rat> eval(const std::vector<Rat>& v) const;
    bool integral_coefficients() const;
};

// Exact fit of the Taylor coefficients from a value table; the box must
// determine every coefficient of weighted degree <= t, and the table must
// be consistent with that degree (otherwise ArgumentError naming a point).
AbelianPolyMap taylor_fit(const std::function<std::vector<Rat>(const std::vector<int>&)>& p,
                          const std::vector<int>& weights, int t, int width);

// Derivative criterion for polynomial maps into a filtered group, checked
// over generator shifts on a bounded box.
bool poly_degree_check(const std::function<Elt(const std::vector<int>&)>& p,
                       const std::vector<int>& source_weights, const Presentation& target,
                       int box_radius = 2);

// Host-Kra membership by level peeling; on success the face exponents of
// the canonical upper-face decomposition are returned.
struct HkDecomposition {
    bool is_cube = false;
    int fail_level = 0;
    uint32_t fail_eta = 0;  // witness when not a cube
    // exponents[level-1][eta] is the d_level vector attached to the upper
    // face supported on eta
    std::vector<std::map<uint32_t, std::vector<Rat>>> exponents;
};
HkDecomposition hk_decompose(const Presentation& G, const VertexLabelling<Elt>& c);

// Explicit Host-Kra cube from face exponents (inverse of the above).
VertexLabelling<Elt> hk_compose(const Presentation& G,
                                const std::vector<std::map<uint32_t, std::vector<Rat>>>& exponents,
                                int k);

// Lift of a nilmanifold cube: right-multiplies each vertex by a lattice
// element so the result is a Host-Kra cube with exponents in [0,1).
struct HkLift {
    bool ok = false;
    int fail_level = 0;
    uint32_t fail_eta = 0;
    VertexLabelling<Elt> lift;
};
HkLift hk_lift(const Presentation& G, const VertexLabelling<Elt>& reps);

// basis of poly(G, R_(t)): binomials in the coordinates with weighted
// degree <= t, graded by i = t - w(k)
struct PolyBasis {
    const Presentation* G;
    int t;
    std::vector<std::vector<int>> indices;  // multi-indices over coordinates
    std::vector<int> grade;                 // t - weighted degree
    Rat eval(size_t which, const Elt& z) const;
};
PolyBasis poly_basis_abelian(const Presentation& G, int t);

// group law, commutator, and inverse fitted as Taylor data with integer
// coefficients
struct GroupLawPolynomials {
    AbelianPolyMap product;     // 2 dim() variables
    AbelianPolyMap commutator;  // 2 dim() variables
    AbelianPolyMap inverse;     // dim() variables
};
GroupLawPolynomials group_law_polynomials(const Presentation& G);

// level-by-level lift of a polynomial coset map Z^A -> G/Gamma to a
// polynomial map Z^A -> G, verified on the given box
struct ZLift {
    std::vector<AbelianPolyMap> level_data;  // per level, the lifted real coefficients
    std::function<Elt(const std::vector<int>&)> eval;
};
ZLift z_lift(const Presentation& G, const std::function<Elt(const std::vector<int>&)>& coset_rep,
             int source_dim, int box_radius = 3);

// nil-polynomial: F o r with r bounded, r mod Gamma polynomial, and F a
// polynomial map on the group coordinates
struct NilPoly {
    const Presentation* G;
    const FiniteGroupSpec* H;
    std::vector<Elt> r;  // per group element of H
    AbelianPolyMap F;    // over the D coordinates with level weights
    Rat eval(uint64_t x) const;
};

// f(x) = {alpha x / N} {beta x / N} on the rank-2 abelian presentation of
// degree 2
NilPoly builtin_bracket(const FiniteGroupSpec& H, long long alpha, long long beta,
                        const Presentation& storage);
Presentation bracket_presentation();

// Lipschitz window on the fundamental-domain coordinates with a declared
// constant; one-bounded by construction
struct Nilsequence {
    const Presentation* G;
    const FiniteGroupSpec* H;
    std::vector<Elt> orbit;          // coset representatives per point
    std::vector<double> frequencies;  // F(z) = e(<freq, fundamental coords>)
    double lipschitz;
    Cplx eval(uint64_t x) const;
    // sampled check of the declared constant against the coordinate metric
    double measured_lipschitz_ratio(Rng& rng, int samples = 200) const;
};

// corrections gamma(c, omega) in Gamma such that the derivative identity
// for F' o r holds exactly
struct NilDerivCorrection {
    std::vector<Elt> gamma;  // per vertex
    Rat lhs, rhs;            // both sides of the identity (equal)
};
NilDerivCorrection nil_deriv_correction(const NilPoly& np, const AbelianPolyMap& F_prime,
                                        const CubeConfig& c);

// hierarchy extraction: the functions alpha_k binom(sigma(r(.)), k') with
// integer tau-expansion coefficients, assembled into a verified hierarchy
struct NilHierarchy {
    PolynomialHierarchy hierarchy;
    RealFn g;       // F o r
    BCoeffs b;      // top derivatives condition for g
    long long max_coeff = 0;
};
NilHierarchy nil_to_hierarchy(const NilPoly& np);

}  // namespace hofa
