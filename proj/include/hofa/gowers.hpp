#pragma once

#include <optional>
#include <vector>

#include "hofa/cube.hpp"
#include "hofa/group.hpp"

namespace hofa {

// E_{x,h_1..h_k} prod_omega C^{|omega|} f(x + omega.h); real and >= -1e-9
// for any f.  The norm is its 2^k-th root.
double gowers_inner(const CplxFn& f, int k);
double gowers_norm(const CplxFn& f, int k);

// x -> f(x) conj f(x+h)
CplxFn mult_derivative(const CplxFn& f, uint64_t h);

// Multi-argument box average S_s f: H^s -> C, stored with argument index
// little-endian in base |H| (h_s fastest).
struct BoxTable {
    const FiniteGroupSpec* G = nullptr;
    int s = 0;
    std::vector<Cplx> v;  // size |H|^s

    uint64_t index(const std::vector<uint64_t>& h) const {
        uint64_t idx = 0;
        for (int i = 0; i < s; i++) idx = idx * G->order() + h[i];
        return idx;
    }
    Cplx at(const std::vector<uint64_t>& h) const { return v[index(h)]; }
};

BoxTable s_box(const CplxFn& f, int s);

// sigma(h_1..h_{s-1}, chi) = E_h chi(-h) S_s f(h_1..h_{s-1}, h); entries are
// real and non-negative, every slice sums to at most 1, and
// E_h sum_chi sigma^2 = ||f||_{U^{s+1}}^{2^{s+1}}.
struct SpectralTable {
    const FiniteGroupSpec* G = nullptr;
    int s = 0;
    std::vector<double> v;  // size |H|^{s-1} * |H|, chi fastest

    uint64_t rows() const {
        uint64_t r = 1;
        for (int i = 0; i + 1 < s; i++) r *= G->order();
        return r;
    }
    double at(uint64_t row, uint64_t chi) const { return v[row * G->order() + chi]; }
};

SpectralTable sigma_box(const CplxFn& f, int s);

// min entry / max slice-sum / spectral identity, for tests and reports
struct SigmaFacts {
    double min_entry;
    double max_slice_sum;
    double min_slice_sum;
    double identity_lhs;  // E_h sum_chi sigma^2
    double identity_rhs;  // ||f||_{U^{s+1}}^{2^{s+1}}
};
SigmaFacts sigma_facts(const CplxFn& f, int s);

// Rows where sigma reaches eps, with the argmax character (ties broken by
// smallest character index).
struct ThresholdGraph {
    std::vector<uint8_t> in_domain;   // indexed by row
    std::vector<uint64_t> frequency;  // valid where in_domain
};
ThresholdGraph threshold_graph(const SpectralTable& sigma, double eps);

// Both sides of the correlation-vs-cube-count inequality for tau on
// H^{s-1} x Hhat; the count side is >= delta^{2^{s+2^{s-1}}}.
struct NormInequalityResult {
    double inner_product;  // delta
    double cube_count;
    double bound;  // delta^M
};
NormInequalityResult norm_inequality_sides(const CplxFn& f, const SpectralTable& tau_like, int s);
// generic tau given as a table of the same shape as a SpectralTable
NormInequalityResult norm_inequality_sides_table(const FiniteGroupSpec& G, int s,
                                                 const std::vector<double>& tau, const CplxFn& f);

// E_h (E_x D_h f)(conj E_y D_{h/a} g)  vs  sum_chi |fhat(chi)|^2 |ghat(a chi)|^2
std::pair<double, double> deriv_fourier_sides(const CplxFn& f, const CplxFn& g, long long a);

// Randomized integer lift of a torus-valued approximate polynomial:
// output reduces to kappa mod 1 and has vanishing-derivative parameter at
// least delta/3^{2^{s+1}} - 2^{2s+2}/|G| for the measured input parameter.
struct LiftResult {
    RealFn lifted;
    Rat input_parameter;
    Rat output_parameter;
    Rat bound;  // max(lemma bound, 0)
    int attempts;
};
LiftResult lift_torus_to_real(const TorusFn& kappa, int s, uint64_t seed);

// Diagonal sampling of a correlated box function: returns shifts h_1..h_L
// with g(x) = prod_i B(h_i - (x/s!, ..., x/s!)) and ||f conj g||_{U^s} >= eta^L.
struct MultilinSample {
    std::vector<std::vector<uint64_t>> shifts;  // L tuples in H^s
    CplxFn g;
    double eta;    // |<S_s f, B>|
    double score;  // ||f conj g||_{U^s}
    double bound;  // eta^L
};
MultilinSample multilin_sample(const CplxFn& f, const BoxTable& B, int s, uint64_t seed);

}  // namespace hofa
