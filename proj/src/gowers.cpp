#include "hofa/gowers.hpp"

#include <algorithm>
#include <cmath>

#include "hofa/approx_poly.hpp"
#include "hofa/util.hpp"

namespace hofa {

namespace {

Cplx cconj(const Cplx& z, int weight) { return (weight & 1) ? std::conj(z) : z; }

// product over the vertices of {0,1}^k of C^{|w|} f(x + w.h)
Cplx vertex_product(const CplxFn& f, uint64_t x, const std::vector<uint64_t>& h) {
    const FiniteGroupSpec& G = *f.G;
    int k = (int)h.size();
    Cplx prod(1, 0);
    for (uint32_t w = 0; w < (1u << k); w++) {
        uint64_t y = x;
        for (int i = 0; i < k; i++)
            if (w & (1u << i)) y = G.add(y, h[i]);
        prod *= cconj(f[y], popcount32(w));
    }
    return prod;
}

}  // namespace

double gowers_inner(const CplxFn& f, int k) {
    if (k < 1) throw ArgumentError("gowers_norm: k >= 1 required");
    const FiniteGroupSpec& G = *f.G;
    uint64_t n = G.order();
    uint64_t tuples = 1;
    for (int i = 0; i < k; i++) tuples *= n;
    double acc = 0;
    std::vector<uint64_t> h(k);
    for (uint64_t x = 0; x < n; x++) {
        for (uint64_t hi = 0; hi < tuples; hi++) {
            uint64_t t = hi;
            for (int i = k - 1; i >= 0; i--) {
                h[i] = t % n;
                t /= n;
            }
            acc += vertex_product(f, x, h).real();
        }
    }
    return acc / ((double)n * (double)tuples);
}

double gowers_norm(const CplxFn& f, int k) {
    double inner = gowers_inner(f, k);
    if (inner < -1e-9) throw Error("gowers_norm: negative box average");
    return std::pow(std::max(inner, 0.0), 1.0 / std::pow(2.0, (double)k));
}

CplxFn mult_derivative(const CplxFn& f, uint64_t h) {
    const FiniteGroupSpec& G = *f.G;
    CplxFn out(G);
    for (uint64_t x = 0; x < G.order(); x++) out[x] = f[x] * std::conj(f[G.add(x, h)]);
    return out;
}

BoxTable s_box(const CplxFn& f, int s) {
    if (s < 1) throw ArgumentError("s_box: s >= 1 required");
    const FiniteGroupSpec& G = *f.G;
    uint64_t n = G.order();
    BoxTable out;
    out.G = &G;
    out.s = s;
    uint64_t tuples = 1;
    for (int i = 0; i < s; i++) tuples *= n;
    out.v.resize(tuples);
    std::vector<uint64_t> h(s);
    for (uint64_t hi = 0; hi < tuples; hi++) {
        uint64_t t = hi;
        for (int i = s - 1; i >= 0; i--) {
            h[i] = t % n;
            t /= n;
        }
        Cplx acc(0, 0);
        for (uint64_t x = 0; x < n; x++) acc += vertex_product(f, x, h);
        out.v[hi] = acc / (double)n;
    }
    return out;
}

SpectralTable sigma_box(const CplxFn& f, int s) {
    if (s < 1) throw ArgumentError("sigma_box: s >= 1 required");
    const FiniteGroupSpec& G = *f.G;
    uint64_t n = G.order();
    BoxTable box = s_box(f, s);
    SpectralTable out;
    out.G = &G;
    out.s = s;
    uint64_t rows = 1;
    for (int i = 0; i + 1 < s; i++) rows *= n;
    out.v.assign(rows * n, 0.0);
    for (uint64_t row = 0; row < rows; row++) {
        for (uint64_t chi = 0; chi < n; chi++) {
            Cplx acc(0, 0);
            for (uint64_t hlast = 0; hlast < n; hlast++)
                acc += G.character(chi, G.neg(hlast)) * box.v[row * n + hlast];
            out.v[row * n + chi] = acc.real() / (double)n;
        }
    }
    return out;
}

SigmaFacts sigma_facts(const CplxFn& f, int s) {
    const FiniteGroupSpec& G = *f.G;
    uint64_t n = G.order();
    SpectralTable sig = sigma_box(f, s);
    SigmaFacts facts;
    facts.min_entry = 1e300;
    facts.max_slice_sum = -1e300;
    facts.min_slice_sum = 1e300;
    double sq = 0;
    uint64_t rows = sig.rows();
    for (uint64_t row = 0; row < rows; row++) {
        double slice = 0;
        for (uint64_t chi = 0; chi < n; chi++) {
            double v = sig.at(row, chi);
            facts.min_entry = std::min(facts.min_entry, v);
            slice += v;
            sq += v * v;
        }
        facts.max_slice_sum = std::max(facts.max_slice_sum, slice);
        facts.min_slice_sum = std::min(facts.min_slice_sum, slice);
    }
    facts.identity_lhs = sq / (double)rows;
    facts.identity_rhs = gowers_inner(f, s + 1);
    return facts;
}

ThresholdGraph threshold_graph(const SpectralTable& sigma, double eps) {
    if (!(eps > 0)) throw ArgumentError("threshold_graph: eps > 0 required");
    const FiniteGroupSpec& G = *sigma.G;
    uint64_t n = G.order();
    ThresholdGraph out;
    uint64_t rows = sigma.rows();
    out.in_domain.assign(rows, 0);
    out.frequency.assign(rows, 0);
    for (uint64_t row = 0; row < rows; row++) {
        double best = -1e300;
        uint64_t arg = 0;
        for (uint64_t chi = 0; chi < n; chi++) {
            double v = sigma.at(row, chi);
            if (v > best) {
                best = v;
                arg = chi;
            }
        }
        if (best >= eps) {
            out.in_domain[row] = 1;
            out.frequency[row] = arg;
        }
    }
    return out;
}

NormInequalityResult norm_inequality_sides_table(const FiniteGroupSpec& G, int s,
                                                 const std::vector<double>& tau, const CplxFn& f) {
    uint64_t n = G.order();
    // rows form the group H^{s-1}
    FiniteGroupSpec GR(G.N(), G.kappa(), G.rank() * std::max(1LL, (long long)(s - 1)),
                       true, (uint64_t)1 << 62);
    uint64_t rows = 1;
    for (int i = 0; i + 1 < s; i++) rows *= n;
    if (tau.size() != rows * n) throw ArgumentError("norm_inequality: tau has the wrong shape");
    for (uint64_t row = 0; row < rows; row++) {
        double slice = 0;
        for (uint64_t chi = 0; chi < n; chi++) {
            if (tau[row * n + chi] < -1e-9 || tau[row * n + chi] > 1 + 1e-9)
                throw ContractError("norm_inequality: tau outside [0,1]");
            slice += tau[row * n + chi];
        }
        if (slice > 1 + 1e-9) throw ContractError("norm_inequality: slice sum above 1");
    }

    NormInequalityResult out;
    SpectralTable sig = sigma_box(f, s);
    double inner = 0;
    for (uint64_t i = 0; i < rows * n; i++) inner += sig.v[i] * tau[i];
    out.inner_product = inner / (double)rows;

    // cube count: E_{a,t_1..t_s in H^{s-1}} sum over characters with zero sum
    uint64_t verts = 1u << s;
    std::vector<uint64_t> rowof(verts);
    double count = 0;
    std::vector<uint64_t> t(s);
    uint64_t tuples = 1;
    for (int i = 0; i < s; i++) tuples *= rows;
    for (uint64_t a = 0; a < rows; a++) {
        for (uint64_t ti = 0; ti < tuples; ti++) {
            uint64_t tt = ti;
            for (int i = s - 1; i >= 0; i--) {
                t[i] = tt % rows;
                tt /= rows;
            }
            for (uint32_t w = 0; w < verts; w++) {
                uint64_t r = a;
                for (int i = 0; i < s; i++)
                    if (w & (1u << i)) r = GR.add(r, t[i]);
                rowof[w] = r;
            }
            // characters chi_w with vanishing alternating sum (the box
            // operators conjugate odd vertices); the last one is determined
            uint64_t free_tuples = 1;
            for (uint32_t w = 0; w + 1 < verts; w++) free_tuples *= n;
            for (uint64_t ci = 0; ci < free_tuples; ci++) {
                uint64_t c = ci;
                uint64_t sum = 0;  // sum of (-1)^{|w|} chi_w over the free vertices
                double prod = 1;
                for (uint32_t w = 0; w + 1 < verts; w++) {
                    uint64_t chi = c % n;
                    c /= n;
                    sum = (popcount32(w) & 1) ? G.sub(sum, chi) : G.add(sum, chi);
                    prod *= tau[rowof[w] * n + chi];
                    if (prod == 0) break;
                }
                if (prod == 0) continue;
                uint64_t chi_last = (s % 2 == 0) ? G.neg(sum) : sum;
                prod *= tau[rowof[verts - 1] * n + chi_last];
                count += prod;
            }
        }
    }
    out.cube_count = count / ((double)rows * (double)tuples);
    double M = std::pow(2.0, (double)s + std::pow(2.0, (double)(s - 1)));
    out.bound = out.inner_product > 0 ? std::pow(out.inner_product, M) : 0.0;
    if (out.inner_product > 0 && out.cube_count < out.bound - 1e-9)
        throw Error("norm_inequality: stated bound failed");
    return out;
}

NormInequalityResult norm_inequality_sides(const CplxFn& f, const SpectralTable& tau_like, int s) {
    return norm_inequality_sides_table(*f.G, s, tau_like.v, f);
}

std::pair<double, double> deriv_fourier_sides(const CplxFn& f, const CplxFn& g, long long a) {
    const FiniteGroupSpec& G = *f.G;
    uint64_t n = G.order();
    long long ainv = G.unit_inverse(a);  // throws when gcd(a, |H|) != 1
    Cplx lhs(0, 0);
    for (uint64_t h = 0; h < n; h++) {
        Cplx df(0, 0), dg(0, 0);
        for (uint64_t x = 0; x < n; x++) df += f[x] * std::conj(f[G.add(x, h)]);
        uint64_t hdiv = G.scale(ainv, h);
        for (uint64_t y = 0; y < n; y++) dg += g[y] * std::conj(g[G.add(y, hdiv)]);
        lhs += (df / (double)n) * std::conj(dg / (double)n);
    }
    lhs /= (double)n;
    auto fhat = fourier_transform(f);
    auto ghat = fourier_transform(g);
    double rhs = 0;
    for (uint64_t chi = 0; chi < n; chi++)
        rhs += std::norm(fhat[chi]) * std::norm(ghat[G.scale(a, chi)]);
    return {lhs.real(), rhs};
}

LiftResult lift_torus_to_real(const TorusFn& kappa, int s, uint64_t seed) {
    const FiniteGroupSpec& G = *kappa.G;
    uint64_t n = G.order();
    for (uint64_t x = 0; x < n; x++) {
        if (!kappa.is_defined(x)) continue;
        // representable as a/N^kappa mod 1
        Rat scaled = kappa[x] * Rat(G.modulus());
        if (!scaled.is_integer()) throw ArgumentError("lift: value not in (1/N^kappa)Z");
    }
    TorusOps tops;
    ApproxPolyReport in_rep = ap_parameter(tops, kappa, s);

    // delta/3^{2^{s+1}} - 2^{2s+2}/|G|
    Rat bound = in_rep.eps / Rat(BigInt::pow(BigInt(3), 1ull << (s + 1))) -
                Rat(BigInt::pow(BigInt(2), 2 * s + 2), BigInt((long long)n));
    if (bound.sign() < 0) bound = Rat(0);

    Rng rng(seed);
    LiftResult out;
    out.input_parameter = in_rep.eps;
    out.bound = bound;
    RatOps rops;
    Rat best(-1);
    RealFn best_fn;
    for (int attempt = 1;; attempt++) {
        RealFn lifted(G);
        lifted.defined = kappa.defined;
        for (uint64_t x = 0; x < n; x++) {
            if (!kappa.is_defined(x)) continue;
            long long r = attempt == 1 ? 0 : (long long)rng.below(3) - 1;
            lifted[x] = kappa[x] + Rat(r);
        }
        ApproxPolyReport rep = ap_parameter(rops, lifted, s);
        if (rep.eps > best) {
            best = rep.eps;
            best_fn = lifted;
        }
        if (rep.eps >= bound) {
            out.lifted = std::move(lifted);
            out.output_parameter = rep.eps;
            out.attempts = attempt;
            return out;
        }
        if (attempt >= 10000)
            throw StochasticFailure("lift_torus_to_real: bound never met (should be impossible)");
    }
}

namespace {

// Q(g, a) = Re E_u S_s f(u) conj S_s g(u_1/a_1, ..., u_s/a_s) with signed
// unit multipliers a_i
double skew_inner(const BoxTable& Sf, const BoxTable& Sg, const std::vector<long long>& mult) {
    const FiniteGroupSpec& G = *Sf.G;
    uint64_t n = G.order();
    int s = Sf.s;
    std::vector<long long> inv(mult.size());
    for (size_t i = 0; i < mult.size(); i++) {
        long long m = ((mult[i] % (long long)n) + (long long)n) % (long long)n;
        inv[i] = G.unit_inverse(m);
    }
    uint64_t tuples = Sf.v.size();
    Cplx acc(0, 0);
    std::vector<uint64_t> u(s), ug(s);
    for (uint64_t ui = 0; ui < tuples; ui++) {
        uint64_t t = ui;
        for (int i = s - 1; i >= 0; i--) {
            u[i] = t % n;
            t /= n;
        }
        for (int i = 0; i < s; i++) ug[i] = G.scale(inv[i], u[i]);
        acc += Sf.at(u) * std::conj(Sg.at(ug));
    }
    return acc.real() / (double)tuples;
}

CplxFn product_of_shifts(const CplxFn& base, const std::vector<uint64_t>& shifts) {
    const FiniteGroupSpec& G = *base.G;
    CplxFn out(G);
    for (uint64_t x = 0; x < G.order(); x++) {
        Cplx p(1, 0);
        for (uint64_t r : shifts) p *= base[G.add(x, r)];
        out[x] = p;
    }
    return out;
}

}  // namespace

MultilinSample multilin_sample(const CplxFn& f, const BoxTable& B, int s, uint64_t seed) {
    const FiniteGroupSpec& G = *f.G;
    uint64_t n = G.order();
    long long sfact = 1;
    for (int i = 2; i <= s; i++) sfact *= i;
    if (std::gcd((long long)n, sfact) != 1)
        throw ArgumentError("multilin_sample: |H| must be coprime to s!");

    BoxTable Sf = s_box(f, s);
    // eta = |<S_s f, B>|
    Cplx inner(0, 0);
    for (size_t i = 0; i < Sf.v.size(); i++) inner += Sf.v[i] * std::conj(B.v[i]);
    double eta = std::abs(inner) / (double)Sf.v.size();
    if (eta <= 0) throw ArgumentError("multilin_sample: zero correlation");

    Rng rng(seed);
    uint64_t tuples = Sf.v.size();

    // step 1: pick the diagonal base point r maximizing the skew correlation
    auto diag_objective = [&](const std::vector<uint64_t>& r) {
        Cplx acc(0, 0);
        for (uint64_t x = 0; x < n; x++) {
            for (uint64_t t = 0; t < n; t++) {
                std::vector<uint64_t> arg(s);
                for (int i = 0; i < s; i++) arg[i] = G.add(r[i], t);
                Cplx prod = std::conj(B.at(arg));
                for (uint32_t w = 0; w < (1u << s); w++) {
                    uint64_t y = G.add(x, G.scale(popcount32(w), t));
                    for (int i = 0; i < s; i++)
                        if (w & (1u << i)) y = G.add(y, r[i]);
                    prod *= cconj(f[y], popcount32(w));
                }
                acc += prod;
            }
        }
        return std::abs(acc) / ((double)n * (double)n);
    };
    std::vector<uint64_t> best_r(s, 0);
    double best_val = -1;
    auto consider_r = [&](uint64_t ri) {
        std::vector<uint64_t> r(s);
        uint64_t t = ri;
        for (int i = s - 1; i >= 0; i--) {
            r[i] = t % n;
            t /= n;
        }
        double v = diag_objective(r);
        if (v > best_val) {
            best_val = v;
            best_r = r;
        }
    };
    if (tuples <= 1000000) {
        for (uint64_t ri = 0; ri < tuples; ri++) consider_r(ri);
    } else {
        for (int it = 0; it < 200000; it++) consider_r(rng.below(tuples));
    }

    // g1(x) = B(r + (x,...,x)); current multipliers a_i = -i
    CplxFn g1(G);
    for (uint64_t x = 0; x < n; x++) {
        std::vector<uint64_t> arg(s);
        for (int i = 0; i < s; i++) arg[i] = G.add(best_r[i], x);
        g1[x] = B.at(arg);
    }
    std::vector<long long> mult(s);
    for (int i = 0; i < s; i++) mult[i] = -(long long)(i + 1);

    std::vector<uint64_t> shifts = {0};  // g = prod of g1(. + shift)
    CplxFn gcur = g1;
    double eta_cur = skew_inner(Sf, s_box(gcur, s), mult);

    // step 2: for each coordinate, raise the multiplier to -s! by taking a
    // k-fold product over the best shift tuple
    for (int j = 0; j < s; j++) {
        long long k = sfact / (j + 1);
        if (k == 1) continue;
        auto try_tuple = [&](const std::vector<uint64_t>& rr) {
            CplxFn cand = product_of_shifts(gcur, rr);
            auto m2 = mult;
            m2[j] *= k;
            return std::make_pair(skew_inner(Sf, s_box(cand, s), m2), cand);
        };
        uint64_t cand_count = 1;
        for (long long i = 0; i < k; i++) cand_count *= n;
        std::vector<uint64_t> best_rr;
        double best_q = -1e300;
        auto consider_rr = [&](uint64_t ri) {
            std::vector<uint64_t> rr(k);
            uint64_t t = ri;
            for (long long i = k - 1; i >= 0; i--) {
                rr[i] = t % n;
                t /= n;
            }
            auto [q, cand] = try_tuple(rr);
            if (q > best_q) {
                best_q = q;
                best_rr = rr;
            }
        };
        if (cand_count <= 200000) {
            for (uint64_t ri = 0; ri < cand_count; ri++) consider_rr(ri);
        } else {
            for (int it = 0; it < 20000; it++) consider_rr(rng.below(cand_count));
        }
        // apply the winner
        std::vector<uint64_t> nshifts;
        for (uint64_t old : shifts)
            for (uint64_t rr : best_rr) nshifts.push_back(G.add(old, rr));
        shifts = std::move(nshifts);
        gcur = product_of_shifts(g1, shifts);
        mult[j] *= k;
        eta_cur = best_q;
    }
    (void)eta_cur;

    // g3(x) = g2(-x/s!): compose with the final diagonal change of variable
    long long neg_sfact_inv = G.unit_inverse(((-sfact) % (long long)n + (long long)n) % (long long)n);
    CplxFn g3(G);
    for (uint64_t x = 0; x < n; x++) g3[x] = gcur[G.scale(neg_sfact_inv, x)];

    // best final shift t: || f conj g3(.+t) ||_{U^s}
    MultilinSample out;
    double best_score = -1;
    uint64_t best_t = 0;
    for (uint64_t t = 0; t < n; t++) {
        CplxFn prod(G);
        for (uint64_t x = 0; x < n; x++) prod[x] = f[x] * std::conj(g3[G.add(x, t)]);
        double score = gowers_norm(prod, s);
        if (score > best_score) {
            best_score = score;
            best_t = t;
        }
    }
    out.g = CplxFn(G);
    for (uint64_t x = 0; x < n; x++) out.g[x] = g3[G.add(x, best_t)];
    out.eta = eta;
    out.score = best_score;
    long long L = 1;
    for (int i = 0; i < s - 1; i++) L *= sfact;
    out.bound = std::pow(eta, (double)L);
    // explicit shift tuples: g(x) = prod_i B(h_i - (x/s!, ..., x/s!))
    long long sfact_inv = G.unit_inverse(((sfact % (long long)n) + (long long)n) % (long long)n);
    for (uint64_t rho : shifts) {
        std::vector<uint64_t> hi(s);
        uint64_t shift_term = G.sub(rho, G.scale(sfact_inv, best_t));
        for (int i = 0; i < s; i++) hi[i] = G.add(best_r[i], shift_term);
        out.shifts.push_back(hi);
    }
    if (out.score < out.bound - 1e-9)
        throw Error("multilin_sample: sampled witness misses the stated bound");
    return out;
}

}  // namespace hofa
