#include "hofa/approx_poly.hpp"

#include <algorithm>

namespace hofa {

bool BCoeffs::normal_form() const {
    for (auto& [ci, rows] : data) {
        for (uint32_t w = 0; w < rows.size(); w++) {
            for (int r = 0; r < t; r++) {
                if (popcount32(w) < r + 1) continue;
                int off = offset(r);
                for (int j = 0; j < dims[r]; j++)
                    if (rows[w][off + j] != 0) return false;
            }
        }
    }
    return true;
}

std::vector<Rat> PolynomialHierarchy::eval_below(int t, uint64_t x) const {
    std::vector<Rat> out;
    out.reserve(total_dim(t));
    for (int i = 0; i < t; i++)
        for (int j = 0; j < dims[i]; j++) out.push_back(fns[i][j][x]);
    return out;
}

namespace {

Rat dot(const std::vector<long long>& b, const std::vector<Rat>& v) {
    Rat acc(0);
    for (size_t i = 0; i < b.size(); i++) {
        if (b[i] == 0) continue;
        acc += Rat(b[i]) * v[i];
    }
    return acc;
}

Rat deriv_rhs(const PolynomialHierarchy& f, const BCoeffs& b, const CubeConfig& c, uint64_t ci,
              int t) {
    const auto& rows = b.data.at(ci);
    Rat rhs(0);
    for (uint32_t w = 0; w < rows.size(); w++) {
        Rat term = dot(rows[w], f.eval_below(t, c.vertex(w)));
        rhs = (popcount32(w) & 1) ? rhs - term : rhs + term;
    }
    return rhs;
}

}  // namespace

DerivCheck verify_deriv_condition(const RealFn& g, const PolynomialHierarchy& f, const BCoeffs& b,
                                  const Bitset& S, int k, int t, const Rat& M) {
    DerivCheck out;
    out.holds = true;
    out.norms_ok = true;
    out.worst_residual = Rat(0);
    RatOps ops;
    CubeIndexer idx{f.G, k};
    for (uint64_t i = 0; i < S.size(); i++) {
        if (!S.get(i)) continue;
        CubeConfig c = idx.cube(i);
        if (!b.has(i)) throw ContractError("verify_deriv_condition: b missing on a cube of S");
        for (uint32_t w = 0; w < (1u << k); w++)
            if (!g.is_defined(c.vertex(w)))
                throw ContractError("verify_deriv_condition: g undefined at a vertex of S");
        out.checked++;
        Rat lhs = derivative(ops, g.v, c);
        Rat res = (lhs - deriv_rhs(f, b, c, i, t)).abs();
        if (!res.is_zero()) {
            if (out.holds) out.failing_cube = i;
            out.holds = false;
            if (res > out.worst_residual) out.worst_residual = res;
        }
        const auto& rows = b.data.at(i);
        for (uint32_t w = 0; w < rows.size(); w++) {
            for (int r = 0; r < t; r++) {
                long long nrm = BCoeffs::level_norm(rows[w], b.offset(r), b.dims[r]);
                if (Rat(nrm) > Rat::pow(M, (unsigned)(t - r))) out.norms_ok = false;
            }
        }
    }
    return out;
}

bool verify_hierarchy(const PolynomialHierarchy& f) {
    for (int i = 0; i <= f.s; i++) {
        for (int j = 0; j < f.dims[i]; j++) {
            DerivCheck chk = verify_deriv_condition(f.fns[i][j], f, f.b[i][j],
                                                    f.host.levels[i + 1], i + 1, i, f.M);
            if (!chk.holds || !chk.norms_ok) return false;
        }
    }
    return true;
}

namespace {

// gamma(w) for w <= eta with sum_{w <= eta} (-1)^{|w|} gamma(w) . f_{<= r-1}(c(w))
// equal to the |eta|-th derivative of f_{r,i} on the lower face F_eta,
// assembled from the hierarchy's (r+1)-derivative witnesses on sub-faces.
std::vector<std::vector<long long>> gamma_config(const PolynomialHierarchy& f, int r, int i,
                                                 const CubeConfig& c, uint32_t eta, int k) {
    int below = f.total_dim(r);
    std::vector<std::vector<long long>> gamma(size_t(1) << k, std::vector<long long>(below, 0));
    // split active coords: first r+1 into eta_a, rest into eta_b
    std::vector<int> act;
    for (int bit = 0; bit < k; bit++)
        if (eta & (1u << bit)) act.push_back(bit);
    uint32_t eta_a = 0, eta_b = 0;
    for (size_t p = 0; p < act.size(); p++)
        (p < (size_t)(r + 1) ? eta_a : eta_b) |= (1u << act[p]);

    const BCoeffs& bw = f.b[r][i];
    CubeIndexer sub_idx{f.G, r + 1};
    // each w <= eta belongs to exactly one sub-face F(zeta, zeta | eta_a)
    for (uint32_t w = 0; w < (1u << k); w++) {
        if ((w & ~eta) != 0) continue;
        uint32_t zeta = w & eta_b;
        Face F(zeta, zeta | eta_a);
        CubeConfig sub = restrict_cube(c, F);
        uint64_t si = sub_idx.index(sub);
        if (!bw.has(si))
            throw ContractError("normalize_b: hierarchy witness missing on a face");
        const auto& row = bw.at(si, F.project(w));
        for (int d = 0; d < below; d++) gamma[w][d] = row[d];
    }
    return gamma;
}

}  // namespace

BCoeffs normalize_b(const PolynomialHierarchy& f, const BCoeffs& b, const Bitset& S, int k, int t) {
    BCoeffs out;
    out.k = k;
    out.t = t;
    out.dims = b.dims;
    CubeIndexer idx{f.G, k};
    uint32_t verts = 1u << k;

    for (uint64_t ci = 0; ci < S.size(); ci++) {
        if (!S.get(ci)) continue;
        if (!b.has(ci)) throw ContractError("normalize_b: b missing on a cube of S");
        CubeConfig c = idx.cube(ci);
        // alpha starts as the full configuration, levels 0..t-1
        std::vector<std::vector<long long>> alpha = b.data.at(ci);
        std::vector<std::vector<long long>> result(verts, std::vector<long long>(b.width(), 0));

        for (int r = t - 1; r >= 0; r--) {
            int off = b.offset(r), d = b.dims[r];
            // B(eta) = sum_{w >= eta} (-1)^{|w|} alpha_{=r}(w)
            std::vector<std::vector<long long>> B(verts, std::vector<long long>(d, 0));
            for (uint32_t eta = 0; eta < verts; eta++) {
                for (uint32_t w = 0; w < verts; w++) {
                    if ((w & eta) != eta) continue;
                    int sgn = (popcount32(w) & 1) ? -1 : 1;
                    for (int j = 0; j < d; j++) B[eta][j] += sgn * alpha[w][off + j];
                }
            }
            // beta(w') = sum_{eta >= w', |eta| <= r} (-1)^{|eta|} B(eta)
            for (uint32_t wp = 0; wp < verts; wp++) {
                for (uint32_t eta = 0; eta < verts; eta++) {
                    if ((eta & wp) != wp || popcount32(eta) > r) continue;
                    int sgn = (popcount32(eta) & 1) ? -1 : 1;
                    for (int j = 0; j < d; j++) result[wp][off + j] += sgn * B[eta][j];
                }
            }
            // fold the |eta| >= r+1 part into lower levels via the hierarchy
            if (r > 0) {
                int below = b.offset(r);
                for (uint32_t eta = 0; eta < verts; eta++) {
                    if (popcount32(eta) < r + 1) continue;
                    bool nonzero = false;
                    for (int j = 0; j < d && !nonzero; j++)
                        if (B[eta][j] != 0) nonzero = true;
                    if (!nonzero) continue;
                    int sgn_eta = (popcount32(eta) & 1) ? -1 : 1;
                    for (int j = 0; j < d; j++) {
                        if (B[eta][j] == 0) continue;
                        auto gamma = gamma_config(f, r, j, c, eta, k);
                        for (uint32_t w = 0; w < verts; w++) {
                            if ((w & ~eta) != 0) continue;
                            for (int dd = 0; dd < below; dd++)
                                alpha[w][dd] += sgn_eta * B[eta][j] * gamma[w][dd];
                        }
                    }
                }
            } else {
                // r = 0: B(eta) for |eta| >= 1 vanish against constants only
                // when the level-0 members obey their 1-derivatives condition;
                // nothing further to fold.
            }
        }

        // exactness: the normal form must reproduce the same derivative sum
        Rat before(0), after(0);
        const auto& orig = b.data.at(ci);
        for (uint32_t w = 0; w < verts; w++) {
            Rat t1 = dot(orig[w], f.eval_below(t, c.vertex(w)));
            Rat t2 = dot(result[w], f.eval_below(t, c.vertex(w)));
            if (popcount32(w) & 1) {
                before -= t1;
                after -= t2;
            } else {
                before += t1;
                after += t2;
            }
        }
        if (!(before == after))
            throw Error("normalize_b: derivative sum not preserved (hierarchy witnesses inconsistent)");
        out.data.emplace(ci, std::move(result));
    }
    return out;
}

CompatDefect upper_compat_defect(const FiniteGroupSpec& G, const BCoeffs& b, const Bitset& S,
                                 int k) {
    if (!b.normal_form()) throw ContractError("upper_compat_defect: b not in normal form");
    CompatDefect out;
    out.defect.assign(k, std::vector<Rat>(size_t(1) << k, Rat(0)));
    out.max_defect = Rat(0);
    CubeIndexer idx{&G, k};
    uint64_t n = G.order();
    uint64_t denom = 1;
    for (int i = 0; i < k + 2; i++) denom *= n;

    std::vector<std::vector<long long>> counts(k, std::vector<long long>(size_t(1) << k, 0));
    std::vector<uint64_t> h(k);
    for (uint64_t xi = 0; xi < n; xi++) {
        uint64_t hcount = 1;
        for (int i = 0; i < k; i++) hcount *= n;
        for (uint64_t hi = 0; hi < hcount; hi++) {
            uint64_t tmp = hi;
            for (int i = k - 1; i >= 0; i--) {
                h[i] = tmp % n;
                tmp /= n;
            }
            for (uint64_t hp = 0; hp < n; hp++) {
                for (int i = 1; i <= k; i++) {
                    auto h0 = h;
                    h0[i - 1] = G.add(h[i - 1], hp);
                    CubeConfig c0(G, xi, h0);
                    auto h1 = h;
                    h1[i - 1] = hp;
                    CubeConfig c1(G, G.add(xi, h[i - 1]), h1);
                    uint64_t i0 = idx.index(c0), i1 = idx.index(c1);
                    if (!S.get(i0) || !S.get(i1)) continue;
                    const auto& r0 = b.data.at(i0);
                    const auto& r1 = b.data.at(i1);
                    for (uint32_t w = 0; w < (1u << k); w++) {
                        if (!(w & (1u << (i - 1)))) continue;
                        if (r0[w] != r1[w]) counts[i - 1][w]++;
                    }
                }
            }
        }
    }
    for (int i = 0; i < k; i++) {
        for (uint32_t w = 0; w < (1u << k); w++) {
            out.defect[i][w] = Rat(counts[i][w], (long long)denom);
            if (out.defect[i][w] > out.max_defect) out.max_defect = out.defect[i][w];
        }
    }
    return out;
}

GenCocycleDefect gen_cocycle_defect(const FiniteGroupSpec& G, const BCoeffs& b, const Bitset& S,
                                    int k, int r) {
    if (!b.normal_form()) throw ContractError("gen_cocycle_defect: b not in normal form");
    GenCocycleDefect out;
    out.per_direction.assign(k, Rat(0));
    out.max_defect = Rat(0);
    CubeIndexer idx{&G, k};
    uint64_t n = G.order();
    uint64_t denom = 1;
    for (int i = 0; i < k + 2; i++) denom *= n;
    int width = b.width();

    std::vector<long long> counts(k, 0);
    std::vector<uint64_t> h(k);
    uint64_t hcount = 1;
    for (int i = 0; i < k; i++) hcount *= n;
    for (uint64_t xi = 0; xi < n; xi++) {
        for (uint64_t hi = 0; hi < hcount; hi++) {
            uint64_t tmp = hi;
            for (int i = k - 1; i >= 0; i--) {
                h[i] = tmp % n;
                tmp /= n;
            }
            CubeConfig c(G, xi, h);
            uint64_t cidx = idx.index(c);
            for (uint64_t hp = 0; hp < n; hp++) {
                for (int i = 1; i <= k; i++) {
                    auto h0 = h;
                    h0[i - 1] = G.add(h[i - 1], hp);
                    CubeConfig c0(G, xi, h0);
                    auto h1 = h;
                    h1[i - 1] = hp;
                    CubeConfig c1(G, G.add(xi, h[i - 1]), h1);
                    uint64_t i0 = idx.index(c0), i1 = idx.index(c1);
                    if (!S.get(i0) || !S.get(i1) || !S.get(cidx)) continue;
                    const auto& rows0 = b.data.at(i0);
                    const auto& rows1 = b.data.at(i1);
                    const auto& rowsc = b.data.at(cidx);
                    // spliced configuration fb
                    bool fail = false;
                    for (uint32_t w = 0; w < (1u << k) && !fail; w++) {
                        for (int d = 0; d < width && !fail; d++) {
                            long long acc = 0;
                            for (uint32_t wp = 0; wp < (1u << k); wp++) {
                                // normal-form transform of the spliced
                                // configuration: sum over the first index
                                long long z = z_coeff(r, wp, w);
                                if (z == 0) continue;
                                long long fb = (wp & (1u << (i - 1)))
                                                   ? rows1[wp & ~(1u << (i - 1))][d]
                                                   : rows0[wp][d];
                                acc += z * fb;
                            }
                            if (acc != rowsc[w][d]) fail = true;
                        }
                    }
                    if (fail) counts[i - 1]++;
                }
            }
        }
    }
    for (int i = 0; i < k; i++) {
        out.per_direction[i] = Rat(counts[i], (long long)denom);
        if (out.per_direction[i] > out.max_defect) out.max_defect = out.per_direction[i];
    }
    return out;
}

namespace {

// all integer vectors of the given dimension with l1 norm <= K
void gen_witnesses(int dim, long long K, std::vector<long long>& cur, long long used,
                   std::vector<std::vector<long long>>& out) {
    if ((int)cur.size() == dim) {
        out.push_back(cur);
        return;
    }
    for (long long mag = -(K - used); mag <= K - used; mag++) {
        cur.push_back(mag);
        gen_witnesses(dim, K, cur, used + (mag < 0 ? -mag : mag), out);
        cur.pop_back();
    }
}

}  // namespace

ReduceResult reduce_hierarchy(const PolynomialHierarchy& f, const PolynomialHierarchy& f_prime,
                              long long K, const RealFn& g, const BCoeffs& b, const Bitset& S,
                              int k, int t) {
    (void)g;
    const FiniteGroupSpec& G = *f.G;
    ReduceResult out;
    out.rewritten.k = k;
    out.rewritten.t = t;
    out.rewritten.dims.assign(f_prime.dims.begin(), f_prime.dims.begin() + t);
    int new_width = out.rewritten.width();

    // per-point witnesses for every hierarchy member at every x, cached
    // witness[i][j][x] is a vector over f'_{<= i}
    std::vector<std::vector<std::vector<std::vector<long long>>>> witness(f.s + 1);
    for (int i = 0; i <= f.s && i < t; i++) {
        witness[i].resize(f.dims[i]);
        int dim_prime = f_prime.total_dim(i + 1);
        std::vector<std::vector<long long>> candidates;
        std::vector<long long> cur;
        gen_witnesses(dim_prime, K, cur, 0, candidates);
        std::sort(candidates.begin(), candidates.end(),
                  [](const std::vector<long long>& a, const std::vector<long long>& b2) {
                      long long na = 0, nb = 0;
                      for (long long v : a) na += v < 0 ? -v : v;
                      for (long long v : b2) nb += v < 0 ? -v : v;
                      if (na != nb) return na < nb;
                      return a < b2;
                  });
        for (int j = 0; j < f.dims[i]; j++) {
            witness[i][j].resize(G.order());
            for (uint64_t x = 0; x < G.order(); x++) {
                if (!f.fns[i][j].is_defined(x)) continue;
                auto vals = f_prime.eval_below(i + 1, x);
                bool found = false;
                for (auto& cand : candidates) {
                    if (dot(cand, vals) == f.fns[i][j][x]) {
                        witness[i][j][x] = cand;
                        found = true;
                        break;
                    }
                }
                if (!found)
                    throw ReductionFailure("reduce_hierarchy: no witness within the K budget");
            }
        }
    }

    CubeIndexer idx{&G, k};
    for (uint64_t ci = 0; ci < S.size(); ci++) {
        if (!S.get(ci)) continue;
        CubeConfig c = idx.cube(ci);
        const auto& rows = b.data.at(ci);
        std::vector<std::vector<long long>> nrows(rows.size(), std::vector<long long>(new_width, 0));
        for (uint32_t w = 0; w < rows.size(); w++) {
            uint64_t x = c.vertex(w);
            for (int i = 0; i < t; i++) {
                int off = b.offset(i);
                for (int j = 0; j < b.dims[i]; j++) {
                    long long coef = rows[w][off + j];
                    if (coef == 0) continue;
                    const auto& v = witness[i][j][x];
                    for (size_t d = 0; d < v.size(); d++) nrows[w][d] += coef * v[d];
                }
            }
        }
        out.rewritten.data.emplace(ci, std::move(nrows));
    }
    out.K_used = K;
    return out;
}

}  // namespace hofa
