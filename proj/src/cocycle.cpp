#include "hofa/cocycle.hpp"

#include <algorithm>

namespace hofa {

namespace {

// triple (c0, c1, c) in direction i from the tuple (x, h_1..h_k, h')
struct Triple {
    CubeConfig c0, c1, c;
};

Triple make_triple(const FiniteGroupSpec& G, uint64_t x, const std::vector<uint64_t>& h,
                   uint64_t hp, int i) {
    auto h0 = h;
    h0[i - 1] = G.add(h[i - 1], hp);
    auto h1 = h;
    h1[i - 1] = hp;
    return Triple{CubeConfig(G, x, h0), CubeConfig(G, G.add(x, h[i - 1]), h1),
                  CubeConfig(G, x, h)};
}

template <class F>
void for_each_triple(const FiniteGroupSpec& G, int k, F&& fn) {
    uint64_t n = G.order();
    uint64_t hcount = 1;
    for (int i = 0; i < k; i++) hcount *= n;
    std::vector<uint64_t> h(k);
    for (uint64_t x = 0; x < n; x++) {
        for (uint64_t hi = 0; hi < hcount; hi++) {
            uint64_t t = hi;
            for (int i = k - 1; i >= 0; i--) {
                h[i] = t % n;
                t /= n;
            }
            for (uint64_t hp = 0; hp < n; hp++)
                for (int i = 1; i <= k; i++) fn(make_triple(G, x, h, hp, i), i);
        }
    }
}

std::vector<Rat> sub_vec(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    std::vector<Rat> r(a.size());
    for (size_t i = 0; i < a.size(); i++) r[i] = a[i] - b[i];
    return r;
}

Rat sqrt_upper(const Rat& x, unsigned bits = 24) {
    if (x.sign() <= 0) return Rat(0);
    if (x >= Rat(1)) return x;
    BigInt two_b = BigInt::pow(BigInt(2), bits);
    BigInt scaled = x.num() * two_b * two_b;
    BigInt target = scaled / x.den();
    if (!((target * x.den()) == scaled)) target = target + BigInt(1);
    BigInt lo(0), hi = two_b;
    while (lo < hi) {
        BigInt mid = (lo + hi) / BigInt(2);
        if (mid * mid >= target)
            hi = mid;
        else
            lo = mid + BigInt(1);
    }
    return Rat(lo, two_b);
}

}  // namespace

std::vector<Rat> cocycle_defect(const CocycleData& rho) {
    const FiniteGroupSpec& G = *rho.G;
    CubeIndexer idx{&G, rho.k};
    std::vector<long long> bad(rho.k, 0);
    uint64_t denom = 1;
    for (int i = 0; i < rho.k + 2; i++) denom *= G.order();
    for_each_triple(G, rho.k, [&](const Triple& t, int i) {
        uint64_t i0 = idx.index(t.c0), i1 = idx.index(t.c1), ic = idx.index(t.c);
        if (!rho.domain.get(i0) || !rho.domain.get(i1) || !rho.domain.get(ic)) return;
        if (!(rho.values[ic] == sub_vec(rho.values[i0], rho.values[i1]))) bad[i - 1]++;
    });
    std::vector<Rat> out(rho.k);
    for (int i = 0; i < rho.k; i++) out[i] = Rat(bad[i], (long long)denom);
    return out;
}

std::vector<std::vector<Rat>> avg_integrate(const CocycleData& rho) {
    const FiniteGroupSpec& G = *rho.G;
    uint64_t n = G.order();
    for (uint64_t i = 0; i < rho.domain.size(); i++)
        if (!rho.domain.get(i)) throw ArgumentError("avg_integrate: domain must be all cubes");
    CubeIndexer idx{&G, rho.k};
    uint64_t hcount = idx.size() / n;
    std::vector<std::vector<Rat>> lambda(n, std::vector<Rat>(rho.width));
    for (uint64_t x = 0; x < n; x++) {
        std::vector<Rat> acc(rho.width);
        // cubes with base x occupy a contiguous block in the index order
        for (uint64_t hi = 0; hi < hcount; hi++) {
            const auto& v = rho.values[x * hcount + hi];
            for (int d = 0; d < rho.width; d++) acc[d] += v[d];
        }
        for (int d = 0; d < rho.width; d++) lambda[x][d] = acc[d] / Rat((long long)hcount);
    }
    return lambda;
}

OperatorSuite::Table OperatorSuite::deriv(const Table& u) const {
    CubeIndexer idx{G, k};
    Table out(idx.size());
    for (uint64_t i = 0; i < idx.size(); i++) {
        CubeConfig c = idx.cube(i);
        Rat acc(0);
        for (uint32_t w = 0; w < (1u << k); w++)
            acc = (popcount32(w) & 1) ? acc - u[c.vertex(w)] : acc + u[c.vertex(w)];
        out[i] = acc;
    }
    return out;
}

OperatorSuite::Table OperatorSuite::sigma(const Table& v) const {
    uint64_t n = G->order();
    CubeIndexer idx{G, k};
    uint64_t hcount = idx.size() / n;
    Table out(n);
    for (uint64_t x = 0; x < n; x++) {
        Rat acc(0);
        for (uint64_t hi = 0; hi < hcount; hi++) acc += v[x * hcount + hi];
        out[x] = acc / Rat((long long)hcount);
    }
    return out;
}

OperatorSuite::Table OperatorSuite::delta_i(const Table& v, int i) const {
    const FiniteGroupSpec& g = *G;
    CubeIndexer idx{G, k};
    Table out(wsize());
    uint64_t pos = 0;
    for_each_triple(g, k, [&](const Triple& t, int dir) {
        if (dir != i) return;
        out[pos++] = v[idx.index(t.c0)] - v[idx.index(t.c1)] - v[idx.index(t.c)];
    });
    return out;
}

OperatorSuite::Table OperatorSuite::tau_i(const Table& w, int i) const {
    const FiniteGroupSpec& g = *G;
    CubeIndexer idx{G, k};
    uint64_t n = g.order();
    Table out(vsize());
    // average over the triples sharing the glued cube c
    uint64_t pos = 0;
    std::vector<Rat> acc(vsize());
    for_each_triple(g, k, [&](const Triple& t, int dir) {
        if (dir != i) return;
        acc[idx.index(t.c)] += w[pos++];
    });
    for (uint64_t ci = 0; ci < vsize(); ci++) out[ci] = acc[ci] / Rat((long long)n);
    return out;
}

OperatorSuite::Table OperatorSuite::Z(const Table& v) const {
    Table cur = v;
    for (int i = k; i >= 1; i--) {
        Table d = delta_i(cur, i);
        Table t = tau_i(d, i);
        for (uint64_t j = 0; j < cur.size(); j++) cur[j] += t[j];
    }
    Table ds = deriv(sigma(v));
    for (uint64_t j = 0; j < cur.size(); j++) ds[j] -= cur[j];
    return ds;
}

OperatorSuite::Table OperatorSuite::Zprime(const Table& v, const Bitset& S,
                                           const std::vector<Bitset>& I) const {
    auto project = [&](Table t) {
        for (uint64_t j = 0; j < t.size(); j++)
            if (!S.get(j)) t[j] = Rat(0);
        return t;
    };
    Table cur = v;
    for (int i = k; i >= 1; i--) {
        Table d = delta_i(cur, i);
        for (uint64_t j = 0; j < d.size(); j++)
            if (!I[i - 1].get(j)) d[j] = Rat(0);
        Table t = tau_i(d, i);
        for (uint64_t j = 0; j < cur.size(); j++) cur[j] += t[j];
        cur = project(std::move(cur));
    }
    Table ds = project(deriv(sigma(v)));
    for (uint64_t j = 0; j < cur.size(); j++) ds[j] -= cur[j];
    return ds;
}

Rat OperatorSuite::operator_norm(const std::function<Table(const Table&)>& op,
                                 uint64_t in_dim) const {
    // l_inf -> l_inf norm: max over outputs of the row l1 norm, assembled
    // column by column
    std::vector<Rat> row_sums;
    for (uint64_t j = 0; j < in_dim; j++) {
        Table e(in_dim, Rat(0));
        e[j] = Rat(1);
        Table col = op(e);
        if (row_sums.empty()) row_sums.assign(col.size(), Rat(0));
        for (uint64_t r = 0; r < col.size(); r++) row_sums[r] += col[r].abs();
    }
    Rat best(0);
    for (auto& s : row_sums)
        if (s > best) best = s;
    return best;
}

LossyIntegrationSets build_integration_sets(const CocycleData& rho,
                                            const std::vector<Rat>& defect) {
    const FiniteGroupSpec& G = *rho.G;
    int k = rho.k;
    CubeIndexer idx{&G, k};
    uint64_t n = G.order();

    Rat delta(0);
    for (auto& d : defect)
        if (d > delta) delta = d;
    Rat eps = Rat(1) - Rat(BigInt((long long)rho.domain.count()), BigInt((long long)idx.size()));
    Rat threshold = (Rat(1) - Rat(2) * eps - sqrt_upper(delta)) * Rat((long long)n);

    // I'_i membership and per-c counts; each direction has |H|^{k+2} triples
    uint64_t wcount = 1;
    for (int i = 0; i < k + 2; i++) wcount *= n;
    std::vector<Bitset> Iprime(k, Bitset(wcount));
    std::vector<std::vector<uint64_t>> count_c(k, std::vector<uint64_t>(idx.size(), 0));
    std::vector<uint64_t> pos(k, 0);
    for_each_triple(G, k, [&](const Triple& t, int i) {
        uint64_t p = pos[i - 1]++;
        uint64_t i0 = idx.index(t.c0), i1 = idx.index(t.c1), ic = idx.index(t.c);
        if (!rho.domain.get(i0) || !rho.domain.get(i1) || !rho.domain.get(ic)) return;
        if (rho.values[ic] == sub_vec(rho.values[i0], rho.values[i1])) {
            Iprime[i - 1].set(p);
            count_c[i - 1][ic]++;
        }
    });

    // S' = cubes supported by many good triples in every direction
    Bitset Sprime(idx.size());
    for (uint64_t ci = 0; ci < idx.size(); ci++) {
        if (!rho.domain.get(ci)) continue;
        bool ok = true;
        for (int i = 0; i < k && ok; i++)
            if (Rat((long long)count_c[i][ci]) < threshold) ok = false;
        if (ok) Sprime.set(ci);
    }

    // avoid the complement with a near-full system, then intersect
    CubeSystem avoid(G, k - 1);
    for (int j = 0; j < k; j++) avoid.levels[j] = Bitset(avoid.indexer(j).size(), true);
    avoid.levels[k] = Bitset(idx.size());
    for (uint64_t ci = 0; ci < idx.size(); ci++)
        avoid.levels[k].set(ci, !(rho.domain.get(ci) && !Sprime.get(ci)));
    DensifyResult dens = densify(avoid);

    LossyIntegrationSets out;
    out.S = Bitset(idx.size());
    for (uint64_t ci = 0; ci < idx.size(); ci++)
        if (dens.system.levels[k].get(ci) && rho.domain.get(ci)) out.S.set(ci);

    out.I.assign(k, Bitset(wcount));
    std::vector<std::vector<uint64_t>> kept(k, std::vector<uint64_t>(idx.size(), 0));
    std::fill(pos.begin(), pos.end(), 0);
    for_each_triple(G, k, [&](const Triple& t, int i) {
        uint64_t p = pos[i - 1]++;
        if (!Iprime[i - 1].get(p)) return;
        uint64_t i0 = idx.index(t.c0), i1 = idx.index(t.c1), ic = idx.index(t.c);
        if (out.S.get(i0) && out.S.get(i1) && out.S.get(ic)) {
            out.I[i - 1].set(p);
            kept[i - 1][ic]++;
        }
    });
    // measured worst exclusion rate over certified cubes
    out.eta = Rat(0);
    for (uint64_t ci = 0; ci < idx.size(); ci++) {
        if (!out.S.get(ci)) continue;
        for (int i = 0; i < k; i++) {
            Rat miss = Rat(1) - Rat((long long)kept[i][ci], (long long)n);
            if (miss > out.eta) out.eta = miss;
        }
    }
    return out;
}

LossyIntegrationResult integrate_lossy(const CocycleData& rho, const Rat& tol,
                                       int max_iterations) {
    const FiniteGroupSpec& G = *rho.G;
    int k = rho.k;
    CubeIndexer idx{&G, k};
    uint64_t n = G.order();

    auto defect = cocycle_defect(rho);
    LossyIntegrationSets sets = build_integration_sets(rho, defect);
    OperatorSuite ops{&G, k};

    LossyIntegrationResult out;
    out.certified = sets.S;
    out.lambda.assign(n, std::vector<Rat>(rho.width));
    out.contraction = Rat(0);

    for (int d = 0; d < rho.width; d++) {
        // f = projection of rho to the certified set, coordinate d
        OperatorSuite::Table f(idx.size(), Rat(0));
        for (uint64_t ci = 0; ci < idx.size(); ci++)
            if (sets.S.get(ci)) f[ci] = rho.values[ci][d];
        OperatorSuite::Table g = f;
        Rat prev_res(-1);
        int iter = 0;
        while (true) {
            OperatorSuite::Table zg = ops.Zprime(g, sets.S, sets.I);
            OperatorSuite::Table next(idx.size());
            Rat res(0);
            for (uint64_t ci = 0; ci < idx.size(); ci++) {
                next[ci] = f[ci] - zg[ci];
                Rat r = (next[ci] - g[ci]).abs();
                if (r > res) res = r;
            }
            g = std::move(next);
            iter++;
            if (prev_res.sign() > 0 && res.sign() > 0) {
                Rat ratio = res / prev_res;
                if (ratio > out.contraction) out.contraction = ratio;
                if (!(ratio < Rat(1)))
                    throw NotContractiveError("integrate_lossy: residuals not decreasing");
            }
            prev_res = res;
            if (res <= tol) break;
            if (iter >= max_iterations)
                throw Error("integrate_lossy: iteration limit before tolerance");
        }
        out.iterations = std::max(out.iterations, iter);
        out.final_residual = prev_res;
        OperatorSuite::Table lam = ops.sigma(g);
        for (uint64_t x = 0; x < n; x++) out.lambda[x][d] = lam[x];
    }

    // exact correction: solve for mu with derivative rho - deriv(lambda) on
    // the certified set, free values pinned to zero
    {
        std::vector<std::vector<Rat>> rows;   // echelon rows over the n unknowns
        std::vector<std::vector<Rat>> rhs;    // parallel right-hand sides (width entries)
        std::vector<int> pivot;               // pivot column per row
        auto reduce_insert = [&](std::vector<Rat> row, std::vector<Rat> r) -> bool {
            for (size_t p = 0; p < rows.size(); p++) {
                if (row[pivot[p]].is_zero()) continue;
                Rat c = row[pivot[p]];
                for (uint64_t j = 0; j < n; j++) row[j] -= c * rows[p][j];
                for (int d = 0; d < rho.width; d++) r[d] -= c * rhs[p][d];
            }
            int pv = -1;
            for (uint64_t j = 0; j < n && pv < 0; j++)
                if (!row[j].is_zero()) pv = (int)j;
            if (pv < 0) {
                for (int d = 0; d < rho.width; d++)
                    if (!r[d].is_zero())
                        throw Error("integrate_lossy: certified constraints inconsistent");
                return false;
            }
            Rat c = row[pv];
            for (uint64_t j = 0; j < n; j++) row[j] /= c;
            for (int d = 0; d < rho.width; d++) r[d] /= c;
            rows.push_back(std::move(row));
            rhs.push_back(std::move(r));
            pivot.push_back(pv);
            return true;
        };
        RatOps rops;
        for (uint64_t ci = 0; ci < idx.size(); ci++) {
            if (!sets.S.get(ci)) continue;
            CubeConfig c = idx.cube(ci);
            std::vector<Rat> row(n, Rat(0));
            for (uint32_t w = 0; w < (1u << k); w++) {
                uint64_t x = c.vertex(w);
                row[x] += (popcount32(w) & 1) ? Rat(-1) : Rat(1);
            }
            std::vector<Rat> target(rho.width);
            for (int d = 0; d < rho.width; d++) {
                Rat lhs(0);
                for (uint32_t w = 0; w < (1u << k); w++) {
                    uint64_t x = c.vertex(w);
                    lhs = (popcount32(w) & 1) ? lhs - out.lambda[x][d] : lhs + out.lambda[x][d];
                }
                target[d] = rho.values[ci][d] - lhs;
            }
            reduce_insert(std::move(row), std::move(target));
        }
        // back substitution with free unknowns at zero
        std::vector<std::vector<Rat>> mu(n, std::vector<Rat>(rho.width));
        for (size_t p = rows.size(); p-- > 0;) {
            for (int d = 0; d < rho.width; d++) {
                Rat v = rhs[p][d];
                for (uint64_t j = pivot[p] + 1; j < n; j++)
                    if (!rows[p][j].is_zero()) v -= rows[p][j] * mu[j][d];
                mu[pivot[p]][d] = v;
            }
        }
        for (uint64_t x = 0; x < n; x++)
            for (int d = 0; d < rho.width; d++) out.lambda[x][d] += mu[x][d];
        (void)rops;
    }

    // the certified set must now hold exactly
    RatOps rops2;
    for (uint64_t ci = 0; ci < idx.size(); ci++) {
        if (!sets.S.get(ci)) continue;
        CubeConfig c = idx.cube(ci);
        for (int d = 0; d < rho.width; d++) {
            Rat lhs(0);
            for (uint32_t w = 0; w < (1u << k); w++) {
                uint64_t x = c.vertex(w);
                lhs = (popcount32(w) & 1) ? lhs - out.lambda[x][d] : lhs + out.lambda[x][d];
            }
            if (!(lhs == rho.values[ci][d]))
                throw Error("integrate_lossy: exact correction failed");
        }
    }
    (void)rops2;
    return out;
}

IntegerizeResult integerize(const FiniteGroupSpec& G, const std::vector<std::vector<Rat>>& lambda,
                            int k, bool strict) {
    uint64_t n = G.order();
    int width = (int)lambda[0].size();
    // density of cubes with integral derivative
    CubeIndexer idx{&G, k};
    uint64_t good = 0;
    for (uint64_t ci = 0; ci < idx.size(); ci++) {
        CubeConfig c = idx.cube(ci);
        bool ok = true;
        for (int d = 0; d < width && ok; d++) {
            Rat acc(0);
            for (uint32_t w = 0; w < (1u << k); w++) {
                uint64_t x = c.vertex(w);
                acc = (popcount32(w) & 1) ? acc - lambda[x][d] : acc + lambda[x][d];
            }
            if (!acc.is_integer()) ok = false;
        }
        if (ok) good++;
    }
    Rat density((long long)good, (long long)idx.size());
    Rat need = Rat(1) - Rat(1, BigInt::pow(BigInt(2), 2 * k + 2).to_i64());
    if (strict && density < need)
        throw ContractError("integerize: integral-derivative density too low");

    // majority-extend the torus reduction, then lift off the agreement set
    TorusVecOps tops{width};
    struct Wrapper {
        const FiniteGroupSpec* G;
        std::vector<std::vector<Rat>> v;
        bool is_defined(uint64_t) const { return true; }
    } f{&G, {}};
    f.v.assign(n, std::vector<Rat>(width));
    for (uint64_t x = 0; x < n; x++)
        for (int d = 0; d < width; d++) f.v[x][d] = lambda[x][d].frac();
    auto ext = majority_extend(tops, f, k - 1);

    IntegerizeResult out;
    out.integral_density = density;
    out.precondition_met = !(density < need);
    out.X = ext.X;
    out.values.assign(n, std::vector<Rat>(width));
    for (uint64_t x = 0; x < n; x++) {
        if (ext.X[x]) {
            out.values[x] = lambda[x];
            continue;
        }
        for (int d = 0; d < width; d++) {
            // minimal-l1 lift of the extended torus value; ties take the
            // lexicographically smaller (negative) representative
            Rat v = ext.extended[x][d];
            out.values[x][d] = (v > Rat(1, 2)) ? v - Rat(1) : (v == Rat(1, 2) ? v - Rat(1) : v);
        }
    }
    return out;
}

VertexLabelling<std::vector<Rat>> lambda_to_Lambda(const FiniteGroupSpec& G,
                                                   const std::vector<std::vector<Rat>>& lambda,
                                                   int r, const CubeConfig& c) {
    int k = c.dim();
    int width = (int)lambda[0].size();
    VertexLabelling<std::vector<Rat>> out(k);
    for (uint32_t w = 0; w < (1u << k); w++) {
        std::vector<Rat> acc(width);
        for (uint32_t wp = 0; wp < (1u << k); wp++) {
            long long z = z_coeff(r, wp, w);
            if (z == 0) continue;
            for (int d = 0; d < width; d++) acc[d] += Rat(z) * lambda[c.vertex(wp)][d];
        }
        out[w] = std::move(acc);
    }
    return out;
}

GenIntegrateResult gen_integrate(const CubeSystem& S, const BCoeffs& rho, int r, const Rat& tol) {
    const FiniteGroupSpec& G = *S.G;
    int k = S.s + 1;  // levels 0..k
    int width = rho.width();
    CubeIndexer idx{&G, k};
    const Bitset& Sk = S.levels[k];

    // rho_F(c) = sum_{w in F} (-1)^{|w|} rho(c, w) for faces of codim r
    auto rho_F = [&](const Face& F, uint64_t ci) {
        std::vector<Rat> acc(width);
        const auto& rows = rho.data.at(ci);
        for (uint32_t w = 0; w < (1u << k); w++) {
            if (!F.contains(w)) continue;
            for (int d = 0; d < width; d++) {
                Rat t = Rat(rows[w][d]);
                acc[d] = (popcount32(w) & 1) ? acc[d] - t : acc[d] + t;
            }
        }
        return acc;
    };

    // descend each lower face of codimension r to a cocycle on level k-r
    int kr = k - r;
    CubeIndexer idx_low{&G, kr};
    auto descend = [&](const Face& F) {
        CocycleData out(G, kr, width);
        std::vector<uint8_t> have(idx_low.size(), 0);
        for (uint64_t ci = 0; ci < idx.size(); ci++) {
            if (!Sk.get(ci)) continue;
            CubeConfig c = idx.cube(ci);
            CubeConfig low = restrict_cube(c, F);
            uint64_t li = idx_low.index(low);
            if (!S.levels[kr].get(li)) continue;
            auto val = rho_F(F, ci);
            if (have[li]) {
                if (!(out.values[li] == val))
                    throw Error("gen_integrate: face cocycle not well-defined on the system");
            } else {
                have[li] = 1;
                out.values[li] = val;
                out.domain.set(li);
            }
        }
        return out;
    };

    // all lower faces of codimension r (eta1 with k-r active coordinates)
    std::vector<Face> faces;
    for (uint32_t eta1 = 0; eta1 < (1u << k); eta1++)
        if (popcount32(eta1) == kr) faces.push_back(Face::lower(eta1));
    if (faces.empty()) throw ArgumentError("gen_integrate: r must be below k");

    CocycleData rho0 = descend(faces[0]);
    if (rho0.domain.count() == 0)
        throw ContractError("gen_integrate: certified face domain is empty");
    LossyIntegrationResult base = integrate_lossy(rho0, tol);
    IntegerizeResult snapped = integerize(G, base.lambda, kr);

    GenIntegrateResult out;
    out.lambda = snapped.values;
    out.faces_reconciled = 1;

    // reconcile every other lower face of the same codimension: integration
    // of its descended cocycle differs from lambda by a global constant on
    // the certified points
    for (size_t fi = 1; fi < faces.size(); fi++) {
        CocycleData rf = descend(faces[fi]);
        if (rf.domain.count() == 0) continue;
        LossyIntegrationResult lf = integrate_lossy(rf, tol);
        IntegerizeResult sf = integerize(G, lf.lambda, kr);
        bool have_c = false;
        std::vector<Rat> c0(width);
        bool constant = true;
        for (uint64_t x = 0; x < G.order() && constant; x++) {
            if (!S.levels[0].get(x)) continue;
            std::vector<Rat> diff(width);
            for (int d = 0; d < width; d++) diff[d] = sf.values[x][d] - out.lambda[x][d];
            if (!have_c) {
                c0 = diff;
                have_c = true;
            } else if (!(diff == c0)) {
                constant = false;
            }
        }
        if (!constant)
            throw Error("gen_integrate: parallel faces disagree beyond a global constant");
        out.faces_reconciled++;
    }

    // exact match set for the normal form of lambda against rho
    out.matched = Bitset(idx.size());
    uint64_t matched = 0;
    for (uint64_t ci = 0; ci < idx.size(); ci++) {
        if (!Sk.get(ci)) continue;
        CubeConfig c = idx.cube(ci);
        auto Lam = lambda_to_Lambda(G, out.lambda, r, c);
        const auto& rows = rho.data.at(ci);
        bool ok = true;
        for (uint32_t w = 0; w < (1u << k) && ok; w++)
            for (int d = 0; d < width && ok; d++)
                if (!(Lam[w][d] == Rat(rows[w][d]))) ok = false;
        if (ok) {
            out.matched.set(ci);
            matched++;
        }
    }
    out.matched_fraction = Rat((long long)matched, (long long)idx.size());
    return out;
}

}  // namespace hofa
