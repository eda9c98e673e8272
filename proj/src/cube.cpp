#include "hofa/cube.hpp"

namespace hofa {

std::vector<Face> all_faces(int k) {
    std::vector<Face> out;
    uint32_t full = (1u << k) - 1;
    for (uint32_t eta1 = 0; eta1 <= full; eta1++) {
        // eta0 ranges over submasks of eta1
        uint32_t sub = eta1;
        while (true) {
            out.emplace_back(sub, eta1);
            if (sub == 0) break;
            sub = (sub - 1) & eta1;
        }
    }
    return out;
}

std::vector<Face> faces_of_dim(int k, int d) {
    std::vector<Face> out;
    for (const Face& f : all_faces(k))
        if (f.dim() == d) out.push_back(f);
    return out;
}

CubeConfig restrict_cube(const CubeConfig& c, Face F) {
    if (!F.valid(c.dim())) throw ArgumentError("restrict: malformed face");
    const FiniteGroupSpec& G = *c.G;
    uint64_t base = c.x;
    for (int i = 0; i < c.dim(); i++)
        if (F.eta0 & (1u << i)) base = G.add(base, c.h[i]);
    std::vector<uint64_t> edges;
    uint32_t act = F.active();
    for (int i = 0; i < c.dim(); i++)
        if (act & (1u << i)) edges.push_back(c.h[i]);
    return CubeConfig(G, base, std::move(edges));
}

CubeConfig glue_cubes(const CubeConfig& c0, const CubeConfig& c1, int i) {
    if (c0.dim() != c1.dim()) throw ArgumentError("glue: width mismatch");
    if (c0.h != c1.h) throw ArgumentError("glue: cubes must share edge tuple");
    int k = c0.dim() + 1;
    if (i < 1 || i > k) throw ArgumentError("glue: bad direction");
    const FiniteGroupSpec& G = *c0.G;
    std::vector<uint64_t> h;
    h.reserve(k);
    for (int j = 0; j < i - 1; j++) h.push_back(c0.h[j]);
    h.push_back(G.sub(c1.x, c0.x));
    for (int j = i - 1; j < c0.dim(); j++) h.push_back(c0.h[j]);
    return CubeConfig(G, c0.x, std::move(h));
}

CubeConfig duplicate_cube(const CubeConfig& c, Face F, int k) {
    if (!F.valid(k) || F.dim() != c.dim()) throw ArgumentError("duplicate: dimension mismatch");
    const FiniteGroupSpec& G = *c.G;
    std::vector<uint64_t> h(k, 0);
    uint32_t act = F.active();
    int j = 0;
    for (int i = 0; i < k; i++)
        if (act & (1u << i)) h[i] = c.h[j++];
    return CubeConfig(G, c.x, std::move(h));
}

CubeConfig extend_cube(const CubeConfig& c, uint64_t h) {
    CubeConfig r = c;
    r.h.push_back(h);
    return r;
}

long long z_coeff(int r, uint32_t omega, uint32_t omega_prime) {
    if ((omega & omega_prime) != omega_prime) return 0;
    long long acc = 0;
    uint32_t diff = omega ^ omega_prime;
    // eta = omega_prime | s for submasks s of diff
    uint32_t s = diff;
    int po = popcount32(omega);
    while (true) {
        uint32_t eta = omega_prime | s;
        if (popcount32(eta) <= r) acc += ((po - popcount32(eta)) & 1) ? -1 : 1;
        if (s == 0) break;
        s = (s - 1) & diff;
    }
    return acc;
}

std::pair<Rat, Rat> leibniz_sides(const VertexLabelling<Rat>& alpha, const VertexLabelling<Rat>& beta) {
    if (alpha.k != beta.k) throw ArgumentError("leibniz: width mismatch");
    int k = alpha.k;
    Rat lhs(0);
    for (uint32_t w = 0; w < (1u << k); w++) {
        Rat term = alpha[w] * beta[w];
        lhs = (popcount32(w) & 1) ? lhs - term : lhs + term;
    }
    Rat rhs(0);
    for (uint32_t eta = 0; eta < (1u << k); eta++) {
        Rat down(0), up(0);
        for (uint32_t w = 0; w < (1u << k); w++) {
            if ((w & eta) == w)  // w subset of eta
                down = (popcount32(w) & 1) ? down - alpha[w] : down + alpha[w];
            if ((w & eta) == eta)  // w superset of eta
                up = (popcount32(w) & 1) ? up - beta[w] : up + beta[w];
        }
        Rat term = down * up;
        rhs = (popcount32(eta) & 1) ? rhs - term : rhs + term;
    }
    return {lhs, rhs};
}

std::vector<std::pair<int, CubeConfig>> tricube(const FiniteGroupSpec& G, uint64_t x,
                                                const std::vector<uint64_t>& h,
                                                const std::vector<uint64_t>& h_prime) {
    if (h.size() != h_prime.size()) throw ArgumentError("tricube: width mismatch");
    int k = (int)h.size();
    std::vector<std::pair<int, CubeConfig>> out;
    for (uint32_t eta = 0; eta < (1u << k); eta++) {
        uint64_t xe = x;
        std::vector<uint64_t> he(k);
        for (int i = 0; i < k; i++) {
            if (eta & (1u << i)) {
                xe = G.add(xe, h_prime[i]);
                he[i] = G.sub(h[i], h_prime[i]);
            } else {
                he[i] = h[i];
            }
        }
        out.emplace_back((popcount32(eta) & 1) ? -1 : 1, CubeConfig(G, xe, std::move(he)));
    }
    return out;
}

}  // namespace hofa
