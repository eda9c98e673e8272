#include "hofa/cs.hpp"

#include <numeric>

#include "hofa/cube_system.hpp"

namespace hofa {

WitnessCheck verify_witness(const LinearFormSystem& sys) {
    WitnessCheck out;
    out.valid = true;
    int k = (int)sys.forms.size();
    std::vector<uint8_t> covered(k, 0);
    covered[sys.j] = 1;
    if (sys.sigma_sets.size() != sys.sigma.size()) {
        out.valid = false;
        out.violations.push_back("set/vector count mismatch");
        return out;
    }
    for (size_t r = 0; r < sys.sigma_sets.size(); r++) {
        for (int i : sys.sigma_sets[r]) {
            if (i == sys.j) {
                out.valid = false;
                out.violations.push_back("distinguished index inside a set");
            }
            covered[i] = 1;
            if (sys.apply(i, sys.sigma[r]) != 0) {
                out.valid = false;
                out.violations.push_back("sigma does not annihilate its set");
            }
        }
        long long q = sys.apply(sys.j, sys.sigma[r]);
        if (q == 0) {
            out.valid = false;
            out.violations.push_back("q_r vanishes");
        } else if (sys.Q % q != 0) {
            out.valid = false;
            out.violations.push_back("q_r does not divide Q");
        }
    }
    for (int i = 0; i < k; i++)
        if (!covered[i]) {
            out.valid = false;
            out.violations.push_back("form " + std::to_string(i) + " not covered");
        }
    return out;
}

std::optional<LinearFormSystem> find_witness(int d,
                                             const std::vector<std::vector<long long>>& forms,
                                             int j, int t, long long box) {
    int k = (int)forms.size();
    // candidate sigma vectors in the box, keyed by the set of forms killed
    std::vector<std::pair<std::vector<long long>, std::vector<int>>> candidates;
    std::vector<long long> v(d, -box);
    while (true) {
        LinearFormSystem probe;
        probe.d = d;
        probe.forms = forms;
        std::vector<int> killed;
        long long qj = 0;
        for (int i = 0; i < k; i++) {
            long long val = 0;
            for (int c = 0; c < d; c++) val += forms[i][c] * v[c];
            if (i == j)
                qj = val;
            else if (val == 0)
                killed.push_back(i);
        }
        if (qj != 0 && !killed.empty()) candidates.emplace_back(v, killed);
        int pos = 0;
        for (;; pos++) {
            if (pos == d) break;
            if (++v[pos] <= box) break;
            v[pos] = -box;
        }
        if (pos == d) break;
    }
    // greedy cover with at most t+1 sets
    std::vector<uint8_t> covered(k, 0);
    covered[j] = 1;
    LinearFormSystem out;
    out.d = d;
    out.forms = forms;
    out.j = j;
    out.Q = 1;
    for (int round = 0; round < t + 1; round++) {
        size_t best = candidates.size();
        int best_gain = 0;
        for (size_t c = 0; c < candidates.size(); c++) {
            int gain = 0;
            for (int i : candidates[c].second)
                if (!covered[i]) gain++;
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        if (best == candidates.size()) break;
        out.sigma.push_back(candidates[best].first);
        out.sigma_sets.push_back(candidates[best].second);
        for (int i : candidates[best].second) covered[i] = 1;
        long long q = 0;
        for (int c = 0; c < d; c++) q += forms[j][c] * candidates[best].first[c];
        out.Q = std::lcm(out.Q, std::abs(q));
    }
    for (int i = 0; i < k; i++)
        if (!covered[i]) return std::nullopt;
    while ((int)out.sigma.size() < t + 1) {
        out.sigma.push_back(out.sigma.back());
        out.sigma_sets.push_back({});
    }
    return out;
}

DiscreteCsResult discrete_cs_counts(const std::vector<int>& pi, const std::vector<long long>& f,
                                    const std::vector<long long>& g, int ysize) {
    DiscreteCsResult out;
    size_t n = pi.size();
    for (size_t x = 0; x < n; x++)
        if (f[x] == g[pi[x]]) out.matches++;
    for (size_t x = 0; x < n; x++)
        for (size_t y = 0; y < n; y++) {
            if (pi[x] != pi[y]) continue;
            out.fiber_pairs++;
            if (f[x] == f[y]) out.pairs++;
        }
    out.delta = Rat(out.matches, (long long)n);
    // delta^2 |X|^2 / |Y|
    Rat bound = out.delta * out.delta * Rat((long long)(n * n), ysize);
    out.inequality_holds = Rat(out.pairs) >= bound;
    // equal fibers variant
    std::vector<long long> fiber(ysize, 0);
    for (int p : pi) fiber[p]++;
    long long sz = -1;
    out.equal_fibers = true;
    for (long long c : fiber) {
        if (c == 0) continue;
        if (sz < 0)
            sz = c;
        else if (c != sz)
            out.equal_fibers = false;
    }
    if (out.equal_fibers && !(Rat(out.pairs) >= out.delta * out.delta * Rat(out.fiber_pairs)))
        out.inequality_holds = false;
    return out;
}

MultidimCsResult multidim_cs_counts(const FiniteGroupSpec& X,
                                    const std::vector<uint64_t>& subgroup_gens,
                                    const std::vector<long long>& f,
                                    const std::vector<std::vector<long long>>& g_on_quotients) {
    int k = (int)subgroup_gens.size();
    uint64_t n = X.order();
    // enumerate each cyclic subgroup
    std::vector<std::vector<uint64_t>> K(k);
    for (int i = 0; i < k; i++) {
        uint64_t cur = 0;
        do {
            K[i].push_back(cur);
            cur = X.add(cur, subgroup_gens[i]);
        } while (cur != 0);
    }
    // quotient labels: orbit representative under K_i translation
    std::vector<std::vector<int>> quot(k, std::vector<int>(n, -1));
    for (int i = 0; i < k; i++) {
        int next = 0;
        for (uint64_t x = 0; x < n; x++) {
            if (quot[i][x] >= 0) continue;
            for (uint64_t h : K[i]) quot[i][X.add(x, h)] = next;
            next++;
        }
    }

    MultidimCsResult out;
    for (uint64_t x = 0; x < n; x++) {
        long long sum = 0;
        for (int i = 0; i < k; i++) sum += g_on_quotients[i][quot[i][x]];
        if (f[x] == sum) out.matches++;
    }
    out.delta = Rat(out.matches, (long long)n);

    // vanishing alternating sums over the restricted configurations
    long long vanish = 0, total = 0;
    std::vector<size_t> pick(k, 0);
    for (uint64_t x = 0; x < n; x++) {
        std::fill(pick.begin(), pick.end(), 0);
        while (true) {
            long long acc = 0;
            for (uint32_t w = 0; w < (1u << k); w++) {
                uint64_t y = x;
                for (int i = 0; i < k; i++)
                    if (w & (1u << i)) y = X.add(y, K[i][pick[i]]);
                acc += (popcount32(w) & 1) ? -f[y] : f[y];
            }
            total++;
            if (acc == 0) vanish++;
            int pos = 0;
            for (;; pos++) {
                if (pos == k) break;
                if (++pick[pos] < K[pos].size()) break;
                pick[pos] = 0;
            }
            if (pos == k) break;
        }
    }
    out.vanishing = BigInt(vanish);
    out.total = BigInt(total);
    Rat frac(vanish, total);
    out.inequality_holds = frac >= Rat::pow(out.delta, 1ull << k);
    return out;
}

GvnResult gvn_counts(const LinearFormSystem& sys, const std::vector<std::vector<Rat>>& fns,
                     const FiniteGroupSpec& H) {
    auto check = verify_witness(sys);
    if (!check.valid) throw ArgumentError("gvn: invalid complexity witness");
    if (std::gcd((long long)H.order(), sys.Q) != 1)
        throw ArgumentError("gvn: |H| shares a factor with the denominator");
    if (sys.d > 4) throw ArgumentError("gvn: ambient dimension capped at 4");
    uint64_t n = H.order();
    uint64_t domain = 1;
    for (int i = 0; i < sys.d; i++) {
        if (domain > 10000000ULL / n) throw SizeError("gvn: |H|^d exceeds the cap");
        domain *= n;
    }

    GvnResult out;
    int k = (int)sys.forms.size();
    long long solutions = 0;
    std::vector<long long> x(sys.d, 0);
    for (uint64_t idx = 0; idx < domain; idx++) {
        uint64_t t2 = idx;
        for (int i = sys.d - 1; i >= 0; i--) {
            x[i] = (long long)(t2 % n);
            t2 /= n;
        }
        Rat acc(0);
        for (int i = 0; i < k; i++) {
            long long v = sys.apply(i, x) % (long long)n;
            if (v < 0) v += n;
            acc += fns[i][v];
        }
        if (acc.is_zero()) solutions++;
    }
    out.solutions = BigInt(solutions);
    out.domain = BigInt((long long)domain);
    out.delta = Rat(solutions, (long long)domain);

    int t = sys.t();
    CubeIndexer idx{&H, t + 1};
    long long vanish = 0;
    RatOps ops;
    for (uint64_t ci = 0; ci < idx.size(); ci++) {
        if (ops.eq(derivative(ops, fns[sys.j], idx.cube(ci)), ops.zero())) vanish++;
    }
    out.vanishing = BigInt(vanish);
    out.cubes = BigInt((long long)idx.size());
    out.vanishing_fraction = Rat(vanish, (long long)idx.size());
    out.bound = Rat::pow(out.delta, 1ull << (t + 1));
    out.inequality_holds = out.vanishing_fraction >= out.bound;
    return out;
}

}  // namespace hofa
