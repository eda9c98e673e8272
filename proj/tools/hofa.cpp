// Command-line harness for the exact higher-order Fourier toolkit: box
// norms and spectral tables, approximate-polynomial statistics and
// extensions, cube systems, cocycle integration, filtered nilpotent
// groups, discrete Cauchy-Schwarz counting, and the acceptance suite.

#include <cstdio>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "hofa/acceptance.hpp"
#include "hofa/approx_poly.hpp"
#include "hofa/cocycle.hpp"
#include "hofa/cs.hpp"
#include "hofa/cube_system.hpp"
#include "hofa/gowers.hpp"
#include "hofa/nil.hpp"
#include "hofa/util.hpp"

using nlohmann::ordered_json;
using namespace hofa;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// accepts "p/q", plain integers, and decimal/scientific literals such as
// "1e-12" or "0.05", all parsed exactly
Rat parse_rat(const std::string& s) {
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find('E') == std::string::npos)
        return Rat::from_string(s);
    size_t epos = s.find_first_of("eE");
    std::string mant = epos == std::string::npos ? s : s.substr(0, epos);
    long long expo = epos == std::string::npos ? 0 : std::stoll(s.substr(epos + 1));
    size_t dot = mant.find('.');
    std::string digits = dot == std::string::npos ? mant : mant.substr(0, dot) + mant.substr(dot + 1);
    if (dot != std::string::npos) expo -= (long long)(mant.size() - dot - 1);
    Rat base(BigInt::from_string(digits.empty() ? "0" : digits));
    BigInt scale = BigInt::pow(BigInt(10), (unsigned long long)(expo < 0 ? -expo : expo));
    return expo >= 0 ? base * Rat(scale) : base / Rat(scale);
}

ordered_json complex_json(const Cplx& z) { return ordered_json::array({fmt12(z.real()), fmt12(z.imag())}); }

FiniteGroupSpec load_group(const std::string& path, long long N, long long kappa, long long rank,
                           bool composite) {
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ArgumentError("cannot open group file " + path);
        auto j = ordered_json::parse(in);
        return FiniteGroupSpec(j.at("N").get<long long>(), j.value("kappa", 1LL),
                               j.value("rank", 1LL), j.value("composite", false));
    }
    return FiniteGroupSpec(N, kappa, rank, composite);
}

// builtin function specs: quadratic | character:a=2 | random:seed=7 |
// bracket:alpha=1,beta=2 | fraclin:beta=1
std::map<std::string, long long> parse_kv(const std::string& s) {
    std::map<std::string, long long> kv;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t eq = s.find('=', pos);
        if (eq == std::string::npos) break;
        size_t comma = s.find(',', eq);
        if (comma == std::string::npos) comma = s.size();
        kv[s.substr(pos, eq - pos)] = std::stoll(s.substr(eq + 1, comma - eq - 1));
        pos = comma + 1;
    }
    return kv;
}

CplxFn complex_fn(const FiniteGroupSpec& G, const std::string& builtin, const std::string& file) {
    CplxFn f(G);
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw ArgumentError("cannot open function file " + file);
        auto j = ordered_json::parse(in);
        auto vals = j.contains("values") ? j.at("values") : j;
        if (vals.size() != G.order()) throw ArgumentError("table length does not match |H|");
        for (uint64_t x = 0; x < G.order(); x++) {
            if (vals[x].is_array())
                f[x] = Cplx(std::stod(vals[x][0].get<std::string>()),
                            std::stod(vals[x][1].get<std::string>()));
            else
                f[x] = Cplx(Rat::from_string(vals[x].get<std::string>()).to_double(), 0.0);
        }
        return f;
    }
    auto colon = builtin.find(':');
    std::string kind = builtin.substr(0, colon);
    auto kv = colon == std::string::npos ? std::map<std::string, long long>{}
                                         : parse_kv(builtin.substr(colon + 1));
    if (kind == "quadratic") {
        for (uint64_t x = 0; x < G.order(); x++) {
            double t = kTau * (double)G.pairing(x, x) / (double)G.modulus();
            f[x] = Cplx(std::cos(t), std::sin(t));
        }
    } else if (kind == "character") {
        uint64_t a = (uint64_t)kv.at("a") % G.order();
        for (uint64_t x = 0; x < G.order(); x++) f[x] = G.character(a, x);
    } else if (kind == "random") {
        Rng rng((uint64_t)kv.at("seed"));
        for (uint64_t x = 0; x < G.order(); x++) {
            double t = kTau * rng.unit(), r = rng.unit();
            f[x] = Cplx(r * std::cos(t), r * std::sin(t));
        }
    } else {
        throw ArgumentError("unknown complex builtin " + kind);
    }
    return f;
}

RealFn real_fn(const FiniteGroupSpec& G, const std::string& builtin, const std::string& file) {
    RealFn f(G);
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw ArgumentError("cannot open function file " + file);
        auto j = ordered_json::parse(in);
        auto vals = j.contains("values") ? j.at("values") : j;
        if (vals.size() != G.order()) throw ArgumentError("table length does not match |H|");
        for (uint64_t x = 0; x < G.order(); x++)
            f[x] = Rat::from_string(vals[x].get<std::string>());
        return f;
    }
    auto colon = builtin.find(':');
    std::string kind = builtin.substr(0, colon);
    auto kv = colon == std::string::npos ? std::map<std::string, long long>{}
                                         : parse_kv(builtin.substr(colon + 1));
    long long N = G.modulus();
    if (kind == "bracket" && kv.count("alpha")) {
        long long alpha = kv.at("alpha"), beta = kv.at("beta");
        for (uint64_t x = 0; x < G.order(); x++)
            f[x] = Rat(((alpha * (long long)x) % N + N) % N, N) *
                   Rat(((beta * (long long)x) % N + N) % N, N);
    } else if (kind == "fraclin" || kind == "bracket") {
        long long beta = kv.at("beta");
        for (uint64_t x = 0; x < G.order(); x++)
            f[x] = Rat(((beta * (long long)x) % N + N) % N, N);
    } else {
        throw ArgumentError("unknown real builtin " + kind);
    }
    return f;
}

void emit(const ordered_json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        out << report.dump(2) << "\n";
    }
}

std::string hex_bits(const Bitset& b) {
    std::string s;
    for (uint64_t i = 0; i < b.size(); i += 4) {
        int nib = 0;
        for (int j = 0; j < 4 && i + j < b.size(); j++)
            if (b.get(i + j)) nib |= 1 << j;
        s += "0123456789abcdef"[nib];
    }
    return s;
}

Bitset bits_from_hex(const std::string& s, uint64_t n) {
    Bitset b(n);
    for (uint64_t i = 0; i < n; i++) {
        char c = s[i / 4];
        int nib = c <= '9' ? c - '0' : c - 'a' + 10;
        if (nib & (1 << (i % 4))) b.set(i);
    }
    return b;
}

ordered_json system_json(const CubeSystem& S) {
    ordered_json j;
    j["s"] = S.s;
    j["delta"] = S.delta.to_string();
    j["group"] = {{"N", S.G->N()}, {"kappa", S.G->kappa()}, {"rank", S.G->rank()}};
    j["S"] = ordered_json::array();
    for (auto& level : S.levels) j["S"].push_back(hex_bits(level));
    return j;
}

CubeSystem system_from_json(const ordered_json& j, const FiniteGroupSpec& G) {
    CubeSystem S(G, j.at("s").get<int>());
    S.delta = Rat::from_string(j.at("delta").get<std::string>());
    for (int k = 0; k <= S.s + 1; k++)
        S.levels[k] = bits_from_hex(j.at("S")[k].get<std::string>(), S.indexer(k).size());
    return S;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact toolkit for box norms, approximate polynomials, cube systems, "
                 "cocycles, and filtered nilpotent groups"};
    app.require_subcommand(1);

    std::string group_file, fn_file, builtin = "quadratic", out_path, format = "json";
    long long N = 5, kappa = 1, rank = 1;
    bool composite = false;
    uint64_t seed = 1;
    int k_arg = 2, s_arg = 1;
    app.add_option("--threads", [](const std::vector<std::string>& v) {
        setenv("HOFA_THREADS", v[0].c_str(), 1);
        return true;
    }, "worker thread count (also via HOFA_THREADS)");

    auto add_common = [&](CLI::App* sub, bool with_fn = true) {
        sub->add_option("--group", group_file, "group descriptor JSON file");
        sub->add_option("--N", N, "modulus base");
        sub->add_option("--kappa", kappa, "modulus exponent");
        sub->add_option("--rank", rank, "group rank");
        sub->add_flag("--composite", composite, "allow composite modulus");
        if (with_fn) {
            sub->add_option("--fn", fn_file, "function table JSON file");
            sub->add_option("--builtin", builtin,
                            "builtin function (quadratic | character:a=2 | random:seed=7 | "
                            "bracket:alpha=1,beta=2 | fraclin:beta=1)");
        }
        sub->add_option("--out", out_path, "output file (stdout when absent)");
        sub->add_option("--format", format, "json or csv");
    };

    // box norm of a complex function
    auto* gowers_cmd = app.add_subcommand("gowers", "box norm of a function over the cube averages");
    add_common(gowers_cmd);
    gowers_cmd->add_option("--k", k_arg, "norm order");

    auto* sigma_cmd =
        app.add_subcommand("sigma", "spectral table of the box average in its last argument");
    add_common(sigma_cmd);
    sigma_cmd->add_option("--s", s_arg, "box order");

    auto* appoly_cmd = app.add_subcommand(
        "appoly", "approximate-polynomial statistics, extension, and hierarchy building");
    add_common(appoly_cmd);
    std::string appoly_op = "param";
    std::string delta_str = "1/10", eps_str = "1/4";
    appoly_cmd->add_option("op", appoly_op, "param | extend | hierarchy")->required();
    appoly_cmd->add_option("--s", s_arg, "degree");
    appoly_cmd->add_option("--seed", seed, "random seed (mandatory for randomized ops)");
    appoly_cmd->add_option("--delta", delta_str, "stated vanishing fraction (rational)");
    appoly_cmd->add_option("--eps", eps_str, "target exceptional fraction (rational)");

    auto* cubesys_cmd =
        app.add_subcommand("cubesys", "verify, prune, densify, or split a graded cube system");
    std::string cubesys_op = "verify", in_file;
    cubesys_cmd->add_option("op", cubesys_op, "verify | prune | densify | split")->required();
    cubesys_cmd->add_option("--in", in_file, "system JSON file")->required();
    cubesys_cmd->add_option("--eps", eps_str, "parameter for prune/split (rational)");
    cubesys_cmd->add_option("--out", out_path, "output file");
    cubesys_cmd->add_option("--format", format, "json");

    auto* cocycle_cmd = app.add_subcommand("cocycle", "integrate cube data against the glueing laws");
    std::string rho_file, tol_str = "1/1000000000000";
    add_common(cocycle_cmd, false);
    cocycle_cmd->add_option("--rho", rho_file, "sparse cube-data JSON")->required();
    cocycle_cmd->add_option("--k", k_arg, "cube dimension");
    cocycle_cmd->add_option("--tol", tol_str, "iteration tolerance (rational)");

    auto* nil_cmd = app.add_subcommand(
        "nil", "filtered-group arithmetic, cube membership, and hierarchy extraction");
    std::string nil_op = "eval", nil_group = "heisenberg", nil_fn = "bracket:alpha=1,beta=2,N=13";
    nil_cmd->add_option("op", nil_op, "eval | hk | hierarchy")->required();
    nil_cmd->add_option("--group", nil_group, "heisenberg | abelian");
    nil_cmd->add_option("--fn", nil_fn, "bracket:alpha=A,beta=B,N=P");
    nil_cmd->add_option("--seed", seed, "seed for sampled checks");
    nil_cmd->add_option("--out", out_path, "output file");

    auto* cs_cmd = app.add_subcommand("cs", "linear-form solution counts against derivative counts");
    std::string forms_file, fns_file;
    cs_cmd->add_option("op", cubesys_op, "gvn")->required();
    cs_cmd->add_option("--forms", forms_file, "linear form system JSON")->required();
    cs_cmd->add_option("--fns", fns_file, "value tables JSON")->required();
    cs_cmd->add_option("--group", group_file, "group descriptor JSON");
    cs_cmd->add_option("--N", N, "modulus base");
    cs_cmd->add_option("--out", out_path, "output file");

    auto* accept_cmd = app.add_subcommand("accept", "run the acceptance criteria");
    std::string suite = "core";
    std::vector<int> only;
    accept_cmd->add_option("--suite", suite, "criteria suite (core)");
    accept_cmd->add_option("--only", only, "run selected criterion numbers");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gowers_cmd->parsed()) {
            FiniteGroupSpec G = load_group(group_file, N, kappa, rank, composite);
            CplxFn f = complex_fn(G, builtin, fn_file);
            double norm = gowers_norm(f, k_arg);
            ordered_json rep;
            rep["module"] = "gowers";
            rep["operation"] = "gowers_norm";
            rep["k"] = k_arg;
            rep["norm"] = fmt12(norm);
            rep["pass"] = true;
            emit(rep, out_path);
        } else if (sigma_cmd->parsed()) {
            FiniteGroupSpec G = load_group(group_file, N, kappa, rank, composite);
            CplxFn f = complex_fn(G, builtin, fn_file);
            SpectralTable sig = sigma_box(f, s_arg);
            if (format == "csv") {
                std::ostringstream os;
                for (uint64_t row = 0; row < sig.rows(); row++) {
                    // h-tuple in base |H|
                    for (uint64_t chi = 0; chi < G.order(); chi++) {
                        uint64_t r = row;
                        std::vector<uint64_t> h(s_arg > 1 ? s_arg - 1 : 0);
                        for (int i = (int)h.size() - 1; i >= 0; i--) {
                            h[i] = r % G.order();
                            r /= G.order();
                        }
                        for (auto hv : h) os << hv << ',';
                        os << chi << ',' << fmt12(sig.at(row, chi)) << '\n';
                    }
                }
                if (out_path.empty())
                    std::cout << os.str();
                else
                    std::ofstream(out_path) << os.str();
            } else {
                ordered_json rep;
                rep["module"] = "gowers";
                rep["operation"] = "sigma_box";
                rep["s"] = s_arg;
                auto facts = sigma_facts(f, s_arg);
                rep["min_entry"] = fmt12(facts.min_entry);
                rep["max_slice_sum"] = fmt12(facts.max_slice_sum);
                rep["identity_lhs"] = fmt12(facts.identity_lhs);
                rep["identity_rhs"] = fmt12(facts.identity_rhs);
                rep["pass"] = std::abs(facts.identity_lhs - facts.identity_rhs) <= 1e-9;
                emit(rep, out_path);
                if (!rep["pass"].get<bool>()) return 1;
            }
        } else if (appoly_cmd->parsed()) {
            FiniteGroupSpec G = load_group(group_file, N, kappa, rank, composite);
            RealFn f = real_fn(G, builtin, fn_file);
            ordered_json rep;
            rep["module"] = "approx_poly";
            rep["operation"] = appoly_op;
            rep["seed"] = seed;
            if (appoly_op == "param") {
                auto r = ap_parameter(RatOps{}, f, s_arg);
                rep["s"] = s_arg;
                rep["vanishing"] = r.vanishing.to_string();
                rep["well_defined"] = r.well_defined.to_string();
                rep["eps"] = r.eps.to_string();
                rep["pass"] = true;
            } else if (appoly_op == "extend") {
                // vanishing-set system, pruned and split, then one round of
                // the randomized global extension on the largest component
                RatOps ops;
                CubeSystem base(G, s_arg);
                for (int k2 = 0; k2 <= s_arg; k2++)
                    base.levels[k2] = Bitset(base.indexer(k2).size(), true);
                auto idx_top = base.indexer(s_arg + 1);
                for (uint64_t i = 0; i < idx_top.size(); i++)
                    if (ops.eq(derivative(ops, f.v, idx_top.cube(i)), ops.zero()))
                        base.levels[s_arg + 1].set(i);
                CubeSystem pruned = prune(base, base.density(s_arg + 1));
                auto sp = split(pruned, Rat::pow(pruned.delta, 4) / Rat(4));
                size_t best = 0;
                for (size_t j2 = 1; j2 < sp.components.size(); j2++)
                    if (sp.components[j2].size() > sp.components[best].size()) best = j2;
                RealFn fr = f;
                fr.defined.assign(G.order(), 0);
                for (uint64_t x : sp.components[best]) fr.defined[x] = 1;
                auto ext = extend_global(fr, sp.component_systems[best], parse_rat(eps_str), seed);
                rep["mu_X"] = ext.mu_X.to_string();
                rep["mu_S"] = ext.mu_S.to_string();
                rep["K"] = ext.K;
                rep["M"] = ext.M;
                rep["L"] = ext.L;
                rep["attempts"] = ext.attempts;
                rep["pass"] = true;
            } else if (appoly_op == "hierarchy") {
                auto built =
                    build_hierarchy(f, s_arg, parse_rat(delta_str), parse_rat(eps_str), seed);
                rep["mu_Y"] = built.mu_Y.to_string();
                rep["D"] = built.D;
                rep["M"] = built.M.to_string();
                ordered_json dims = ordered_json::array();
                for (int d : built.hierarchy.dims) dims.push_back(d);
                rep["dims"] = dims;
                ordered_json fns_json = ordered_json::array();
                for (auto& level : built.hierarchy.fns) {
                    ordered_json lv = ordered_json::array();
                    for (auto& fn2 : level) {
                        ordered_json tbl = ordered_json::array();
                        for (auto& v : fn2.v) tbl.push_back(v.to_string());
                        lv.push_back(tbl);
                    }
                    fns_json.push_back(lv);
                }
                rep["functions"] = fns_json;
                ordered_json bdata = ordered_json::object();
                {
                    std::vector<uint64_t> keys;
                    keys.reserve(built.b.data.size());
                    for (auto& [ci, rows] : built.b.data) keys.push_back(ci);
                    std::sort(keys.begin(), keys.end());
                    for (uint64_t ci : keys) {
                        ordered_json rr = ordered_json::array();
                        for (auto& row : built.b.data.at(ci)) rr.push_back(row);
                        bdata[std::to_string(ci)] = rr;
                    }
                }
                rep["b"] = bdata;
                rep["pass"] = true;
            } else {
                throw ArgumentError("unknown appoly op " + appoly_op);
            }
            emit(rep, out_path);
        } else if (cubesys_cmd->parsed()) {
            std::ifstream in(in_file);
            if (!in) throw ArgumentError("cannot open " + in_file);
            auto j = ordered_json::parse(in);
            FiniteGroupSpec G(j.at("group").at("N").get<long long>(),
                              j.at("group").value("kappa", 1LL), j.at("group").value("rank", 1LL),
                              j.at("group").value("composite", false));
            CubeSystem S = system_from_json(j, G);
            ordered_json rep;
            rep["module"] = "cube_systems";
            rep["operation"] = cubesys_op;
            if (cubesys_op == "verify") {
                auto v = verify_system(S);
                rep["holds"] = v.holds;
                rep["worst_popularity"] = v.worst_popularity.to_string();
                rep["violations"] = v.violations.size();
                rep["pass"] = v.holds;
                emit(rep, out_path);
                if (!v.holds) return 1;
            } else if (cubesys_op == "prune") {
                CubeSystem out = prune(S, parse_rat(eps_str));
                rep["delta"] = out.delta.to_string();
                rep["system"] = system_json(out);
                rep["pass"] = verify_system(out).holds;
                emit(rep, out_path);
            } else if (cubesys_op == "densify") {
                auto res = densify(S);
                rep["delta_chain"] = res.delta.to_string();
                rep["certified"] = res.certified;
                rep["parameter"] = res.system.delta.to_string();
                rep["system"] = system_json(res.system);
                rep["pass"] = verify_system(res.system).holds;
                emit(rep, out_path);
            } else if (cubesys_op == "split") {
                auto res = split(S, parse_rat(eps_str));
                rep["components"] = res.components.size();
                rep["delta_prime"] = res.delta_prime.to_string();
                rep["system"] = system_json(res.system);
                rep["pass"] = true;
                emit(rep, out_path);
            } else {
                throw ArgumentError("unknown cubesys op " + cubesys_op);
            }
        } else if (cocycle_cmd->parsed()) {
            FiniteGroupSpec G = load_group(group_file, N, kappa, rank, composite);
            std::ifstream in(rho_file);
            if (!in) throw ArgumentError("cannot open " + rho_file);
            auto j = ordered_json::parse(in);
            int width = j.value("width", 1);
            CocycleData rho(G, k_arg, width);
            for (auto& [key, val] : j.at("entries").items()) {
                uint64_t ci = std::stoull(key);
                rho.domain.set(ci);
                for (int d = 0; d < width; d++)
                    rho.values[ci][d] = Rat::from_string(val[d].get<std::string>());
            }
            auto res = integrate_lossy(rho, parse_rat(tol_str));
            ordered_json rep;
            rep["module"] = "cocycles";
            rep["operation"] = "integrate";
            rep["iterations"] = res.iterations;
            rep["contraction"] = res.contraction.to_string();
            rep["certified_cubes"] = res.certified.count();
            ordered_json lam = ordered_json::array();
            for (auto& row : res.lambda) {
                ordered_json r2 = ordered_json::array();
                for (auto& v : row) r2.push_back(v.to_string());
                lam.push_back(r2);
            }
            rep["lambda"] = lam;
            rep["pass"] = true;
            emit(rep, out_path);
        } else if (nil_cmd->parsed()) {
            auto kv = parse_kv(nil_fn.substr(nil_fn.find(':') + 1));
            long long P = kv.count("N") ? kv.at("N") : 13;
            FiniteGroupSpec H(P, 1, 1);
            Presentation pres =
                nil_group == "heisenberg" ? builtin_heisenberg() : bracket_presentation();
            Presentation storage = bracket_presentation();
            NilPoly np = builtin_bracket(H, kv.count("alpha") ? kv.at("alpha") : 1,
                                         kv.count("beta") ? kv.at("beta") : 2, storage);
            ordered_json rep;
            rep["module"] = "nil";
            rep["operation"] = nil_op;
            if (nil_op == "eval") {
                ordered_json vals = ordered_json::array();
                for (uint64_t x = 0; x < H.order(); x++) vals.push_back(np.eval(x).to_string());
                rep["values"] = vals;
                rep["pass"] = true;
            } else if (nil_op == "hk") {
                Rng rng(seed);
                Presentation heis = builtin_heisenberg();
                heis.validate(rng, 200);
                rep["presentation"] = "heisenberg";
                rep["validated_samples"] = 200;
                rep["commutator_central"] =
                    (heis.commutator(heis.generator(1, 0), heis.generator(1, 1)) ==
                     Elt{Rat(0), Rat(0), Rat(1)});
                rep["pass"] = rep["commutator_central"].get<bool>();
            } else if (nil_op == "hierarchy") {
                auto res = nil_to_hierarchy(np);
                ordered_json dims = ordered_json::array();
                for (int d : res.hierarchy.dims) dims.push_back(d);
                rep["dims"] = dims;
                rep["max_coeff"] = res.max_coeff;
                rep["pass"] = true;
            } else {
                throw ArgumentError("unknown nil op " + nil_op);
            }
            emit(rep, out_path);
            if (!rep["pass"].get<bool>()) return 1;
        } else if (cs_cmd->parsed()) {
            FiniteGroupSpec G = load_group(group_file, N, 1, 1, composite);
            std::ifstream fin(forms_file);
            if (!fin) throw ArgumentError("cannot open " + forms_file);
            auto jf = ordered_json::parse(fin);
            LinearFormSystem sys;
            sys.d = jf.at("d").get<int>();
            for (auto& f2 : jf.at("forms")) sys.forms.push_back(f2.get<std::vector<long long>>());
            sys.j = jf.at("j").get<int>();
            for (auto& s2 : jf.at("sigma_sets")) sys.sigma_sets.push_back(s2.get<std::vector<int>>());
            for (auto& s2 : jf.at("sigma")) sys.sigma.push_back(s2.get<std::vector<long long>>());
            sys.Q = jf.at("Q").get<long long>();
            std::ifstream vin(fns_file);
            if (!vin) throw ArgumentError("cannot open " + fns_file);
            auto jv = ordered_json::parse(vin);
            std::vector<std::vector<Rat>> fns;
            for (auto& table : jv) {
                std::vector<Rat> t2;
                for (auto& v : table) t2.push_back(Rat::from_string(v.get<std::string>()));
                fns.push_back(std::move(t2));
            }
            auto res = gvn_counts(sys, fns, G);
            ordered_json rep;
            rep["module"] = "cs_toolkit";
            rep["operation"] = "gvn";
            rep["solutions"] = res.solutions.to_string();
            rep["domain"] = res.domain.to_string();
            rep["delta"] = res.delta.to_string();
            rep["vanishing_fraction"] = res.vanishing_fraction.to_string();
            rep["bound"] = res.bound.to_string();
            rep["pass"] = res.inequality_holds;
            emit(rep, out_path);
            if (!res.inequality_holds) return 1;
        } else if (accept_cmd->parsed()) {
            auto results = hofa::acceptance::run(only);
            bool all = true;
            for (const auto& r : results) {
                std::printf("criterion %2d [%s] %-38s (%6.2fs)%s%s\n", r.id,
                            r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                            r.detail.empty() ? "" : " -- ", r.detail.c_str());
                if (!r.pass) all = false;
            }
            return all ? 0 : 1;
        }
    } catch (const ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        ordered_json rep;
        rep["error"] = e.what();
        rep["pass"] = false;
        std::cout << rep.dump(2) << "\n";
        return 1;
    }
    return 0;
}
