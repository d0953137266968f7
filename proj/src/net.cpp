#include "conet/net.hpp"

#include <fstream>

namespace conet {

namespace {

const RationalExpr kZero = RationalExpr::zero();

void check_direction(const NetState& s, int i, const char* who) {
    if (i < 0 || i >= s.N) throw DomainError(std::string(who) + ": direction index out of range");
}

} // namespace

const RationalExpr& NetState::beta_at(int i, int j) const {
    if (i == j) throw DomainError("beta has no diagonal entries");
    const auto it = beta.find({i, j});
    return it == beta.end() ? kZero : it->second;
}

void NetState::set_beta(int i, int j, RationalExpr value) {
    if (i == j) throw DomainError("beta has no diagonal entries");
    beta[{i, j}] = std::move(value);
}

int NetState::seed_index(const std::string& label) const {
    for (std::size_t a = 0; a < seeds.size(); ++a)
        if (seeds[a].label == label) return static_cast<int>(a);
    return -1;
}

const SeedRecord& NetState::seed(const std::string& label) const {
    const int a = seed_index(label);
    if (a < 0) throw DomainError("no seed labelled '" + label + "'");
    return seeds[static_cast<std::size_t>(a)];
}

NetState make_background(const BackgroundSpec& spec) {
    const int N = spec.N;
    const int P = spec.P;
    if (N < 2) throw DomainError("background needs at least two directions");
    if (P < N) throw DomainError("ambient dimension must be at least the number of directions");
    if (static_cast<int>(spec.tangents.size()) != N || static_cast<int>(spec.lame.size()) != N)
        throw DomainError("background: need one tangent vector and one Lame coefficient per direction");

    auto admit = [&](const RationalExpr& e, int dir, const std::string& what) -> const ExpPoly& {
        if (!e.is_polynomial())
            throw DomainError("background: " + what + " must be quotient-free");
        if (!e.poly().depends_only_on(dir))
            throw DomainError("background: " + what + " depends on a foreign variable");
        if (e.min_dims() > N)
            throw DomainError("background: " + what + " mentions a direction beyond u" + std::to_string(N));
        return e.poly();
    };

    NetState s;
    s.N = N;
    s.P = P;
    s.X = spec.tangents;
    s.H = spec.lame;
    for (int i = 0; i < N; ++i) {
        if (static_cast<int>(spec.tangents[i].size()) != P)
            throw DomainError("background: tangent vector " + std::to_string(i + 1) + " has wrong length");
        for (int l = 0; l < P; ++l)
            admit(spec.tangents[i][l], i, "tangent X_" + std::to_string(i + 1));
        admit(spec.lame[i], i, "Lame coefficient H_" + std::to_string(i + 1));
    }

    // x^l = sum_k  int X_k^l H_k du_k ; each addend depends on u_k only,
    // so d_k x = X_k H_k holds term by term.
    s.x.assign(P, RationalExpr::zero());
    for (int l = 0; l < P; ++l) {
        ExpPoly acc;
        for (int k = 0; k < N; ++k)
            acc = acc + (s.X[k][l].poly() * s.H[k].poly()).antiderivative(k);
        s.x[l] = RationalExpr(std::move(acc));
    }

    for (const auto& [label, xi] : spec.seeds) {
        if (static_cast<int>(xi.size()) != N)
            throw DomainError("background: seed '" + label + "' needs one component per direction");
        if (s.seed_index(label) >= 0) throw DomainError("background: duplicate seed label '" + label + "'");
        SeedRecord rec;
        rec.label = label;
        rec.xi = xi;
        ExpPoly omega;
        for (int k = 0; k < N; ++k) {
            const ExpPoly& comp = admit(xi[k], k, "seed '" + label + "' component " + std::to_string(k + 1));
            omega = omega + (comp * s.H[k].poly()).antiderivative(k);
        }
        rec.omega = RationalExpr(std::move(omega));
        s.seeds.push_back(std::move(rec));
    }
    return s;
}

RationalExpr residual_darboux(const NetState& s, int i, int j, int k) {
    check_direction(s, i, "residual_darboux");
    check_direction(s, j, "residual_darboux");
    check_direction(s, k, "residual_darboux");
    if (i == j || j == k || i == k) throw DomainError("residual_darboux: indices must be pairwise distinct");
    return s.beta_at(i, j).derivative(k) - s.beta_at(i, k) * s.beta_at(k, j);
}

namespace {

// d_i v_j - beta_ji v_i : one scalar component of the linear system shared
// by tangent vectors and seeds.
RationalExpr wave_residual(const NetState& s, int i, int j, const RationalExpr& vj, const RationalExpr& vi) {
    return vj.derivative(i) - s.beta_at(j, i) * vi;
}

} // namespace

std::vector<RationalExpr> residual_tangent(const NetState& s, int i, int j) {
    check_direction(s, i, "residual_tangent");
    check_direction(s, j, "residual_tangent");
    if (i == j) throw DomainError("residual_tangent: indices must differ");
    std::vector<RationalExpr> r;
    r.reserve(s.P);
    for (int l = 0; l < s.P; ++l) r.push_back(wave_residual(s, i, j, s.X[j][l], s.X[i][l]));
    return r;
}

RationalExpr residual_lame(const NetState& s, int i, int j) {
    check_direction(s, i, "residual_lame");
    check_direction(s, j, "residual_lame");
    if (i == j) throw DomainError("residual_lame: indices must differ");
    return s.H[j].derivative(i) - s.beta_at(i, j) * s.H[i];
}

std::vector<RationalExpr> residual_point(const NetState& s, int i) {
    check_direction(s, i, "residual_point");
    std::vector<RationalExpr> r;
    r.reserve(s.P);
    for (int l = 0; l < s.P; ++l) r.push_back(s.x[l].derivative(i) - s.X[i][l] * s.H[i]);
    return r;
}

RationalExpr residual_seed(const NetState& s, int i, int j, int seed_idx) {
    check_direction(s, i, "residual_seed");
    check_direction(s, j, "residual_seed");
    if (i == j) throw DomainError("residual_seed: indices must differ");
    if (seed_idx < 0 || seed_idx >= static_cast<int>(s.seeds.size()))
        throw DomainError("residual_seed: no such seed");
    const SeedRecord& a = s.seeds[static_cast<std::size_t>(seed_idx)];
    return wave_residual(s, i, j, a.xi[j], a.xi[i]);
}

RationalExpr residual_omega(const NetState& s, int k, int seed_idx) {
    check_direction(s, k, "residual_omega");
    if (seed_idx < 0 || seed_idx >= static_cast<int>(s.seeds.size()))
        throw DomainError("residual_omega: no such seed");
    const SeedRecord& a = s.seeds[static_cast<std::size_t>(seed_idx)];
    return a.omega.derivative(k) - a.xi[k] * s.H[k];
}

RationalExpr residual_laplace(const NetState& s, int i, int j, int ell) {
    check_direction(s, i, "residual_laplace");
    check_direction(s, j, "residual_laplace");
    if (i == j) throw DomainError("residual_laplace: indices must differ");
    if (ell < 0 || ell >= s.P) throw DomainError("residual_laplace: ambient index out of range");
    const RationalExpr di = s.x[ell].derivative(i);
    const RationalExpr dj = s.x[ell].derivative(j);
    return s.H[i] * s.H[j] * di.derivative(j) - s.H[i].derivative(j) * s.H[j] * di -
           s.H[j].derivative(i) * s.H[i] * dj;
}

bool validate_state(const NetState& s) {
    for (int i = 0; i < s.N; ++i) {
        for (const RationalExpr& r : residual_point(s, i))
            if (!r.is_zero()) return false;
        for (int j = 0; j < s.N; ++j) {
            if (i == j) continue;
            for (const RationalExpr& r : residual_tangent(s, i, j))
                if (!r.is_zero()) return false;
            if (!residual_lame(s, i, j).is_zero()) return false;
            for (int k = 0; k < s.N; ++k) {
                if (k == i || k == j) continue;
                if (!residual_darboux(s, i, j, k).is_zero()) return false;
            }
            for (int a = 0; a < static_cast<int>(s.seeds.size()); ++a)
                if (!residual_seed(s, i, j, a).is_zero()) return false;
        }
        for (int a = 0; a < static_cast<int>(s.seeds.size()); ++a)
            if (!residual_omega(s, i, a).is_zero()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// documents

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

RationalExpr parse_field(const json& v, const std::string& where) {
    if (!v.is_string()) throw ParseError(where + ": expected an expression string");
    try {
        return parse_expr(v.get<std::string>());
    } catch (const ClassViolationError&) {
        throw;
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
    }
}

std::vector<RationalExpr> parse_array(const json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError(where + ": expected an array of expression strings");
    std::vector<RationalExpr> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(parse_field(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

} // namespace

NetConfig load_config(const json& doc) {
    NetConfig cfg;
    if (!doc.is_object()) throw ParseError("config: expected a JSON object");
    for (const char* key : {"N", "P", "tangents", "lame", "seeds"})
        if (!doc.contains(key)) throw ParseError(std::string("config: missing key '") + key + "'");
    cfg.background.N = doc["N"].get<int>();
    cfg.background.P = doc["P"].get<int>();
    const json& tans = doc["tangents"];
    if (!tans.is_array()) throw ParseError("config: 'tangents' must be an array of arrays");
    for (std::size_t i = 0; i < tans.size(); ++i)
        cfg.background.tangents.push_back(parse_array(tans[i], "tangents[" + std::to_string(i) + "]"));
    cfg.background.lame = parse_array(doc["lame"], "lame");
    const json& seeds = doc["seeds"];
    if (!seeds.is_array()) throw ParseError("config: 'seeds' must be an array");
    for (const json& s : seeds) {
        if (!s.is_object() || !s.contains("label") || !s.contains("components"))
            throw ParseError("config: each seed needs 'label' and 'components'");
        cfg.background.seeds.emplace_back(s["label"].get<std::string>(),
                                          parse_array(s["components"], "seed '" + s["label"].get<std::string>() + "'"));
    }
    if (doc.contains("partition")) {
        std::vector<int> m = doc["partition"].get<std::vector<int>>();
        cfg.partition = std::move(m);
    }
    if (doc.contains("steps")) {
        for (const json& st : doc["steps"]) {
            if (!st.is_object() || !st.contains("direction") || !st.contains("seed"))
                throw ParseError("config: each step needs 'direction' and 'seed'");
            Step step;
            step.direction = st["direction"].get<int>() - 1;
            step.seed = st["seed"].get<std::string>();
            if (step.direction < 0 || step.direction >= cfg.background.N)
                throw ParseError("config: step direction out of range");
            cfg.steps.push_back(std::move(step));
        }
    }
    return cfg;
}

NetConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return load_config(doc);
}

ordered_json dump_state(const NetState& s) {
    ordered_json doc;
    doc["N"] = s.N;
    doc["P"] = s.P;
    ordered_json betas = ordered_json::array();
    for (const auto& [ij, expr] : s.beta) {
        ordered_json b;
        b["i"] = ij.first + 1;
        b["j"] = ij.second + 1;
        b["expr"] = expr.str();
        betas.push_back(std::move(b));
    }
    doc["beta"] = std::move(betas);
    ordered_json tans = ordered_json::array();
    for (int i = 0; i < s.N; ++i) {
        ordered_json row = ordered_json::array();
        for (int l = 0; l < s.P; ++l) row.push_back(s.X[i][l].str());
        tans.push_back(std::move(row));
    }
    doc["tangents"] = std::move(tans);
    ordered_json lame = ordered_json::array();
    for (int i = 0; i < s.N; ++i) lame.push_back(s.H[i].str());
    doc["lame"] = std::move(lame);
    ordered_json pt = ordered_json::array();
    for (int l = 0; l < s.P; ++l) pt.push_back(s.x[l].str());
    doc["x"] = std::move(pt);
    ordered_json seeds = ordered_json::array();
    for (const SeedRecord& rec : s.seeds) {
        ordered_json e;
        e["label"] = rec.label;
        ordered_json comps = ordered_json::array();
        for (const RationalExpr& c : rec.xi) comps.push_back(c.str());
        e["components"] = std::move(comps);
        e["omega"] = rec.omega.str();
        seeds.push_back(std::move(e));
    }
    doc["seeds"] = std::move(seeds);
    return doc;
}

NetState load_state(const json& doc) {
    NetState s;
    if (!doc.is_object()) throw ParseError("state: expected a JSON object");
    for (const char* key : {"N", "P", "beta", "tangents", "lame", "x", "seeds"})
        if (!doc.contains(key)) throw ParseError(std::string("state: missing key '") + key + "'");
    s.N = doc["N"].get<int>();
    s.P = doc["P"].get<int>();
    for (const json& b : doc["beta"]) {
        const int i = b["i"].get<int>() - 1;
        const int j = b["j"].get<int>() - 1;
        if (i < 0 || j < 0 || i >= s.N || j >= s.N || i == j)
            throw ParseError("state: bad beta indices");
        s.set_beta(i, j, parse_field(b["expr"], "beta"));
    }
    const json& tans = doc["tangents"];
    for (std::size_t i = 0; i < tans.size(); ++i)
        s.X.push_back(parse_array(tans[i], "tangents[" + std::to_string(i) + "]"));
    s.H = parse_array(doc["lame"], "lame");
    s.x = parse_array(doc["x"], "x");
    if (static_cast<int>(s.X.size()) != s.N || static_cast<int>(s.H.size()) != s.N ||
        static_cast<int>(s.x.size()) != s.P)
        throw ParseError("state: dimension mismatch");
    for (const json& e : doc["seeds"]) {
        SeedRecord rec;
        rec.label = e["label"].get<std::string>();
        rec.xi = parse_array(e["components"], "seed '" + rec.label + "'");
        rec.omega = parse_field(e["omega"], "seed '" + rec.label + "' omega");
        if (static_cast<int>(rec.xi.size()) != s.N)
            throw ParseError("state: seed '" + rec.label + "' has wrong component count");
        s.seeds.push_back(std::move(rec));
    }
    return s;
}

} // namespace conet
