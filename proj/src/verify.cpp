#include "conet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

#include "conet/errors.hpp"

namespace conet {

namespace {

double as_dbl(double v) { return v; }
double as_dbl(const Rat& v) { return to_double(v); }

Point shifted(const Point& pt, int dir, double delta) {
    std::vector<double> c = pt.f;
    c[static_cast<std::size_t>(dir)] += delta;
    return Point::floats(std::move(c));
}

double det_at_f(const SymMatrix& m, const Point& pt) {
    return determinant(m, pt, EvalMode::floating()).as_double();
}

// Central difference with one Richardson level: (4 D(h/2) - D(h)) / 3.
double fd_det_derivative(const SymMatrix& m, int dir, const Point& pt, double h) {
    auto central = [&](double step) {
        return (det_at_f(m, shifted(pt, dir, step)) - det_at_f(m, shifted(pt, dir, -step))) / (2.0 * step);
    };
    double coarse = central(h);
    double fine = central(h / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

double sym_det_derivative(const SymMatrix& m, int dir, const Point& pt) {
    return det_symbolic(m).derivative(dir).eval_float(pt);
}

double det_derivative_routed(const SymMatrix& m, int dir, const Point& pt, DerivRoute route, int total) {
    if (route == DerivRoute::Auto) route = total <= 4 ? DerivRoute::Symbolic : DerivRoute::FiniteDifference;
    return route == DerivRoute::Symbolic ? sym_det_derivative(m, dir, pt)
                                         : fd_det_derivative(m, dir, pt, kBilinearStep);
}

void require_direction(const NetState& s, int i, const char* what) {
    if (i < 0 || i >= s.N) throw DomainError(std::string(what) + ": direction index out of range");
}

double scaled_triple(double t1, double t2, double t3) {
    double lhs = t1 - t2 + t3;
    double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
    if (scale == 0.0) return 0.0;
    return std::abs(lhs) / scale;
}

} // namespace

void Report::merge(const Report& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

bool Report::all_pass() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == "fail"; });
}

std::size_t Report::failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == "fail"; }));
}

std::size_t Report::singular() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == "singular"; }));
}

double Report::max_residual() const {
    double worst = 0.0;
    for (const auto& c : checks)
        if (c.status != "singular") worst = std::max(worst, std::abs(c.residual));
    return worst;
}

nlohmann::ordered_json Report::to_json() const {
    nlohmann::ordered_json doc;
    doc["all_pass"] = all_pass();
    doc["checks_run"] = checks.size();
    doc["failures"] = failures();
    doc["singular"] = singular();
    doc["max_residual"] = max_residual();
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["indices"] = c.indices;
        if (!c.point.empty()) e["point"] = c.point;
        e["mode"] = c.mode;
        e["residual"] = c.residual;
        e["status"] = c.status;
        list.push_back(std::move(e));
    }
    doc["checks"] = std::move(list);
    return doc;
}

// --- bilinear identities --------------------------------------------------------

double check_bilinear_X(const NetState& s0, const Partition& p, int i, int k, int ell, const Point& pt,
                        DerivRoute route) {
    require_direction(s0, i, "check_bilinear_X");
    require_direction(s0, k, "check_bilinear_X");
    if (i == k) throw DomainError("check_bilinear_X: i and k must differ");
    if (ell < 0 || ell >= s0.P) throw DomainError("check_bilinear_X: ambient index out of range");
    if (pt.dims() < s0.N) throw DomainError("check_bilinear_X: point has too few coordinates");

    SymMatrix W = multi_wronskian(s0.seeds, p);
    SymMatrix Xi = bordered_tangent(s0, p, i, ell);
    SymMatrix Xk = bordered_tangent(s0, p, k, ell);
    SymMatrix Wik = bordered_rotation(s0, p, i, k);

    double w = det_at_f(W, pt);
    double xi = det_at_f(Xi, pt);
    double xk = det_at_f(Xk, pt);
    double wik = det_at_f(Wik, pt);
    double dxi = det_derivative_routed(Xi, k, pt, route, p.total());
    double dw = det_derivative_routed(W, k, pt, route, p.total());

    return scaled_triple(w * dxi, xi * dw, xk * wik);
}

double check_bilinear_H(const NetState& s0, const Partition& p, int i, int k, const Point& pt, DerivRoute route) {
    require_direction(s0, i, "check_bilinear_H");
    require_direction(s0, k, "check_bilinear_H");
    if (i == k) throw DomainError("check_bilinear_H: i and k must differ");
    if (pt.dims() < s0.N) throw DomainError("check_bilinear_H: point has too few coordinates");

    SymMatrix W = multi_wronskian(s0.seeds, p);
    SymMatrix Hi = bordered_lame(s0, p, i);
    SymMatrix Hk = bordered_lame(s0, p, k);
    SymMatrix Wki = bordered_rotation(s0, p, k, i);

    double w = det_at_f(W, pt);
    double hi = det_at_f(Hi, pt);
    double hk = det_at_f(Hk, pt);
    double wki = det_at_f(Wki, pt);
    double dhi = det_derivative_routed(Hi, k, pt, route, p.total());
    double dw = det_derivative_routed(W, k, pt, route, p.total());

    return scaled_triple(w * dhi, hi * dw, wki * hk);
}

bool check_bilinear_X_symbolic(const NetState& s0, const Partition& p, int i, int k, int ell) {
    require_direction(s0, i, "check_bilinear_X_symbolic");
    require_direction(s0, k, "check_bilinear_X_symbolic");
    if (i == k) throw DomainError("check_bilinear_X_symbolic: i and k must differ");
    if (ell < 0 || ell >= s0.P) throw DomainError("check_bilinear_X_symbolic: ambient index out of range");

    RationalExpr w = det_symbolic(multi_wronskian(s0.seeds, p));
    RationalExpr xi = det_symbolic(bordered_tangent(s0, p, i, ell));
    RationalExpr xk = det_symbolic(bordered_tangent(s0, p, k, ell));
    RationalExpr wik = det_symbolic(bordered_rotation(s0, p, i, k));
    RationalExpr lhs = w * xi.derivative(k) - xi * w.derivative(k) + xk * wik;
    return lhs.is_zero();
}

bool check_bilinear_H_symbolic(const NetState& s0, const Partition& p, int i, int k) {
    require_direction(s0, i, "check_bilinear_H_symbolic");
    require_direction(s0, k, "check_bilinear_H_symbolic");
    if (i == k) throw DomainError("check_bilinear_H_symbolic: i and k must differ");

    RationalExpr w = det_symbolic(multi_wronskian(s0.seeds, p));
    RationalExpr hi = det_symbolic(bordered_lame(s0, p, i));
    RationalExpr hk = det_symbolic(bordered_lame(s0, p, k));
    RationalExpr wki = det_symbolic(bordered_rotation(s0, p, k, i));
    RationalExpr lhs = w * hi.derivative(k) - hi * w.derivative(k) + wki * hk;
    return lhs.is_zero();
}

// --- oracle equivalence ---------------------------------------------------------

namespace {

struct QuantityRef {
    std::string name;
    std::vector<int> indices; // 1-based
    RationalExpr composed;
    const int kind;   // 0 beta, 1 tangent, 2 lame, 3 point
    const int a, b;   // 0-based indices into the closed form
};

std::vector<QuantityRef> quantity_list(const NetState& composed) {
    std::vector<QuantityRef> out;
    for (int i = 0; i < composed.N; ++i)
        for (int j = 0; j < composed.N; ++j) {
            if (i == j) continue;
            out.push_back({"beta", {i + 1, j + 1}, composed.beta_at(i, j), 0, i, j});
        }
    for (int i = 0; i < composed.N; ++i)
        for (int l = 0; l < composed.P; ++l)
            out.push_back({"tangent", {i + 1, l + 1},
                           composed.X[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)], 1, i, l});
    for (int i = 0; i < composed.N; ++i)
        out.push_back({"lame", {i + 1}, composed.H[static_cast<std::size_t>(i)], 2, i, 0});
    for (int l = 0; l < composed.P; ++l)
        out.push_back({"point", {l + 1}, composed.x[static_cast<std::size_t>(l)], 3, l, 0});
    return out;
}

std::string spell_indices(const std::vector<int>& idx) {
    std::ostringstream os;
    os << "[";
    for (std::size_t t = 0; t < idx.size(); ++t) os << (t ? "," : "") << idx[t];
    os << "]";
    return os.str();
}

} // namespace

EquivalenceReport oracle_equivalence(const NetState& s0, const Partition& p, const std::vector<Step>& order,
                                     const std::vector<Point>& pts, const EquivalenceOptions& opt) {
    if (p.blocks() != s0.N) throw DomainError("oracle_equivalence: partition must have one part per direction");
    std::vector<int> applied(static_cast<std::size_t>(s0.N), 0);
    std::vector<std::string> used;
    for (const Step& st : order) {
        require_direction(s0, st.direction, "oracle_equivalence");
        if (s0.seed_index(st.seed) < 0)
            throw DomainError("oracle_equivalence: unknown seed label '" + st.seed + "'");
        if (std::find(used.begin(), used.end(), st.seed) != used.end())
            throw DomainError("oracle_equivalence: seed '" + st.seed + "' consumed twice");
        used.push_back(st.seed);
        applied[static_cast<std::size_t>(st.direction)] += 1;
    }
    for (int i = 0; i < s0.N; ++i)
        if (applied[static_cast<std::size_t>(i)] != p.m[static_cast<std::size_t>(i)])
            throw DomainError("oracle_equivalence: step counts do not match the partition");

    TransformedNet closed(s0, p);
    if (closed.identically_singular())
        throw SingularError("oracle_equivalence: the multi-Wronskian vanishes identically");

    NetState composed = s0;
    for (const Step& st : order) composed = levy_step(composed, st.direction, st.seed);

    EvalMode mode = opt.exact ? EvalMode::exact(opt.bases) : EvalMode::floating();
    const char* mode_name = opt.exact ? "exact" : "float";

    EquivalenceReport out;
    std::vector<QuantityRef> quantities = quantity_list(composed);
    std::size_t compared = 0;

    for (std::size_t pi = 0; pi < pts.size(); ++pi) {
        const Point& pt = pts[pi];
        if (opt.exact && !pt.has_exact)
            throw DomainError("oracle_equivalence: exact mode needs rational points");

        for (const QuantityRef& q : quantities) {
            CheckResult c;
            c.name = "equivalence/" + q.name;
            c.indices = q.indices;
            c.point = pt.f;
            c.mode = mode_name;

            EvalResult<Value> ratio;
            switch (q.kind) {
            case 0: ratio = closed.rotation_at(q.a, q.b, pt, mode); break;
            case 1: ratio = closed.tangent_at(q.a, q.b, pt, mode); break;
            case 2: ratio = closed.lame_at(q.a, pt, mode); break;
            default: ratio = closed.point_at(q.a, pt, mode); break;
            }

            bool composed_pole = false;
            Value direct;
            try {
                direct = evaluate(q.composed, pt, mode);
            } catch (const PoleError&) {
                composed_pole = true;
            }

            if (ratio.singular || composed_pole) {
                c.status = "singular";
                out.report.add(std::move(c));
                continue;
            }

            ++compared;
            bool ok;
            double dev;
            if (opt.exact) {
                Rat diff = direct.q - ratio.value.q;
                ok = diff == 0;
                dev = std::abs(to_double(diff));
            } else {
                double a = direct.f;
                double b = ratio.value.f;
                dev = std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
                ok = std::isfinite(dev) && dev <= opt.tolerance;
            }
            c.residual = dev;
            c.status = ok ? "pass" : "fail";
            if (!ok && out.first_divergence.empty()) {
                std::ostringstream os;
                os << q.name << spell_indices(q.indices) << " at point " << (pi + 1);
                out.first_divergence = os.str();
            }
            out.max_deviation = std::max(out.max_deviation, dev);
            out.report.add(std::move(c));
        }
    }

    if (compared == 0) {
        CheckResult c;
        c.name = "equivalence/coverage";
        c.mode = mode_name;
        c.residual = 0.0;
        c.status = "fail"; // every sample point was singular; nothing was verified
        out.report.add(std::move(c));
        if (out.first_divergence.empty()) out.first_divergence = "no nonsingular sample points";
    }

    out.pass = out.report.all_pass();
    return out;
}

// --- residual sweeps -------------------------------------------------------------

namespace {

void add_symbolic(Report& rep, const std::string& name, std::vector<int> idx, const RationalExpr& r) {
    CheckResult c;
    c.name = name;
    c.indices = std::move(idx);
    c.mode = "symbolic";
    bool ok = r.is_zero();
    c.residual = ok ? 0.0 : 1.0;
    c.status = ok ? "pass" : "fail";
    rep.add(std::move(c));
}

// lhs - rhs at a point, scaled by max(1, |lhs|, |rhs|); exact mode demands
// an exact zero.
void add_pair(Report& rep, const std::string& name, std::vector<int> idx, const Point& pt, const EvalMode& mode,
              const RationalExpr& lhs, const RationalExpr& rhs, double tol) {
    CheckResult c;
    c.name = name;
    c.indices = std::move(idx);
    c.point = pt.f;
    c.mode = mode.is_exact() ? "exact" : "float";
    try {
        Value a = evaluate(lhs, pt, mode);
        Value b = evaluate(rhs, pt, mode);
        bool ok;
        double dev;
        if (mode.is_exact()) {
            Rat diff = a.q - b.q;
            ok = diff == 0;
            dev = std::abs(to_double(diff));
        } else {
            dev = std::abs(a.f - b.f) / std::max({1.0, std::abs(a.f), std::abs(b.f)});
            ok = std::isfinite(dev) && dev <= tol;
        }
        c.residual = dev;
        c.status = ok ? "pass" : "fail";
    } catch (const PoleError&) {
        c.status = "singular";
    }
    rep.add(std::move(c));
}

template <typename F>
void for_each_family(const NetState& s, F&& visit) {
    // visit(name, indices(1-based), lhs, rhs)
    for (int i = 0; i < s.N; ++i)
        for (int j = 0; j < s.N; ++j) {
            if (i == j) continue;
            for (int k = 0; k < s.N; ++k) {
                if (k == i || k == j) continue;
                visit("darboux", std::vector<int>{i + 1, j + 1, k + 1}, s.beta_at(i, j).derivative(k),
                      s.beta_at(i, k) * s.beta_at(k, j));
            }
        }
    for (int i = 0; i < s.N; ++i)
        for (int j = 0; j < s.N; ++j) {
            if (i == j) continue;
            for (int l = 0; l < s.P; ++l)
                visit("tangent", std::vector<int>{i + 1, j + 1, l + 1},
                      s.X[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)].derivative(i),
                      s.beta_at(j, i) * s.X[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)]);
        }
    for (int i = 0; i < s.N; ++i)
        for (int j = 0; j < s.N; ++j) {
            if (i == j) continue;
            visit("lame", std::vector<int>{i + 1, j + 1}, s.H[static_cast<std::size_t>(j)].derivative(i),
                  s.beta_at(i, j) * s.H[static_cast<std::size_t>(i)]);
        }
    for (int i = 0; i < s.N; ++i)
        for (int l = 0; l < s.P; ++l)
            visit("point", std::vector<int>{i + 1, l + 1},
                  s.x[static_cast<std::size_t>(l)].derivative(i),
                  s.X[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] * s.H[static_cast<std::size_t>(i)]);
    for (int a = 0; a < static_cast<int>(s.seeds.size()); ++a) {
        const SeedRecord& sr = s.seeds[static_cast<std::size_t>(a)];
        for (int i = 0; i < s.N; ++i)
            for (int j = 0; j < s.N; ++j) {
                if (i == j) continue;
                visit("seed", std::vector<int>{i + 1, j + 1, a + 1},
                      sr.xi[static_cast<std::size_t>(j)].derivative(i),
                      s.beta_at(j, i) * sr.xi[static_cast<std::size_t>(i)]);
            }
        for (int k = 0; k < s.N; ++k)
            visit("omega", std::vector<int>{k + 1, a + 1}, sr.omega.derivative(k),
                  sr.xi[static_cast<std::size_t>(k)] * s.H[static_cast<std::size_t>(k)]);
    }
    for (int i = 0; i < s.N; ++i)
        for (int j = i + 1; j < s.N; ++j)
            for (int l = 0; l < s.P; ++l) {
                const RationalExpr& hi = s.H[static_cast<std::size_t>(i)];
                const RationalExpr& hj = s.H[static_cast<std::size_t>(j)];
                const RationalExpr& xl = s.x[static_cast<std::size_t>(l)];
                RationalExpr t1 = hi * hj * xl.derivative(i).derivative(j);
                RationalExpr t2 = hi.derivative(j) * hj * xl.derivative(i);
                RationalExpr t3 = hj.derivative(i) * hi * xl.derivative(j);
                visit("laplace", std::vector<int>{i + 1, j + 1, l + 1}, t1, t2 + t3);
            }
}

} // namespace

Report full_residual_suite(const NetState& s) {
    Report rep;
    for_each_family(s, [&](const char* name, std::vector<int> idx, const RationalExpr& lhs, const RationalExpr& rhs) {
        add_symbolic(rep, name, std::move(idx), lhs - rhs);
    });
    return rep;
}

Report full_residual_suite(const NetState& s, const std::vector<Point>& pts, const EvalMode& mode, double tolerance) {
    Report rep;
    for (const Point& pt : pts)
        for_each_family(s, [&](const char* name, std::vector<int> idx, const RationalExpr& lhs,
                               const RationalExpr& rhs) {
            add_pair(rep, name, std::move(idx), pt, mode, lhs, rhs, tolerance);
        });
    return rep;
}

namespace {

// Residuals of the defining equations with every quantity read off the
// determinant ratios; derivatives of determinants are taken row-wise, so
// S = Rat yields machine-independent exact zeros.
template <typename S, typename DetF, typename DDetF>
void closed_point_sweep(Report& rep, const TransformedNet& t, const Point& pt, const char* mode_name, double tol,
                        DetF det, DDetF ddet) {
    const int N = t.directions();
    const int P = t.ambient();

    auto note = [&](const std::string& name, std::vector<int> idx, const S& lhs, const S& rhs) {
        CheckResult c;
        c.name = name;
        c.indices = std::move(idx);
        c.point = pt.f;
        c.mode = mode_name;
        S diff = lhs - rhs;
        double dev = std::abs(as_dbl(diff));
        bool ok;
        if constexpr (std::is_same_v<S, Rat>) {
            ok = diff == 0;
        } else {
            dev = dev / std::max({1.0, std::abs(as_dbl(lhs)), std::abs(as_dbl(rhs))});
            ok = std::isfinite(dev) && dev <= tol;
        }
        c.residual = dev;
        c.status = ok ? "pass" : "fail";
        rep.add(std::move(c));
    };

    S w = det(t.wronskian());
    bool bad = w == S{};
    if constexpr (std::is_same_v<S, double>) bad = bad || !std::isfinite(w);
    if (bad) {
        CheckResult c;
        c.name = "wronskian";
        c.point = pt.f;
        c.mode = mode_name;
        c.status = "singular";
        rep.add(std::move(c));
        return;
    }
    S w2 = w * w;

    std::vector<S> wd(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) wd[static_cast<std::size_t>(k)] = ddet(t.wronskian(), k);

    std::vector<std::vector<S>> B(static_cast<std::size_t>(N), std::vector<S>(static_cast<std::size_t>(N)));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (i != j) B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = det(t.rotation_matrix(i, j));
    std::vector<std::vector<S>> Xm(static_cast<std::size_t>(N), std::vector<S>(static_cast<std::size_t>(P)));
    for (int i = 0; i < N; ++i)
        for (int l = 0; l < P; ++l) Xm[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] = det(t.tangent_matrix(i, l));
    std::vector<S> Hm(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) Hm[static_cast<std::size_t>(i)] = det(t.lame_matrix(i));
    std::vector<S> Pm(static_cast<std::size_t>(P));
    for (int l = 0; l < P; ++l) Pm[static_cast<std::size_t>(l)] = det(t.point_matrix(l));

    auto wdk = [&](int k) -> const S& { return wd[static_cast<std::size_t>(k)]; };

    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            for (int k = 0; k < N; ++k) {
                if (k == i || k == j) continue;
                S dB = ddet(t.rotation_matrix(i, j), k);
                S lhs = -(dB * w - B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * wdk(k)) / w2;
                S rhs = B[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                        B[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] / w2;
                note("darboux", {i + 1, j + 1, k + 1}, lhs, rhs);
            }
        }
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            for (int l = 0; l < P; ++l) {
                S dX = ddet(t.tangent_matrix(j, l), i);
                S lhs = (dX * w - Xm[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] * wdk(i)) / w2;
                S rhs = -(B[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                          Xm[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)]) /
                        w2;
                note("tangent", {i + 1, j + 1, l + 1}, lhs, rhs);
            }
        }
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            S dH = ddet(t.lame_matrix(j), i);
            S lhs = -(dH * w - Hm[static_cast<std::size_t>(j)] * wdk(i)) / w2;
            S rhs = B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * Hm[static_cast<std::size_t>(i)] / w2;
            note("lame", {i + 1, j + 1}, lhs, rhs);
        }
    for (int i = 0; i < N; ++i)
        for (int l = 0; l < P; ++l) {
            S dP = ddet(t.point_matrix(l), i);
            S lhs = (dP * w - Pm[static_cast<std::size_t>(l)] * wdk(i)) / w2;
            S rhs = -(Xm[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] * Hm[static_cast<std::size_t>(i)]) / w2;
            note("point", {i + 1, l + 1}, lhs, rhs);
        }
}

} // namespace

Report full_residual_suite(const TransformedNet& t, const std::vector<Point>& pts, const EvalMode& mode,
                           double tolerance) {
    Report rep;
    for (const Point& pt : pts) {
        if (mode.is_exact()) {
            try {
                closed_point_sweep<Rat>(
                    rep, t, pt, "exact", tolerance,
                    [&](const SymMatrix& m) { return determinant(m, pt, mode).q; },
                    [&](const SymMatrix& m, int d) { return determinant_derivative(m, d, pt, mode).q; });
            } catch (const PoleError&) {
                CheckResult c;
                c.name = "wronskian";
                c.point = pt.f;
                c.mode = "exact";
                c.status = "singular";
                rep.add(std::move(c));
            }
        } else {
            closed_point_sweep<double>(
                rep, t, pt, "float", tolerance,
                [&](const SymMatrix& m) { return determinant(m, pt, mode).f; },
                [&](const SymMatrix& m, int d) { return determinant_derivative(m, d, pt, mode).f; });
        }
    }
    return rep;
}

NetState symbolic_state(const TransformedNet& t) {
    if (!t.has_symbolic())
        throw DomainError("symbolic_state: closed form is only expanded for partitions with total at most 4");
    NetState s;
    s.N = t.directions();
    s.P = t.ambient();
    for (int i = 0; i < s.N; ++i)
        for (int j = 0; j < s.N; ++j)
            if (i != j) s.set_beta(i, j, t.rotation_sym(i, j));
    s.X.resize(static_cast<std::size_t>(s.N));
    for (int i = 0; i < s.N; ++i) {
        s.X[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(s.P));
        for (int l = 0; l < s.P; ++l) s.X[static_cast<std::size_t>(i)].push_back(t.tangent_sym(i, l));
    }
    s.H.reserve(static_cast<std::size_t>(s.N));
    for (int i = 0; i < s.N; ++i) s.H.push_back(t.lame_sym(i));
    s.x.reserve(static_cast<std::size_t>(s.P));
    for (int l = 0; l < s.P; ++l) s.x.push_back(t.point_sym(l));
    return s;
}

// --- sampling --------------------------------------------------------------------

std::vector<Point> sample_float_points(int n_dirs, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int c = 0; c < count; ++c) {
        std::vector<double> coords(static_cast<std::size_t>(n_dirs));
        // drawn as scaled integers so the stream is identical across platforms
        for (double& v : coords) v = static_cast<double>(rng() % 2000001) / 1000000.0 - 1.0;
        out.push_back(Point::floats(std::move(coords)));
    }
    return out;
}

std::vector<Point> sample_rational_points(int n_dirs, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int c = 0; c < count; ++c) {
        std::vector<Rat> coords;
        coords.reserve(static_cast<std::size_t>(n_dirs));
        for (int d = 0; d < n_dirs; ++d)
            coords.push_back(make_rat(static_cast<long>(rng() % 33) - 16, 16));
        out.push_back(Point::rationals(std::move(coords)));
    }
    return out;
}

std::vector<Rat> sample_bases(int n_dirs, std::uint64_t seed) {
    // Distinct bases, so coincident-base singularities (e.g. Vandermonde-type
    // Wronskians) cannot be sampled by construction.
    static const std::pair<long, long> table[] = {
        {1, 2}, {2, 3}, {3, 4}, {5, 4}, {4, 3}, {3, 2}, {2, 1}, {5, 2}, {3, 1}, {5, 3},
    };
    constexpr int n_table = static_cast<int>(sizeof(table) / sizeof(table[0]));
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<int> pick(n_table);
    for (int t = 0; t < n_table; ++t) pick[static_cast<std::size_t>(t)] = t;
    for (int t = n_table - 1; t > 0; --t)
        std::swap(pick[static_cast<std::size_t>(t)], pick[rng() % static_cast<std::uint64_t>(t + 1)]);
    std::vector<Rat> out;
    out.reserve(static_cast<std::size_t>(n_dirs));
    for (int d = 0; d < n_dirs; ++d) {
        auto [num, den] = table[pick[static_cast<std::size_t>(d % n_table)]];
        out.push_back(make_rat(num, den));
    }
    return out;
}

std::vector<Point> filter_nonsingular(const TransformedNet& t, const std::vector<Point>& candidates,
                                      const EvalMode& mode) {
    if (mode.is_exact()) {
        std::vector<Point> out;
        for (const Point& pt : candidates) {
            try {
                if (determinant(t.wronskian(), pt, mode).q != 0) out.push_back(pt);
            } catch (const PoleError&) {
                // singular point, drop it
            }
        }
        return out;
    }
    // In float mode a point too close to the singular locus loses all its
    // digits to cancellation, so rank the survivors by |det W| / scale and
    // hand back the best-conditioned ones first.
    constexpr double rel_floor = 1e-9;
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        try {
            FloatDet w = determinant_float(t.wronskian(), candidates[c]);
            if (w.singular || !std::isfinite(w.value) || w.scale <= 0.0) continue;
            double rel = std::abs(w.value) / w.scale;
            if (rel > rel_floor) ranked.push_back({rel, c});
        } catch (const PoleError&) {
            // singular point, drop it
        }
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Point> out;
    out.reserve(ranked.size());
    for (const auto& [rel, c] : ranked) out.push_back(candidates[c]);
    return out;
}

} // namespace conet
