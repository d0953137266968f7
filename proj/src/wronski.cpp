#include "conet/wronski.hpp"

#include <cmath>

namespace conet {

Partition Partition::of(std::vector<int> parts) {
    if (parts.empty()) throw DomainError("partition must have at least one block");
    for (int m : parts)
        if (m < 1) throw DomainError("every partition entry must be a positive integer");
    Partition p;
    p.m = std::move(parts);
    return p;
}

int Partition::total() const {
    int t = 0;
    for (int v : m) t += v;
    return t;
}

int Partition::block_offset(int j) const {
    int off = 0;
    for (int t = 0; t < j; ++t) off += m[t];
    return off;
}

int Partition::block_last_row(int j) const { return block_offset(j) + m[j] - 1; }

namespace {

// d^r/du_j^r chain, computed once per need.
RationalExpr deriv_pow(const RationalExpr& e, int dir, int r) {
    RationalExpr out = e;
    for (int t = 0; t < r; ++t) out = out.derivative(dir);
    return out;
}

} // namespace

SymMatrix wronski_block(std::span<const SeedRecord> seeds, int j, int n) {
    if (n < 1) throw DomainError("wronski_block: row count must be at least 1");
    const int M = static_cast<int>(seeds.size());
    SymMatrix W(n, M);
    for (int a = 0; a < M; ++a) {
        if (j < 0 || j >= static_cast<int>(seeds[a].xi.size()))
            throw DomainError("wronski_block: direction index out of range");
        RationalExpr cur = seeds[a].xi[j];
        for (int r = 0; r < n; ++r) {
            W.at(r, a) = cur;
            if (r + 1 < n) cur = cur.derivative(j);
        }
    }
    return W;
}

SymMatrix multi_wronskian(std::span<const SeedRecord> seeds, const Partition& p) {
    const int M = p.total();
    if (M != static_cast<int>(seeds.size()))
        throw DomainError("multi_wronskian: partition total must equal the seed count");
    SymMatrix W(M, M);
    int row = 0;
    for (int j = 0; j < p.blocks(); ++j) {
        SymMatrix block = wronski_block(seeds, j, p.m[j]);
        for (int r = 0; r < p.m[j]; ++r, ++row)
            for (int a = 0; a < M; ++a) W.at(row, a) = block.at(r, a);
    }
    return W;
}

namespace {

void check_partition(const NetState& s, const Partition& p) {
    if (p.blocks() != s.N) throw DomainError("partition must have one entry per direction");
    if (p.total() != static_cast<int>(s.seeds.size()))
        throw DomainError("partition total must equal the seed count");
}

// Border column v^l: runs (X_k^l, d_k X_k^l, ..., d_k^{m_k-1} X_k^l).
std::vector<RationalExpr> border_column(const NetState& s, const Partition& p, int ell) {
    std::vector<RationalExpr> col;
    col.reserve(static_cast<std::size_t>(p.total()));
    for (int k = 0; k < s.N; ++k) {
        RationalExpr cur = s.X[k][ell];
        for (int r = 0; r < p.m[k]; ++r) {
            col.push_back(cur);
            if (r + 1 < p.m[k]) cur = cur.derivative(k);
        }
    }
    return col;
}

// Row d_i^{m_i} (xi^1_i, ..., xi^M_i).
std::vector<RationalExpr> overflow_row(const NetState& s, const Partition& p, int i) {
    std::vector<RationalExpr> row;
    row.reserve(s.seeds.size());
    for (const SeedRecord& a : s.seeds) row.push_back(deriv_pow(a.xi[i], i, p.m[i]));
    return row;
}

} // namespace

SymMatrix bordered_tangent(const NetState& s, const Partition& p, int i, int ell) {
    check_partition(s, p);
    if (i < 0 || i >= s.N) throw DomainError("bordered_tangent: direction index out of range");
    if (ell < 0 || ell >= s.P) throw DomainError("bordered_tangent: ambient index out of range");
    const int M = p.total();
    SymMatrix W = multi_wronskian(s.seeds, p);
    SymMatrix B(M + 1, M + 1);
    const std::vector<RationalExpr> col = border_column(s, p, ell);
    for (int r = 0; r < M; ++r) {
        for (int c = 0; c < M; ++c) B.at(r, c) = W.at(r, c);
        B.at(r, M) = col[static_cast<std::size_t>(r)];
    }
    const std::vector<RationalExpr> row = overflow_row(s, p, i);
    for (int c = 0; c < M; ++c) B.at(M, c) = row[static_cast<std::size_t>(c)];
    B.at(M, M) = deriv_pow(s.X[i][ell], i, p.m[i]);
    return B;
}

SymMatrix bordered_lame(const NetState& s, const Partition& p, int i) {
    check_partition(s, p);
    if (i < 0 || i >= s.N) throw DomainError("bordered_lame: direction index out of range");
    SymMatrix B = multi_wronskian(s.seeds, p);
    const int last = p.block_last_row(i);
    for (int a = 0; a < B.cols; ++a) B.at(last, a) = s.seeds[static_cast<std::size_t>(a)].omega;
    return B;
}

SymMatrix bordered_rotation(const NetState& s, const Partition& p, int i, int j) {
    check_partition(s, p);
    if (i < 0 || i >= s.N || j < 0 || j >= s.N) throw DomainError("bordered_rotation: index out of range");
    if (i == j) throw DomainError("bordered_rotation: indices must differ");
    SymMatrix B = multi_wronskian(s.seeds, p);
    const std::vector<RationalExpr> row = overflow_row(s, p, i);
    const int last = p.block_last_row(j);
    for (int a = 0; a < B.cols; ++a) B.at(last, a) = row[static_cast<std::size_t>(a)];
    return B;
}

SymMatrix bordered_point(const NetState& s, const Partition& p, int ell) {
    check_partition(s, p);
    if (ell < 0 || ell >= s.P) throw DomainError("bordered_point: ambient index out of range");
    const int M = p.total();
    SymMatrix W = multi_wronskian(s.seeds, p);
    SymMatrix B(M + 1, M + 1);
    const std::vector<RationalExpr> col = border_column(s, p, ell);
    for (int r = 0; r < M; ++r) {
        for (int c = 0; c < M; ++c) B.at(r, c) = W.at(r, c);
        B.at(r, M) = col[static_cast<std::size_t>(r)];
    }
    for (int a = 0; a < M; ++a) B.at(M, a) = s.seeds[static_cast<std::size_t>(a)].omega;
    B.at(M, M) = s.x[ell];
    return B;
}

// ---------------------------------------------------------------------------
// determinant kernels

Rat det_exact(std::vector<Rat> a, int n) {
    if (n == 0) return Rat(1);
    if (static_cast<int>(a.size()) != n * n) throw DomainError("det_exact: matrix is not square");
    auto at = [&](int r, int c) -> Rat& { return a[static_cast<std::size_t>(r) * n + c]; };
    Rat prev(1);
    int sign = 1;
    for (int k = 0; k + 1 < n; ++k) {
        if (at(k, k) == 0) {
            int piv = -1;
            for (int r = k + 1; r < n; ++r)
                if (at(r, k) != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) return Rat(0);
            for (int c = k; c < n; ++c) std::swap(at(k, c), at(piv, c));
            sign = -sign;
        }
        const Rat pivot = at(k, k);
        for (int r = k + 1; r < n; ++r) {
            for (int c = k + 1; c < n; ++c)
                at(r, c) = (at(r, c) * pivot - at(r, k) * at(k, c)) / prev;
            at(r, k) = 0;
        }
        prev = pivot;
    }
    return sign > 0 ? at(n - 1, n - 1) : Rat(-at(n - 1, n - 1));
}

FloatDet det_float(std::vector<double> a, int n) {
    FloatDet out;
    if (n == 0) {
        out.value = 1.0;
        return out;
    }
    if (static_cast<int>(a.size()) != n * n) throw DomainError("det_float: matrix is not square");
    auto at = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };
    double max_in = 0.0;
    for (double v : a) max_in = std::max(max_in, std::abs(v));
    if (max_in == 0.0) {
        out.singular = true;
        return out;
    }
    double max_work = max_in;
    out.scale = 1.0;
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += at(r, c) * at(r, c);
        out.scale *= std::sqrt(s);
    }
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(at(k, k));
        for (int r = k + 1; r < n; ++r) {
            const double v = std::abs(at(r, k));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0 || !std::isfinite(best)) {
            out.singular = true;
            out.value = 0.0;
            return out;
        }
        if (piv != k) {
            for (int c = k; c < n; ++c) std::swap(at(k, c), at(piv, c));
            det = -det;
        }
        const double pivot = at(k, k);
        det *= pivot;
        for (int r = k + 1; r < n; ++r) {
            const double f = at(r, k) / pivot;
            for (int c = k + 1; c < n; ++c) {
                at(r, c) -= f * at(k, c);
                max_work = std::max(max_work, std::abs(at(r, c)));
            }
            at(r, k) = 0.0;
        }
    }
    out.value = det;
    out.growth = max_work / max_in;
    out.singular = !std::isfinite(det);
    return out;
}

namespace {

RationalExpr det_symbolic_rec(const SymMatrix& m, std::vector<int>& cols, int row) {
    const int n = static_cast<int>(cols.size());
    if (n == 1) return m.at(row, cols[0]);
    RationalExpr acc;
    for (int t = 0; t < n; ++t) {
        const int c = cols[t];
        if (m.at(row, c).is_zero()) continue;
        std::vector<int> rest;
        rest.reserve(static_cast<std::size_t>(n - 1));
        for (int u = 0; u < n; ++u)
            if (u != t) rest.push_back(cols[u]);
        RationalExpr minor = det_symbolic_rec(m, rest, row + 1);
        RationalExpr piece = m.at(row, c) * minor;
        acc = t % 2 == 0 ? acc + piece : acc - piece;
    }
    return acc;
}

} // namespace

RationalExpr det_symbolic(const SymMatrix& m) {
    if (m.rows != m.cols) throw DomainError("det_symbolic: matrix is not square");
    if (m.rows == 0) return RationalExpr::one();
    std::vector<int> cols(static_cast<std::size_t>(m.cols));
    for (int c = 0; c < m.cols; ++c) cols[static_cast<std::size_t>(c)] = c;
    return det_symbolic_rec(m, cols, 0);
}

Rat det_cofactor(const std::vector<Rat>& a, int n) {
    if (static_cast<int>(a.size()) != n * n) throw DomainError("det_cofactor: matrix is not square");
    if (n == 0) return Rat(1);
    if (n == 1) return a[0];
    Rat acc(0);
    for (int c = 0; c < n; ++c) {
        if (a[static_cast<std::size_t>(c)] == 0) continue;
        std::vector<Rat> minor;
        minor.reserve(static_cast<std::size_t>((n - 1) * (n - 1)));
        for (int r = 1; r < n; ++r)
            for (int cc = 0; cc < n; ++cc)
                if (cc != c) minor.push_back(a[static_cast<std::size_t>(r) * n + cc]);
        Rat piece = a[static_cast<std::size_t>(c)] * det_cofactor(minor, n - 1);
        acc += c % 2 == 0 ? piece : Rat(-piece);
    }
    return acc;
}

namespace {

std::vector<double> eval_entries_f(const SymMatrix& m, const Point& pt) {
    std::vector<double> v;
    v.reserve(m.a.size());
    for (const RationalExpr& e : m.a) v.push_back(e.eval_float(pt));
    return v;
}

std::vector<Rat> eval_entries_q(const SymMatrix& m, const Point& pt, const std::vector<Rat>& bases) {
    std::vector<Rat> v;
    v.reserve(m.a.size());
    for (const RationalExpr& e : m.a) v.push_back(e.eval_exact(pt, bases));
    return v;
}

} // namespace

Value determinant(const SymMatrix& m, const Point& pt, const EvalMode& mode) {
    if (m.rows != m.cols) throw DomainError("determinant: matrix is not square");
    if (mode.is_exact()) return Value::from_rat(det_exact(eval_entries_q(m, pt, mode.bases), m.rows));
    return Value::from_float(det_float(eval_entries_f(m, pt), m.rows).value);
}

FloatDet determinant_float(const SymMatrix& m, const Point& pt) {
    if (m.rows != m.cols) throw DomainError("determinant_float: matrix is not square");
    return det_float(eval_entries_f(m, pt), m.rows);
}

Value determinant_derivative(const SymMatrix& m, int dir, const Point& pt, const EvalMode& mode) {
    if (m.rows != m.cols) throw DomainError("determinant_derivative: matrix is not square");
    // d det = sum over rows of det with one row differentiated.
    if (mode.is_exact()) {
        Rat acc(0);
        for (int r = 0; r < m.rows; ++r) {
            SymMatrix d = m;
            bool nonzero_row = false;
            for (int c = 0; c < m.cols; ++c) {
                d.at(r, c) = m.at(r, c).derivative(dir);
                nonzero_row |= !d.at(r, c).is_zero();
            }
            if (!nonzero_row) continue;
            acc += det_exact(eval_entries_q(d, pt, mode.bases), d.rows);
        }
        return Value::from_rat(std::move(acc));
    }
    double acc = 0.0;
    for (int r = 0; r < m.rows; ++r) {
        SymMatrix d = m;
        bool nonzero_row = false;
        for (int c = 0; c < m.cols; ++c) {
            d.at(r, c) = m.at(r, c).derivative(dir);
            nonzero_row |= !d.at(r, c).is_zero();
        }
        if (!nonzero_row) continue;
        acc += det_float(eval_entries_f(d, pt), d.rows).value;
    }
    return Value::from_float(acc);
}

// ---------------------------------------------------------------------------
// TransformedNet

TransformedNet::TransformedNet(const NetState& s0, const Partition& p) : s0_(s0), p_(p) {
    check_partition(s0_, p_);
    W_ = multi_wronskian(s0_.seeds, p_);
    lame_.reserve(static_cast<std::size_t>(s0_.N));
    for (int i = 0; i < s0_.N; ++i) lame_.push_back(bordered_lame(s0_, p_, i));
    for (int i = 0; i < s0_.N; ++i)
        for (int j = 0; j < s0_.N; ++j)
            if (i != j) rotation_.emplace(std::make_pair(i, j), bordered_rotation(s0_, p_, i, j));
    tangent_.assign(static_cast<std::size_t>(s0_.N), {});
    for (int i = 0; i < s0_.N; ++i) {
        tangent_[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(s0_.P));
        for (int l = 0; l < s0_.P; ++l)
            tangent_[static_cast<std::size_t>(i)].push_back(bordered_tangent(s0_, p_, i, l));
    }
    point_.reserve(static_cast<std::size_t>(s0_.P));
    for (int l = 0; l < s0_.P; ++l) point_.push_back(bordered_point(s0_, p_, l));
    det_symbolic_w_ = det_symbolic(W_);
}

const SymMatrix& TransformedNet::lame_matrix(int i) const {
    if (i < 0 || i >= s0_.N) throw DomainError("lame_matrix: index out of range");
    return lame_[static_cast<std::size_t>(i)];
}

const SymMatrix& TransformedNet::rotation_matrix(int i, int j) const {
    const auto it = rotation_.find({i, j});
    if (it == rotation_.end()) throw DomainError("rotation_matrix: bad index pair");
    return it->second;
}

const SymMatrix& TransformedNet::tangent_matrix(int i, int ell) const {
    if (i < 0 || i >= s0_.N || ell < 0 || ell >= s0_.P)
        throw DomainError("tangent_matrix: index out of range");
    return tangent_[static_cast<std::size_t>(i)][static_cast<std::size_t>(ell)];
}

const SymMatrix& TransformedNet::point_matrix(int ell) const {
    if (ell < 0 || ell >= s0_.P) throw DomainError("point_matrix: index out of range");
    return point_[static_cast<std::size_t>(ell)];
}

namespace {

EvalResult<double> ratio_f(const SymMatrix& numerator, const SymMatrix& denom, const Point& pt, bool negate) {
    const FloatDet dw = det_float(eval_entries_f(denom, pt), denom.rows);
    if (dw.singular || dw.value == 0.0) return {true, 0.0};
    const FloatDet dn = det_float(eval_entries_f(numerator, pt), numerator.rows);
    double v = dn.value / dw.value;
    if (!std::isfinite(v)) return {true, 0.0};
    return {false, negate ? -v : v};
}

EvalResult<Rat> ratio_q(const SymMatrix& numerator, const SymMatrix& denom, const Point& pt,
                        const std::vector<Rat>& bases, bool negate) {
    const Rat dw = det_exact(eval_entries_q(denom, pt, bases), denom.rows);
    if (dw == 0) return {true, Rat(0)};
    Rat v = det_exact(eval_entries_q(numerator, pt, bases), numerator.rows) / dw;
    return {false, negate ? Rat(-v) : v};
}

template <typename F, typename Q>
EvalResult<Value> dispatch(const EvalMode& mode, F&& f, Q&& q) {
    if (mode.is_exact()) {
        EvalResult<Rat> r = q();
        return {r.singular, Value::from_rat(std::move(r.value))};
    }
    EvalResult<double> r = f();
    return {r.singular, Value::from_float(r.value)};
}

} // namespace

EvalResult<double> TransformedNet::tangent_f(int i, int ell, const Point& pt) const {
    return ratio_f(tangent_matrix(i, ell), W_, pt, false);
}
EvalResult<double> TransformedNet::lame_f(int i, const Point& pt) const {
    return ratio_f(lame_matrix(i), W_, pt, true);
}
EvalResult<double> TransformedNet::rotation_f(int i, int j, const Point& pt) const {
    return ratio_f(rotation_matrix(i, j), W_, pt, true);
}
EvalResult<double> TransformedNet::point_f(int ell, const Point& pt) const {
    return ratio_f(point_matrix(ell), W_, pt, false);
}

EvalResult<Rat> TransformedNet::tangent_q(int i, int ell, const Point& pt, const std::vector<Rat>& bases) const {
    return ratio_q(tangent_matrix(i, ell), W_, pt, bases, false);
}
EvalResult<Rat> TransformedNet::lame_q(int i, const Point& pt, const std::vector<Rat>& bases) const {
    return ratio_q(lame_matrix(i), W_, pt, bases, true);
}
EvalResult<Rat> TransformedNet::rotation_q(int i, int j, const Point& pt, const std::vector<Rat>& bases) const {
    return ratio_q(rotation_matrix(i, j), W_, pt, bases, true);
}
EvalResult<Rat> TransformedNet::point_q(int ell, const Point& pt, const std::vector<Rat>& bases) const {
    return ratio_q(point_matrix(ell), W_, pt, bases, false);
}

EvalResult<Value> TransformedNet::tangent_at(int i, int ell, const Point& pt, const EvalMode& mode) const {
    return dispatch(mode, [&] { return tangent_f(i, ell, pt); }, [&] { return tangent_q(i, ell, pt, mode.bases); });
}
EvalResult<Value> TransformedNet::lame_at(int i, const Point& pt, const EvalMode& mode) const {
    return dispatch(mode, [&] { return lame_f(i, pt); }, [&] { return lame_q(i, pt, mode.bases); });
}
EvalResult<Value> TransformedNet::rotation_at(int i, int j, const Point& pt, const EvalMode& mode) const {
    return dispatch(mode, [&] { return rotation_f(i, j, pt); }, [&] { return rotation_q(i, j, pt, mode.bases); });
}
EvalResult<Value> TransformedNet::point_at(int ell, const Point& pt, const EvalMode& mode) const {
    return dispatch(mode, [&] { return point_f(ell, pt); }, [&] { return point_q(ell, pt, mode.bases); });
}

RationalExpr TransformedNet::sym_ratio(const SymMatrix& numerator, bool negate) const {
    if (!has_symbolic())
        throw DomainError("symbolic closed form is only kept for partitions with total at most 4");
    if (det_symbolic_w_.is_zero()) throw SingularError("the multi-Wronskian is identically singular");
    RationalExpr r = det_symbolic(numerator) / det_symbolic_w_;
    return negate ? -r : r;
}

RationalExpr TransformedNet::tangent_sym(int i, int ell) const { return sym_ratio(tangent_matrix(i, ell), false); }
RationalExpr TransformedNet::lame_sym(int i) const { return sym_ratio(lame_matrix(i), true); }
RationalExpr TransformedNet::rotation_sym(int i, int j) const { return sym_ratio(rotation_matrix(i, j), true); }
RationalExpr TransformedNet::point_sym(int ell) const { return sym_ratio(point_matrix(ell), false); }

TransformedNet closed_form(const NetState& s0, const Partition& p) { return TransformedNet(s0, p); }

} // namespace conet
