#pragma once

// Wronskian blocks, the stacked multi-Wronskian, the bordered matrices, and
// the closed-form transformed net evaluated as determinant ratios
//
//   X_i^l[M]  =  |Xmat_i^l| / |W|
//   H_i[M]    = -|Hmat_i|   / |W|
//   beta_ij[M]= -|Wmat_ij|  / |W|
//   x^l[M]    =  |xmat^l|   / |W|
//
// where W stacks the per-direction blocks W_j(m_j) of a partition
// M = m_1 + ... + m_N with every m_j >= 1. Bordering conventions: the border
// column comes last, the border row comes last; Hmat_i replaces the last row
// of the i-th block by the potentials; Wmat_ij replaces the last row of the
// j-th block by the m_i-th derivative row of direction i.

#include <map>
#include <span>
#include <vector>

#include "conet/net.hpp"

namespace conet {

struct Partition {
    std::vector<int> m;

    static Partition of(std::vector<int> parts);
    int blocks() const { return static_cast<int>(m.size()); }
    int total() const;
    int block_offset(int j) const;              // first row of block j
    int block_last_row(int j) const;            // last row of block j
};

struct SymMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<RationalExpr> a;

    SymMatrix() = default;
    SymMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}
    RationalExpr& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    const RationalExpr& at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// Rows d_j^0 .. d_j^{n-1} of (xi^1_j, ..., xi^M_j).
SymMatrix wronski_block(std::span<const SeedRecord> seeds, int j, int n);

// The M x M stack W_1(m_1), ..., W_N(m_N); requires sum(m) == seed count.
SymMatrix multi_wronskian(std::span<const SeedRecord> seeds, const Partition& p);

// Bordered matrices of the closed form. `s` supplies seeds, tangents,
// potentials and the surface point; indices are 0-based.
SymMatrix bordered_tangent(const NetState& s, const Partition& p, int i, int ell); // (M+1)x(M+1)
SymMatrix bordered_lame(const NetState& s, const Partition& p, int i);             // M x M
SymMatrix bordered_rotation(const NetState& s, const Partition& p, int i, int j);  // M x M
SymMatrix bordered_point(const NetState& s, const Partition& p, int ell);          // (M+1)x(M+1)

// --- determinant kernels ----------------------------------------------------

// Fraction-free (Bareiss) elimination over exact rationals.
Rat det_exact(std::vector<Rat> a, int n);

struct FloatDet {
    double value = 0.0;
    double growth = 1.0; // max working magnitude / max input magnitude
    double scale = 0.0;  // Hadamard bound: product of row norms, >= |det|
    bool singular = false;
};

// Partially pivoted elimination with growth and scale reports.
FloatDet det_float(std::vector<double> a, int n);

// Cofactor expansion over expressions; meant for small matrices.
RationalExpr det_symbolic(const SymMatrix& m);

// Cofactor brute force over exact rationals (test oracle sizes).
Rat det_cofactor(const std::vector<Rat>& a, int n);

// Evaluate the entries at a point, then eliminate.
Value determinant(const SymMatrix& m, const Point& pt, const EvalMode& mode);

// Same in float mode, keeping the elimination diagnostics. |value| / scale
// measures how far the point sits from the singular locus.
FloatDet determinant_float(const SymMatrix& m, const Point& pt);

// d/du_dir of det(m) at a point: sum over rows of the determinant with that
// row replaced by its derivative. Exact in both modes (no differencing).
Value determinant_derivative(const SymMatrix& m, int dir, const Point& pt, const EvalMode& mode);

// --- closed form -------------------------------------------------------------

template <typename S>
struct EvalResult {
    bool singular = false;
    S value{};
};

// Per-point evaluators of the determinant ratios plus, for M <= 4, fully
// symbolic forms. Construction builds every matrix once; evaluation is
// per point and pure.
class TransformedNet {
  public:
    TransformedNet(const NetState& s0, const Partition& p);

    int directions() const { return s0_.N; }
    int ambient() const { return s0_.P; }
    const Partition& partition() const { return p_; }
    const NetState& background() const { return s0_; }

    const SymMatrix& wronskian() const { return W_; }
    const SymMatrix& lame_matrix(int i) const;
    const SymMatrix& rotation_matrix(int i, int j) const;
    const SymMatrix& tangent_matrix(int i, int ell) const;
    const SymMatrix& point_matrix(int ell) const;

    // float-mode evaluators
    EvalResult<double> tangent_f(int i, int ell, const Point& pt) const;
    EvalResult<double> lame_f(int i, const Point& pt) const;
    EvalResult<double> rotation_f(int i, int j, const Point& pt) const;
    EvalResult<double> point_f(int ell, const Point& pt) const;

    // exact-mode evaluators
    EvalResult<Rat> tangent_q(int i, int ell, const Point& pt, const std::vector<Rat>& bases) const;
    EvalResult<Rat> lame_q(int i, const Point& pt, const std::vector<Rat>& bases) const;
    EvalResult<Rat> rotation_q(int i, int j, const Point& pt, const std::vector<Rat>& bases) const;
    EvalResult<Rat> point_q(int ell, const Point& pt, const std::vector<Rat>& bases) const;

    // mode-dispatching evaluators
    EvalResult<Value> tangent_at(int i, int ell, const Point& pt, const EvalMode& mode) const;
    EvalResult<Value> lame_at(int i, const Point& pt, const EvalMode& mode) const;
    EvalResult<Value> rotation_at(int i, int j, const Point& pt, const EvalMode& mode) const;
    EvalResult<Value> point_at(int ell, const Point& pt, const EvalMode& mode) const;

    // symbolic forms, available for M <= 4
    bool has_symbolic() const { return p_.total() <= 4; }
    RationalExpr tangent_sym(int i, int ell) const;
    RationalExpr lame_sym(int i) const;
    RationalExpr rotation_sym(int i, int j) const;
    RationalExpr point_sym(int ell) const;

    // True when det W is the zero expression (degenerate seed family).
    bool identically_singular() const { return det_symbolic_w_.is_zero(); }

  private:
    RationalExpr sym_ratio(const SymMatrix& numerator, bool negate) const;

    NetState s0_;
    Partition p_;
    SymMatrix W_;
    std::vector<SymMatrix> lame_;                      // per i
    std::map<std::pair<int, int>, SymMatrix> rotation_; // per (i, j), i != j
    std::vector<std::vector<SymMatrix>> tangent_;      // [i][ell]
    std::vector<SymMatrix> point_;                     // per ell
    RationalExpr det_symbolic_w_;                      // det W, expanded once
};

// Builds the full closed form; requires seed count == p.total().
TransformedNet closed_form(const NetState& s0, const Partition& p);

} // namespace conet
