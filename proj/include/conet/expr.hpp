#pragma once

// Minimal computer-algebra core over finite sums of terms
//
//     c * prod_j u_j^{m_j} * exp(lambda_j * u_j)
//
// with exact rational c and lambda_j, and quotients of such sums.
// The class is closed under +, -, *, /, partial differentiation and
// per-variable antidifferentiation, and zero testing is exact: distinct
// products u^m * exp(lambda*u) are linearly independent, so a canonical
// sum is zero iff it has no terms.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "conet/errors.hpp"

namespace conet {

using Rat = mpq_class;

// Exact rational from a numerator/denominator pair.
Rat make_rat(long num, long den = 1);

// base^e for integer e (negative e inverts; base must be nonzero then).
Rat rat_pow(const Rat& base, long e);

double to_double(const Rat& q);

// Monomial shape: u-exponents and exponential rates per direction.
// Directions are 0-based indices (u1 is direction 0). Canonical keys
// carry no zero entries; an absent direction means exponent/rate 0.
struct TermKey {
    std::map<int, int> powers; // direction -> exponent >= 1
    std::map<int, Rat> rates;  // direction -> nonzero rational rate

    bool operator==(const TermKey& o) const { return powers == o.powers && rates == o.rates; }
};

// Total order on keys: lexicographic on (rates, powers) by direction index.
// Any fixed total order would do; this one is the tie-breaker used when
// normalizing denominators.
struct TermKeyLess {
    bool operator()(const TermKey& a, const TermKey& b) const;
};

struct Term {
    Rat coeff;
    TermKey key;
};

// Evaluation point: coordinates of u_1..u_N. Float coordinates are always
// present; exact rational coordinates only for points built from rationals.
struct Point {
    std::vector<double> f;
    std::vector<Rat> q;
    bool has_exact = false;

    static Point floats(std::vector<double> coords);
    static Point rationals(std::vector<Rat> coords);
    int dims() const { return static_cast<int>(f.size()); }
};

// Evaluation regime. ExactCommensurate substitutes the positive rational
// base t_j for exp(u_j) (hence t_j^lambda for exp(lambda*u_j), integer
// lambda only) and the rational coordinate for u_j, giving an exact
// rational result.
struct EvalMode {
    enum class Kind { Float, ExactCommensurate };
    Kind kind = Kind::Float;
    std::vector<Rat> bases; // per direction, exact mode only

    static EvalMode floating() { return {}; }
    static EvalMode exact(std::vector<Rat> bases);
    bool is_exact() const { return kind == Kind::ExactCommensurate; }
};

// Canonical finite sum of terms, keyed by monomial shape. No stored
// coefficient is zero and no two terms share a key.
class ExpPoly {
  public:
    using TermMap = std::map<TermKey, Rat, TermKeyLess>;

    ExpPoly() = default;
    explicit ExpPoly(const Rat& constant);

    static ExpPoly zero() { return ExpPoly(); }
    static ExpPoly one() { return ExpPoly(Rat(1)); }
    static ExpPoly variable(int dir, int exponent = 1);
    static ExpPoly exponential(int dir, const Rat& rate);
    static ExpPoly term(const Rat& coeff, TermKey key);

    bool is_zero() const { return terms_.empty(); }
    bool is_one() const;
    bool is_constant() const;
    std::size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    // Largest direction index mentioned anywhere, plus one (0 for constants).
    int min_dims() const;
    // True when every power/rate lives on direction `dir` (constants qualify).
    bool depends_only_on(int dir) const;
    bool depends_on(int dir) const;
    // True when every exponential rate is an integer.
    bool integer_rates() const;

    void add_term(const Rat& coeff, TermKey key);

    ExpPoly operator-() const;
    ExpPoly operator+(const ExpPoly& o) const;
    ExpPoly operator-(const ExpPoly& o) const;
    ExpPoly operator*(const ExpPoly& o) const;
    ExpPoly scaled(const Rat& c) const;

    bool operator==(const ExpPoly& o) const { return terms_ == o.terms_; }

    ExpPoly derivative(int dir) const;
    // F with dF/du_dir == *this; no constant of integration is added.
    ExpPoly antiderivative(int dir) const;

    double eval_float(const Point& p) const;
    Rat eval_exact(const Point& p, const std::vector<Rat>& bases) const;

    // Leading term under the fixed key order. Requires a nonzero sum.
    const std::pair<const TermKey, Rat>& leading() const;

    std::string str() const;

  private:
    TermMap terms_;
};

// Quotient of two canonical sums. Invariants: the denominator is nonzero
// and its leading coefficient is 1; a zero numerator forces denominator 1;
// a numerator that is a constant multiple of the denominator collapses to
// that constant (no other cancellation is attempted).
class RationalExpr {
  public:
    RationalExpr();                       // zero
    RationalExpr(const Rat& constant);    // exact constant
    explicit RationalExpr(ExpPoly poly);  // poly / 1
    RationalExpr(ExpPoly num, ExpPoly den);

    static RationalExpr zero() { return RationalExpr(); }
    static RationalExpr one() { return RationalExpr(Rat(1)); }
    static RationalExpr variable(int dir) { return RationalExpr(ExpPoly::variable(dir)); }
    static RationalExpr exponential(int dir, const Rat& rate) {
        return RationalExpr(ExpPoly::exponential(dir, rate));
    }

    const ExpPoly& num() const { return num_; }
    const ExpPoly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_one(); }
    // Numerator of a quotient-free expression; throws otherwise.
    const ExpPoly& poly() const;

    int min_dims() const;
    bool integer_rates() const { return num_.integer_rates() && den_.integer_rates(); }

    RationalExpr operator-() const;
    RationalExpr operator+(const RationalExpr& o) const;
    RationalExpr operator-(const RationalExpr& o) const;
    RationalExpr operator*(const RationalExpr& o) const;
    RationalExpr operator/(const RationalExpr& o) const;
    RationalExpr& operator+=(const RationalExpr& o) { return *this = *this + o; }
    RationalExpr& operator-=(const RationalExpr& o) { return *this = *this - o; }

    RationalExpr derivative(int dir) const;
    RationalExpr pow(long e) const;

    double eval_float(const Point& p) const;
    Rat eval_exact(const Point& p, const std::vector<Rat>& bases) const;

    std::string str() const;

  private:
    void normalize();

    ExpPoly num_;
    ExpPoly den_;
};

// Exact equality via cross-multiplication; no tolerance involved.
bool equal(const RationalExpr& a, const RationalExpr& b);
inline bool is_zero(const RationalExpr& a) { return a.is_zero(); }

// Four field operations behind one name, for callers that dispatch on a tag.
enum class FieldOp { Add, Sub, Mul, Div };
RationalExpr field_ops(const RationalExpr& a, const RationalExpr& b, FieldOp op);

// Antidifferentiation is defined on the quotient-free class only.
ExpPoly antiderivative(const ExpPoly& a, int dir);

// Parse the expression grammar
//   expr   := ('+'|'-')? term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' int)?
//   base   := rational | 'u'int | 'exp' '(' rational '*'? 'u'int ')' | '(' expr ')'
// Throws ParseError on bad syntax and ClassViolationError when an exp()
// argument is not a rational multiple of a single variable.
RationalExpr parse_expr(const std::string& text);

// Value of an expression at a point in the requested mode. Returned as a
// float/rational pair tagged by the mode that produced it.
struct Value {
    bool exact = false;
    double f = 0.0;
    Rat q;

    static Value from_float(double v);
    static Value from_rat(Rat v);
    double as_double() const { return exact ? to_double(q) : f; }
};

Value evaluate(const RationalExpr& a, const Point& p, const EvalMode& mode);

} // namespace conet
