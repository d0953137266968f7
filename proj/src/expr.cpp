#include "conet/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <utility>

namespace conet {

Rat make_rat(long num, long den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    const bool invert = e < 0;
    const unsigned long k = invert ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    if (invert && base == 0) throw PoleError("zero raised to a negative power");
    Rat r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num().get_mpz_t(), k);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den().get_mpz_t(), k);
    if (invert) {
        Rat inv;
        mpq_inv(inv.get_mpq_t(), r.get_mpq_t());
        return inv;
    }
    return r;
}

double to_double(const Rat& q) { return q.get_d(); }

// ---------------------------------------------------------------------------
// TermKey order

namespace {

int cmp_rat(const Rat& a, const Rat& b) { return cmp(a, b); }

// Lexicographic over sorted (direction, value) entries.
template <typename Map, typename Cmp>
int cmp_map(const Map& a, const Map& b, Cmp cmp_value) {
    auto ia = a.begin();
    auto ib = b.begin();
    for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
        const int c = cmp_value(ia->second, ib->second);
        if (c != 0) return c;
    }
    if (ia != a.end()) return 1;
    if (ib != b.end()) return -1;
    return 0;
}

} // namespace

bool TermKeyLess::operator()(const TermKey& a, const TermKey& b) const {
    const int cr = cmp_map(a.rates, b.rates, cmp_rat);
    if (cr != 0) return cr < 0;
    return cmp_map(a.powers, b.powers, [](int x, int y) { return x < y ? -1 : (x > y ? 1 : 0); }) < 0;
}

// ---------------------------------------------------------------------------
// Point / EvalMode

Point Point::floats(std::vector<double> coords) {
    Point p;
    p.f = std::move(coords);
    return p;
}

Point Point::rationals(std::vector<Rat> coords) {
    Point p;
    p.q = std::move(coords);
    p.f.reserve(p.q.size());
    for (const Rat& c : p.q) p.f.push_back(to_double(c));
    p.has_exact = true;
    return p;
}

EvalMode EvalMode::exact(std::vector<Rat> bases) {
    for (const Rat& t : bases)
        if (t <= 0) throw DomainError("exact-mode base must be positive");
    EvalMode m;
    m.kind = Kind::ExactCommensurate;
    m.bases = std::move(bases);
    return m;
}

// ---------------------------------------------------------------------------
// ExpPoly

ExpPoly::ExpPoly(const Rat& constant) {
    if (constant != 0) terms_.emplace(TermKey{}, constant);
}

ExpPoly ExpPoly::variable(int dir, int exponent) {
    if (dir < 0) throw DomainError("negative direction index");
    if (exponent < 0) throw DomainError("variable exponent must be non-negative");
    ExpPoly p;
    TermKey k;
    if (exponent > 0) k.powers[dir] = exponent;
    p.terms_.emplace(std::move(k), Rat(1));
    return p;
}

ExpPoly ExpPoly::exponential(int dir, const Rat& rate) {
    if (dir < 0) throw DomainError("negative direction index");
    ExpPoly p;
    TermKey k;
    if (rate != 0) k.rates[dir] = rate;
    p.terms_.emplace(std::move(k), Rat(1));
    return p;
}

ExpPoly ExpPoly::term(const Rat& coeff, TermKey key) {
    ExpPoly p;
    p.add_term(coeff, std::move(key));
    return p;
}

bool ExpPoly::is_one() const {
    return terms_.size() == 1 && terms_.begin()->first == TermKey{} && terms_.begin()->second == 1;
}

bool ExpPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == TermKey{});
}

int ExpPoly::min_dims() const {
    int n = 0;
    for (const auto& [key, c] : terms_) {
        if (!key.powers.empty()) n = std::max(n, key.powers.rbegin()->first + 1);
        if (!key.rates.empty()) n = std::max(n, key.rates.rbegin()->first + 1);
    }
    return n;
}

bool ExpPoly::depends_only_on(int dir) const {
    for (const auto& [key, c] : terms_) {
        for (const auto& [d, m] : key.powers)
            if (d != dir) return false;
        for (const auto& [d, r] : key.rates)
            if (d != dir) return false;
    }
    return true;
}

bool ExpPoly::depends_on(int dir) const {
    for (const auto& [key, c] : terms_)
        if (key.powers.count(dir) || key.rates.count(dir)) return true;
    return false;
}

bool ExpPoly::integer_rates() const {
    for (const auto& [key, c] : terms_)
        for (const auto& [d, r] : key.rates)
            if (r.get_den() != 1) return false;
    return true;
}

void ExpPoly::add_term(const Rat& coeff, TermKey key) {
    if (coeff == 0) return;
    // Scrub explicit zeros so equal monomials share one key.
    for (auto it = key.powers.begin(); it != key.powers.end();)
        it = it->second == 0 ? key.powers.erase(it) : std::next(it);
    for (auto it = key.rates.begin(); it != key.rates.end();)
        it = it->second == 0 ? key.rates.erase(it) : std::next(it);
    auto [it, inserted] = terms_.try_emplace(std::move(key), coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0) terms_.erase(it);
    }
}

ExpPoly ExpPoly::operator-() const {
    ExpPoly r;
    for (const auto& [key, c] : terms_) r.terms_.emplace(key, -c);
    return r;
}

ExpPoly ExpPoly::operator+(const ExpPoly& o) const {
    ExpPoly r = *this;
    for (const auto& [key, c] : o.terms_) r.add_term(c, key);
    return r;
}

ExpPoly ExpPoly::operator-(const ExpPoly& o) const {
    ExpPoly r = *this;
    for (const auto& [key, c] : o.terms_) r.add_term(-c, key);
    return r;
}

ExpPoly ExpPoly::operator*(const ExpPoly& o) const {
    ExpPoly r;
    for (const auto& [ka, ca] : terms_) {
        for (const auto& [kb, cb] : o.terms_) {
            TermKey k = ka;
            for (const auto& [d, m] : kb.powers) k.powers[d] += m;
            for (const auto& [d, rate] : kb.rates) {
                auto [it, ins] = k.rates.try_emplace(d, rate);
                if (!ins) {
                    it->second += rate;
                    if (it->second == 0) k.rates.erase(it);
                }
            }
            r.add_term(ca * cb, std::move(k));
        }
    }
    return r;
}

ExpPoly ExpPoly::scaled(const Rat& c) const {
    ExpPoly r;
    if (c == 0) return r;
    for (const auto& [key, coeff] : terms_) r.terms_.emplace(key, coeff * c);
    return r;
}

ExpPoly ExpPoly::derivative(int dir) const {
    ExpPoly r;
    for (const auto& [key, c] : terms_) {
        const auto pit = key.powers.find(dir);
        if (pit != key.powers.end()) {
            TermKey k = key;
            const int m = pit->second;
            if (m == 1)
                k.powers.erase(dir);
            else
                k.powers[dir] = m - 1;
            r.add_term(c * m, std::move(k));
        }
        const auto rit = key.rates.find(dir);
        if (rit != key.rates.end()) r.add_term(c * rit->second, key);
    }
    return r;
}

ExpPoly ExpPoly::antiderivative(int dir) const {
    ExpPoly r;
    for (const auto& [key, c] : terms_) {
        const auto pit = key.powers.find(dir);
        const int m = pit == key.powers.end() ? 0 : pit->second;
        const auto rit = key.rates.find(dir);
        if (rit == key.rates.end()) {
            // pure power: u^m -> u^{m+1}/(m+1)
            TermKey k = key;
            k.powers[dir] = m + 1;
            r.add_term(c / (m + 1), std::move(k));
            continue;
        }
        // u^m e^{lu}: repeated integration by parts,
        //   sum_{k=0..m} (-1)^k m!/(m-k)! u^{m-k} e^{lu} / l^{k+1}
        const Rat& lam = rit->second;
        Rat fall(1);          // m!/(m-k)!
        Rat lpow = 1 / lam;   // l^{-(k+1)}
        for (int k = 0; k <= m; ++k) {
            TermKey t = key;
            if (m - k == 0)
                t.powers.erase(dir);
            else
                t.powers[dir] = m - k;
            Rat coeff = c * fall * lpow;
            if (k % 2 == 1) coeff = -coeff;
            r.add_term(coeff, std::move(t));
            fall *= (m - k);
            lpow /= lam;
        }
    }
    return r;
}

double ExpPoly::eval_float(const Point& p) const {
    double acc = 0.0;
    for (const auto& [key, c] : terms_) {
        double v = to_double(c);
        for (const auto& [d, m] : key.powers) {
            if (d >= p.dims()) throw DomainError("point has no coordinate for u" + std::to_string(d + 1));
            v *= std::pow(p.f[d], m);
        }
        for (const auto& [d, rate] : key.rates) {
            if (d >= p.dims()) throw DomainError("point has no coordinate for u" + std::to_string(d + 1));
            v *= std::exp(to_double(rate) * p.f[d]);
        }
        acc += v;
    }
    return acc;
}

Rat ExpPoly::eval_exact(const Point& p, const std::vector<Rat>& bases) const {
    Rat acc(0);
    for (const auto& [key, c] : terms_) {
        Rat v = c;
        for (const auto& [d, m] : key.powers) {
            if (!p.has_exact || d >= static_cast<int>(p.q.size()))
                throw DomainError("exact evaluation needs a rational coordinate for u" + std::to_string(d + 1));
            v *= rat_pow(p.q[d], m);
        }
        for (const auto& [d, rate] : key.rates) {
            if (d >= static_cast<int>(bases.size()))
                throw DomainError("exact mode has no base for u" + std::to_string(d + 1));
            if (rate.get_den() != 1)
                throw DomainError("exact mode requires integer exponential rates");
            v *= rat_pow(bases[d], rate.get_num().get_si());
        }
        acc += v;
    }
    return acc;
}

const std::pair<const TermKey, Rat>& ExpPoly::leading() const {
    if (terms_.empty()) throw DomainError("leading term of the zero expression");
    return *terms_.rbegin();
}

// ---------------------------------------------------------------------------
// printing

namespace {

void append_factors(std::ostream& os, const TermKey& key, bool coeff_printed) {
    bool first = !coeff_printed;
    for (const auto& [d, m] : key.powers) {
        if (!first) os << "*";
        first = false;
        os << "u" << d + 1;
        if (m != 1) os << "^" << m;
    }
    for (const auto& [d, r] : key.rates) {
        if (!first) os << "*";
        first = false;
        os << "exp(";
        if (r == 1) {
        } else if (r == -1) {
            os << "-";
        } else {
            os << r.get_str() << "*";
        }
        os << "u" << d + 1 << ")";
    }
}

void append_term(std::ostream& os, const TermKey& key, const Rat& coeff_abs) {
    const bool bare = key.powers.empty() && key.rates.empty();
    if (bare) {
        os << coeff_abs.get_str();
        return;
    }
    const bool print_coeff = coeff_abs != 1;
    if (print_coeff) os << coeff_abs.get_str();
    append_factors(os, key, print_coeff);
}

} // namespace

std::string ExpPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [key, c] : terms_) {
        const bool neg = c < 0;
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        append_term(os, key, neg ? Rat(-c) : c);
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// RationalExpr

RationalExpr::RationalExpr() : den_(ExpPoly::one()) {}

RationalExpr::RationalExpr(const Rat& constant) : num_(constant), den_(ExpPoly::one()) {}

RationalExpr::RationalExpr(ExpPoly poly) : num_(std::move(poly)), den_(ExpPoly::one()) {}

RationalExpr::RationalExpr(ExpPoly num, ExpPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw PoleError("division by the zero expression");
    normalize();
}

void RationalExpr::normalize() {
    if (num_.is_zero()) {
        den_ = ExpPoly::one();
        return;
    }
    if (!den_.is_one()) {
        // If num == c * den, collapse to the constant c.
        if (num_.term_count() == den_.term_count()) {
            const Rat ratio = num_.leading().second / den_.leading().second;
            bool proportional = true;
            auto in = num_.terms().begin();
            auto id = den_.terms().begin();
            for (; in != num_.terms().end(); ++in, ++id) {
                if (!(in->first == id->first) || in->second != id->second * ratio) {
                    proportional = false;
                    break;
                }
            }
            if (proportional) {
                num_ = ExpPoly(ratio);
                den_ = ExpPoly::one();
                return;
            }
        }
        // Unit leading coefficient in the denominator.
        const Rat lead = den_.leading().second;
        if (lead != 1) {
            const Rat inv = 1 / lead;
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }
}

const ExpPoly& RationalExpr::poly() const {
    if (!is_polynomial()) throw DomainError("expression is a proper quotient");
    return num_;
}

int RationalExpr::min_dims() const { return std::max(num_.min_dims(), den_.min_dims()); }

RationalExpr RationalExpr::operator-() const {
    RationalExpr r = *this;
    r.num_ = -r.num_;
    return r;
}

RationalExpr RationalExpr::operator+(const RationalExpr& o) const {
    if (den_ == o.den_) return RationalExpr(num_ + o.num_, den_);
    return RationalExpr(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RationalExpr RationalExpr::operator-(const RationalExpr& o) const {
    if (den_ == o.den_) return RationalExpr(num_ - o.num_, den_);
    return RationalExpr(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

RationalExpr RationalExpr::operator*(const RationalExpr& o) const {
    return RationalExpr(num_ * o.num_, den_ * o.den_);
}

RationalExpr RationalExpr::operator/(const RationalExpr& o) const {
    if (o.is_zero()) throw PoleError("division by the zero expression");
    return RationalExpr(num_ * o.den_, den_ * o.num_);
}

RationalExpr RationalExpr::derivative(int dir) const {
    if (den_.is_one()) return RationalExpr(num_.derivative(dir));
    ExpPoly dn = num_.derivative(dir);
    ExpPoly dd = den_.derivative(dir);
    if (dd.is_zero()) return RationalExpr(std::move(dn), den_);
    return RationalExpr(dn * den_ - num_ * dd, den_ * den_);
}

RationalExpr RationalExpr::pow(long e) const {
    if (e == 0) return one();
    const bool invert = e < 0;
    long k = invert ? -e : e;
    RationalExpr acc = *this;
    for (long i = 1; i < k; ++i) acc = acc * *this;
    return invert ? one() / acc : acc;
}

double RationalExpr::eval_float(const Point& p) const {
    const double n = num_.eval_float(p);
    if (den_.is_one()) return n;
    const double d = den_.eval_float(p);
    if (d == 0.0 || !std::isfinite(d)) throw PoleError("denominator vanishes at the evaluation point");
    return n / d;
}

Rat RationalExpr::eval_exact(const Point& p, const std::vector<Rat>& bases) const {
    const Rat n = num_.eval_exact(p, bases);
    if (den_.is_one()) return n;
    const Rat d = den_.eval_exact(p, bases);
    if (d == 0) throw PoleError("denominator vanishes at the evaluation point");
    return n / d;
}

std::string RationalExpr::str() const {
    if (den_.is_one()) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
}

bool equal(const RationalExpr& a, const RationalExpr& b) {
    if (a.den() == b.den()) return a.num() == b.num();
    return (a.num() * b.den() - b.num() * a.den()).is_zero();
}

RationalExpr field_ops(const RationalExpr& a, const RationalExpr& b, FieldOp op) {
    switch (op) {
        case FieldOp::Add: return a + b;
        case FieldOp::Sub: return a - b;
        case FieldOp::Mul: return a * b;
        case FieldOp::Div: return a / b;
    }
    throw DomainError("unknown field operation");
}

ExpPoly antiderivative(const ExpPoly& a, int dir) { return a.antiderivative(dir); }

Value Value::from_float(double v) {
    Value r;
    r.exact = false;
    r.f = v;
    return r;
}

Value Value::from_rat(Rat v) {
    Value r;
    r.exact = true;
    r.q = std::move(v);
    return r;
}

Value evaluate(const RationalExpr& a, const Point& p, const EvalMode& mode) {
    if (mode.is_exact()) return Value::from_rat(a.eval_exact(p, mode.bases));
    return Value::from_float(a.eval_float(p));
}

// ---------------------------------------------------------------------------
// parser

namespace {

enum class Tok { Num, UVar, Exp, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string text; // digits for Num
    int uindex = -1;  // 0-based direction for UVar
    std::size_t pos = 0;
};

struct Lexer {
    std::vector<Token> toks;

    explicit Lexer(const std::string& s) {
        std::size_t i = 0;
        const std::size_t n = s.size();
        while (i < n) {
            const char c = s[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                toks.push_back({Tok::Num, s.substr(i, j - i), -1, i});
                i = j;
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < n && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
                const std::string word = s.substr(i, j - i);
                if (word == "exp") {
                    toks.push_back({Tok::Exp, word, -1, i});
                } else if (word.size() >= 2 && word[0] == 'u' &&
                           word.find_first_not_of("0123456789", 1) == std::string::npos) {
                    const long idx = std::stol(word.substr(1));
                    if (idx < 1) throw ParseError("variable indices start at u1 (at position " + std::to_string(i) + ")");
                    toks.push_back({Tok::UVar, word, static_cast<int>(idx - 1), i});
                } else {
                    throw ParseError("unknown identifier '" + word + "' at position " + std::to_string(i));
                }
                i = j;
                continue;
            }
            Tok k;
            switch (c) {
                case '+': k = Tok::Plus; break;
                case '-': k = Tok::Minus; break;
                case '*': k = Tok::Star; break;
                case '/': k = Tok::Slash; break;
                case '^': k = Tok::Caret; break;
                case '(': k = Tok::LParen; break;
                case ')': k = Tok::RParen; break;
                default:
                    throw ParseError(std::string("unexpected character '") + c + "' at position " + std::to_string(i));
            }
            toks.push_back({k, std::string(1, c), -1, i});
            ++i;
        }
        toks.push_back({Tok::End, "", -1, n});
    }
};

class Parser {
  public:
    explicit Parser(const std::string& text) : lex_(text) {}

    RationalExpr run() {
        RationalExpr e = expr();
        expect(Tok::End, "end of input");
        return e;
    }

  private:
    Lexer lex_;
    std::size_t at_ = 0;

    const Token& peek(int ahead = 0) const {
        const std::size_t i = std::min(at_ + ahead, lex_.toks.size() - 1);
        return lex_.toks[i];
    }
    const Token& take() { return lex_.toks[std::min(at_++, lex_.toks.size() - 1)]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++at_;
        return true;
    }
    void expect(Tok k, const char* what) {
        if (!accept(k))
            throw ParseError(std::string("expected ") + what + " at position " + std::to_string(peek().pos));
    }

    static Rat num_value(const Token& t) { return Rat(mpz_class(t.text)); }

    RationalExpr expr() {
        bool neg = false;
        if (accept(Tok::Minus))
            neg = true;
        else
            accept(Tok::Plus);
        RationalExpr acc = term();
        if (neg) acc = -acc;
        for (;;) {
            if (accept(Tok::Plus))
                acc = acc + term();
            else if (accept(Tok::Minus))
                acc = acc - term();
            else
                return acc;
        }
    }

    RationalExpr term() {
        RationalExpr acc = factor();
        for (;;) {
            if (accept(Tok::Star)) {
                acc = acc * factor();
            } else if (accept(Tok::Slash)) {
                RationalExpr d = factor();
                if (d.is_zero()) throw PoleError("division by the zero expression");
                acc = acc / d;
            } else {
                return acc;
            }
        }
    }

    RationalExpr factor() {
        RationalExpr b = base();
        if (accept(Tok::Caret)) {
            const bool neg = accept(Tok::Minus);
            if (peek().kind != Tok::Num)
                throw ParseError("expected integer exponent at position " + std::to_string(peek().pos));
            const long e = std::stol(take().text);
            b = b.pow(neg ? -e : e);
        }
        return b;
    }

    RationalExpr base() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Num:
                take();
                return RationalExpr(num_value(t));
            case Tok::UVar:
                take();
                return RationalExpr::variable(t.uindex);
            case Tok::Exp:
                take();
                return exp_call();
            case Tok::LParen: {
                take();
                RationalExpr e = expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            default:
                throw ParseError("expected a number, variable, exp(...) or '(' at position " + std::to_string(t.pos));
        }
    }

    // exp '(' [sign] [rational '*'?] u_j ')'; anything else inside balanced
    // parentheses is a class violation rather than a syntax error.
    RationalExpr exp_call() {
        expect(Tok::LParen, "'(' after exp");
        const std::size_t interior = at_;
        Rat rate(1);
        bool ok = true;
        int dir = -1;
        if (accept(Tok::Minus)) rate = -1;
        else accept(Tok::Plus);
        if (peek().kind == Tok::Num) {
            Rat mag = num_value(take());
            if (accept(Tok::Slash)) {
                if (peek().kind != Tok::Num) ok = false;
                else {
                    const Rat d = num_value(take());
                    if (d == 0) throw ParseError("zero denominator in exponential rate");
                    mag /= d;
                }
            }
            if (ok) {
                rate *= mag;
                accept(Tok::Star);
            }
        }
        if (ok && peek().kind == Tok::UVar) {
            dir = take().uindex;
            if (peek().kind != Tok::RParen) ok = false;
        } else {
            ok = false;
        }
        if (ok) {
            take(); // ')'
            return RationalExpr::exponential(dir, rate);
        }
        // Not the admissible form. If the interior reads as an ordinary
        // expression, the argument is outside the function class.
        at_ = interior;
        try {
            expr();
        } catch (const ClassViolationError&) {
            throw;
        } catch (const ParseError&) {
            throw ParseError("malformed exp() argument at position " + std::to_string(peek().pos));
        }
        if (peek().kind != Tok::RParen)
            throw ParseError("expected ')' at position " + std::to_string(peek().pos));
        throw ClassViolationError(
            "exp() argument must be a rational constant times a single variable (at position " +
            std::to_string(peek().pos) + ")");
    }
};

} // namespace

RationalExpr parse_expr(const std::string& text) { return Parser(text).run(); }

} // namespace conet
