#include "hpl/hardy.hpp"

#include "hpl/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace hpl {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

char rat_char(Rationality r) {
    switch (r) {
        case Rationality::rational: return 'r';
        case Rationality::irrational: return 'i';
        default: return 'u';
    }
}

Rationality rat_add(Rationality a, Rationality b) {
    if (a == Rationality::unknown || b == Rationality::unknown)
        return Rationality::unknown;
    if (a == Rationality::rational) return b;
    if (b == Rationality::rational) return a;
    return Rationality::unknown; // irrational + irrational can cancel
}

Rationality rat_mul(Rationality a, Rationality b) {
    if (a == Rationality::unknown || b == Rationality::unknown)
        return Rationality::unknown;
    if (a == Rationality::rational && b == Rationality::rational)
        return Rationality::rational;
    if (a == Rationality::rational || b == Rationality::rational)
        return Rationality::irrational; // nonzero rational times irrational
    return Rationality::unknown;
}

ExprPtr finish(Expr e) {
    switch (e.kind) {
        case Expr::Kind::constant:
            e.key = "C(" + fmt_double(e.value) + ',' + rat_char(e.rat) + ')';
            break;
        case Expr::Kind::var:
            e.key = "t";
            break;
        case Expr::Kind::add:
        case Expr::Kind::mul: {
            e.key = e.kind == Expr::Kind::add ? "A(" : "M(";
            for (std::size_t i = 0; i < e.kids.size(); ++i) {
                if (i) e.key += ',';
                e.key += e.kids[i]->key;
            }
            e.key += ')';
            break;
        }
        case Expr::Kind::pow:
            e.key = "P(" + e.kids[0]->key + ',' + fmt_double(e.exponent) + ',' +
                    rat_char(e.exp_rat) + ')';
            break;
        case Expr::Kind::log:
            e.key = "L(" + e.kids[0]->key + ')';
            break;
        case Expr::Kind::exp:
            e.key = "E(" + e.kids[0]->key + ')';
            break;
    }
    return std::make_shared<Expr>(std::move(e));
}

bool is_const(const ExprPtr& e, double v) {
    return e->kind == Expr::Kind::constant && e->value == v;
}

} // namespace

ExprPtr make_const(double v, Rationality r) {
    Expr e;
    e.kind = Expr::Kind::constant;
    e.value = v;
    e.rat = (v == 0.0 || v == 1.0 || v == -1.0) ? Rationality::rational : r;
    return finish(std::move(e));
}

ExprPtr make_var() {
    Expr e;
    e.kind = Expr::Kind::var;
    return finish(std::move(e));
}

ExprPtr make_add(std::vector<ExprPtr> terms) {
    // flatten, then merge terms with an identical non-constant part
    struct Slot {
        double coeff = 0;
        Rationality crat = Rationality::rational;
        bool seeded = false;
        std::vector<ExprPtr> factors;
    };
    std::map<std::string, Slot> slots;

    auto absorb = [&](auto&& self, const ExprPtr& t) -> void {
        if (t->kind == Expr::Kind::add) {
            for (const auto& k : t->kids) self(self, k);
            return;
        }
        double coeff = 1;
        Rationality crat = Rationality::rational;
        std::vector<ExprPtr> factors;
        if (t->kind == Expr::Kind::constant) {
            coeff = t->value;
            crat = t->rat;
        } else if (t->kind == Expr::Kind::mul &&
                   t->kids[0]->kind == Expr::Kind::constant) {
            coeff = t->kids[0]->value;
            crat = t->kids[0]->rat;
            factors.assign(t->kids.begin() + 1, t->kids.end());
        } else if (t->kind == Expr::Kind::mul) {
            factors = t->kids;
        } else {
            factors.push_back(t);
        }
        if (coeff == 0.0) return;
        std::string mkey;
        for (const auto& f : factors) {
            mkey += f->key;
            mkey += '|';
        }
        Slot& s = slots[mkey];
        if (!s.seeded) {
            s.coeff = coeff;
            s.crat = crat;
            s.factors = std::move(factors);
            s.seeded = true;
        } else {
            s.coeff += coeff;
            s.crat = rat_add(s.crat, crat);
        }
    };
    for (const auto& t : terms) absorb(absorb, t);

    std::vector<ExprPtr> out;
    for (auto& [mkey, s] : slots) {
        if (s.coeff == 0.0) continue;
        if (s.factors.empty()) {
            out.push_back(make_const(s.coeff, s.crat));
        } else if (s.coeff == 1.0 && s.crat == Rationality::rational &&
                   s.factors.size() == 1) {
            out.push_back(s.factors[0]);
        } else {
            std::vector<ExprPtr> kids;
            if (s.coeff != 1.0 || s.crat != Rationality::rational)
                kids.push_back(make_const(s.coeff, s.crat));
            kids.insert(kids.end(), s.factors.begin(), s.factors.end());
            if (kids.size() == 1) {
                out.push_back(kids[0]);
            } else {
                Expr m;
                m.kind = Expr::Kind::mul;
                m.kids = std::move(kids);
                out.push_back(finish(std::move(m)));
            }
        }
    }
    if (out.empty()) return make_const(0);
    if (out.size() == 1) return out[0];
    Expr e;
    e.kind = Expr::Kind::add;
    e.kids = std::move(out);
    return finish(std::move(e));
}

ExprPtr make_mul(std::vector<ExprPtr> factors) {
    double coeff = 1;
    Rationality crat = Rationality::rational;
    struct Base {
        ExprPtr base;
        double exp = 0;
        Rationality erat = Rationality::rational;
    };
    std::map<std::string, Base> bases;

    auto absorb = [&](auto&& self, const ExprPtr& f) -> void {
        if (f->kind == Expr::Kind::mul) {
            for (const auto& k : f->kids) self(self, k);
            return;
        }
        if (f->kind == Expr::Kind::constant) {
            crat = coeff == 0.0 ? crat : rat_mul(crat, f->rat);
            coeff *= f->value;
            return;
        }
        ExprPtr base = f;
        double ex = 1;
        Rationality erat = Rationality::rational;
        if (f->kind == Expr::Kind::pow) {
            base = f->kids[0];
            ex = f->exponent;
            erat = f->exp_rat;
        }
        Base& b = bases[base->key];
        if (!b.base) b.base = base;
        b.erat = b.exp == 0.0 ? erat : rat_add(b.erat, erat);
        b.exp += ex;
    };
    for (const auto& f : factors) absorb(absorb, f);

    if (coeff == 0.0) return make_const(0);
    std::vector<ExprPtr> out;
    for (auto& [key, b] : bases) {
        if (b.exp == 0.0) continue;
        ExprPtr piece = b.exp == 1.0 ? b.base : make_pow(b.base, b.exp, b.erat);
        if (piece->kind == Expr::Kind::constant) {
            crat = rat_mul(crat, piece->rat);
            coeff *= piece->value;
        } else {
            out.push_back(piece);
        }
    }
    if (coeff == 0.0) return make_const(0);
    if (out.empty()) return make_const(coeff, crat);
    if (coeff == 1.0 && crat == Rationality::rational && out.size() == 1)
        return out[0];
    std::vector<ExprPtr> kids;
    if (coeff != 1.0 || crat != Rationality::rational)
        kids.push_back(make_const(coeff, crat));
    kids.insert(kids.end(), out.begin(), out.end());
    if (kids.size() == 1) return kids[0];
    Expr e;
    e.kind = Expr::Kind::mul;
    e.kids = std::move(kids);
    return finish(std::move(e));
}

ExprPtr make_pow(ExprPtr base, double c, Rationality cr) {
    if (c == 0.0) return make_const(1);
    if (base->kind == Expr::Kind::constant) {
        double v = std::pow(base->value, c);
        Rationality r = Rationality::unknown;
        double ip;
        if (base->rat == Rationality::rational && cr == Rationality::rational &&
            std::modf(c, &ip) == 0.0)
            r = Rationality::rational;
        return make_const(v, r);
    }
    if (c == 1.0) return base;
    if (base->kind == Expr::Kind::pow)
        return make_pow(base->kids[0], base->exponent * c,
                        rat_mul(base->exp_rat, cr));
    if (base->kind == Expr::Kind::exp)
        return make_exp(make_mul({make_const(c, cr), base->kids[0]}));
    if (base->kind == Expr::Kind::mul) {
        // distribute over factors; assumes eventual positivity
        std::vector<ExprPtr> pieces;
        pieces.reserve(base->kids.size());
        for (const auto& k : base->kids) pieces.push_back(make_pow(k, c, cr));
        return make_mul(std::move(pieces));
    }
    Expr e;
    e.kind = Expr::Kind::pow;
    e.exponent = c;
    e.exp_rat = cr;
    e.kids = {std::move(base)};
    return finish(std::move(e));
}

ExprPtr make_log(ExprPtr arg) {
    if (arg->kind == Expr::Kind::constant) {
        if (arg->value <= 0.0)
            throw invalid_argument("log of a non-positive constant");
        if (arg->value == 1.0) return make_const(0);
        return make_const(std::log(arg->value), Rationality::unknown);
    }
    if (arg->kind == Expr::Kind::pow)
        return make_mul({make_const(arg->exponent, arg->exp_rat),
                         make_log(arg->kids[0])});
    if (arg->kind == Expr::Kind::exp) return arg->kids[0];
    if (arg->kind == Expr::Kind::mul) {
        std::vector<ExprPtr> terms;
        terms.reserve(arg->kids.size());
        for (const auto& k : arg->kids) terms.push_back(make_log(k));
        return make_add(std::move(terms));
    }
    Expr e;
    e.kind = Expr::Kind::log;
    e.kids = {std::move(arg)};
    return finish(std::move(e));
}

ExprPtr make_exp(ExprPtr arg) {
    if (arg->kind == Expr::Kind::constant) {
        if (arg->value == 0.0) return make_const(1);
        return make_const(std::exp(arg->value), Rationality::unknown);
    }
    if (arg->kind == Expr::Kind::log) return arg->kids[0];
    if (arg->kind == Expr::Kind::mul && arg->kids.size() == 2 &&
        arg->kids[0]->kind == Expr::Kind::constant &&
        arg->kids[1]->kind == Expr::Kind::log)
        return make_pow(arg->kids[1]->kids[0], arg->kids[0]->value,
                        arg->kids[0]->rat);
    if (arg->kind == Expr::Kind::add) {
        std::vector<ExprPtr> pieces;
        pieces.reserve(arg->kids.size());
        for (const auto& k : arg->kids) pieces.push_back(make_exp(k));
        return make_mul(std::move(pieces));
    }
    Expr e;
    e.kind = Expr::Kind::exp;
    e.kids = {std::move(arg)};
    return finish(std::move(e));
}

ExprPtr make_sub(ExprPtr a, ExprPtr b) {
    return make_add({std::move(a), make_mul({make_const(-1), std::move(b)})});
}

ExprPtr make_div(ExprPtr a, ExprPtr b) {
    return make_mul({std::move(a), make_pow(std::move(b), -1.0)});
}

double eval_expr(const Expr& e, double t) {
    switch (e.kind) {
        case Expr::Kind::constant: return e.value;
        case Expr::Kind::var: return t;
        case Expr::Kind::add: {
            double s = 0;
            for (const auto& k : e.kids) s += eval_expr(*k, t);
            return s;
        }
        case Expr::Kind::mul: {
            double p = 1;
            for (const auto& k : e.kids) p *= eval_expr(*k, t);
            return p;
        }
        case Expr::Kind::pow: return std::pow(eval_expr(*e.kids[0], t), e.exponent);
        case Expr::Kind::log: return std::log(eval_expr(*e.kids[0], t));
        case Expr::Kind::exp: return std::exp(eval_expr(*e.kids[0], t));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

ExprPtr differentiate_expr(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Kind::constant: return make_const(0);
        case Expr::Kind::var: return make_const(1);
        case Expr::Kind::add: {
            std::vector<ExprPtr> terms;
            terms.reserve(e->kids.size());
            for (const auto& k : e->kids) terms.push_back(differentiate_expr(k));
            return make_add(std::move(terms));
        }
        case Expr::Kind::mul: {
            std::vector<ExprPtr> terms;
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                std::vector<ExprPtr> fs = e->kids;
                fs[i] = differentiate_expr(e->kids[i]);
                terms.push_back(make_mul(std::move(fs)));
            }
            return make_add(std::move(terms));
        }
        case Expr::Kind::pow:
            return make_mul({make_const(e->exponent, e->exp_rat),
                             make_pow(e->kids[0], e->exponent - 1.0,
                                      rat_add(e->exp_rat, Rationality::rational)),
                             differentiate_expr(e->kids[0])});
        case Expr::Kind::log:
            return make_mul({differentiate_expr(e->kids[0]),
                             make_pow(e->kids[0], -1.0)});
        case Expr::Kind::exp:
            return make_mul({differentiate_expr(e->kids[0]), e});
    }
    throw internal_error("differentiate: unknown node kind");
}

HardyExpr::HardyExpr() : root_(make_const(0)), cache_(std::make_shared<Cache>()) {}

HardyExpr::HardyExpr(ExprPtr root)
    : root_(std::move(root)), cache_(std::make_shared<Cache>()) {
    if (!root_) throw invalid_argument("HardyExpr: null expression");
}

bool HardyExpr::is_zero() const { return is_const(root_, 0.0); }

HardyExpr HardyExpr::derivative(int order) const {
    if (order < 0) throw invalid_argument("derivative: negative order");
    if (order == 0) return *this;
    std::lock_guard<std::mutex> lk(cache_->mu);
    while (static_cast<int>(cache_->derivs.size()) < order) {
        const ExprPtr& prev =
            cache_->derivs.empty() ? root_ : cache_->derivs.back();
        cache_->derivs.push_back(differentiate_expr(prev));
    }
    return HardyExpr(cache_->derivs[static_cast<std::size_t>(order - 1)]);
}

namespace {

void render(const Expr& e, std::ostream& os, int parent_prec) {
    // precedence: add 1, mul 2, pow 3, atoms 4
    switch (e.kind) {
        case Expr::Kind::constant: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.12g", e.value);
            if (e.rat == Rationality::irrational)
                os << "irr(" << buf << ')';
            else
                os << buf;
            break;
        }
        case Expr::Kind::var: os << 't'; break;
        case Expr::Kind::add: {
            if (parent_prec > 1) os << '(';
            for (std::size_t i = 0; i < e.kids.size(); ++i) {
                if (i) os << " + ";
                render(*e.kids[i], os, 1);
            }
            if (parent_prec > 1) os << ')';
            break;
        }
        case Expr::Kind::mul: {
            if (parent_prec > 2) os << '(';
            for (std::size_t i = 0; i < e.kids.size(); ++i) {
                if (i) os << '*';
                render(*e.kids[i], os, 2);
            }
            if (parent_prec > 2) os << ')';
            break;
        }
        case Expr::Kind::pow: {
            render(*e.kids[0], os, 4);
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.12g", e.exponent);
            os << '^';
            if (e.exponent < 0) os << '(' << buf << ')';
            else os << buf;
            break;
        }
        case Expr::Kind::log:
            os << "log(";
            render(*e.kids[0], os, 0);
            os << ')';
            break;
        case Expr::Kind::exp:
            os << "exp(";
            render(*e.kids[0], os, 0);
            os << ')';
            break;
    }
}

} // namespace

std::string HardyExpr::str() const {
    std::ostringstream os;
    render(*root_, os, 0);
    return os.str();
}

// ---------------------------------------------------------------------------
// parser

namespace {

struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& what) {
        throw invalid_argument("parse error at position " + std::to_string(pos) +
                               ": " + what);
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (start == pos) fail("expected identifier");
        return s.substr(start, pos - start);
    }

    double number() {
        skip_ws();
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("expected number");
        pos += static_cast<std::size_t>(end - begin);
        return v;
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        std::vector<ExprPtr> terms{lhs};
        for (;;) {
            char c = peek();
            if (c == '+') {
                ++pos;
                terms.push_back(term());
            } else if (c == '-') {
                ++pos;
                terms.push_back(make_mul({make_const(-1), term()}));
            } else {
                break;
            }
        }
        return terms.size() == 1 ? terms[0] : make_add(std::move(terms));
    }

    ExprPtr term() {
        ExprPtr e = unary();
        for (;;) {
            char c = peek();
            if (c == '*') {
                ++pos;
                e = make_mul({e, unary()});
            } else if (c == '/') {
                ++pos;
                e = make_div(e, unary());
            } else {
                break;
            }
        }
        return e;
    }

    ExprPtr unary() {
        if (eat('-')) return make_mul({make_const(-1), unary()});
        return power();
    }

    ExprPtr power() {
        ExprPtr base = atom();
        if (!eat('^')) return base;
        ExprPtr ex = eat('-') ? make_mul({make_const(-1), atom()}) : atom();
        if (ex->kind != Expr::Kind::constant)
            fail("exponent must reduce to a constant");
        return make_pow(std::move(base), ex->value, ex->rat);
    }

    ExprPtr atom() {
        char c = peek();
        if (c == '(') {
            ++pos;
            ExprPtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return make_const(number());
        std::string name = ident();
        if (name == "t") return make_var();
        if (name == "log" || name == "exp") {
            if (!eat('(')) fail("expected '(' after " + name);
            ExprPtr arg = expr();
            if (!eat(')')) fail("expected ')'");
            return name == "log" ? make_log(std::move(arg))
                                 : make_exp(std::move(arg));
        }
        if (name == "irr") {
            if (!eat('(')) fail("expected '(' after irr");
            double v;
            char n = peek();
            if (std::isdigit(static_cast<unsigned char>(n)) || n == '.') {
                v = number();
            } else {
                std::string w = ident();
                if (w == "sqrt2") v = 1.41421356237309504880;
                else if (w == "sqrt3") v = 1.73205080756887729353;
                else if (w == "sqrt5") v = 2.23606797749978969641;
                else if (w == "pi") v = 3.14159265358979323846;
                else if (w == "e") v = 2.71828182845904523536;
                else if (w == "golden") v = 1.61803398874989484820;
                else fail("unknown irrational name: " + w);
            }
            if (!eat(')')) fail("expected ')'");
            return make_const(v, Rationality::irrational);
        }
        fail("unexpected token: " + name);
    }
};

} // namespace

HardyExpr HardyExpr::parse(const std::string& text) {
    Parser p(text);
    ExprPtr e = p.expr();
    p.skip_ws();
    if (p.pos != text.size())
        throw invalid_argument("parse error: trailing input at position " +
                               std::to_string(p.pos));
    return HardyExpr(std::move(e));
}

// ---------------------------------------------------------------------------
// decomposition

namespace {

struct PolyTerm {
    int degree = 0;
    double coeff = 0;
    Rationality rat = Rationality::rational;
};

// recognizes c * t^k with an integer k >= 0; anything else is non-polynomial
std::optional<PolyTerm> as_poly_term(const ExprPtr& term) {
    PolyTerm pt{0, 1.0, Rationality::rational};
    auto absorb_factor = [&](const ExprPtr& f) -> bool {
        if (f->kind == Expr::Kind::constant) {
            pt.coeff *= f->value;
            pt.rat = rat_mul(pt.rat, f->rat);
            return true;
        }
        if (f->kind == Expr::Kind::var) {
            pt.degree += 1;
            return true;
        }
        if (f->kind == Expr::Kind::pow && f->kids[0]->kind == Expr::Kind::var) {
            double ip;
            if (f->exponent >= 1.0 && std::modf(f->exponent, &ip) == 0.0 &&
                f->exp_rat == Rationality::rational) {
                pt.degree += static_cast<int>(f->exponent);
                return true;
            }
        }
        return false;
    };
    if (term->kind == Expr::Kind::mul) {
        for (const auto& k : term->kids)
            if (!absorb_factor(k)) return std::nullopt;
        return pt;
    }
    if (absorb_factor(term)) return pt;
    return std::nullopt;
}

} // namespace

Decomposition decompose(const HardyExpr& e) {
    std::vector<ExprPtr> terms;
    if (e.node()->kind == Expr::Kind::add)
        terms = e.node()->kids;
    else
        terms = {e.node()};

    std::vector<ExprPtr> g_terms, p_terms, q_terms;
    for (const auto& t : terms) {
        auto pt = as_poly_term(t);
        if (!pt) {
            g_terms.push_back(t);
            continue;
        }
        if (pt->degree >= 1 && pt->rat == Rationality::unknown)
            throw marker_required(
                "decompose: polynomial coefficient needs a rationality marker "
                "(wrap it in irr(...) or use a rational literal)");
        if (pt->degree >= 1 && pt->rat == Rationality::irrational)
            p_terms.push_back(t);
        else
            q_terms.push_back(t);
    }
    Decomposition d;
    d.g = HardyExpr(make_add(std::move(g_terms)));
    d.p = HardyExpr(make_add(std::move(p_terms)));
    d.q = HardyExpr(make_add(std::move(q_terms)));
    return d;
}

// ---------------------------------------------------------------------------
// growth classification

namespace {

constexpr int kSchedulePoints = 4;

bool monotone(const double* v, int n) {
    bool up = true, down = true;
    for (int i = 1; i < n; ++i) {
        if (v[i] < v[i - 1]) up = false;
        if (v[i] > v[i - 1]) down = false;
    }
    return up || down;
}

} // namespace

GrowthClass classify(const HardyExpr& e) {
    GrowthClass gc;
    HardyExpr d = e.derivative();
    if (d.is_zero()) {
        // constant function
        gc.degree = 1;
        gc.sub_linear = true;
        gc.sub_fractional = false;
        gc.strongly_non_polynomial = false;
        gc.condition = ConditionTag::essentially_rational_poly;
        return gc;
    }

    double alpha[kSchedulePoints];
    double value[kSchedulePoints];
    for (int i = 0; i < kSchedulePoints; ++i) {
        const double t = kGrowthSchedule[i];
        value[i] = e.eval(t);
        const double dv = d.eval(t);
        if (!std::isfinite(value[i]) || !std::isfinite(dv) ||
            std::abs(value[i]) < 1e-300)
            throw classification_unstable(
                "classify: function not evaluable on the growth schedule");
        alpha[i] = t * dv / value[i];
    }

    const double range = *std::max_element(alpha, alpha + kSchedulePoints) -
                         *std::min_element(alpha, alpha + kSchedulePoints);
    if (!monotone(alpha, kSchedulePoints) && range > 0.05)
        throw classification_unstable(
            "classify: log-derivative trend is not monotone on the schedule");
    if (range > 2.0)
        throw classification_unstable(
            "classify: log-derivative drifts too fast on the schedule");

    const double a_final = alpha[kSchedulePoints - 1];
    gc.degree = std::max(1, static_cast<int>(std::ceil(a_final - 0.01)));
    gc.sub_linear = a_final < 0.99;

    bool strictly_down = true;
    for (int i = 1; i < kSchedulePoints; ++i)
        if (alpha[i] >= alpha[i - 1]) strictly_down = false;
    gc.sub_fractional = strictly_down && a_final > 0.0 && a_final < 0.1;

    long long m = std::llround(a_final);
    if (m < 0) m = 0;
    if (std::abs(a_final - static_cast<double>(m)) > 0.05) {
        gc.strongly_non_polynomial = true;
    } else {
        // alpha sits near an integer; compare against t^m directly
        double ratio[kSchedulePoints];
        for (int i = 0; i < kSchedulePoints; ++i)
            ratio[i] = std::abs(value[i]) /
                       std::pow(kGrowthSchedule[i], static_cast<double>(m));
        const double rmax = *std::max_element(ratio, ratio + kSchedulePoints);
        const double rmin = *std::min_element(ratio, ratio + kSchedulePoints);
        gc.strongly_non_polynomial = !(rmax / rmin < 10.0);
    }

    // condition tag from the decomposition
    Decomposition dec = decompose(e);
    bool p_nonconstant = false;
    if (!dec.p.is_zero()) p_nonconstant = !dec.p.derivative().is_zero();
    if (p_nonconstant) {
        gc.condition = ConditionTag::far_from_rational_polys;
    } else if (dec.g.is_zero()) {
        gc.condition = ConditionTag::essentially_rational_poly;
    } else {
        double gv[kSchedulePoints], rho[kSchedulePoints];
        for (int i = 0; i < kSchedulePoints; ++i) {
            gv[i] = std::abs(dec.g.eval(kGrowthSchedule[i]));
            rho[i] = gv[i] / std::log(kGrowthSchedule[i]);
        }
        const bool rho_up = rho[3] > rho[2] && rho[2] > rho[1] && rho[1] > rho[0];
        if (rho_up && rho[3] > 2.0 * rho[0] && rho[3] > 10.0)
            gc.condition = ConditionTag::far_from_rational_polys;
        else if (gv[3] < 0.5 * gv[0] && gv[3] < 0.1)
            gc.condition = ConditionTag::essentially_rational_poly;
        else
            gc.condition = ConditionTag::neither;
    }
    return gc;
}

// ---------------------------------------------------------------------------
// Taylor degree and window selection

namespace {

constexpr double kDeltaMin = 0.01;
constexpr double kExponentCap = 0.99; // L(t) must stay below t^(1-eps)
constexpr double kHugeExponent = 1e9;

// log-log slope of |a^{(k)}(t)|^{-1/k} over the schedule; the slope form
// cancels constant prefactors that would otherwise mask nearby exponents
// at desk scale. Returns kHugeExponent for an identically tiny derivative.
double chain_exponent(const HardyExpr& a, int k, bool* stable) {
    HardyExpr dk = a.derivative(k);
    if (stable) *stable = true;
    double lv[kSchedulePoints];
    for (int i = 0; i < kSchedulePoints; ++i) {
        double v = std::abs(dk.eval(kGrowthSchedule[i]));
        if (!std::isfinite(v)) {
            if (stable) *stable = false;
            return 0.0;
        }
        if (v < 1e-280) return kHugeExponent;
        lv[i] = -std::log(v) / static_cast<double>(k);
    }
    const double span = std::log(kGrowthSchedule[kSchedulePoints - 1]) -
                        std::log(kGrowthSchedule[0]);
    const double slope = (lv[kSchedulePoints - 1] - lv[0]) / span;
    if (stable) {
        for (int i = 1; i < kSchedulePoints; ++i) {
            const double sub =
                (lv[i] - lv[i - 1]) /
                (std::log(kGrowthSchedule[i]) - std::log(kGrowthSchedule[i - 1]));
            if (std::abs(sub - slope) > 0.05) *stable = false;
        }
    }
    return slope;
}

} // namespace

KLSelection select_k_and_L(const std::vector<HardyExpr>& fns, double c,
                           std::optional<double> L_exponent) {
    if (fns.empty()) throw invalid_argument("select_k_and_L: no functions");
    if (c <= 0.0 || c >= 1.0)
        throw invalid_argument("select_k_and_L: need 0 < c < 1");

    const std::size_t n = fns.size();
    // exponent tables, filled lazily
    std::vector<std::vector<double>> exps(n);
    std::vector<std::vector<bool>> ok(n);
    auto exp_at = [&](std::size_t i, int k) -> double {
        while (static_cast<int>(exps[i].size()) <= k) {
            bool stable = false;
            double ex = chain_exponent(fns[i], static_cast<int>(exps[i].size()) + 1,
                                       &stable);
            exps[i].push_back(ex);
            ok[i].push_back(stable || ex == kHugeExponent);
        }
        return exps[i][static_cast<std::size_t>(k - 1)];
    };
    auto exp_ok = [&](std::size_t i, int k) -> bool {
        exp_at(i, k);
        return ok[i][static_cast<std::size_t>(k - 1)];
    };

    KLSelection sel;
    sel.k.assign(n, 0);

    double lambda;
    if (L_exponent) {
        lambda = *L_exponent;
        if (lambda <= c || lambda > kExponentCap)
            throw invalid_argument("select_k_and_L: L exponent must lie in (c, 1)");
    } else {
        // start each function at the least degree whose bracket straddles c,
        // then widen degrees until a common window exists
        std::vector<int> k(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            int kk = 1;
            for (; kk <= kTaylorDegreeCap; ++kk) {
                if (!exp_ok(i, kk) || !exp_ok(i, kk + 1)) continue;
                const double lo = exp_at(i, kk);
                const double hi = std::min(exp_at(i, kk + 1), kExponentCap);
                if (hi <= lo + 2 * kDeltaMin) continue;
                if ((std::max(lo, c) + hi) / 2 > c + kDeltaMin &&
                    hi > std::max(lo, c) + 2 * kDeltaMin)
                    break;
            }
            if (kk > kTaylorDegreeCap)
                throw selection_failure(
                    "select_k_and_L: no admissible Taylor degree within the cap");
            k[i] = kk;
        }
        for (int iter = 0;; ++iter) {
            if (iter > 4 * kTaylorDegreeCap)
                throw selection_failure(
                    "select_k_and_L: no common window across the functions");
            double lo = -kHugeExponent, hi = kExponentCap;
            std::size_t tight = 0;
            for (std::size_t i = 0; i < n; ++i) {
                lo = std::max(lo, exp_at(i, k[i]));
                const double up = std::min(exp_at(i, k[i] + 1), kExponentCap);
                if (up < hi) {
                    hi = up;
                    tight = i;
                }
            }
            // geometric mean of the bracketing chain functions, nudged up if
            // it fails to clear t^c
            if (hi > std::max(lo, c) + 2 * kDeltaMin) {
                lambda = (lo + hi) / 2;
                if (lambda <= c + kDeltaMin)
                    lambda = (std::max(lo, c) + hi) / 2;
                break;
            }
            if (k[tight] >= kTaylorDegreeCap)
                throw selection_failure(
                    "select_k_and_L: no common window across the functions");
            ++k[tight];
        }
    }

    // certify: for each function take the least degree k with
    // |a^{(k)}|^{-1/k} strongly below L and L strongly below
    // |a^{(k+1)}|^{-1/(k+1)}, margin at least kDeltaMin
    double delta = lambda - c;
    for (std::size_t i = 0; i < n; ++i) {
        int chosen = 0;
        double best_margin = 0;
        for (int kk = 1; kk <= kTaylorDegreeCap; ++kk) {
            if (!exp_ok(i, kk) || !exp_ok(i, kk + 1)) continue;
            const double m1 = lambda - exp_at(i, kk);
            const double m2 = exp_at(i, kk + 1) - lambda;
            const double m = std::min(m1, m2);
            if (m >= kDeltaMin) {
                chosen = kk;
                best_margin = m;
                break;
            }
        }
        if (chosen == 0)
            throw selection_failure(
                "select_k_and_L: cannot certify the derivative chain for "
                "function " +
                std::to_string(i) + " at L = t^" + fmt_double(lambda));
        sel.k[i] = chosen;
        delta = std::min(delta, best_margin);
    }
    if (delta < kDeltaMin)
        throw selection_failure("select_k_and_L: certified margin below 0.01");
    sel.L_exponent = lambda;
    sel.delta = delta;
    return sel;
}

// ---------------------------------------------------------------------------
// Taylor models

TaylorModel taylor_model(const HardyExpr& e, std::uint64_t N, std::uint64_t L,
                         int k) {
    if (k < 1 || k > kTaylorDegreeCap)
        throw invalid_argument("taylor_model: degree out of range");
    if (N == 0 || L == 0)
        throw invalid_argument("taylor_model: need positive base and length");
    TaylorModel m;
    m.base = N;
    m.length = L;
    m.degree = k;
    const double Nd = static_cast<double>(N);
    double fact = 1;
    for (int j = 0; j <= k; ++j) {
        if (j > 0) fact *= j;
        m.coeffs.push_back(e.derivative(j).eval(Nd) / fact);
    }
    fact *= k + 1;
    m.remainder_bound = std::abs(e.derivative(k + 1).eval(Nd)) / fact *
                        std::pow(static_cast<double>(L), k + 1);
    return m;
}

double TaylorModel::eval(double h) const {
    double acc = 0;
    for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * h + coeffs[j];
    return acc;
}

double TaylorModel::eval_frac(double h) const {
    // valid for integer h: dropping integer parts inside the Horner loop
    // only shifts the value by an integer
    long double acc = 0;
    for (std::size_t j = coeffs.size(); j-- > 0;) {
        acc = acc * static_cast<long double>(h) +
              static_cast<long double>(coeffs[j]);
        acc -= std::floor(acc);
    }
    double r = static_cast<double>(acc);
    if (r >= 1.0) r -= 1.0;
    if (r < 0.0) r += 1.0;
    return r;
}

// ---------------------------------------------------------------------------
// tempered functions

TemperedReport tempered_check(const HardyExpr& e, double c) {
    TemperedReport r;
    HardyExpr d = e.derivative();
    if (d.is_zero()) {
        r.note = "constant function; not tempered";
        return r;
    }
    double alpha[kSchedulePoints];
    for (int i = 0; i < kSchedulePoints; ++i) {
        const double t = kGrowthSchedule[i];
        const double v = e.eval(t);
        const double dv = d.eval(t);
        if (!std::isfinite(v) || !std::isfinite(dv) || std::abs(v) < 1e-300) {
            r.note = "function not evaluable on the growth schedule";
            return r;
        }
        alpha[i] = t * dv / v;
    }
    const double range = *std::max_element(alpha, alpha + kSchedulePoints) -
                         *std::min_element(alpha, alpha + kSchedulePoints);
    r.alpha = alpha[kSchedulePoints - 1];
    r.limit_converged = range < 0.02;
    if (!r.limit_converged) {
        r.note = "log-derivative limit did not settle on the schedule";
        return r;
    }
    if (r.alpha <= 0.0) {
        r.note = "non-positive growth exponent";
        return r;
    }
    const int i0 = static_cast<int>(std::floor(r.alpha));
    if (std::abs(r.alpha - std::round(r.alpha)) <= 0.02) {
        r.note = "growth exponent sits at an integer";
        return r;
    }
    // g^{(i0+1)} must decay
    HardyExpr di = e.derivative(i0 + 1);
    double dv0 = std::abs(di.eval(kGrowthSchedule[0]));
    double dv3 = std::abs(di.eval(kGrowthSchedule[kSchedulePoints - 1]));
    if (!(dv3 < dv0)) {
        r.note = "derivative of order degree+1 does not decay";
        return r;
    }
    r.in_T = true;
    r.degree = i0;
    r.fejer = i0 == 0;

    // least k with t^c strongly below |g^{(k)}|^{-1/k} strongly below
    // |g^{(k+1)}|^{-1/(k+1)}
    for (int k = 1; k <= kTaylorDegreeCap; ++k) {
        bool st1 = false, st2 = false;
        const double e1 = chain_exponent(e, k, &st1);
        const double e2 = chain_exponent(e, k + 1, &st2);
        if (!(st1 || e1 == kHugeExponent) || !(st2 || e2 == kHugeExponent))
            continue;
        const double m = std::min(e1 - c, e2 - e1);
        if (m >= kDeltaMin) {
            r.k_for_c = k;
            r.delta = m;
            break;
        }
    }
    if (r.k_for_c < 0) r.note = "no certified Taylor degree for the requested c";
    return r;
}

} // namespace hpl
