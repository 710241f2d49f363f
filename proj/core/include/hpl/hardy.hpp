#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace hpl {

enum class Rationality { rational, irrational, unknown };

// Expression node for logarithmico-exponential functions: constants
// (rationality-marked), the variable t, n-ary sums and products, real powers,
// log and exp. Nodes are immutable and shared.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { constant, var, add, mul, pow, log, exp };
    Kind kind;
    double value = 0;                    // constant
    Rationality rat = Rationality::rational;
    double exponent = 1;                 // pow
    Rationality exp_rat = Rationality::rational;
    std::vector<ExprPtr> kids;           // add/mul children, pow/log/exp argument
    std::string key;                     // canonical form, used for like-term merging
};

// Smart constructors; these fold constants, flatten sums/products and merge
// like terms so repeated differentiation does not blow up the tree.
ExprPtr make_const(double v, Rationality r = Rationality::rational);
ExprPtr make_var();
ExprPtr make_add(std::vector<ExprPtr> terms);
ExprPtr make_mul(std::vector<ExprPtr> factors);
ExprPtr make_pow(ExprPtr base, double c, Rationality cr = Rationality::rational);
ExprPtr make_log(ExprPtr arg);
ExprPtr make_exp(ExprPtr arg);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);

double eval_expr(const Expr& e, double t);
ExprPtr differentiate_expr(const ExprPtr& e);

// Growth comparisons are decided on this fixed evaluation schedule with a
// monotone-trend vote; unstable trends raise classification_unstable.
inline constexpr double kGrowthSchedule[4] = {1e4, 1e6, 1e8, 1e10};

class HardyExpr {
public:
    HardyExpr(); // the zero function
    explicit HardyExpr(ExprPtr root);

    static HardyExpr parse(const std::string& text);

    double operator()(double t) const { return eval_expr(*root_, t); }
    double eval(double t) const { return eval_expr(*root_, t); }

    // exact symbolic derivative of the given order, cached on the expression
    HardyExpr derivative(int order = 1) const;

    const ExprPtr& node() const { return root_; }
    const std::string& key() const { return root_->key; }
    std::string str() const;
    bool is_zero() const;

private:
    ExprPtr root_;
    struct Cache {
        std::mutex mu;
        std::vector<ExprPtr> derivs; // derivs[j] = (j+1)-th derivative
    };
    std::shared_ptr<Cache> cache_;
};

enum class ConditionTag { far_from_rational_polys, essentially_rational_poly, neither };

struct GrowthClass {
    int degree = 1;                      // least k with a(t) << t^k
    bool sub_linear = false;
    bool sub_fractional = false;
    bool strongly_non_polynomial = false;
    ConditionTag condition = ConditionTag::neither;
};

GrowthClass classify(const HardyExpr& e);

struct Decomposition {
    HardyExpr g; // strongly non-polynomial part (or zero)
    HardyExpr p; // polynomial part with an irrational-marked coefficient
    HardyExpr q; // polynomial part with rational coefficients
};

Decomposition decompose(const HardyExpr& e);

struct KLSelection {
    double L_exponent = 0;   // L(t) = t^L_exponent
    std::vector<int> k;      // Taylor degree per input function
    double delta = 0;        // certified strong-domination margin
};

inline constexpr int kTaylorDegreeCap = 40;

// Picks L(t) = t^lambda with t^c < L(t) << t^{1-eps} and degrees k_i so the
// derivative-growth chain holds for each function, certified on the schedule
// with margin delta >= 0.01. Pass L_exponent to pin L instead of deriving it.
KLSelection select_k_and_L(const std::vector<HardyExpr>& fns, double c,
                           std::optional<double> L_exponent = std::nullopt);

struct TaylorModel {
    std::uint64_t base = 0;
    std::uint64_t length = 0;
    int degree = 0;
    std::vector<double> coeffs;    // c_j = a^{(j)}(N) / j!
    double remainder_bound = 0;    // |a^{(k+1)}(N)| / (k+1)! * L^{k+1}

    double eval(double h) const;
    double eval_frac(double h) const; // {eval(h)} via long-double Horner
};

TaylorModel taylor_model(const HardyExpr& e, std::uint64_t N, std::uint64_t L, int k);

struct TemperedReport {
    bool in_T = false;
    bool fejer = false;
    int degree = 0;          // d_g
    double alpha = 0;        // limit of t g'(t)/g(t)
    bool limit_converged = false;
    int k_for_c = -1;        // least k certified for the requested c, -1 if none
    double delta = 0;
    std::string note;
};

TemperedReport tempered_check(const HardyExpr& e, double c = 0.5);

} // namespace hpl
