#ifndef PKMECH_EXPR_HPP
#define PKMECH_EXPR_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pkmech {

/// Coordinate family. x-type coordinates span the +1 eigendistribution of the
/// model product structure, y-type the -1 one.
enum class CoordKind { X, Y };

/// A chart coordinate x<index> or y<index>, index is 1-based.
struct Variable {
    CoordKind kind = CoordKind::X;
    int index = 1;

    /// Position in the coordinate vector (x1..xn, y1..yn) of a chart with n pairs.
    std::size_t slot(int n) const {
        return static_cast<std::size_t>((kind == CoordKind::X ? 0 : n) + index - 1);
    }
    std::string name() const;

    friend bool operator==(const Variable&, const Variable&) = default;
};

enum class Func { Sin, Cos, Exp, Ln, Sinh, Cosh };

std::string_view func_name(Func f);

/// Thrown by evaluate() on poles, logarithms of non-positive numbers and
/// non-finite intermediate results.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by evaluate() when the point does not assign a free variable.
class MissingAssignment : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    enum class Kind { Syntax, UnknownIdentifier, Arity };

    ParseError(Kind kind, std::size_t offset, const std::string& message);

    Kind kind() const noexcept { return kind_; }
    /// Byte offset into the source where the problem was detected.
    std::size_t offset() const noexcept { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

struct Node;
class Expr;

namespace detail {
Expr wrap(std::shared_ptr<const Node> node);
}  // namespace detail

/// Immutable scalar expression over chart coordinates. Copies share the
/// underlying tree, so an Expr can be passed between threads freely.
class Expr {
public:
    enum class Kind { Const, Var, Add, Mul, Div, Pow, Call };

    Expr();  // the constant 0
    Expr(double value);  // NOLINT(google-explicit-constructor)
    Expr(Variable v);    // NOLINT(google-explicit-constructor)

    Kind kind() const;
    bool is_const() const { return kind() == Kind::Const; }
    bool is_const(double value) const;
    double value() const;           // Const only
    const Variable& var() const;    // Var only
    Func func() const;              // Call only
    std::span<const Expr> args() const;

    /// Structural identity (same tree shape and leaves); not mathematical equality.
    bool same(const Expr& other) const;

    std::string str() const;

    /// Raw node builders; they do no folding at all. Prefer the operators below.
    static Expr make_add(std::vector<Expr> terms);
    static Expr make_mul(std::vector<Expr> factors);
    static Expr make_div(Expr num, Expr den);
    static Expr make_pow(Expr base, Expr exponent);
    static Expr make_call(Func f, Expr arg);

private:
    friend Expr detail::wrap(std::shared_ptr<const Node> node);
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

// Folding constructors: constant arithmetic and the 0/1 identities are applied
// eagerly so derivative trees stay small. Full like-term collection is simplify().
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, const Expr& exponent);
Expr call(Func f, const Expr& arg);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr sinh(const Expr& e);
Expr cosh(const Expr& e);

Expr x(int index);
Expr y(int index);

/// Total order on trees used for canonical ordering of sums and products.
int compare(const Expr& a, const Expr& b);

/// Largest coordinate index referenced (0 for closed expressions).
int max_index(const Expr& e);
/// True when no variable occurs.
bool is_closed(const Expr& e);

Expr differentiate(const Expr& e, const Variable& v);

/// Constant folding, 0/1 identities, flattening, like-term collection in sums
/// and like-base collection in products. Quotients become negative powers.
Expr simplify(const Expr& e);

/// Evaluate at a point given as coordinates (x1..xn, y1..yn); n = point.size()/2.
double evaluate(const Expr& e, std::span<const double> point);

/// Infix text in the grammar accepted by parse().
std::string to_string(const Expr& e);

/// Parse infix text; identifiers x<k>, y<k> must satisfy 1 <= k <= n.
Expr parse(std::string_view source, int n);

}  // namespace pkmech

#endif  // PKMECH_EXPR_HPP
