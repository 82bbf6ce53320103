#include <cctype>
#include <charconv>
#include <optional>

#include "pkmech/expr.hpp"

namespace pkmech {

namespace {

std::optional<Func> lookup_function(std::string_view name) {
    for (Func f : {Func::Sin, Func::Cos, Func::Exp, Func::Ln, Func::Sinh, Func::Cosh}) {
        if (func_name(f) == name) return f;
    }
    return std::nullopt;
}

// Recursive descent over
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | '+' unary | power
//   power   := primary ('^' unary)?
//   primary := number | coordinate | function '(' sum ')' | '(' sum ')'
// so that -x1^2 parses as -(x1^2) and x1^-1 is accepted.
class Parser {
public:
    Parser(std::string_view src, int n) : src_(src), n_(n) {}

    Expr run() {
        Expr e = sum();
        skip_space();
        if (pos_ != src_.size()) fail(ParseError::Kind::Syntax, "unexpected '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(ParseError::Kind kind, const std::string& msg, std::optional<std::size_t> at = {}) {
        throw ParseError(kind, at.value_or(pos_), msg);
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr sum() {
        Expr e = product();
        std::vector<Expr> terms{e};
        while (true) {
            if (accept('+')) {
                terms.push_back(product());
            } else if (accept('-')) {
                terms.push_back(Expr::make_mul({Expr(-1.0), product()}));
            } else {
                break;
            }
        }
        return Expr::make_add(std::move(terms));
    }

    Expr product() {
        Expr e = unary();
        while (true) {
            if (accept('*')) {
                Expr rhs = unary();
                e = Expr::make_mul({e, rhs});
            } else if (accept('/')) {
                Expr rhs = unary();
                e = Expr::make_div(e, rhs);
            } else {
                break;
            }
        }
        return e;
    }

    Expr unary() {
        if (accept('-')) {
            Expr operand = unary();
            if (operand.is_const()) return Expr(-operand.value());
            return Expr::make_mul({Expr(-1.0), operand});
        }
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (accept('^')) return Expr::make_pow(base, unary());
        return base;
    }

    Expr primary() {
        skip_space();
        if (pos_ >= src_.size()) fail(ParseError::Kind::Syntax, "unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = sum();
            if (!accept(')')) fail(ParseError::Kind::Syntax, "expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(ParseError::Kind::Syntax, "unexpected '" + std::string(1, c) + "'");
    }

    Expr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                digits();
            } else {
                pos_ = save;
            }
        }
        double v = 0.0;
        auto r = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (r.ec != std::errc() || r.ptr != src_.data() + pos_) {
            fail(ParseError::Kind::Syntax, "malformed number", start);
        }
        return Expr(v);
    }

    Expr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = src_.substr(start, pos_ - start);
        if (auto f = lookup_function(name)) return function_call(*f, name, start);

        if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'y') && name[1] != '0') {
            int index = 0;
            auto r = std::from_chars(name.data() + 1, name.data() + name.size(), index);
            if (r.ec == std::errc() && r.ptr == name.data() + name.size() && index >= 1 && index <= n_) {
                return Expr(Variable{name[0] == 'x' ? CoordKind::X : CoordKind::Y, index});
            }
        }
        fail(ParseError::Kind::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'", start);
    }

    Expr function_call(Func f, std::string_view name, std::size_t start) {
        if (!accept('(')) {
            fail(ParseError::Kind::Arity, "function '" + std::string(name) + "' expects one argument", start);
        }
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == ')') {
            fail(ParseError::Kind::Arity, "function '" + std::string(name) + "' expects one argument", start);
        }
        Expr arg = sum();
        if (accept(',')) {
            fail(ParseError::Kind::Arity, "function '" + std::string(name) + "' expects one argument", start);
        }
        if (!accept(')')) fail(ParseError::Kind::Syntax, "expected ')'");
        return Expr::make_call(f, arg);
    }

    std::string_view src_;
    int n_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view source, int n) { return Parser(source, n).run(); }

}  // namespace pkmech
