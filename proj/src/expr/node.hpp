#ifndef PKMECH_SRC_EXPR_NODE_HPP
#define PKMECH_SRC_EXPR_NODE_HPP

#include <vector>

#include "pkmech/expr.hpp"

namespace pkmech {

struct Node {
    Expr::Kind kind = Expr::Kind::Const;
    double value = 0.0;
    Variable var;
    Func func = Func::Sin;
    std::vector<Expr> args;
};

}  // namespace pkmech

#endif  // PKMECH_SRC_EXPR_NODE_HPP
