#include "osgrf/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace osgrf {

struct Expression::Node {
    enum class Op { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
    Op op = Op::Number;
    double value = 0.0;
    int variable = 0;
    std::string function;
    std::vector<std::shared_ptr<const Node>> args;

    [[nodiscard]] double eval(std::span<const double> vars) const {
        switch (op) {
            case Op::Number: return value;
            case Op::Variable:
                if (static_cast<std::size_t>(variable) > vars.size()) {
                    throw std::out_of_range("expression variable t" + std::to_string(variable) +
                                            " exceeds point dimension " +
                                            std::to_string(vars.size()));
                }
                return vars[static_cast<std::size_t>(variable - 1)];
            case Op::Neg: return -args[0]->eval(vars);
            case Op::Add: return args[0]->eval(vars) + args[1]->eval(vars);
            case Op::Sub: return args[0]->eval(vars) - args[1]->eval(vars);
            case Op::Mul: return args[0]->eval(vars) * args[1]->eval(vars);
            case Op::Div: return args[0]->eval(vars) / args[1]->eval(vars);
            case Op::Pow: return std::pow(args[0]->eval(vars), args[1]->eval(vars));
            case Op::Call: return call(vars);
        }
        return 0.0;
    }

    [[nodiscard]] double call(std::span<const double> vars) const {
        const double a = args[0]->eval(vars);
        if (args.size() == 2) {
            const double b = args[1]->eval(vars);
            if (function == "atan2") return std::atan2(a, b);
            if (function == "pow") return std::pow(a, b);
            if (function == "min") return std::min(a, b);
            return std::max(a, b);
        }
        if (function == "abs") return std::abs(a);
        if (function == "sqrt") return std::sqrt(a);
        if (function == "exp") return std::exp(a);
        if (function == "log") return std::log(a);
        if (function == "sin") return std::sin(a);
        if (function == "cos") return std::cos(a);
        if (function == "tan") return std::tan(a);
        return std::atan(a);
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

int arity(const std::string& name) {
    static const char* unary[] = {"abs", "sqrt", "exp", "log", "sin", "cos", "tan", "atan"};
    static const char* binary[] = {"atan2", "pow", "min", "max"};
    for (const char* u : unary) {
        if (name == u) return 1;
    }
    for (const char* b : binary) {
        if (name == b) return 2;
    }
    return 0;
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr parse() {
        NodePtr n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

    int max_variable = 0;

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ExpressionError(msg, pos_); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr make(Op op, std::vector<NodePtr> args) {
        auto n = std::make_shared<Expression::Node>();
        n->op = op;
        n->args = std::move(args);
        return n;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Op::Add, {lhs, term()});
            } else if (accept('-')) {
                lhs = make(Op::Sub, {lhs, term()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Op::Mul, {lhs, unary()});
            } else if (accept('/')) {
                lhs = make(Op::Div, {lhs, unary()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Op::Neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Op::Pow, {base, unary()});
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (accept('(')) {
            NodePtr inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        double v = 0.0;
        const char* begin = s_.data() + pos_;
        auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
        if (ec != std::errc()) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::Number;
        n->value = v;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                    s_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name = s_.substr(start, pos_ - start);
        auto n = std::make_shared<Expression::Node>();
        if (name == "pi" || name == "e") {
            n->op = Op::Number;
            n->value = name == "pi" ? std::numbers::pi : std::numbers::e;
            return n;
        }
        if (name.size() >= 2 && name[0] == 't' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            const int index = std::stoi(name.substr(1));
            if (index < 1) {
                pos_ = start;
                fail("variables are numbered from t1");
            }
            n->op = Op::Variable;
            n->variable = index;
            max_variable = std::max(max_variable, index);
            return n;
        }
        const int k = arity(name);
        if (k == 0) {
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        if (!accept('(')) fail("expected '(' after " + name);
        n->op = Op::Call;
        n->function = name;
        n->args.push_back(expr());
        for (int i = 1; i < k; ++i) {
            if (!accept(',')) fail("expected ',' in call to " + name);
            n->args.push_back(expr());
        }
        if (!accept(')')) fail("expected ')' closing call to " + name);
        return n;
    }
};

}  // namespace

Expression::Expression(std::string text) : text_(std::move(text)) {
    Parser parser(text_);
    root_ = parser.parse();
    max_variable_ = parser.max_variable;
}

double Expression::evaluate(std::span<const double> vars) const { return root_->eval(vars); }

}  // namespace osgrf
