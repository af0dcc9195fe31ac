#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace osgrf {

class ExpressionError : public std::invalid_argument {
public:
    ExpressionError(const std::string& message, std::size_t offset)
        : std::invalid_argument(message + " at offset " + std::to_string(offset)),
          offset_(offset) {}
    [[nodiscard]] std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Parsed arithmetic expression over the coordinates t1, t2, ... of a point.
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses,
/// numbers, the constants pi and e, and the functions abs sqrt exp log sin
/// cos tan atan atan2 pow min max.
class Expression {
public:
    struct Node;

    explicit Expression(std::string text);

    [[nodiscard]] double evaluate(std::span<const double> vars) const;
    [[nodiscard]] const std::string& text() const { return text_; }
    /// Largest variable index referenced (t3 -> 3); 0 when none.
    [[nodiscard]] int max_variable() const { return max_variable_; }

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
    int max_variable_ = 0;
};

}  // namespace osgrf
