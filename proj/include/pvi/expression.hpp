#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pvi {

// Arguments an expression may reference: t, x1..xd, y, z1..zd.
struct EvalArgs {
  double t = 0.0;
  std::span<const double> x{};
  double y = 0.0;
  std::span<const double> z{};
};

// Compiled arithmetic expression over the coefficient grammar
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          right associative, binds tighter than unary minus
//   atom   := number | 'pi' | variable | func '(' expr (',' expr)* ')' | '(' expr ')'
//   func   := sin cos exp sqrt abs tanh min max
//
// so "-y^2" is -(y^2) and "2^-1" is 0.5. Evaluation is IEEE double.
class Expression {
 public:
  Expression();  // the constant 0
  static Expression parse(std::string_view text);
  static Expression constant(double value);

  double operator()(const EvalArgs& args) const;

  const std::string& source() const { return source_; }
  // Fully parenthesised rendering that re-parses to the same evaluator.
  std::string pretty() const;

  bool is_constant() const { return is_constant_; }
  double constant_value() const { return constant_value_; }
  bool depends_on_t() const { return uses_t_; }
  bool depends_on_y() const { return uses_y_; }
  bool depends_on_x() const { return max_x_index_ > 0; }
  bool depends_on_z() const { return max_z_index_ > 0; }
  // Largest 1-based index of x_i / z_i referenced (0 if none).
  int max_x_index() const { return max_x_index_; }
  int max_z_index() const { return max_z_index_; }

  struct Node;

 private:
  enum class Op : std::uint8_t {
    Push, LoadT, LoadY, LoadX, LoadZ, Neg, Add, Sub, Mul, Div, Pow,
    Sin, Cos, Exp, Sqrt, Abs, Tanh, Min, Max
  };
  struct Instr {
    Op op;
    std::uint32_t index = 0;
    double value = 0.0;
  };

  void compile(const Node& node);
  void analyse();

  std::string source_;
  std::shared_ptr<const Node> tree_;
  std::vector<Instr> code_;
  std::size_t max_stack_ = 1;
  bool is_constant_ = true;
  double constant_value_ = 0.0;
  bool uses_t_ = false;
  bool uses_y_ = false;
  int max_x_index_ = 0;
  int max_z_index_ = 0;
};

}  // namespace pvi
