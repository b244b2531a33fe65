#pragma once

#include "mimsynth/rational.hpp"

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace mimsynth::gcl {

struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class Op {
  Neg,
  Not,
  Add,
  Sub,
  Mul,
  Div,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  And,
  Or,
  Implies,
  Ite,
  Min,
  Max,
};

const char* op_symbol(Op op);

struct ExprNode;

/// Immutable expression handle. Structural equality ignores source positions.
class Expr {
 public:
  enum class Kind { Number, Boolean, Identifier, Apply };

  Expr() = default;

  static Expr number(const Rational& value, SourcePos pos = {});
  static Expr boolean(bool value, SourcePos pos = {});
  static Expr identifier(std::string name, SourcePos pos = {});
  static Expr apply(Op op, std::vector<Expr> args, SourcePos pos = {});

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  const Rational& value() const;
  bool truth() const;
  const std::string& name() const;
  Op op() const;
  const std::vector<Expr>& args() const;
  SourcePos pos() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Expr::Kind kind;
  Rational value;
  bool truth = false;
  std::string name;
  Op op = Op::Add;
  std::vector<Expr> args;
  SourcePos pos;
};

// Builders used by transformations and tests.
Expr num(const Rational& value);
Expr num(long value);
Expr ident(const std::string& name);
Expr tt();
Expr ff();
Expr unary(Op op, Expr a);
Expr binary(Op op, Expr a, Expr b);
Expr conj(const std::vector<Expr>& parts);

/// Names referenced by the expression.
void collect_identifiers(const Expr& e, std::set<std::string>& out);

struct VariableDecl {
  std::string name;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t init = 0;
  SourcePos pos;

  friend bool operator==(const VariableDecl& a, const VariableDecl& b)
  {
    return a.name == b.name && a.lo == b.lo && a.hi == b.hi && a.init == b.init;
  }
};

struct ParameterDecl {
  std::string name;
  std::vector<Rational> values;
  SourcePos pos;

  friend bool operator==(const ParameterDecl& a, const ParameterDecl& b)
  {
    return a.name == b.name && a.values == b.values;
  }
};

struct ConstantDecl {
  std::string name;
  Expr value;
  SourcePos pos;

  friend bool operator==(const ConstantDecl& a, const ConstantDecl& b)
  {
    return a.name == b.name && a.value == b.value;
  }
};

struct Update {
  std::string variable;
  Expr value;

  friend bool operator==(const Update&, const Update&) = default;
};

struct Branch {
  Expr probability;
  std::vector<Update> updates;

  friend bool operator==(const Branch&, const Branch&) = default;
};

struct Command {
  std::string action;  // empty for the internal action
  Expr guard;
  std::vector<Branch> branches;
  SourcePos pos;

  friend bool operator==(const Command& a, const Command& b)
  {
    return a.action == b.action && a.guard == b.guard && a.branches == b.branches;
  }
};

struct Module {
  std::string name;
  std::vector<VariableDecl> variables;
  std::set<std::string> actions;  // synchronizing actions
  std::vector<Command> commands;
  SourcePos pos;

  friend bool operator==(const Module& a, const Module& b)
  {
    return a.name == b.name && a.variables == b.variables && a.actions == b.actions &&
           a.commands == b.commands;
  }
};

struct RewardItem {
  Expr guard;
  Expr cost;
  SourcePos pos;

  friend bool operator==(const RewardItem& a, const RewardItem& b)
  {
    return a.guard == b.guard && a.cost == b.cost;
  }
};

struct LabelDecl {
  std::string name;
  Expr expr;
  SourcePos pos;

  friend bool operator==(const LabelDecl& a, const LabelDecl& b)
  {
    return a.name == b.name && a.expr == b.expr;
  }
};

struct Program {
  std::vector<ConstantDecl> constants;
  std::vector<ParameterDecl> parameters;
  std::vector<Module> modules;
  std::vector<RewardItem> rewards;
  std::vector<LabelDecl> labels;

  const ParameterDecl* find_parameter(const std::string& name) const;
  const ConstantDecl* find_constant(const std::string& name) const;
  const VariableDecl* find_variable(const std::string& name) const;
  const LabelDecl* find_label(const std::string& name) const;
  /// Variables of all modules in module order.
  std::vector<VariableDecl> variables() const;
  std::set<std::string> parameter_names() const;
  /// Every declared name: constants, parameters, variables, modules, labels, actions.
  std::set<std::string> all_names() const;

  friend bool operator==(const Program&, const Program&) = default;
};

}  // namespace mimsynth::gcl
