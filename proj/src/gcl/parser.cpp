#include "mimsynth/gcl/parser.hpp"

#include "mimsynth/gcl/eval.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <sstream>

namespace mimsynth::gcl {

std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics)
{
  std::ostringstream out;
  for (const auto& d : diagnostics) {
    out << d.line << ":" << d.column << ": " << d.message << "\n";
  }
  return out.str();
}

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(format_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics))
{
}

namespace {

enum class Tok {
  End,
  Ident,
  Number,
  String,
  Semi,
  Colon,
  Comma,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  LParen,
  RParen,
  Prime,
  Assign,  // '='
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Slash,
  Amp,
  Bar,
  Bang,
  Implies,
  Arrow,
  DotDot,
  Question,
};

const char* describe(Tok t)
{
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Prime: return "'''";
    case Tok::Assign: return "'='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Amp: return "'&'";
    case Tok::Bar: return "'|'";
    case Tok::Bang: return "'!'";
    case Tok::Implies: return "'=>'";
    case Tok::Arrow: return "'->'";
    case Tok::DotDot: return "'..'";
    case Tok::Question: return "'?'";
  }
  return "token";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

[[noreturn]] void fail(SourcePos pos, const std::string& message)
{
  throw ParseError({Diagnostic{pos.line, pos.column, message}});
}

std::vector<Token> lex(std::string_view src)
{
  std::vector<Token> tokens;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto peek = [&](std::size_t off) -> char { return i + off < src.size() ? src[i + off] : '\0'; };
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };

  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.pos = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      tok.kind = Tok::Ident;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
      tokens.push_back(std::move(tok));
      continue;
    }
    if (is_digit(c)) {
      std::size_t j = i;
      while (j < src.size() && is_digit(src[j])) ++j;
      if (j + 1 < src.size() && src[j] == '.' && is_digit(src[j + 1])) {
        ++j;
        while (j < src.size() && is_digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && is_digit(src[k])) {
          while (k < src.size() && is_digit(src[k])) ++k;
          j = k;
        }
      }
      tok.kind = Tok::Number;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
      tokens.push_back(std::move(tok));
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"') fail(tok.pos, "unterminated string");
      tok.kind = Tok::String;
      tok.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j + 1 - i);
      tokens.push_back(std::move(tok));
      continue;
    }
    auto two = [&](char a, char b) { return c == a && peek(1) == b; };
    std::size_t len = 1;
    if (two('!', '=')) {
      tok.kind = Tok::Ne;
      len = 2;
    } else if (two('<', '=')) {
      tok.kind = Tok::Le;
      len = 2;
    } else if (two('>', '=')) {
      tok.kind = Tok::Ge;
      len = 2;
    } else if (two('=', '>')) {
      tok.kind = Tok::Implies;
      len = 2;
    } else if (two('-', '>')) {
      tok.kind = Tok::Arrow;
      len = 2;
    } else if (two('.', '.')) {
      tok.kind = Tok::DotDot;
      len = 2;
    } else {
      switch (c) {
        case ';': tok.kind = Tok::Semi; break;
        case ':': tok.kind = Tok::Colon; break;
        case ',': tok.kind = Tok::Comma; break;
        case '{': tok.kind = Tok::LBrace; break;
        case '}': tok.kind = Tok::RBrace; break;
        case '[': tok.kind = Tok::LBracket; break;
        case ']': tok.kind = Tok::RBracket; break;
        case '(': tok.kind = Tok::LParen; break;
        case ')': tok.kind = Tok::RParen; break;
        case '\'': tok.kind = Tok::Prime; break;
        case '=': tok.kind = Tok::Assign; break;
        case '<': tok.kind = Tok::Lt; break;
        case '>': tok.kind = Tok::Gt; break;
        case '+': tok.kind = Tok::Plus; break;
        case '-': tok.kind = Tok::Minus; break;
        case '*': tok.kind = Tok::Star; break;
        case '/': tok.kind = Tok::Slash; break;
        case '&': tok.kind = Tok::Amp; break;
        case '|': tok.kind = Tok::Bar; break;
        case '!': tok.kind = Tok::Bang; break;
        case '?': tok.kind = Tok::Question; break;
        default: fail(tok.pos, std::string("unexpected character '") + c + "'");
      }
    }
    tok.text = std::string(src.substr(i, len));
    advance(len);
    tokens.push_back(std::move(tok));
  }
  Token end;
  end.kind = Tok::End;
  end.pos = {line, col};
  tokens.push_back(end);
  return tokens;
}

bool is_keyword(const std::string& s)
{
  static const char* const keywords[] = {
      "const", "param", "in", "module", "endmodule", "rewards", "endrewards", "label",
      "init", "true", "false", "min", "max", "actions", "int", "double", "bool",
  };
  for (const char* k : keywords) {
    if (s == k) return true;
  }
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(lex(src)) {}

  Program program()
  {
    Program p;
    while (!at(Tok::End)) {
      if (at_word("const")) {
        p.constants.push_back(constant(p));
      } else if (at_word("param")) {
        p.parameters.push_back(parameter());
      } else if (at_word("module")) {
        p.modules.push_back(module(p));
      } else if (at_word("rewards")) {
        rewards(p);
      } else if (at_word("label")) {
        p.labels.push_back(label());
      } else {
        unexpected("'const', 'param', 'module', 'rewards' or 'label'");
      }
    }
    return p;
  }

  Expr standalone_expression()
  {
    Expr e = expr();
    expect(Tok::End);
    return e;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t index_ = 0;

  const Token& cur() const { return tokens_[index_]; }
  const Token& ahead(std::size_t n) const
  {
    return tokens_[std::min(index_ + n, tokens_.size() - 1)];
  }
  bool at(Tok kind) const { return cur().kind == kind; }
  bool at_word(const char* word) const { return at(Tok::Ident) && cur().text == word; }

  Token take()
  {
    Token t = cur();
    if (index_ + 1 < tokens_.size()) ++index_;
    return t;
  }

  [[noreturn]] void unexpected(const std::string& expected) const
  {
    std::string found = at(Tok::End) ? "end of input" : "'" + cur().text + "'";
    fail(cur().pos, "syntax error: expected " + expected + ", found " + found);
  }

  Token expect(Tok kind)
  {
    if (!at(kind)) unexpected(describe(kind));
    return take();
  }

  void expect_word(const char* word)
  {
    if (!at_word(word)) unexpected(std::string("'") + word + "'");
    take();
  }

  std::string name()
  {
    if (!at(Tok::Ident) || is_keyword(cur().text)) unexpected("identifier");
    return take().text;
  }

  ConstantDecl constant(const Program& p)
  {
    ConstantDecl c;
    c.pos = cur().pos;
    expect_word("const");
    if (at_word("int") || at_word("double") || at_word("bool")) take();
    c.name = name();
    expect(Tok::Assign);
    const SourcePos value_pos = cur().pos;
    c.value = expr();
    expect(Tok::Semi);
    try {
      (void)fold(p, c.value);
    } catch (const EvalError& err) {
      fail(value_pos, std::string("constant '") + c.name + "' must be closed: " + err.what());
    }
    return c;
  }

  // Evaluates a closed expression over the constants declared so far.
  static Rational fold(const Program& p, const Expr& e)
  {
    std::map<std::string, Rational> env;
    for (const auto& c : p.constants) {
      env[c.name] = evaluate(c.value, [&](const std::string& n) -> const Rational* {
        auto it = env.find(n);
        return it == env.end() ? nullptr : &it->second;
      });
    }
    return evaluate(e, [&](const std::string& n) -> const Rational* {
      auto it = env.find(n);
      return it == env.end() ? nullptr : &it->second;
    });
  }

  std::int64_t integer(const Program& p)
  {
    const SourcePos pos = cur().pos;
    Expr e = expr();
    Rational v;
    try {
      v = fold(p, e);
    } catch (const EvalError& err) {
      fail(pos, std::string("expected a constant integer: ") + err.what());
    }
    if (v.get_den() != 1 || !v.get_num().fits_slong_p()) {
      fail(pos, "expected a constant integer");
    }
    return v.get_num().get_si();
  }

  Rational signed_decimal()
  {
    bool negative = false;
    if (at(Tok::Minus)) {
      take();
      negative = true;
    }
    Token t = expect(Tok::Number);
    Rational v = parse_decimal(t.text);
    return negative ? Rational(-v) : v;
  }

  ParameterDecl parameter()
  {
    ParameterDecl d;
    d.pos = cur().pos;
    expect_word("param");
    d.name = name();
    expect_word("in");
    expect(Tok::LBrace);
    if (!at(Tok::RBrace)) {
      d.values.push_back(signed_decimal());
      while (at(Tok::Comma)) {
        take();
        d.values.push_back(signed_decimal());
      }
    }
    expect(Tok::RBrace);
    expect(Tok::Semi);
    return d;
  }

  Module module(const Program& p)
  {
    Module m;
    m.pos = cur().pos;
    expect_word("module");
    m.name = name();
    while (!at_word("endmodule")) {
      if (at_word("actions")) {
        take();
        m.actions.insert(name());
        while (at(Tok::Comma)) {
          take();
          m.actions.insert(name());
        }
        expect(Tok::Semi);
      } else if (at(Tok::LBracket)) {
        m.commands.push_back(command());
        if (!m.commands.back().action.empty()) m.actions.insert(m.commands.back().action);
      } else if (at(Tok::Ident) && ahead(1).kind == Tok::Colon) {
        m.variables.push_back(variable(p));
      } else {
        unexpected("variable declaration, command or 'endmodule'");
      }
    }
    take();
    return m;
  }

  VariableDecl variable(const Program& p)
  {
    VariableDecl v;
    v.pos = cur().pos;
    v.name = name();
    expect(Tok::Colon);
    expect(Tok::LBracket);
    v.lo = integer(p);
    expect(Tok::DotDot);
    v.hi = integer(p);
    expect(Tok::RBracket);
    v.init = v.lo;
    if (at_word("init")) {
      take();
      v.init = integer(p);
    }
    expect(Tok::Semi);
    return v;
  }

  Command command()
  {
    Command c;
    c.pos = cur().pos;
    expect(Tok::LBracket);
    if (!at(Tok::RBracket)) c.action = name();
    expect(Tok::RBracket);
    c.guard = expr();
    expect(Tok::Arrow);
    c.branches.push_back(branch());
    while (at(Tok::Plus)) {
      take();
      c.branches.push_back(branch());
    }
    expect(Tok::Semi);
    return c;
  }

  bool at_update_start() const
  {
    if (at_word("true")) {
      const Tok next = ahead(1).kind;
      return next == Tok::Semi || next == Tok::Plus;
    }
    return at(Tok::LParen) && ahead(1).kind == Tok::Ident && ahead(2).kind == Tok::Prime;
  }

  Branch branch()
  {
    Branch b;
    if (at_update_start()) {
      b.probability = Expr::number(Rational(1), cur().pos);
    } else {
      b.probability = implication();
      expect(Tok::Colon);
    }
    b.updates = updates();
    return b;
  }

  std::vector<Update> updates()
  {
    std::vector<Update> result;
    if (at_word("true")) {
      take();
      return result;
    }
    result.push_back(update());
    while (at(Tok::Amp)) {
      take();
      result.push_back(update());
    }
    return result;
  }

  Update update()
  {
    Update u;
    expect(Tok::LParen);
    u.variable = name();
    expect(Tok::Prime);
    expect(Tok::Assign);
    u.value = expr();
    expect(Tok::RParen);
    return u;
  }

  void rewards(Program& p)
  {
    expect_word("rewards");
    if (at(Tok::String)) take();
    while (!at_word("endrewards")) {
      RewardItem item;
      item.pos = cur().pos;
      if (at(Tok::LBracket)) fail(cur().pos, "transition rewards are not supported");
      item.guard = expr();
      expect(Tok::Colon);
      item.cost = expr();
      expect(Tok::Semi);
      p.rewards.push_back(std::move(item));
    }
    take();
  }

  LabelDecl label()
  {
    LabelDecl l;
    l.pos = cur().pos;
    expect_word("label");
    l.name = expect(Tok::String).text;
    expect(Tok::Assign);
    l.expr = expr();
    expect(Tok::Semi);
    return l;
  }

  // Expressions, loosest binding first.
  Expr expr()
  {
    const SourcePos pos = cur().pos;
    Expr cond = implication();
    if (!at(Tok::Question)) return cond;
    take();
    Expr a = expr();
    expect(Tok::Colon);
    Expr b = expr();
    return Expr::apply(Op::Ite, {cond, a, b}, pos);
  }

  Expr implication()
  {
    const SourcePos pos = cur().pos;
    Expr lhs = disjunction();
    if (!at(Tok::Implies)) return lhs;
    take();
    return Expr::apply(Op::Implies, {lhs, implication()}, pos);
  }

  Expr disjunction()
  {
    Expr lhs = conjunction();
    while (at(Tok::Bar)) {
      const SourcePos pos = take().pos;
      lhs = Expr::apply(Op::Or, {lhs, conjunction()}, pos);
    }
    return lhs;
  }

  Expr conjunction()
  {
    Expr lhs = negation();
    while (at(Tok::Amp)) {
      const SourcePos pos = take().pos;
      lhs = Expr::apply(Op::And, {lhs, negation()}, pos);
    }
    return lhs;
  }

  Expr negation()
  {
    if (at(Tok::Bang)) {
      const SourcePos pos = take().pos;
      return Expr::apply(Op::Not, {negation()}, pos);
    }
    return relation();
  }

  Expr relation()
  {
    Expr lhs = additive();
    std::optional<Op> op;
    switch (cur().kind) {
      case Tok::Lt: op = Op::Lt; break;
      case Tok::Le: op = Op::Le; break;
      case Tok::Gt: op = Op::Gt; break;
      case Tok::Ge: op = Op::Ge; break;
      case Tok::Assign: op = Op::Eq; break;
      case Tok::Ne: op = Op::Ne; break;
      default: break;
    }
    if (!op) return lhs;
    const SourcePos pos = take().pos;
    return Expr::apply(*op, {lhs, additive()}, pos);
  }

  Expr additive()
  {
    Expr lhs = multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const Token t = take();
      lhs = Expr::apply(t.kind == Tok::Plus ? Op::Add : Op::Sub, {lhs, multiplicative()}, t.pos);
    }
    return lhs;
  }

  Expr multiplicative()
  {
    Expr lhs = unary_minus();
    while (at(Tok::Star) || at(Tok::Slash)) {
      const Token t = take();
      lhs = Expr::apply(t.kind == Tok::Star ? Op::Mul : Op::Div, {lhs, unary_minus()}, t.pos);
    }
    return lhs;
  }

  Expr unary_minus()
  {
    if (at(Tok::Minus)) {
      const SourcePos pos = take().pos;
      return Expr::apply(Op::Neg, {unary_minus()}, pos);
    }
    return primary();
  }

  Expr primary()
  {
    const Token t = cur();
    switch (t.kind) {
      case Tok::Number:
        take();
        return Expr::number(parse_decimal(t.text), t.pos);
      case Tok::LParen: {
        take();
        Expr inner = expr();
        expect(Tok::RParen);
        return inner;
      }
      case Tok::Ident:
        if (t.text == "true" || t.text == "false") {
          take();
          return Expr::boolean(t.text == "true", t.pos);
        }
        if ((t.text == "min" || t.text == "max") && ahead(1).kind == Tok::LParen) {
          take();
          take();
          Expr a = expr();
          expect(Tok::Comma);
          Expr b = expr();
          expect(Tok::RParen);
          return Expr::apply(t.text == "min" ? Op::Min : Op::Max, {a, b}, t.pos);
        }
        if (is_keyword(t.text)) unexpected("expression");
        take();
        return Expr::identifier(t.text, t.pos);
      default:
        unexpected("expression");
    }
  }
};

class Resolver {
 public:
  explicit Resolver(const Program& p) : program_(p) {}

  std::vector<Diagnostic> run()
  {
    std::map<std::string, std::string> kinds;
    auto declare = [&](const std::string& name, const char* kind, SourcePos pos) {
      auto [it, inserted] = kinds.emplace(name, kind);
      if (!inserted) {
        report(pos, "duplicate declaration of '" + name + "' (already declared as " + it->second + ")");
      }
    };

    std::set<std::string> constants_so_far;
    for (const auto& c : program_.constants) {
      declare(c.name, "constant", c.pos);
      resolve(c.value, constants_so_far, "constant");
      constants_so_far.insert(c.name);
    }
    for (const auto& p : program_.parameters) declare(p.name, "parameter", p.pos);
    std::set<std::string> module_names;
    for (const auto& m : program_.modules) {
      if (!module_names.insert(m.name).second) {
        report(m.pos, "duplicate declaration of module '" + m.name + "'");
      }
      for (const auto& v : m.variables) declare(v.name, "variable", v.pos);
    }
    std::set<std::string> label_names;
    for (const auto& l : program_.labels) {
      if (!label_names.insert(l.name).second) {
        report(l.pos, "duplicate declaration of label \"" + l.name + "\"");
      }
    }

    std::set<std::string> visible;
    for (const auto& [name, kind] : kinds) visible.insert(name);
    for (const auto& m : program_.modules) {
      for (const auto& c : m.commands) {
        resolve(c.guard, visible, "guard");
        for (const auto& b : c.branches) {
          resolve(b.probability, visible, "probability");
          for (const auto& u : b.updates) {
            if (kinds.count(u.variable) == 0 || kinds[u.variable] != std::string("variable")) {
              report(c.pos, "unknown identifier '" + u.variable + "' in update");
            }
            resolve(u.value, visible, "update");
          }
        }
      }
    }
    for (const auto& r : program_.rewards) {
      resolve(r.guard, visible, "reward guard");
      resolve(r.cost, visible, "reward");
    }
    for (const auto& l : program_.labels) resolve(l.expr, visible, "label");
    return std::move(diagnostics_);
  }

 private:
  const Program& program_;
  std::vector<Diagnostic> diagnostics_;

  void report(SourcePos pos, std::string message)
  {
    diagnostics_.push_back({pos.line, pos.column, std::move(message)});
  }

  void resolve(const Expr& e, const std::set<std::string>& visible, const char* where)
  {
    if (!e.valid()) return;
    if (e.kind() == Expr::Kind::Identifier) {
      if (visible.count(e.name()) == 0) {
        report(e.pos(), "unknown identifier '" + e.name() + "' in " + where);
      }
    } else if (e.kind() == Expr::Kind::Apply) {
      for (const auto& a : e.args()) resolve(a, visible, where);
    }
  }
};

}  // namespace

Program parse_program(std::string_view source)
{
  Parser parser(source);
  Program p = parser.program();
  auto diagnostics = Resolver(p).run();
  if (!diagnostics.empty()) throw ParseError(std::move(diagnostics));
  return p;
}

Expr parse_expression(std::string_view source)
{
  Parser parser(source);
  return parser.standalone_expression();
}

}  // namespace mimsynth::gcl
