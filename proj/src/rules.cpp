#include "topo9im/rules.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>

#include "topo9im/error.hpp"

namespace topo9im {

std::string Term::to_string() const {
  switch (kind) {
    case Kind::kVariable: return "?" + name;
    case Kind::kIndividual: return name;
    case Kind::kLiteral: return literal.is_number() ? literal.to_string() : "\"" + literal.text() + "\"";
  }
  return {};
}

std::string Atom::to_string() const {
  std::string out = name + "(";
  for (size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + args[i].to_string();
  return out + ")";
}

std::string Rule::to_string() const {
  auto join = [](const std::vector<Atom>& atoms) {
    std::string out;
    for (size_t i = 0; i < atoms.size(); ++i) out += (i ? " ^ " : "") + atoms[i].to_string();
    return out;
  };
  return join(body) + " -> " + join(head);
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

struct Token {
  enum class Kind { kIdent, kVariable, kNumber, kString, kLParen, kRParen, kComma, kAnd, kArrow, kSemi, kEnd };
  Kind kind;
  std::string text;
  SourcePos pos;
};

std::string_view token_name(Token::Kind k) {
  switch (k) {
    case Token::Kind::kIdent: return "identifier";
    case Token::Kind::kVariable: return "variable";
    case Token::Kind::kNumber: return "number";
    case Token::Kind::kString: return "string";
    case Token::Kind::kLParen: return "'('";
    case Token::Kind::kRParen: return "')'";
    case Token::Kind::kComma: return "','";
    case Token::Kind::kAnd: return "'^'";
    case Token::Kind::kArrow: return "'->'";
    case Token::Kind::kSemi: return "';'";
    case Token::Kind::kEnd: return "end of input";
  }
  return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      SourcePos at = pos_;
      if (i_ >= text_.size()) {
        out.push_back({Token::Kind::kEnd, {}, at});
        return out;
      }
      char c = text_[i_];
      if (c == '(') { advance(1); out.push_back({Token::Kind::kLParen, "(", at}); continue; }
      if (c == ')') { advance(1); out.push_back({Token::Kind::kRParen, ")", at}); continue; }
      if (c == ',') { advance(1); out.push_back({Token::Kind::kComma, ",", at}); continue; }
      if (c == ';') { advance(1); out.push_back({Token::Kind::kSemi, ";", at}); continue; }
      if (c == '^') { advance(1); out.push_back({Token::Kind::kAnd, "^", at}); continue; }
      if (text_.substr(i_).starts_with("∧")) {
        advance(3);
        out.push_back({Token::Kind::kAnd, "^", at});
        continue;
      }
      if (text_.substr(i_).starts_with("->")) {
        advance(2);
        out.push_back({Token::Kind::kArrow, "->", at});
        continue;
      }
      if (text_.substr(i_).starts_with("→")) {
        advance(3);
        out.push_back({Token::Kind::kArrow, "->", at});
        continue;
      }
      if (c == '?') {
        advance(1);
        size_t start = i_;
        while (i_ < text_.size() && ident_char(text_[i_])) advance(1);
        if (start == i_) throw SyntaxError("expected variable name after '?'", at.line, at.column);
        out.push_back({Token::Kind::kVariable, std::string(text_.substr(start, i_ - start)), at});
        continue;
      }
      if (c == '"') {
        advance(1);
        std::string s;
        while (i_ < text_.size() && text_[i_] != '"') {
          if (text_[i_] == '\n') break;
          if (text_[i_] == '\\' && i_ + 1 < text_.size()) advance(1);
          s += text_[i_];
          advance(1);
        }
        if (i_ >= text_.size() || text_[i_] != '"') throw SyntaxError("unterminated string", at.line, at.column);
        advance(1);
        out.push_back({Token::Kind::kString, std::move(s), at});
        continue;
      }
      if (digit(c) || (c == '-' && i_ + 1 < text_.size() && digit(text_[i_ + 1]))) {
        size_t start = i_;
        advance(1);
        while (i_ < text_.size() && (digit(text_[i_]) || text_[i_] == '.' || text_[i_] == '/')) advance(1);
        out.push_back({Token::Kind::kNumber, std::string(text_.substr(start, i_ - start)), at});
        continue;
      }
      if (ident_start(c)) {
        size_t start = i_;
        while (i_ < text_.size() && ident_char(text_[i_])) advance(1);
        if (i_ + 1 < text_.size() && text_[i_] == ':' && ident_start(text_[i_ + 1])) {
          advance(1);
          while (i_ < text_.size() && ident_char(text_[i_])) advance(1);
        }
        out.push_back({Token::Kind::kIdent, std::string(text_.substr(start, i_ - start)), at});
        continue;
      }
      throw SyntaxError(std::string("unexpected character '") + c + "'", at.line, at.column);
    }
  }

 private:
  void advance(size_t n) {
    for (size_t k = 0; k < n && i_ < text_.size(); ++k, ++i_) {
      if (text_[i_] == '\n') {
        ++pos_.line;
        pos_.column = 1;
      } else if ((static_cast<unsigned char>(text_[i_]) & 0xC0) != 0x80) {
        ++pos_.column;
      }
    }
  }

  void skip_space_and_comments() {
    while (i_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[i_]))) {
        advance(1);
      } else if (text_[i_] == '#') {
        while (i_ < text_.size() && text_[i_] != '\n') advance(1);
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  size_t i_ = 0;
  SourcePos pos_;
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::vector<Rule> program() {
    std::vector<Rule> rules;
    while (peek().kind != Token::Kind::kEnd) {
      rules.push_back(rule());
      if (peek().kind == Token::Kind::kSemi) {
        next();
        continue;
      }
      if (peek().kind != Token::Kind::kEnd) fail({Token::Kind::kSemi, Token::Kind::kEnd});
    }
    return rules;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_++]; }

  [[noreturn]] void fail(std::initializer_list<Token::Kind> expected) {
    const Token& t = peek();
    std::string msg = "expected ";
    size_t n = 0;
    for (auto k : expected) msg += (n++ ? " or " : "") + std::string(token_name(k));
    msg += ", found " + (t.kind == Token::Kind::kEnd ? std::string("end of input") : "'" + t.text + "'");
    throw SyntaxError(msg, t.pos.line, t.pos.column);
  }

  const Token& expect(Token::Kind k) {
    if (peek().kind != k) fail({k});
    return next();
  }

  Rule rule() {
    Rule r;
    r.pos = peek().pos;
    r.body = atoms();
    expect(Token::Kind::kArrow);
    r.head = atoms();
    check_head(r);
    check_safety(r);
    return r;
  }

  std::vector<Atom> atoms() {
    std::vector<Atom> out{atom()};
    while (peek().kind == Token::Kind::kAnd) {
      next();
      out.push_back(atom());
    }
    return out;
  }

  Term term() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::kVariable: next(); return Term::variable(t.text);
      case Token::Kind::kIdent: next(); return Term::individual(t.text);
      case Token::Kind::kString: next(); return Term::value(Literal(t.text));
      case Token::Kind::kNumber: {
        next();
        try {
          return Term::value(Literal(parse_rational(t.text)));
        } catch (const ParseError&) {
          throw SyntaxError("malformed number '" + t.text + "'", t.pos.line, t.pos.column);
        }
      }
      default: fail({Token::Kind::kVariable, Token::Kind::kIdent, Token::Kind::kNumber, Token::Kind::kString});
    }
  }

  Atom atom() {
    const Token& name = expect(Token::Kind::kIdent);
    Atom a;
    a.pos = name.pos;
    a.name = name.text;
    expect(Token::Kind::kLParen);
    a.args.push_back(term());
    while (peek().kind == Token::Kind::kComma) {
      next();
      a.args.push_back(term());
    }
    expect(Token::Kind::kRParen);
    resolve(a);
    return a;
  }

  static void arity(const Atom& a, size_t n) {
    if (a.args.size() != n)
      throw SyntaxError(a.name + " takes " + std::to_string(n) + " argument(s), got " + std::to_string(a.args.size()),
                        a.pos.line, a.pos.column);
  }

  static void resolve(Atom& a) {
    auto colon = a.name.find(':');
    const std::string prefix = colon == std::string::npos ? "" : lower(a.name.substr(0, colon));
    const std::string local = colon == std::string::npos ? a.name : a.name.substr(colon + 1);
    auto unknown = [&]() {
      return UnknownBuiltin(std::to_string(a.pos.line) + ":" + std::to_string(a.pos.column) +
                            ": unknown builtin '" + a.name + "'");
    };
    if (prefix == "swrlb_topo") {
      std::optional<TopoRelation> rel;
      for (TopoRelation r : kAllRelations)
        if (lower(relation_name(r)) == lower(local)) rel = r;
      if (!rel) throw unknown();
      a.kind = Atom::Kind::kTopo;
      a.relation = *rel;
      a.name = "swrlb_topo:" + std::string(relation_name(*rel));
      arity(a, 2);
      return;
    }
    if (prefix == "swrlb") {
      const std::string l = lower(local);
      if (l == "lessthan") {
        a.comparison = Comparison::kLessThan;
        a.name = "swrlb:lessThan";
      } else if (l == "greaterthan") {
        a.comparison = Comparison::kGreaterThan;
        a.name = "swrlb:greaterThan";
      } else if (l == "equal") {
        a.comparison = Comparison::kEqual;
        a.name = "swrlb:equal";
      } else {
        throw unknown();
      }
      a.kind = Atom::Kind::kCompare;
      arity(a, 2);
      return;
    }
    if (prefix == "sqwrl") {
      if (lower(local) != "select") throw unknown();
      a.kind = Atom::Kind::kSelect;
      a.name = "sqwrl:select";
      for (const auto& t : a.args)
        if (!t.is_variable())
          throw SyntaxError("sqwrl:select takes variables only", a.pos.line, a.pos.column);
      return;
    }
    if (a.args.size() == 1) {
      a.kind = Atom::Kind::kClass;
      if (a.args[0].kind == Term::Kind::kLiteral)
        throw SyntaxError("class atom " + a.name + " applied to a literal", a.pos.line, a.pos.column);
      return;
    }
    arity(a, 2);
    if (a.args[0].kind == Term::Kind::kLiteral)
      throw SyntaxError("property atom " + a.name + " has a literal subject", a.pos.line, a.pos.column);
    a.kind = a.args[1].kind == Term::Kind::kLiteral ? Atom::Kind::kData : Atom::Kind::kProperty;
  }

  static void check_head(const Rule& r) {
    for (const auto& a : r.head) {
      if (a.kind == Atom::Kind::kSelect) {
        if (r.head.size() != 1)
          throw SyntaxError("sqwrl:select must be the only head atom", a.pos.line, a.pos.column);
        continue;
      }
      if (a.kind != Atom::Kind::kClass && a.kind != Atom::Kind::kProperty)
        throw SyntaxError("rule heads may only contain class and property atoms, found " + a.name, a.pos.line,
                          a.pos.column);
    }
    for (const auto& a : r.body)
      if (a.kind == Atom::Kind::kSelect)
        throw SyntaxError("sqwrl:select may only appear in the head", a.pos.line, a.pos.column);
  }

  static void check_safety(const Rule& r) {
    std::set<std::string> bound;
    for (const auto& a : r.body)
      if (a.kind != Atom::Kind::kCompare)
        for (const auto& t : a.args)
          if (t.is_variable()) bound.insert(t.name);
    auto require = [&](const Atom& a, const char* what) {
      for (const auto& t : a.args)
        if (t.is_variable() && !bound.contains(t.name))
          throw SafetyError(std::to_string(a.pos.line) + ":" + std::to_string(a.pos.column) + ": " + what +
                            " variable ?" + t.name + " does not occur in the rule body");
    };
    for (const auto& a : r.head) require(a, a.kind == Atom::Kind::kSelect ? "select" : "head");
    for (const auto& a : r.body)
      if (a.kind == Atom::Kind::kCompare) require(a, "comparison");
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
};

}  // namespace

std::vector<Rule> parse_program(std::string_view text) { return Parser(Lexer(text).run()).program(); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// Individual name or data literal.
using Value = std::variant<std::string, Literal>;

std::string value_string(const Value& v) {
  return v.index() == 0 ? std::get<0>(v) : std::get<1>(v).to_string();
}

struct Arg {
  int slot = -1;  // variable slot, or -1 for a constant
  Value constant;
};

struct CompiledAtom {
  Atom::Kind kind;
  std::string name;
  TopoRelation relation;
  Comparison comparison;
  std::vector<Arg> args;
  bool reads_facts() const { return kind == Atom::Kind::kClass || kind == Atom::Kind::kProperty; }
};

struct CompiledRule {
  std::vector<CompiledAtom> body;
  std::vector<CompiledAtom> head;
  std::vector<std::string> slot_names;
  bool query = false;
};

using Binding = std::vector<std::optional<Value>>;

CompiledRule compile(const Rule& rule, const KnowledgeBase& kb) {
  CompiledRule out;
  std::map<std::string, int> slots;
  auto compile_atom = [&](const Atom& a) {
    CompiledAtom c{a.kind, a.name, a.relation, a.comparison, {}};
    if (c.kind == Atom::Kind::kProperty && kb.is_data_property(a.name)) c.kind = Atom::Kind::kData;
    for (const auto& t : a.args) {
      Arg arg;
      if (t.is_variable()) {
        auto [it, fresh] = slots.emplace(t.name, static_cast<int>(slots.size()));
        if (fresh) out.slot_names.push_back(t.name);
        arg.slot = it->second;
      } else if (t.kind == Term::Kind::kIndividual) {
        arg.constant = t.name;
      } else {
        arg.constant = t.literal;
      }
      c.args.push_back(std::move(arg));
    }
    return c;
  };
  for (const auto& a : rule.body) out.body.push_back(compile_atom(a));
  for (const auto& a : rule.head) out.head.push_back(compile_atom(a));
  out.query = rule.is_query();
  return out;
}

// Evaluation order: the delta atom (if any) first; then cheap fully-bound
// filters as soon as they are bound; then fact atoms in source order; topo
// builtins with unbound arguments (pair enumeration) last.
std::vector<size_t> plan(const CompiledRule& rule, std::optional<size_t> first) {
  std::vector<size_t> order;
  std::set<int> bound;
  std::vector<bool> used(rule.body.size());
  auto take = [&](size_t i) {
    order.push_back(i);
    used[i] = true;
    for (const auto& a : rule.body[i].args)
      if (a.slot >= 0) bound.insert(a.slot);
  };
  auto all_bound = [&](const CompiledAtom& a) {
    return std::all_of(a.args.begin(), a.args.end(), [&](const Arg& x) { return x.slot < 0 || bound.contains(x.slot); });
  };
  if (first) take(*first);
  while (order.size() < rule.body.size()) {
    std::optional<size_t> pick;
    for (size_t i = 0; i < rule.body.size() && !pick; ++i) {
      const auto& a = rule.body[i];
      if (!used[i] && (a.kind == Atom::Kind::kCompare || a.kind == Atom::Kind::kTopo) && all_bound(a)) pick = i;
    }
    for (size_t i = 0; i < rule.body.size() && !pick; ++i)
      if (!used[i] && rule.body[i].kind != Atom::Kind::kCompare && rule.body[i].kind != Atom::Kind::kTopo) pick = i;
    for (size_t i = 0; i < rule.body.size() && !pick; ++i)
      if (!used[i] && rule.body[i].kind == Atom::Kind::kTopo) pick = i;
    // Only comparisons with unbound operands remain; parse-time safety makes
    // this unreachable.
    if (!pick) throw SafetyError("comparison operand never bound");
    take(*pick);
  }
  return order;
}

struct Pending {
  Fact::Kind kind;
  std::string subject, property, object;
};

class Engine {
 public:
  Engine(KnowledgeBase& kb, const GeometryRegistry& registry, bool memoize)
      : kb_(kb), registry_(registry), cache_(registry, memoize) {}

  // Runs one rule; `delta` restricts body atom `delta_atom` to those facts.
  void evaluate(const CompiledRule& rule, std::optional<size_t> delta_atom,
                const std::vector<const Fact*>* delta, std::vector<Binding>* results) {
    order_ = plan(rule, delta_atom);
    rule_ = &rule;
    delta_ = delta;
    delta_atom_ = delta_atom;
    results_ = results;
    Binding b(rule.slot_names.size());
    step(0, b);
  }

  // Head facts and builtin successes collected since the last flush.
  std::vector<Pending>& head_facts() { return heads_; }
  std::vector<Pending>& topo_facts() { return topo_; }
  size_t geometry_evaluations() const { return cache_.evaluations(); }

 private:
  static std::optional<std::string> individual(const Arg& a, const Binding& b) {
    const Value* v = a.slot >= 0 ? (b[a.slot] ? &*b[a.slot] : nullptr) : &a.constant;
    if (!v || v->index() != 0) return std::nullopt;
    return std::get<0>(*v);
  }

  static bool is_bound(const Arg& a, const Binding& b) { return a.slot < 0 || b[a.slot].has_value(); }

  static const Value& value(const Arg& a, const Binding& b) { return a.slot >= 0 ? *b[a.slot] : a.constant; }

  // Unifies arg with v; on success calls k, then restores the binding.
  template <typename K>
  static void unify(const Arg& a, Binding& b, const Value& v, K&& k) {
    if (a.slot < 0 || b[a.slot]) {
      if (value(a, b) == v) k();
      return;
    }
    b[a.slot] = v;
    k();
    b[a.slot].reset();
  }

  void step(size_t depth, Binding& b) {
    if (depth == order_.size()) {
      emit(b);
      return;
    }
    const size_t idx = order_[depth];
    const CompiledAtom& atom = rule_->body[idx];
    auto next = [&] { step(depth + 1, b); };
    const bool from_delta = delta_atom_ && *delta_atom_ == idx;

    switch (atom.kind) {
      case Atom::Kind::kClass: {
        const Arg& x = atom.args[0];
        if (from_delta) {
          for (const Fact* f : *delta_)
            if (f->kind == Fact::Kind::kClass && f->property == atom.name) unify(x, b, Value(f->subject), next);
        } else if (is_bound(x, b)) {
          if (auto ind = individual(x, b); ind && kb_.has_class(*ind, atom.name)) next();
        } else {
          const auto& members = kb_.instances(atom.name);
          for (const auto& m : members) unify(x, b, Value(m), next);
        }
        return;
      }
      case Atom::Kind::kProperty: {
        const Arg& s = atom.args[0];
        const Arg& o = atom.args[1];
        auto pair = [&](const std::string& subj, const std::string& obj) {
          unify(s, b, Value(subj), [&] { unify(o, b, Value(obj), next); });
        };
        if (from_delta) {
          for (const Fact* f : *delta_)
            if (f->kind == Fact::Kind::kTriple && f->property == atom.name) pair(f->subject, f->object);
          return;
        }
        if (is_bound(s, b)) {
          auto subj = individual(s, b);
          if (!subj) return;
          auto it = kb_.forward(atom.name).find(*subj);
          if (it == kb_.forward(atom.name).end()) return;
          const auto& objects = it->second;
          for (const auto& obj : objects) unify(o, b, Value(obj), next);
        } else if (is_bound(o, b)) {
          auto obj = individual(o, b);
          if (!obj) return;
          auto it = kb_.backward(atom.name).find(*obj);
          if (it == kb_.backward(atom.name).end()) return;
          const auto& subjects = it->second;
          for (const auto& subj : subjects) unify(s, b, Value(subj), next);
        } else {
          const auto& index = kb_.forward(atom.name);
          for (const auto& [subj, objects] : index)
            for (const auto& obj : objects) pair(subj, obj);
        }
        return;
      }
      case Atom::Kind::kData: {
        const Arg& s = atom.args[0];
        const Arg& v = atom.args[1];
        auto match_value = [&](const Literal& lit) {
          // A bare identifier in value position compares as a string.
          if (v.slot < 0 && v.constant.index() == 0) {
            if (!lit.is_number() && lit.text() == std::get<0>(v.constant)) next();
            return;
          }
          unify(v, b, Value(lit), next);
        };
        if (is_bound(s, b)) {
          auto subj = individual(s, b);
          if (!subj) return;
          for (const auto& lit : kb_.data_values(*subj, atom.name)) match_value(lit);
        } else {
          auto p = kb_.data().find(atom.name);
          if (p == kb_.data().end()) return;
          for (const auto& [subj, values] : p->second)
            unify(s, b, Value(subj), [&] {
              for (const auto& lit : values) match_value(lit);
            });
        }
        return;
      }
      case Atom::Kind::kTopo: {
        const Arg& x = atom.args[0];
        const Arg& y = atom.args[1];
        auto candidates = [&](const Arg& a) {
          std::vector<std::string> out;
          if (is_bound(a, b)) {
            auto ind = individual(a, b);
            if (!ind) throw TypeError(atom.name + " applied to a literal");
            out.push_back(*ind);
          } else {
            out = registry_.names();
          }
          return out;
        };
        const auto xs = candidates(x);
        const auto ys = candidates(y);
        for (const auto& xi : xs) {
          for (const auto& yi : ys) {
            if (cache_.relation(xi, yi) != atom.relation) continue;
            topo_.push_back({Fact::Kind::kTriple, xi, topo_property(atom.relation), yi});
            unify(x, b, Value(xi), [&] { unify(y, b, Value(yi), next); });
          }
        }
        return;
      }
      case Atom::Kind::kCompare: {
        const Value& l = value(atom.args[0], b);
        const Value& r = value(atom.args[1], b);
        auto number = [&](const Value& v) -> const Rat& {
          if (v.index() != 1 || !std::get<1>(v).is_number())
            throw TypeError(atom.name + " needs numeric operands, got '" + value_string(v) + "'");
          return std::get<1>(v).number();
        };
        bool holds = false;
        switch (atom.comparison) {
          case Comparison::kLessThan: holds = number(l) < number(r); break;
          case Comparison::kGreaterThan: holds = number(l) > number(r); break;
          case Comparison::kEqual: holds = l == r; break;
        }
        if (holds) next();
        return;
      }
      case Atom::Kind::kSelect:
        return;
    }
  }

  void emit(const Binding& b) {
    if (rule_->query) {
      if (results_) results_->push_back(b);
      return;
    }
    for (const auto& h : rule_->head) {
      auto subj = individual(h.args[0], b);
      if (!subj) throw TypeError("head atom " + h.name + " would assert a fact about a literal");
      if (h.kind == Atom::Kind::kClass) {
        heads_.push_back({Fact::Kind::kClass, *subj, h.name, {}});
        continue;
      }
      auto obj = individual(h.args[1], b);
      if (!obj) throw TypeError("head atom " + h.name + " would relate an individual to a literal");
      heads_.push_back({Fact::Kind::kTriple, *subj, h.name, *obj});
    }
  }

  KnowledgeBase& kb_;
  const GeometryRegistry& registry_;
  RelationCache cache_;

  const CompiledRule* rule_ = nullptr;
  std::vector<size_t> order_;
  const std::vector<const Fact*>* delta_ = nullptr;
  std::optional<size_t> delta_atom_;
  std::vector<Binding>* results_ = nullptr;
  std::vector<Pending> heads_;
  std::vector<Pending> topo_;
};

}  // namespace

RunReport run(KnowledgeBase& kb, const GeometryRegistry& registry, const std::vector<Rule>& rules,
              const RunOptions& options) {
  RunReport report;

  // Head properties not yet in the vocabulary are declared bare.
  for (const auto& r : rules)
    for (const auto& h : r.head)
      if (h.kind == Atom::Kind::kProperty && !kb.property(h.name) && !kb.is_data_property(h.name))
        kb.declare_property({h.name, {}, std::nullopt});

  std::vector<CompiledRule> compiled;
  for (const auto& r : rules) compiled.push_back(compile(r, kb));

  std::vector<size_t> order = options.rule_order;
  if (order.empty())
    for (size_t i = 0; i < compiled.size(); ++i) order.push_back(i);

  Engine engine(kb, registry, options.memoize);

  auto flush = [&] {
    size_t added = 0;
    for (const auto& p : engine.topo_facts())
      if (kb.assert_triple(p.subject, p.property, p.object)) ++report.enriched, ++added;
    engine.topo_facts().clear();
    for (const auto& p : engine.head_facts()) {
      bool fresh = p.kind == Fact::Kind::kClass ? kb.assert_class(p.subject, p.property)
                                                : kb.assert_triple(p.subject, p.property, p.object);
      if (fresh) ++report.derived, ++added;
    }
    engine.head_facts().clear();
    return added;
  };

  // Round zero is naive; later rounds join each fact atom against the
  // facts logged since the previous round. Query bodies take part so their
  // builtin successes reach the knowledge base before results are read.
  size_t mark = kb.log().size();
  for (size_t i : order) {
    engine.evaluate(compiled[i], std::nullopt, nullptr, nullptr);
    flush();
  }
  report.rounds = 1;

  for (;;) {
    const size_t end = kb.log().size();
    if (mark == end) {
      size_t closed = materialize(kb);
      report.materialized += closed;
      if (closed == 0) break;
      continue;
    }
    std::vector<const Fact*> delta;
    for (size_t i = mark; i < end; ++i) delta.push_back(&kb.log()[i]);
    // The log may grow (and reallocate) while this round runs.
    std::vector<Fact> delta_copy;
    delta_copy.reserve(delta.size());
    for (const Fact* f : delta) delta_copy.push_back(*f);
    delta.clear();
    for (const auto& f : delta_copy) delta.push_back(&f);
    mark = end;

    for (size_t i : order) {
      const CompiledRule& rule = compiled[i];
      for (size_t a = 0; a < rule.body.size(); ++a) {
        if (!rule.body[a].reads_facts()) continue;
        engine.evaluate(rule, a, &delta, nullptr);
        flush();
      }
    }
    ++report.rounds;
  }

  for (size_t i = 0; i < compiled.size(); ++i) {
    if (!compiled[i].query) continue;
    std::vector<Binding> rows;
    engine.evaluate(compiled[i], std::nullopt, nullptr, &rows);
    if (flush() > 0) report.materialized += materialize(kb);

    QueryResult result;
    const Atom& select = rules[i].head.front();
    std::vector<int> slots;
    for (const auto& t : select.args) {
      result.columns.push_back("?" + t.name);
      auto it = std::find(compiled[i].slot_names.begin(), compiled[i].slot_names.end(), t.name);
      slots.push_back(static_cast<int>(it - compiled[i].slot_names.begin()));
    }
    std::set<std::vector<std::string>> unique;
    for (const auto& b : rows) {
      std::vector<std::string> row;
      for (int s : slots) row.push_back(value_string(*b[s]));
      unique.insert(std::move(row));
    }
    result.rows.assign(unique.begin(), unique.end());
    report.queries.push_back(std::move(result));
  }
  report.geometry_evaluations = engine.geometry_evaluations();
  return report;
}

}  // namespace topo9im
