#include "ielc/parser.hpp"

#include <cctype>
#include <sstream>

namespace ielc {

namespace {

enum class Tok {
  Ident,
  Lambda,
  Dot,
  LParen,
  RParen,
  Less,
  Greater,
  Comma,
  Colon,
  Arrow,
  Star,
  Equals,
  Underscore,
  Tilde,
  Amp,
  Pipe,
  KwLet,
  KwO,
  KwIn,
  KwPure,
  KwP1,
  KwP2,
  KwFalse,
  End,
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Lambda: return "'\\'";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Less: return "'<'";
    case Tok::Greater: return "'>'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Arrow: return "'->'";
    case Tok::Star: return "'*'";
    case Tok::Equals: return "'='";
    case Tok::Underscore: return "'_'";
    case Tok::Tilde: return "'~'";
    case Tok::Amp: return "'&'";
    case Tok::Pipe: return "'|'";
    case Tok::KwLet: return "'let'";
    case Tok::KwO: return "'o'";
    case Tok::KwIn: return "'in'";
    case Tok::KwPure: return "'pure'";
    case Tok::KwP1: return "'p1'";
    case Tok::KwP2: return "'p2'";
    case Tok::KwFalse: return "'false'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

struct LexFail {
  SourceSpan span;
  std::string message;
};

Result<std::vector<Token>, LexFail> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto span_at = [&](std::size_t start, std::size_t end, int l, int c) {
    return SourceSpan{static_cast<int>(start), static_cast<int>(end), l, c};
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {  // line comment
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    std::size_t start = i;
    int sl = line, sc = col;
    auto single = [&](Tok k) {
      out.push_back({k, std::string(1, c), span_at(start, start + 1, sl, sc)});
      ++i;
      ++col;
    };
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_' || src[j] == '\''))
        ++j;
      std::string word = src.substr(i, j - i);
      Tok k = Tok::Ident;
      if (word == "let") k = Tok::KwLet;
      else if (word == "o") k = Tok::KwO;
      else if (word == "in") k = Tok::KwIn;
      else if (word == "pure") k = Tok::KwPure;
      else if (word == "p1") k = Tok::KwP1;
      else if (word == "p2") k = Tok::KwP2;
      else if (word == "false") k = Tok::KwFalse;
      out.push_back({k, word, span_at(i, j, sl, sc)});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    switch (c) {
      case '\\': single(Tok::Lambda); break;
      case '.': single(Tok::Dot); break;
      case '(': single(Tok::LParen); break;
      case ')': single(Tok::RParen); break;
      case '<': single(Tok::Less); break;
      case '>': single(Tok::Greater); break;
      case ',': single(Tok::Comma); break;
      case ':': single(Tok::Colon); break;
      case '*': single(Tok::Star); break;
      case '=': single(Tok::Equals); break;
      case '_': single(Tok::Underscore); break;
      case '~': single(Tok::Tilde); break;
      case '&': single(Tok::Amp); break;
      case '|': single(Tok::Pipe); break;
      case '-':
        if (i + 1 < src.size() && src[i + 1] == '>') {
          out.push_back({Tok::Arrow, "->", span_at(i, i + 2, sl, sc)});
          i += 2;
          col += 2;
        } else {
          return LexFail{span_at(i, i + 1, sl, sc), "stray '-'"};
        }
        break;
      default:
        return LexFail{span_at(i, i + 1, sl, sc),
                       std::string("unexpected character '") + c + "'"};
    }
  }
  int n = static_cast<int>(src.size());
  out.push_back({Tok::End, "", SourceSpan{n, n, line, col}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  Token eat() { return toks_[pos_++]; }

  Token expect(Tok k) {
    if (!at(k)) throw err({tok_name(k)});
    return eat();
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    throw err(std::move(expected));
  }

  ParseError err(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string msg = "unexpected ";
    msg += t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    return ParseError{t.span, msg, std::move(expected)};
  }

  // ---- types ----

  TypePtr type() {
    TypePtr lhs = prod();
    if (at(Tok::Arrow)) {
      eat();
      return arrow(lhs, type());
    }
    return lhs;
  }

  TypePtr prod() {
    TypePtr lhs = modal();
    while (at(Tok::Star)) {
      eat();
      lhs = product(lhs, modal());
    }
    return lhs;
  }

  TypePtr modal() {
    if (at(Tok::Ident) && peek().text == "O") {
      eat();
      return circle(modal());
    }
    return type_atom();
  }

  TypePtr type_atom() {
    if (at(Tok::Ident)) return atom(eat().text);
    if (at(Tok::LParen)) {
      eat();
      TypePtr t = type();
      expect(Tok::RParen);
      return t;
    }
    fail({"identifier", "'('"});
  }

  // ---- terms ----

  TermPtr term() {
    if (at(Tok::Lambda)) {
      SourceSpan s = eat().span;
      std::string binder = expect(Tok::Ident).text;
      TypePtr annot;
      if (at(Tok::Colon)) {
        eat();
        annot = type();
      }
      expect(Tok::Dot);
      TermPtr body = term();
      return with_span(lam(binder, annot, body), join(s, body->span));
    }
    if (at(Tok::KwLet)) {
      SourceSpan s = eat().span;
      expect(Tok::KwO);
      std::vector<std::string> binders = binder_list();
      for (std::size_t i = 0; i < binders.size(); ++i)
        for (std::size_t k = i + 1; k < binders.size(); ++k)
          if (binders[i] == binders[k])
            throw ParseError{peek().span,
                             "duplicate binder '" + binders[i] + "'",
                             {}};
      expect(Tok::Equals);
      std::vector<TermPtr> args = arg_list();
      if (binders.size() != args.size())
        throw ParseError{peek().span,
                         "let binds " + std::to_string(binders.size()) +
                             " names but has " + std::to_string(args.size()) +
                             " arguments",
                         {}};
      expect(Tok::KwIn);
      TermPtr body = term();
      return with_span(let_circ(std::move(binders), std::move(args), body),
                       join(s, body->span));
    }
    return application();
  }

  TermPtr application() {
    TermPtr head = term_atom();
    while (starts_atom()) {
      TermPtr arg = term_atom();
      head = with_span(app(head, arg), join(head->span, arg->span));
    }
    return head;
  }

  bool starts_atom() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::KwPure:
      case Tok::KwP1:
      case Tok::KwP2:
      case Tok::Less:
      case Tok::LParen:
        return true;
      default:
        return false;
    }
  }

  TermPtr term_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident: {
        Token tok = eat();
        return with_span(var(tok.text), tok.span);
      }
      case Tok::KwPure: {
        SourceSpan s = eat().span;
        TermPtr body = term_atom();
        return with_span(pure(body), join(s, body->span));
      }
      case Tok::KwP1:
      case Tok::KwP2: {
        int idx = t.kind == Tok::KwP1 ? 1 : 2;
        SourceSpan s = eat().span;
        TermPtr body = term_atom();
        return with_span(proj(idx, body), join(s, body->span));
      }
      case Tok::Less: {
        SourceSpan s = eat().span;
        TermPtr first = term();
        expect(Tok::Comma);
        TermPtr second = term();
        SourceSpan e = expect(Tok::Greater).span;
        return with_span(pair(first, second), join(s, e));
      }
      case Tok::LParen: {
        eat();
        TermPtr inner = term();
        expect(Tok::RParen);
        return inner;
      }
      default:
        fail({"identifier", "'pure'", "'p1'", "'p2'", "'<'", "'('"});
    }
  }

  std::vector<std::string> binder_list() {
    if (at(Tok::Underscore)) {
      eat();
      return {};
    }
    std::vector<std::string> names;
    names.push_back(expect(Tok::Ident).text);
    while (at(Tok::Comma)) {
      eat();
      names.push_back(expect(Tok::Ident).text);
    }
    return names;
  }

  std::vector<TermPtr> arg_list() {
    if (at(Tok::Underscore)) {
      eat();
      return {};
    }
    std::vector<TermPtr> args;
    args.push_back(term());
    while (at(Tok::Comma)) {
      eat();
      args.push_back(term());
    }
    return args;
  }

  // ---- formulas ----

  FormulaPtr formula() {
    FormulaPtr lhs = disj();
    if (at(Tok::Arrow)) {
      eat();
      return implies(lhs, formula());
    }
    return lhs;
  }

  FormulaPtr disj() {
    FormulaPtr lhs = conj();
    while (at(Tok::Pipe)) {
      eat();
      lhs = f_or(lhs, conj());
    }
    return lhs;
  }

  FormulaPtr conj() {
    FormulaPtr lhs = funit();
    while (at(Tok::Amp)) {
      eat();
      lhs = f_and(lhs, funit());
    }
    return lhs;
  }

  FormulaPtr funit() {
    if (at(Tok::Tilde)) {
      eat();
      return f_not(funit());
    }
    if (at(Tok::Ident) && peek().text == "O") {
      eat();
      return circ(funit());
    }
    if (at(Tok::Ident)) return letter(eat().text);
    if (at(Tok::KwFalse)) {
      eat();
      return bottom();
    }
    if (at(Tok::LParen)) {
      eat();
      FormulaPtr f = formula();
      expect(Tok::RParen);
      return f;
    }
    fail({"identifier", "'false'", "'~'", "'O'", "'('"});
  }

  void expect_end() {
    if (!at(Tok::End)) fail({"end of input"});
  }

 private:
  static SourceSpan join(SourceSpan a, SourceSpan b) {
    SourceSpan s = a;
    if (b.end > s.end) s.end = b.end;
    return s;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

template <class T, class F>
Result<T, ParseError> run_parser(const std::string& text, F f) {
  auto toks = lex(text);
  if (!toks) return ParseError{toks.error().span, toks.error().message, {}};
  Parser p(std::move(toks).take());
  try {
    T value = f(p);
    p.expect_end();
    return value;
  } catch (ParseError& e) {
    return e;
  }
}

}  // namespace

Result<TermPtr, ParseError> parse_term(const std::string& text) {
  return run_parser<TermPtr>(text, [](Parser& p) { return p.term(); });
}

Result<TypePtr, ParseError> parse_type(const std::string& text) {
  return run_parser<TypePtr>(text, [](Parser& p) { return p.type(); });
}

Result<FormulaPtr, ParseError> parse_formula(const std::string& text) {
  return run_parser<FormulaPtr>(text, [](Parser& p) { return p.formula(); });
}

Result<Context, ParseError> parse_context(const std::string& text) {
  Context ctx;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  int offset = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    int line_start = offset;
    offset += static_cast<int>(raw.size()) + 1;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;
    auto colon = line.find(':');
    auto line_span = [&](const std::string& msg) {
      return ParseError{SourceSpan{line_start,
                                   line_start + static_cast<int>(raw.size()),
                                   lineno, 1},
                        msg,
                        {}};
    };
    if (colon == std::string::npos)
      return line_span("expected 'name : type'");
    std::string name = line.substr(0, colon);
    // trim
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back())))
      name.pop_back();
    while (!name.empty() &&
           std::isspace(static_cast<unsigned char>(name.front())))
      name.erase(name.begin());
    if (name.empty()) return line_span("missing variable name");
    auto ty = parse_type(line.substr(colon + 1));
    if (!ty)
      return line_span("bad type for '" + name + "': " + ty.error().message);
    if (ctx.contains(name))
      return line_span("duplicate declaration of '" + name + "'");
    ctx.decls.emplace_back(name, ty.value());
  }
  return ctx;
}

// ---------------------------------------------------------------- printing

namespace {

// Type contexts: 0 arrow operand allowed, 1 product, 2 modal argument.
void print_type_at(const TypePtr& t, int level, std::string& out) {
  if (auto* x = as<TAtom>(t)) {
    out += x->name;
    return;
  }
  if (auto* x = as<TArrow>(t)) {
    bool parens = level > 0;
    if (parens) out += '(';
    print_type_at(x->dom, 1, out);
    out += " -> ";
    print_type_at(x->cod, 0, out);
    if (parens) out += ')';
    return;
  }
  if (auto* x = as<TProduct>(t)) {
    bool parens = level > 1;
    if (parens) out += '(';
    print_type_at(x->left, 1, out);
    out += " * ";
    print_type_at(x->right, 2, out);
    if (parens) out += ')';
    return;
  }
  auto* x = as<TCircle>(t);
  out += "O ";
  print_type_at(x->body, 2, out);
}

// Term contexts: 0 full term, 1 application operand, 2 atom.
void print_term_at(const TermPtr& t, int level, std::string& out) {
  if (auto* n = as<Var>(t)) {
    out += n->name;
    return;
  }
  if (auto* n = as<Lam>(t)) {
    bool parens = level > 0;
    if (parens) out += '(';
    out += '\\';
    out += n->binder;
    if (n->annot) {
      out += ':';
      print_type_at(n->annot, 0, out);
    }
    out += ". ";
    print_term_at(n->body, 0, out);
    if (parens) out += ')';
    return;
  }
  if (auto* n = as<App>(t)) {
    bool parens = level > 1;
    if (parens) out += '(';
    print_term_at(n->fn, 1, out);
    out += ' ';
    print_term_at(n->arg, 2, out);
    if (parens) out += ')';
    return;
  }
  if (auto* n = as<Pair>(t)) {
    out += '<';
    print_term_at(n->first, 0, out);
    out += ", ";
    print_term_at(n->second, 0, out);
    out += '>';
    return;
  }
  if (auto* n = as<Proj>(t)) {
    out += n->index == 1 ? "p1 " : "p2 ";
    print_term_at(n->body, 2, out);
    return;
  }
  if (auto* n = as<Pure>(t)) {
    out += "pure ";
    print_term_at(n->body, 2, out);
    return;
  }
  auto* n = as<LetCirc>(t);
  bool parens = level > 0;
  if (parens) out += '(';
  out += "let o ";
  if (n->binders.empty()) {
    out += "_ = _";
  } else {
    for (std::size_t i = 0; i < n->binders.size(); ++i) {
      if (i) out += ',';
      out += n->binders[i];
    }
    out += " = ";
    for (std::size_t i = 0; i < n->args.size(); ++i) {
      if (i) out += ", ";
      print_term_at(n->args[i], 0, out);
    }
  }
  out += " in ";
  print_term_at(n->body, 0, out);
  if (parens) out += ')';
}

// Formula contexts: 0 implication, 1 disjunct, 2 conjunct, 3 unit.
void print_formula_at(const FormulaPtr& f, int level, std::string& out) {
  if (auto* x = as<FLetter>(f)) {
    out += x->name;
    return;
  }
  if (as<FBottom>(f)) {
    out += "false";
    return;
  }
  if (auto* x = as<FImplies>(f)) {
    if (as<FBottom>(x->right)) {  // print as negation
      out += '~';
      print_formula_at(x->left, 3, out);
      return;
    }
    bool parens = level > 0;
    if (parens) out += '(';
    print_formula_at(x->left, 1, out);
    out += " -> ";
    print_formula_at(x->right, 0, out);
    if (parens) out += ')';
    return;
  }
  if (auto* x = as<FOr>(f)) {
    bool parens = level > 1;
    if (parens) out += '(';
    print_formula_at(x->left, 1, out);
    out += " | ";
    print_formula_at(x->right, 2, out);
    if (parens) out += ')';
    return;
  }
  if (auto* x = as<FAnd>(f)) {
    bool parens = level > 2;
    if (parens) out += '(';
    print_formula_at(x->left, 2, out);
    out += " & ";
    print_formula_at(x->right, 3, out);
    if (parens) out += ')';
    return;
  }
  auto* x = as<FCirc>(f);
  out += "O ";
  print_formula_at(x->body, 3, out);
}

}  // namespace

std::string print_term(const TermPtr& t) {
  std::string out;
  print_term_at(t, 0, out);
  return out;
}

std::string print_type(const TypePtr& t) {
  std::string out;
  print_type_at(t, 0, out);
  return out;
}

std::string print_formula(const FormulaPtr& f) {
  std::string out;
  print_formula_at(f, 0, out);
  return out;
}

std::string print_context(const Context& ctx) {
  std::string out;
  for (const auto& [name, ty] : ctx.decls) {
    out += name;
    out += " : ";
    out += print_type(ty);
    out += '\n';
  }
  return out;
}

std::string format_error(const ParseError& e) {
  std::ostringstream os;
  os << e.span.line << ":" << e.span.column << ": " << e.message;
  if (!e.expected.empty()) {
    os << "; expected ";
    for (std::size_t i = 0; i < e.expected.size(); ++i) {
      if (i) os << (i + 1 == e.expected.size() ? " or " : ", ");
      os << e.expected[i];
    }
  }
  return os.str();
}

}  // namespace ielc
