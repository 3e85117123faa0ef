#include "mnlg/reader.hpp"

#include <cctype>

namespace mnlg {

// ---------------------------------------------------------------------------
// Lexer

Lexer::Lexer(std::string_view src) : src_(src) { advance(); }

char Lexer::get() {
  char c = src_[pos_++];
  if (c == '\n') {
    ++line_;
    col_ = 1;
  } else {
    ++col_;
  }
  return c;
}

void Lexer::advance() {
  // skip whitespace and comments
  for (;;) {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      get();
    if (pos_ < src_.size() && src_[pos_] == '#') {
      while (pos_ < src_.size() && src_[pos_] != '\n') get();
      continue;
    }
    break;
  }
  cur_ = LexToken{Tok::kEnd, "", line_, col_};
  if (pos_ >= src_.size()) return;
  const int line = line_, col = col_;
  char c = get();
  auto tok = [&](Tok k, std::string text) {
    cur_ = LexToken{k, std::move(text), line, col};
  };
  switch (c) {
    case '<': return tok(Tok::kLess, "<");
    case '&': return tok(Tok::kAmp, "&");
    case '!': return tok(Tok::kBang, "!");
    case '(': return tok(Tok::kLParen, "(");
    case ')': return tok(Tok::kRParen, ")");
    case '[': return tok(Tok::kLBracket, "[");
    case ']': return tok(Tok::kRBracket, "]");
    case '|': return tok(Tok::kPipe, "|");
    case ',': return tok(Tok::kComma, ",");
    case '.': return tok(Tok::kDot, ".");
    case ':': return tok(Tok::kColon, ":");
    case '{': return tok(Tok::kLBrace, "{");
    case '}': return tok(Tok::kRBrace, "}");
    case '=': return tok(Tok::kEquals, "=");
    case '-':
      if (pos_ < src_.size() && src_[pos_] == '>') {
        get();
        return tok(Tok::kArrow, "->");
      }
      return tok(Tok::kDash, "-");
    default: break;
  }
  if (c == '"') {
    std::string s;
    for (;;) {
      if (pos_ >= src_.size())
        throw SyntaxError("unterminated string", line, col);
      char d = get();
      if (d == '"') break;
      if (d == '\\') {
        if (pos_ >= src_.size())
          throw SyntaxError("unterminated escape", line, col);
        d = get();
      }
      s.push_back(d);
    }
    return tok(Tok::kString, std::move(s));
  }
  if (c == '?') {
    std::string s;
    if (pos_ >= src_.size() ||
        !std::isalpha(static_cast<unsigned char>(src_[pos_])))
      throw SyntaxError("variable name must start with a letter", line, col);
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      s.push_back(get());
    return tok(Tok::kVar, std::move(s));
  }
  if (std::isdigit(static_cast<unsigned char>(c))) {
    std::string s(1, c);
    bool dot = false;
    while (pos_ < src_.size()) {
      char d = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(d))) {
        s.push_back(get());
      } else if (d == '.' && !dot && pos_ + 1 < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        dot = true;
        s.push_back(get());
      } else {
        break;
      }
    }
    return tok(Tok::kNumber, std::move(s));
  }
  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
    std::string s(1, c);
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      s.push_back(get());
    if (s == "_") return tok(Tok::kAnon, "_");
    return tok(Tok::kIdent, std::move(s));
  }
  throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
}

LexToken Lexer::next() {
  LexToken t = cur_;
  advance();
  return t;
}

LexToken Lexer::expect(Tok kind, const char* what) {
  if (cur_.kind != kind)
    throw SyntaxError(std::string("expected ") + what + ", found '" +
                          (cur_.kind == Tok::kEnd ? "<end>" : cur_.text) + "'",
                      cur_.line, cur_.col);
  return next();
}

bool Lexer::accept(Tok kind) {
  if (cur_.kind != kind) return false;
  next();
  return true;
}

void Lexer::fail(const std::string& msg) const {
  throw SyntaxError(msg, cur_.line, cur_.col);
}

// ---------------------------------------------------------------------------
// Expression parser

namespace {

struct ExprParser {
  Lexer& lex;
  const TypeHierarchy& hier;
  uint64_t& anon;
  Bindings* binds;

  Value fresh_anon() { return Value{Var{"_" + std::to_string(++anon)}}; }

  Value parse_value() {
    const LexToken& t = lex.peek();
    switch (t.kind) {
      case Tok::kLess: {
        lex.next();
        LexToken name = lex.expect(Tok::kIdent, "type name");
        return Value{make_fs(hier.require(name.text))};
      }
      case Tok::kLParen: {
        lex.next();
        Value v = parse_expr();
        lex.expect(Tok::kRParen, "')'");
        return v;
      }
      case Tok::kVar:
        return Value{Var{lex.next().text}};
      case Tok::kAnon:
        lex.next();
        return fresh_anon();
      case Tok::kString:
      case Tok::kNumber:
        return Value{Atom{lex.next().text}};
      case Tok::kLBracket:
        return parse_list();
      case Tok::kIdent: {
        LexToken id = lex.next();
        if (lex.peek().kind == Tok::kLParen) {
          lex.next();
          std::vector<Value> args;
          if (lex.peek().kind != Tok::kRParen) {
            args.push_back(parse_value());
            while (lex.accept(Tok::kComma)) args.push_back(parse_value());
          }
          lex.expect(Tok::kRParen, "')'");
          return make_term(id.text, std::move(args));
        }
        return Value{Atom{id.text}};
      }
      default:
        lex.fail("expected a value");
    }
  }

  Value parse_list() {
    lex.expect(Tok::kLBracket, "'['");
    std::vector<Value> items;
    std::optional<Var> tail;
    if (lex.peek().kind != Tok::kRBracket) {
      items.push_back(parse_value());
      while (lex.accept(Tok::kComma)) items.push_back(parse_value());
      if (lex.accept(Tok::kPipe)) {
        const LexToken& t = lex.peek();
        if (t.kind == Tok::kVar) {
          tail = Var{lex.next().text};
        } else if (t.kind == Tok::kAnon) {
          lex.next();
          tail = Var{std::get<Var>(fresh_anon())};
        } else {
          lex.fail("expected a variable after '|'");
        }
      }
    }
    lex.expect(Tok::kRBracket, "']'");
    return make_list(std::move(items), std::move(tail));
  }

  // one conjunct: `<type`, `(expr)`, or an attribute path ending in a value
  Value parse_conjunct() {
    const LexToken& t = lex.peek();
    if (t.kind == Tok::kLess) {
      lex.next();
      LexToken name = lex.expect(Tok::kIdent, "type name");
      return Value{make_fs(hier.require(name.text))};
    }
    if (t.kind == Tok::kLParen) {
      lex.next();
      Value v = parse_expr();
      lex.expect(Tok::kRParen, "')'");
      return v;
    }
    if (t.kind == Tok::kIdent) {
      LexToken attr = lex.next();
      lex.expect(Tok::kBang, "'!'");
      Value inner = parse_path_tail();
      return Value{make_fs(kTopType, {{attr.text, std::move(inner)}})};
    }
    lex.fail("expected '<type', '(' or an attribute");
  }

  // after `attr!`: either another attribute segment or the final value
  Value parse_path_tail() {
    const LexToken& t = lex.peek();
    if (t.kind == Tok::kIdent) {
      // lookahead: ident followed by '!' is a path segment, ident followed
      // by '(' is a term, anything else is an atom
      Lexer probe = lex;  // cheap copy: string_view + position
      probe.next();
      if (probe.peek().kind == Tok::kBang) {
        LexToken attr = lex.next();
        lex.next();  // '!'
        Value inner = parse_path_tail();
        return Value{make_fs(kTopType, {{attr.text, std::move(inner)}})};
      }
    }
    return parse_value();
  }

  Value parse_expr() {
    LexToken start = lex.peek();
    Value acc = parse_conjunct();
    while (lex.accept(Tok::kAmp)) {
      LexToken at = lex.peek();
      Value next = parse_conjunct();
      Value merged;
      if (!unify_value(hier, acc, next, *binds, merged))
        throw SyntaxError("conflicting constraints in expression", at.line,
                          at.col);
      acc = std::move(merged);
    }
    // an expression must denote a structure
    Deref d = deref(acc, *binds);
    if (!as_fs(d.value))
      throw SyntaxError("expression does not denote a feature structure",
                        start.line, start.col);
    return acc;
  }
};

}  // namespace

FsPtr parse_fs_expr(Lexer& lex, const TypeHierarchy& h, uint64_t& anon_counter,
                    Bindings& binds) {
  ExprParser p{lex, h, anon_counter, &binds};
  Value v = p.parse_expr();
  Deref d = deref(v, binds);
  return *as_fs(d.value);
}

FsPtr parse_fs(std::string_view text, const TypeHierarchy& h) {
  Lexer lex(text);
  uint64_t anon = 0;
  Bindings binds;
  FsPtr fs = parse_fs_expr(lex, h, anon, binds);
  if (lex.peek().kind != Tok::kEnd)
    throw SyntaxError("trailing input after expression", lex.peek().line,
                      lex.peek().col);
  return resolve_fs(fs, binds);
}

Value parse_value_text(std::string_view text, const TypeHierarchy& h) {
  Lexer lex(text);
  uint64_t anon = 0;
  Bindings binds;
  ExprParser p{lex, h, anon, &binds};
  Value v = p.parse_value();
  if (lex.peek().kind != Tok::kEnd)
    throw SyntaxError("trailing input after value", lex.peek().line,
                      lex.peek().col);
  return resolve(v, binds);
}

}  // namespace mnlg
