// Surface notation for feature structures and the shared tokenizer used by
// the grammar-file loader:
//
//   <s & currentAct!(type!greeting & speaker!name!?Speaker) & sem!"none"
//
// `<type` constrains the node type, `a!b!v` abbreviates nested structures,
// `&` merges conjuncts by unification, `?Name` is a logic variable, `_` a
// fresh anonymous one, `f(a,b)` a term, `[a,b|?T]` a list.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mnlg/feature.hpp"

namespace mnlg {

enum class Tok {
  kEnd, kIdent, kString, kNumber, kVar, kAnon,
  kLess, kAmp, kBang, kLParen, kRParen, kLBracket, kRBracket,
  kPipe, kComma, kDot, kColon, kDash, kLBrace, kRBrace, kArrow, kEquals,
};

struct LexToken {
  Tok kind = Tok::kEnd;
  std::string text;
  int line = 1, col = 1;
};

// '#' starts a line comment
class Lexer {
 public:
  explicit Lexer(std::string_view src);
  const LexToken& peek() const { return cur_; }
  LexToken next();                        // returns current, advances
  LexToken expect(Tok kind, const char* what);
  bool accept(Tok kind);
  [[noreturn]] void fail(const std::string& msg) const;

 private:
  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  LexToken cur_;
  void advance();
  char get();
};

// Parses one expression from a lexer positioned at its first token; stops at
// the first token that cannot continue the expression. Conjuncts are merged
// by unification against `binds` (extended in place; variables of sibling
// expressions parsed with the same environment stay shared); a conflict is a
// SyntaxError.
FsPtr parse_fs_expr(Lexer& lex, const TypeHierarchy& h, uint64_t& anon_counter,
                    Bindings& binds);

// Whole-string convenience (used heavily in tests): the entire text must be
// one expression. Bound variables are substituted into the result.
FsPtr parse_fs(std::string_view text, const TypeHierarchy& h);

// Parses a single value (atom / var / term / list / typed structure).
Value parse_value_text(std::string_view text, const TypeHierarchy& h);

}  // namespace mnlg
