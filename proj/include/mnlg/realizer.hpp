// Surface realization of a completed derivation: lexical lookup, agreement,
// inflection, and punctuation. Literal `form` leaves pass through verbatim;
// `lemma` leaves go through the lexicon.
#pragma once

#include "mnlg/generator.hpp"
#include "mnlg/referring.hpp"

namespace mnlg {

struct Token {
  enum class Spacing { normal, no_space_before };
  std::string surface;
  Spacing spacing = Spacing::normal;
  std::string source;  // originating tree id / lemma, for diagnostics
};

// Entry for a lexical leaf: matches lemma + category (the leaf's type must
// be a subtype of the entry's category); pragmatic features carried on
// currentAct (polite, emotion) break ties between entries. Throws
// RealizeError when nothing matches.
const LexEntry* lex_select(const FsPtr& leaf, const Lexicon& lexicon,
                           const Bindings& binds, const TypeHierarchy& h);

// Exact best form-bundle match (largest bundle subsumed by the request);
// falls back to regular morphology (+s / +s / +ed) with a lint warning.
std::string inflect(const LexEntry& entry, const FeatureBundle& bundle,
                    std::vector<std::string>* warnings = nullptr);

// Unifies the subject np's agr bundle onto every finite-verb leaf of each
// clause (the grammar may or may not have linked them itself). Conflicting
// bundles are a grammar bug and throw rather than realize silently.
DerivationNode apply_agreement(const DerivationNode& d, const TypeHierarchy& h);

std::vector<Token> realize_tokens(const DerivationNode& d, const Lexicon& lexicon,
                                  const TypeHierarchy& h,
                                  std::vector<std::string>* warnings = nullptr);

// Capitalizes sentence-initial tokens, joins with single spaces (none before
// punctuation), and closes the utterance with the act type's terminal mark
// unless the last token already carries one.
std::string punctuate(const std::vector<Token>& tokens,
                      const std::string& act_type);

FeatureBundle bundle_from_fs(const Value& agr, const Bindings& binds);

}  // namespace mnlg
