#include "mnlg/realizer.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace mnlg {

// ---------------------------------------------------------------------------
// Lexical selection

namespace {

std::optional<std::string> atom_at(const FsPtr& fs,
                                   const std::vector<std::string>& path,
                                   const Bindings& b) {
  auto v = get_path(fs, path, b);
  if (!v) return std::nullopt;
  if (const Atom* a = as_atom(*v)) return a->text;
  return std::nullopt;
}

// pragmatic context visible on the leaf via currentAct percolation
std::map<std::string, std::string> pragmatics_of(const FsPtr& leaf,
                                                 const Bindings& b) {
  std::map<std::string, std::string> out;
  if (auto polite = atom_at(leaf, {"currentAct", "speaker", "polite"}, b))
    out["polite"] = *polite;
  if (auto emotion = atom_at(leaf, {"currentAct", "emotion"}, b))
    out["emotion"] = *emotion;
  return out;
}

}  // namespace

const LexEntry* lex_select(const FsPtr& leaf, const Lexicon& lexicon,
                           const Bindings& binds, const TypeHierarchy& h) {
  auto lemma = atom_at(leaf, {"lemma"}, binds);
  if (!lemma) throw RealizeError("lexical leaf has no ground lemma");
  // the leaf's own type is the category; entries whose category is a
  // supertype also qualify (aux leaves may use v entries)
  std::vector<const LexEntry*> cands;
  for (const LexEntry* e : lexicon.lookup(*lemma, "")) {
    auto cat = h.find(e->category);
    if (cat && h.subtype(leaf->type, *cat)) cands.push_back(e);
  }
  if (cands.empty())
    throw RealizeError("missing lexicon entry for lemma '" + *lemma +
                       "' with category '" + h.name(leaf->type) + "'");

  const std::map<std::string, std::string> prag = pragmatics_of(leaf, binds);
  const LexEntry* best = nullptr;
  int best_score = std::numeric_limits<int>::min();
  for (const LexEntry* e : cands) {
    int score = 0;
    for (const auto& [k, v] : e->features) {
      auto it = prag.find(k);
      if (it == prag.end()) continue;
      score += (it->second == v) ? 1 : -1;
    }
    if (score > best_score) {
      best_score = score;
      best = e;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Inflection

FeatureBundle bundle_from_fs(const Value& agr, const Bindings& binds) {
  FeatureBundle out;
  Deref d = deref(agr, binds);
  const FsPtr* fs = as_fs(d.value);
  if (!fs) return out;
  for (const auto& [k, v] : (*fs)->feats) {
    Deref vd = deref(v, binds);
    if (const Atom* a = as_atom(vd.value)) out[k] = a->text;
  }
  return out;
}

namespace {

bool bundle_subsumed(const FeatureBundle& form, const FeatureBundle& request) {
  for (const auto& [k, v] : form) {
    auto it = request.find(k);
    if (it == request.end() || it->second != v) return false;
  }
  return true;
}

std::string describe_bundle(const FeatureBundle& b) {
  std::string s = "{";
  for (const auto& [k, v] : b) {
    if (s.size() > 1) s += ", ";
    s += k + "=" + v;
  }
  return s + "}";
}

}  // namespace

std::string inflect(const LexEntry& entry, const FeatureBundle& bundle,
                    std::vector<std::string>* warnings) {
  // most specific matching form wins; first declared wins ties
  const std::string* best = nullptr;
  size_t best_size = 0;
  for (const auto& [fb, surface] : entry.forms) {
    if (!bundle_subsumed(fb, bundle)) continue;
    if (!best || fb.size() > best_size) {
      best = &surface;
      best_size = fb.size();
    }
  }
  if (best) return *best;

  auto get = [&](const char* k) -> std::string {
    auto it = bundle.find(k);
    return it == bundle.end() ? "" : it->second;
  };
  std::string surface;
  if (get("tense") == "past")
    surface = entry.lemma + "ed";
  else if (get("number") == "pl")
    surface = entry.lemma + "s";
  else if (get("person") == "3" && get("number") == "sg" &&
           get("tense") == "pres")
    surface = entry.lemma + "s";
  else
    surface = entry.lemma;
  if (warnings)
    warnings->push_back("no form of '" + entry.lemma + "' matches " +
                        describe_bundle(bundle) + "; using regular fallback '" +
                        surface + "'");
  return surface;
}

// ---------------------------------------------------------------------------
// Agreement

namespace {

bool type_le(const TypeHierarchy& h, const FsPtr& fs, const char* name) {
  auto t = h.find(name);
  return t && h.subtype(fs->type, *t);
}

// finite-verb leaves of a clause: descend, but stop at embedded nps and
// clauses, which run their own agreement
void verbal_leaves(const DerivationNode& d, const TypeHierarchy& h, bool root,
                   std::vector<const DerivationNode*>& out) {
  if (!root && (type_le(h, d.fs, "np") || type_le(h, d.fs, "s"))) return;
  if (d.children.empty()) {
    if (type_le(h, d.fs, "v") && d.fs->get("lemma")) out.push_back(&d);
    return;
  }
  for (const DerivationNode& c : d.children) verbal_leaves(c, h, false, out);
}

const DerivationNode* subject_np(const DerivationNode& clause,
                                 const TypeHierarchy& h) {
  for (const DerivationNode& c : clause.children)
    if (type_le(h, c.fs, "np")) return &c;
  return nullptr;
}

void unify_clause_agreement(const DerivationNode& d, const TypeHierarchy& h,
                            bool root, Bindings& binds,
                            std::map<const DerivationNode*, FsPtr>& rewrites) {
  if (type_le(h, d.fs, "s") || root) {
    const DerivationNode* subj = subject_np(d, h);
    const Value* agr = subj ? subj->fs->get("agr") : nullptr;
    if (subj && agr) {
      std::vector<const DerivationNode*> verbs;
      for (const DerivationNode& c : d.children) {
        if (&c == subj) continue;
        verbal_leaves(c, h, true, verbs);
      }
      for (const DerivationNode* v : verbs) {
        FsPtr requirement = make_fs(v->fs->type, {{"agr", *agr}});
        auto u = unify(h, v->fs, requirement, binds);
        if (!u)
          throw RealizeError("agreement conflict between subject np and verb '" +
                             print_fs(v->fs, h, binds) + "'");
        rewrites[v] = u->fs;
        binds = u->binds;
      }
    }
  }
  for (const DerivationNode& c : d.children)
    unify_clause_agreement(c, h, false, binds, rewrites);
}

DerivationNode rebuild(const DerivationNode& d, const Bindings& binds,
                       const std::map<const DerivationNode*, FsPtr>& rewrites) {
  auto it = rewrites.find(&d);
  DerivationNode out{resolve_fs(it == rewrites.end() ? d.fs : it->second, binds),
                     {},
                     d.origin,
                     d.referent};
  out.children.reserve(d.children.size());
  for (const DerivationNode& c : d.children)
    out.children.push_back(rebuild(c, binds, rewrites));
  return out;
}

}  // namespace

DerivationNode apply_agreement(const DerivationNode& d, const TypeHierarchy& h) {
  Bindings binds;
  std::map<const DerivationNode*, FsPtr> rewrites;
  unify_clause_agreement(d, h, true, binds, rewrites);
  if (rewrites.empty() && binds.empty()) return d;
  return rebuild(d, binds, rewrites);
}

// ---------------------------------------------------------------------------
// Tokens

namespace {

bool punct_char(char c) {
  return c == '.' || c == '!' || c == '?' || c == ',' || c == ';' || c == ':';
}

}  // namespace

std::vector<Token> realize_tokens(const DerivationNode& d, const Lexicon& lexicon,
                                  const TypeHierarchy& h,
                                  std::vector<std::string>* warnings) {
  std::vector<const DerivationNode*> leaves;
  collect_leaves(d, leaves);
  std::vector<Token> out;
  Bindings none;
  for (const DerivationNode* leaf : leaves) {
    if (auto form = atom_at(leaf->fs, {"form"}, none)) {
      Token t;
      t.surface = *form;
      t.source = leaf->origin;
      if (!t.surface.empty() && punct_char(t.surface[0]))
        t.spacing = Token::Spacing::no_space_before;
      out.push_back(std::move(t));
      continue;
    }
    if (auto lemma = atom_at(leaf->fs, {"lemma"}, none)) {
      const LexEntry* entry;
      try {
        entry = lex_select(leaf->fs, lexicon, none, h);
      } catch (const RealizeError& e) {
        throw RealizeError(std::string(e.what()) + " (category '" +
                           h.name(leaf->fs->type) + "', tree '" + leaf->origin +
                           "')");
      }
      FeatureBundle bundle;
      if (const Value* agr = leaf->fs->get("agr"))
        bundle = bundle_from_fs(*agr, none);
      if (auto tense = atom_at(leaf->fs, {"tense"}, none))
        bundle["tense"] = *tense;
      Token t;
      t.surface = inflect(*entry, bundle, warnings);
      t.source = *lemma + "@" + leaf->origin;
      if (!t.surface.empty() && punct_char(t.surface[0]))
        t.spacing = Token::Spacing::no_space_before;
      out.push_back(std::move(t));
      continue;
    }
    throw RealizeError("leaf from tree '" + leaf->origin +
                       "' is neither a literal nor a lexical leaf: " +
                       print_fs(leaf->fs, h, none));
  }
  for (const Token& t : out)
    if (t.surface.empty())
      throw RealizeError("empty surface token from " + t.source);
  return out;
}

// ---------------------------------------------------------------------------
// Punctuation

namespace {

bool terminal_char(char c) { return c == '.' || c == '!' || c == '?'; }

std::string capitalize(std::string s) {
  for (char& c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '\'' && c != '"')
      break;
  }
  return s;
}

}  // namespace

std::string punctuate(const std::vector<Token>& tokens,
                      const std::string& act_type) {
  std::string out;
  bool cap_next = true;
  for (const Token& t : tokens) {
    std::string s = t.surface;
    if (cap_next) {
      s = capitalize(s);
      cap_next = false;
    }
    const bool glue = t.spacing == Token::Spacing::no_space_before ||
                      (!s.empty() && punct_char(s[0]));
    if (!out.empty() && !glue) out += ' ';
    out += s;
    if (!s.empty() && terminal_char(s.back())) cap_next = true;
  }
  if (!out.empty() && !terminal_char(out.back()))
    out += (act_type == "question") ? '?' : '.';
  return out;
}

}  // namespace mnlg
