#include "mnlg/grammar.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mnlg/reader.hpp"

namespace mnlg {

const char* tree_class_name(TreeClass c) {
  switch (c) {
    case TreeClass::canned: return "canned";
    case TreeClass::template_: return "template";
    case TreeClass::rule: return "rule";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Lexicon

void Lexicon::add(LexEntry e) {
  if (e.forms.empty())
    throw GrammarError("lexicon entry '" + e.lemma + "' has no forms");
  std::set<std::string> seen;
  for (const auto& [bundle, _] : e.forms) {
    std::string key;
    for (const auto& [k, v] : bundle) key += k + "=" + v + ";";
    if (!seen.insert(key).second)
      throw GrammarError("lexicon entry '" + e.lemma +
                         "' repeats a form bundle");
  }
  entries_.push_back(std::move(e));
}

std::vector<const LexEntry*> Lexicon::lookup(const std::string& lemma,
                                             const std::string& category) const {
  std::vector<const LexEntry*> out;
  for (const LexEntry& e : entries_)
    if (e.lemma == lemma && (category.empty() || e.category == category))
      out.push_back(&e);
  return out;
}

const LexEntry* Lexicon::find_exact(const std::string& lemma,
                                    const std::string& category) const {
  for (const LexEntry& e : entries_)
    if (e.lemma == lemma && e.category == category) return &e;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Loader

namespace {

struct Loader {
  Lexer lex;
  Repository repo;
  bool have_hierarchy = false;
  uint64_t anon = 0;

  explicit Loader(std::string_view text) : lex(text) {}

  void run() {
    while (lex.peek().kind != Tok::kEnd) {
      LexToken t = lex.expect(Tok::kIdent, "section keyword");
      if (t.text == "hierarchy") {
        parse_hierarchy();
      } else if (t.text == "conditions") {
        parse_conditions();
      } else if (t.text == "tree") {
        parse_tree();
      } else if (t.text == "lexicon") {
        parse_lexicon();
      } else {
        throw SyntaxError("unknown section '" + t.text + "'", t.line, t.col);
      }
    }
    validate();
  }

  void need_hierarchy(const LexToken& at) {
    if (!have_hierarchy)
      throw SyntaxError("the hierarchy section must precede this section",
                        at.line, at.col);
  }

  void parse_hierarchy() {
    if (have_hierarchy)
      lex.fail("duplicate hierarchy section");
    lex.expect(Tok::kLBrace, "'{'");
    std::vector<std::pair<std::string, std::string>> edges;
    while (lex.peek().kind != Tok::kRBrace) {
      LexToken child = lex.expect(Tok::kIdent, "type name");
      lex.expect(Tok::kLess, "'<'");
      LexToken parent = lex.expect(Tok::kIdent, "type name");
      lex.expect(Tok::kDot, "'.'");
      edges.emplace_back(child.text, parent.text);
    }
    lex.next();
    repo.hierarchy = TypeHierarchy::from_edges(edges);
    have_hierarchy = true;
  }

  void parse_conditions() {
    lex.expect(Tok::kLBrace, "'{'");
    while (lex.peek().kind != Tok::kRBrace) {
      LexToken name = lex.expect(Tok::kIdent, "condition functor");
      // functor/arity written as name / N .  — the '/' is not a token, use ':'
      lex.expect(Tok::kColon, "':'");
      LexToken arity = lex.expect(Tok::kNumber, "arity");
      lex.expect(Tok::kDot, "'.'");
      repo.conditions[name.text] = std::stoi(arity.text);
    }
    lex.next();
  }

  TreeNode parse_tree_body(Bindings& binds);

  void parse_tree() {
    LexToken at = lex.peek();
    need_hierarchy(at);
    LexToken id = lex.expect(Tok::kIdent, "tree id");
    for (const GenTree& t : repo.trees)
      if (t.id == id.text)
        throw SyntaxError("duplicate tree id '" + id.text + "'", id.line, id.col);
    GenTree tree;
    tree.id = id.text;
    tree.root = parse_tree_body(tree.binds);
    index_tree(tree);
    repo.trees.push_back(std::move(tree));
  }

  void index_tree(GenTree& tree) {
    const FsPtr& mother = tree.root.fs;
    tree.mother_type = mother->type;
    if (const Value* sem = mother->get("sem")) {
      tree.sem = *sem;
      tree.sem_is_pattern = is_drs_term(*sem, tree.binds);
      std::vector<std::pair<std::string, Value>> rest;
      for (const auto& [a, v] : mother->feats)
        if (a != "sem") rest.emplace_back(a, v);
      tree.mother_sans_sem = make_fs(mother->type, std::move(rest));
    } else {
      tree.mother_sans_sem = mother;
    }
    auto at = get_path(mother, {"currentAct", "type"}, tree.binds);
    if (at)
      if (const Atom* a = as_atom(*at)) tree.act_type = a->text;
  }

  TreeNode parse_daughter(Bindings& binds) {
    if (lex.peek().kind == Tok::kIdent && lex.peek().text == "tree") {
      lex.next();
      return parse_tree_body(binds);
    }
    FsPtr fs = parse_fs_expr(lex, repo.hierarchy, anon, binds);
    return TreeNode{fs, {}};
  }

  void parse_lexicon() {
    LexToken at = lex.peek();
    need_hierarchy(at);
    lex.expect(Tok::kLBrace, "'{'");
    while (lex.peek().kind != Tok::kRBrace) {
      LexToken kw = lex.expect(Tok::kIdent, "'lex'");
      if (kw.text != "lex")
        throw SyntaxError("expected 'lex'", kw.line, kw.col);
      LexEntry e;
      e.lemma = lex.expect(Tok::kIdent, "lemma").text;
      lex.expect(Tok::kColon, "':'");
      LexToken cat = lex.expect(Tok::kIdent, "category");
      if (!repo.hierarchy.find(cat.text))
        throw SyntaxError("unknown category type '" + cat.text + "'", cat.line,
                          cat.col);
      e.category = cat.text;
      lex.expect(Tok::kLBrace, "'{'");
      while (lex.peek().kind != Tok::kRBrace) {
        LexToken part = lex.expect(Tok::kIdent, "'features' or 'forms'");
        if (part.text == "features") {
          e.features = parse_bundle();
        } else if (part.text == "forms") {
          lex.expect(Tok::kLBrace, "'{'");
          while (lex.peek().kind != Tok::kRBrace) {
            FeatureBundle b = parse_bundle();
            lex.expect(Tok::kArrow, "'->'");
            LexToken s = lex.expect(Tok::kString, "surface string");
            e.forms.emplace_back(std::move(b), s.text);
          }
          lex.next();
        } else {
          throw SyntaxError("expected 'features' or 'forms'", part.line,
                            part.col);
        }
      }
      lex.next();
      repo.lexicon.add(std::move(e));
    }
    lex.next();
  }

  FeatureBundle parse_bundle() {
    FeatureBundle b;
    lex.expect(Tok::kLParen, "'('");
    if (lex.peek().kind != Tok::kRParen) {
      for (;;) {
        LexToken k = lex.expect(Tok::kIdent, "feature name");
        lex.expect(Tok::kEquals, "'='");
        LexToken v = lex.peek().kind == Tok::kNumber
                      ? lex.next()
                      : lex.expect(Tok::kIdent, "feature value");
        b[k.text] = v.text;
        if (!lex.accept(Tok::kComma)) break;
      }
    }
    lex.expect(Tok::kRParen, "')'");
    return b;
  }

  void validate() {
    if (!have_hierarchy)
      throw GrammarError("grammar file declares no hierarchy section");
    // sem patterns must be well-formed against the condition registry
    for (const GenTree& t : repo.trees) check_node(t, t.root);
  }

  void check_node(const GenTree& t, const TreeNode& n) {
    if (const Value* sem = n.fs->get("sem")) {
      if (is_drs_term(*sem, t.binds)) check_sem_pattern(t, *sem);
    }
    for (const TreeNode& c : n.children) check_node(t, c);
  }

  void check_sem_pattern(const GenTree& t, const Value& sem) {
    auto pat = pattern_from_term(sem, t.binds);
    if (!pat)
      throw GrammarError("tree '" + t.id + "': malformed drs pattern in sem");
    for (const Value& c : pat->cond_patterns) {
      Deref d = deref(c, t.binds);
      const TermPtr* term = as_term(d.value);
      if (!term) continue;  // a variable slot matches any condition
      auto it = repo.conditions.find((*term)->functor);
      if (it == repo.conditions.end())
        throw GrammarError("tree '" + t.id + "': unregistered condition '" +
                           (*term)->functor + "'");
      if (static_cast<int>((*term)->args.size()) != it->second)
        throw GrammarError("tree '" + t.id + "': condition '" +
                           (*term)->functor + "' has wrong arity");
      if ((*term)->functor == "negation")
        check_sem_pattern(t, (*term)->args[0]);
    }
  }
};

TreeNode Loader::parse_tree_body(Bindings& binds) {
  lex.expect(Tok::kLBrace, "'{'");
  LexToken kw = lex.expect(Tok::kIdent, "'mother'");
  if (kw.text != "mother")
    throw SyntaxError("expected 'mother'", kw.line, kw.col);
  lex.expect(Tok::kColon, "':'");
  FsPtr mother = parse_fs_expr(lex, repo.hierarchy, anon, binds);
  TreeNode node{mother, {}};
  if (lex.peek().kind == Tok::kIdent && lex.peek().text == "daughters") {
    lex.next();
    lex.expect(Tok::kColon, "':'");
    while (lex.peek().kind == Tok::kDash) {
      lex.next();
      node.children.push_back(parse_daughter(binds));
    }
  }
  lex.expect(Tok::kRBrace, "'}'");
  return node;
}

}  // namespace

// ---------------------------------------------------------------------------
// Repository

std::vector<const GenTree*> Repository::candidates(const FsPtr& node,
                                                   const Bindings& binds) const {
  std::optional<std::string> node_act;
  if (auto at = get_path(node, {"currentAct", "type"}, binds))
    if (const Atom* a = as_atom(*at)) node_act = a->text;
  std::vector<const GenTree*> out;
  for (const GenTree& t : trees) {
    if (hierarchy.glb(node->type, t.mother_type) == kNoType) continue;
    if (t.act_type && node_act && *t.act_type != *node_act) continue;
    out.push_back(&t);
  }
  return out;
}

Repository load_repository(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GrammarError("cannot open grammar file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return load_repository_text(text.str(), path);
}

Repository load_repository_text(std::string_view text, const std::string& origin) {
  try {
    Loader loader(text);
    loader.run();
    return std::move(loader.repo);
  } catch (const SyntaxError& e) {
    throw GrammarError(origin + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Classification (diagnostic; generation treats every tree identically)

namespace {

bool ground_form(const FsPtr& fs, const Bindings& b) {
  auto v = get_path(fs, {"form"}, b);
  return v && as_atom(*v) != nullptr;
}

bool any_daughter_form(const TreeNode& n, const Bindings& b) {
  for (const TreeNode& c : n.children) {
    if (ground_form(c.fs, b)) return true;
    if (any_daughter_form(c, b)) return true;
  }
  return false;
}

}  // namespace

TreeClass classify(const Repository& repo, const GenTree& tree) {
  (void)repo;
  if (tree.root.children.empty() && ground_form(tree.root.fs, tree.binds))
    return TreeClass::canned;
  const bool sem_pattern = tree.sem_is_pattern;
  if (!sem_pattern && any_daughter_form(tree.root, tree.binds))
    return TreeClass::template_;
  return TreeClass::rule;
}

}  // namespace mnlg
