// The tree repository: one uniform store for canned text, templates, and
// grammar rules, plus the lexicon. A repository entry is (Node,[Tree...]):
// a mother feature structure and an ordered daughter list; variables shared
// between mother and daughters are the rule's content. File order defines
// backtracking priority.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mnlg/drs.hpp"
#include "mnlg/feature.hpp"

namespace mnlg {

struct TreeNode {
  FsPtr fs;
  std::vector<TreeNode> children;
};

struct GenTree {
  std::string id;
  TreeNode root;
  Bindings binds;  // bindings produced by conjunct merging at parse time

  // precomputed for matching
  FsPtr mother_sans_sem;           // mother with the sem feature removed
  std::optional<Value> sem;        // mother's sem value, if declared
  bool sem_is_pattern = false;     // sem is a drs(...) term
  TypeId mother_type = kTopType;
  std::optional<std::string> act_type;  // ground currentAct!type, if any
};

enum class TreeClass { canned, template_, rule };
const char* tree_class_name(TreeClass c);

// lexicon --------------------------------------------------------------

using FeatureBundle = std::map<std::string, std::string>;

struct LexEntry {
  std::string lemma;
  std::string category;
  FeatureBundle features;  // inherent features (gender of nouns, ...)
  std::vector<std::pair<FeatureBundle, std::string>> forms;
};

class Lexicon {
 public:
  void add(LexEntry e);
  // all entries for a lemma whose category is compatible (subtype either way)
  std::vector<const LexEntry*> lookup(const std::string& lemma,
                                      const std::string& category) const;
  const LexEntry* find_exact(const std::string& lemma,
                             const std::string& category) const;
  size_t size() const { return entries_.size(); }

 private:
  std::vector<LexEntry> entries_;
};

// repository ------------------------------------------------------------

class Repository {
 public:
  TypeHierarchy hierarchy;
  std::vector<GenTree> trees;  // file order
  Lexicon lexicon;
  ConditionRegistry conditions = builtin_conditions();

  // Trees whose index key is compatible with the node's type and
  // currentAct!type, in file order. Over-approximates: full unification may
  // still reject a candidate, but no unifiable tree is ever omitted.
  std::vector<const GenTree*> candidates(const FsPtr& node,
                                         const Bindings& binds) const;
};

Repository load_repository(const std::string& path);
Repository load_repository_text(std::string_view text,
                                const std::string& origin = "<string>");

TreeClass classify(const Repository& repo, const GenTree& tree);

}  // namespace mnlg
