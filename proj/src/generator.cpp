#include "mnlg/generator.hpp"

#include <algorithm>
#include <limits>

#include "mnlg/referring.hpp"

namespace mnlg {

// ---------------------------------------------------------------------------
// Node completeness

Completeness is_complete(const FsPtr& node, const Bindings& binds,
                         const TypeHierarchy& h) {
  if (auto f = get_path(node, {"form"}, binds))
    if (as_atom(*f)) return Completeness::complete_form;
  if (auto l = get_path(node, {"lemma"}, binds))
    if (as_atom(*l)) return Completeness::complete_form;
  auto np = h.find("np");
  if (np && h.subtype(node->type, *np)) {
    if (const Value* sem = node->get("sem")) {
      Deref d = deref(*sem, binds);
      if (as_var(d.value)) return Completeness::complete_np_open;
      if (as_atom(d.value)) return Completeness::complete_np_open;
      if (const TermPtr* t = as_term(d.value))
        if ((*t)->functor != "drs") return Completeness::complete_np_open;
    }
  }
  return Completeness::incomplete;
}

void collect_leaves(const DerivationNode& d,
                    std::vector<const DerivationNode*>& out) {
  if (d.children.empty()) {
    out.push_back(&d);
    return;
  }
  for (const DerivationNode& c : d.children) collect_leaves(c, out);
}

void collect_referents(const DerivationNode& d, std::set<std::string>& out) {
  if (!d.referent.empty()) out.insert(d.referent);
  for (const DerivationNode& c : d.children) collect_referents(c, out);
}

// ---------------------------------------------------------------------------
// Search

namespace {

using Consumed = std::vector<std::string>;

// raw solutions carry live bindings; resolution happens at the boundary
using RawSink =
    std::function<bool(DerivationNode&&, const Bindings&, const Consumed&)>;

struct Ctx {
  const Repository& repo;
  const CgState* cg;
  const GenConfig& cfg;
  GenDiagnostics* diag;
  uint64_t fresh = 0;
  std::set<std::string> reserved;  // variables of the original request
};

struct InstTree {
  TreeNode root;
  FsPtr mother_sans_sem;
  std::optional<Value> sem;
};

TreeNode rename_tree_node(const TreeNode& n, uint64_t sfx) {
  TreeNode out{rename_fresh(n.fs, sfx), {}};
  out.children.reserve(n.children.size());
  for (const TreeNode& c : n.children)
    out.children.push_back(rename_tree_node(c, sfx));
  return out;
}

void collect_tree_vars(const TreeNode& n, std::set<std::string>& out) {
  collect_vars(Value{n.fs}, out);
  for (const TreeNode& c : n.children) collect_tree_vars(c, out);
}

// fresh copy of the tree, variables suffixed so they cannot collide with
// anything already in scope
InstTree instantiate(const GenTree& t, Ctx& ctx, Bindings& binds) {
  std::set<std::string> tvars;
  collect_tree_vars(t.root, tvars);
  for (const auto& [k, v] : t.binds.raw()) {
    tvars.insert(k);
    collect_vars(v, tvars);
  }
  uint64_t sfx;
  for (;;) {
    sfx = ++ctx.fresh;
    bool clash = false;
    for (const std::string& v : tvars)
      if (ctx.reserved.count(v + "_" + std::to_string(sfx))) { clash = true; break; }
    if (!clash) break;
  }
  InstTree out;
  out.root = rename_tree_node(t.root, sfx);
  out.mother_sans_sem = rename_fresh(t.mother_sans_sem, sfx);
  if (t.sem) out.sem = rename_fresh(*t.sem, sfx);
  binds.merge_disjoint(rename_fresh(t.binds, sfx));
  return out;
}

std::string canon_condition(const Value& v, const Bindings& b) {
  return print_value(resolve(v, b));
}

bool expand_node(const FsPtr& node, const std::string& leaf_origin,
                 const Bindings& binds, int depth, const Consumed& consumed,
                 Ctx& ctx, const RawSink& sink);

bool expand_seq(const std::vector<TreeNode>& children, size_t idx,
                std::vector<DerivationNode>& acc, const FsPtr& mother,
                const std::string& tree_id, const Bindings& binds, int depth,
                const Consumed& consumed, Ctx& ctx, const RawSink& sink);

bool expand_tree_node(const TreeNode& tn, const std::string& tree_id,
                      const Bindings& binds, int depth, const Consumed& consumed,
                      Ctx& ctx, const RawSink& sink) {
  if (tn.children.empty())
    return expand_node(tn.fs, tree_id, binds, depth, consumed, ctx, sink);
  // explicit subtree shipped with the grammar: walk its children in place
  std::vector<DerivationNode> acc;
  return expand_seq(tn.children, 0, acc, tn.fs, tree_id, binds, depth, consumed,
                    ctx, sink);
}

bool expand_seq(const std::vector<TreeNode>& children, size_t idx,
                std::vector<DerivationNode>& acc, const FsPtr& mother,
                const std::string& tree_id, const Bindings& binds, int depth,
                const Consumed& consumed, Ctx& ctx, const RawSink& sink) {
  if (idx == children.size()) {
    DerivationNode node{mother, acc, tree_id, ""};
    return sink(std::move(node), binds, consumed);
  }
  return expand_tree_node(
      children[idx], tree_id, binds, depth, consumed, ctx,
      [&](DerivationNode&& child, const Bindings& b2, const Consumed& c2) {
        acc.push_back(std::move(child));
        bool cont =
            expand_seq(children, idx + 1, acc, mother, tree_id, b2, depth, c2,
                       ctx, sink);
        acc.pop_back();
        return cont;
      });
}

bool expand_via_repo(const FsPtr& node, const Bindings& binds, int depth,
                     const Consumed& consumed, Ctx& ctx, const RawSink& sink) {
  if (depth >= ctx.cfg.depth_limit) {
    ++ctx.diag->depth_pruned;
    ctx.diag->last_failure = "depth limit reached";
    return true;
  }
  const TypeHierarchy& h = ctx.repo.hierarchy;
  for (const GenTree* t : ctx.repo.candidates(node, binds)) {
    Bindings b0 = binds;
    InstTree inst = instantiate(*t, ctx, b0);

    const Value* node_sem = node->get("sem");
    const bool pattern_mode = t->sem_is_pattern && inst.sem && node_sem &&
                              is_drs_term(*node_sem, b0) &&
                              is_drs_term(*inst.sem, b0);
    if (pattern_mode) {
      auto u = unify(h, node, inst.mother_sans_sem, b0);
      if (!u) continue;
      auto target = drs_from_term(*node_sem, u->binds);
      auto pattern = pattern_from_term(*inst.sem, u->binds);
      if (!target || !pattern) continue;
      for (MatchSolution& sol : match_pattern(h, *pattern, *target, u->binds)) {
        Consumed c2 = consumed;
        for (const Value& c : sol.consumed)
          c2.push_back(canon_condition(c, sol.binds));
        std::vector<DerivationNode> acc;
        if (!expand_seq(inst.root.children, 0, acc, u->fs, t->id, sol.binds,
                        depth + 1, c2, ctx, sink))
          return false;
      }
    } else {
      auto u = unify(h, node, inst.root.fs, b0);
      if (!u) continue;
      std::vector<DerivationNode> acc;
      if (!expand_seq(inst.root.children, 0, acc, u->fs, t->id, u->binds,
                      depth + 1, consumed, ctx, sink))
        return false;
    }
  }
  return true;
}

bool expand_np(const FsPtr& node, const Bindings& binds, int depth,
               const Consumed& consumed, Ctx& ctx, const RawSink& sink) {
  if (!ctx.cg) {
    ++ctx.diag->re_failures;
    ctx.diag->last_failure = "np with open semantics but no referring context";
    return true;
  }
  const Value* sem = node->get("sem");
  std::string referent;
  Description desc;
  try {
    referent = resolve_referent(*sem, binds, *ctx.cg);
    desc = build_description(referent, *ctx.cg, ctx.repo.lexicon);
  } catch (const RealizeError& e) {
    ++ctx.diag->re_failures;
    ctx.diag->last_failure = e.what();
    return true;
  }
  FsPtr request = description_request(desc, ctx.repo.hierarchy);
  auto u = unify(ctx.repo.hierarchy, node, request, binds);
  if (!u) {
    ++ctx.diag->re_failures;
    ctx.diag->last_failure =
        "referring-expression request conflicts with the np node";
    return true;
  }
  return expand_via_repo(
      u->fs, u->binds, depth + 1, consumed, ctx,
      [&](DerivationNode&& inner, const Bindings& b2, const Consumed& c2) {
        DerivationNode wrapper{inner.fs, {}, "referring", referent};
        wrapper.children.push_back(std::move(inner));
        return sink(std::move(wrapper), b2, c2);
      });
}

bool expand_node(const FsPtr& node, const std::string& leaf_origin,
                 const Bindings& binds, int depth, const Consumed& consumed,
                 Ctx& ctx, const RawSink& sink) {
  switch (is_complete(node, binds, ctx.repo.hierarchy)) {
    case Completeness::complete_form:
      return sink(DerivationNode{node, {}, leaf_origin, ""}, binds, consumed);
    case Completeness::complete_np_open:
      return expand_np(node, binds, depth, consumed, ctx, sink);
    case Completeness::incomplete:
      return expand_via_repo(node, binds, depth, consumed, ctx, sink);
  }
  return true;
}

DerivationNode resolve_derivation(const DerivationNode& d, const Bindings& b) {
  DerivationNode out{resolve_fs(d.fs, b), {}, d.origin, d.referent};
  out.children.reserve(d.children.size());
  for (const DerivationNode& c : d.children)
    out.children.push_back(resolve_derivation(c, b));
  return out;
}

// every condition of the act semantics, negation bodies included
void flatten_conditions(const Drs& d, std::vector<std::string>& out) {
  for (const Value& c : d.conditions) {
    out.push_back(print_value(c));
    const TermPtr* t = as_term(c);
    if (t && (*t)->functor == "negation" && (*t)->args.size() == 1) {
      Bindings none;
      if (auto inner = drs_from_term((*t)->args[0], none))
        flatten_conditions(*inner, out);
    }
  }
}

}  // namespace

void expand(const FsPtr& node, const Repository& repo, const CgState* cg,
            const Bindings& binds, const GenConfig& cfg,
            const SolutionSink& sink, GenDiagnostics* diag) {
  GenDiagnostics local;
  Ctx ctx{repo, cg, cfg, diag ? diag : &local, 0, {}};
  collect_vars(Value{node}, ctx.reserved);
  for (const auto& [k, v] : binds.raw()) {
    ctx.reserved.insert(k);
    collect_vars(v, ctx.reserved);
  }

  std::vector<std::string> expected;
  if (cfg.require_full_coverage) {
    if (const Value* sem = node->get("sem")) {
      if (auto d = drs_from_term(*sem, binds)) {
        Drs resolved;
        for (const Value& c : d->conditions)
          resolved.conditions.push_back(resolve(c, binds));
        flatten_conditions(resolved, expected);
      }
    }
    std::sort(expected.begin(), expected.end());
  }

  expand_node(node, "input", binds, 0, {}, ctx,
              [&](DerivationNode&& raw, const Bindings& b, const Consumed& c) {
                if (cfg.require_full_coverage) {
                  Consumed got = c;
                  std::sort(got.begin(), got.end());
                  if (got != expected) {
                    ++ctx.diag->coverage_rejected;
                    ctx.diag->last_failure =
                        "solution rejected: semantics not fully covered";
                    return true;
                  }
                }
                return sink(resolve_derivation(raw, b), b);
              });
}

std::vector<DerivationNode> enumerate(const FsPtr& node, const Repository& repo,
                                      const CgState* cg, const GenConfig& cfg,
                                      GenDiagnostics* diag, const Bindings& binds) {
  std::vector<DerivationNode> out;
  const size_t cap = cfg.max_solutions < 1 ? 1 : static_cast<size_t>(cfg.max_solutions);
  expand(node, repo, cg, binds, cfg,
         [&](const DerivationNode& d, const Bindings&) {
           DerivationNode root{d.fs, {}, "input", ""};
           root.children.push_back(d);
           out.push_back(std::move(root));
           return out.size() < cap;
         },
         diag);
  return out;
}

// ---------------------------------------------------------------------------
// Selection

size_t select_index(size_t n, std::mt19937_64& rng) {
  if (n <= 1) return 0;
  const uint64_t max = std::numeric_limits<uint64_t>::max();
  const uint64_t limit = max - (max % n);
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<size_t>(x % n);
}

const DerivationNode& select(const std::vector<DerivationNode>& solutions,
                             std::mt19937_64& rng) {
  if (solutions.empty())
    throw MnlgError("select: no solutions to choose from");
  return solutions[select_index(solutions.size(), rng)];
}

const DerivationNode& select(const std::vector<DerivationNode>& solutions,
                             uint64_t seed) {
  std::mt19937_64 rng(seed);
  return select(solutions, rng);
}

}  // namespace mnlg
