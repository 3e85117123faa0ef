// Top-down generation of deep syntactic structure: match the input node
// against tree mothers (unification, plus multiset DRS matching for rule
// trees), expand incomplete daughters recursively in file order, and stop
// when every leaf is complete. Depth-first and lazy; consumers cut the
// stream off after as many solutions as they want.
#pragma once

#include <functional>
#include <random>

#include "mnlg/grammar.hpp"

namespace mnlg {

struct CgState;  // referring.hpp

enum class Completeness { complete_form, complete_np_open, incomplete };

// complete_form: the node is lexically realized (ground form, or a ground
// lemma for the realizer to inflect). complete_np_open: an np whose sem is
// an open variable, a bare referent, or a non-drs term — the referring
// module's territory. Everything else must be expanded.
Completeness is_complete(const FsPtr& node, const Bindings& binds,
                         const TypeHierarchy& h);

struct GenConfig {
  int max_solutions = 1;
  std::optional<uint64_t> rng_seed;
  int depth_limit = 32;
  bool require_full_coverage = false;
};

struct DerivationNode {
  FsPtr fs;  // fully dereferenced once the derivation is finished
  std::vector<DerivationNode> children;
  std::string origin;    // tree id, "referring", or "input" at the root
  std::string referent;  // resolved referent, on referring nodes
};

struct GenDiagnostics {
  long depth_pruned = 0;     // branches cut by the depth limit
  long re_failures = 0;      // np expansions with no resolvable referent
  long coverage_rejected = 0;
  std::string last_failure;  // most recent prune reason, for act errors
};

void collect_leaves(const DerivationNode& d,
                    std::vector<const DerivationNode*>& out);
void collect_referents(const DerivationNode& d, std::set<std::string>& out);

// false from the sink stops the enumeration
using SolutionSink = std::function<bool(const DerivationNode&, const Bindings&)>;

// Streams every consistent completion of `node`, in backtracking order.
// `cg` may be null when no referring-expression context exists; np-open
// nodes then fail. Solutions arrive fully resolved.
void expand(const FsPtr& node, const Repository& repo, const CgState* cg,
            const Bindings& binds, const GenConfig& cfg,
            const SolutionSink& sink, GenDiagnostics* diag = nullptr);

// First max_solutions solutions, each wrapped in an origin="input" root.
std::vector<DerivationNode> enumerate(const FsPtr& node, const Repository& repo,
                                      const CgState* cg, const GenConfig& cfg,
                                      GenDiagnostics* diag = nullptr,
                                      const Bindings& binds = {});

// Uniform, unbiased, and deterministic across platforms for a fixed seed.
size_t select_index(size_t n, std::mt19937_64& rng);
const DerivationNode& select(const std::vector<DerivationNode>& solutions,
                             std::mt19937_64& rng);
const DerivationNode& select(const std::vector<DerivationNode>& solutions,
                             uint64_t seed);

}  // namespace mnlg
