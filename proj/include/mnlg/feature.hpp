// Typed feature structures with logic variables: the currency every other
// module trades in. Values are immutable; all sharing goes through named
// variables resolved against a Bindings environment, so unification can be
// non-destructive and the generator backtracks by discarding bindings.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mnlg {

struct MnlgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Load-time problems: bad notation, unknown types, ambiguous hierarchies.
struct GrammarError : MnlgError {
  using MnlgError::MnlgError;
};

struct SyntaxError : GrammarError {
  int line = 0, col = 0;
  SyntaxError(const std::string& what, int line_, int col_)
      : GrammarError(what + " at line " + std::to_string(line_) + ", column " +
                     std::to_string(col_)),
        line(line_),
        col(col_) {}
};

// ---------------------------------------------------------------------------
// Type hierarchy

using TypeId = int;
constexpr TypeId kNoType = -1;
constexpr TypeId kTopType = 0;

// Finite subtype order with a distinguished most-general type "top".
// Rejected at construction: cycles, types that do not reach top, and any
// pair of types with more than one maximal common subtype (GLB must be
// unique or undefined).
class TypeHierarchy {
 public:
  TypeHierarchy();  // just "top"
  static TypeHierarchy from_edges(
      const std::vector<std::pair<std::string, std::string>>& child_parent);

  std::optional<TypeId> find(std::string_view name) const;
  TypeId require(std::string_view name) const;  // throws GrammarError
  const std::string& name(TypeId t) const { return names_.at(t); }
  int size() const { return static_cast<int>(names_.size()); }

  // a ≤ b : a is b or a subtype of b
  bool subtype(TypeId a, TypeId b) const { return le_[a][b]; }
  // kNoType when the two types have no common subtype
  TypeId glb(TypeId a, TypeId b) const { return glb_[a * size() + b]; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, TypeId, std::less<>> byname_;
  std::vector<std::vector<bool>> le_;
  std::vector<TypeId> glb_;

  TypeId intern(const std::string& n);
  void finish();  // validates and fills le_/glb_
};

// ---------------------------------------------------------------------------
// Values

struct FeatureStructure;
struct Term;
struct ListVal;

using FsPtr = std::shared_ptr<const FeatureStructure>;
using TermPtr = std::shared_ptr<const Term>;
using ListPtr = std::shared_ptr<const ListVal>;

struct Atom {
  std::string text;
  bool operator==(const Atom&) const = default;
};

struct Var {
  std::string name;
  bool operator==(const Var&) const = default;
};

using Value = std::variant<Atom, Var, FsPtr, TermPtr, ListPtr>;

// functor(arg, ...) — carries concept(X), drs(...) payloads
struct Term {
  std::string functor;
  std::vector<Value> args;
};

// [a, b | ?Tail]; tail absent means a proper list
struct ListVal {
  std::vector<Value> items;
  std::optional<Var> tail;
};

struct FeatureStructure {
  TypeId type = kTopType;
  // sorted by attribute name; names unique
  std::vector<std::pair<std::string, Value>> feats;

  const Value* get(std::string_view attr) const;
};

FsPtr make_fs(TypeId type, std::vector<std::pair<std::string, Value>> feats = {});
Value make_term(std::string functor, std::vector<Value> args);
Value make_list(std::vector<Value> items, std::optional<Var> tail = std::nullopt);

inline const FsPtr* as_fs(const Value& v) { return std::get_if<FsPtr>(&v); }
inline const Atom* as_atom(const Value& v) { return std::get_if<Atom>(&v); }
inline const Var* as_var(const Value& v) { return std::get_if<Var>(&v); }
inline const TermPtr* as_term(const Value& v) { return std::get_if<TermPtr>(&v); }
inline const ListPtr* as_list(const Value& v) { return std::get_if<ListPtr>(&v); }

// ---------------------------------------------------------------------------
// Bindings

// Variable environment. Chains (X -> Y -> value) stay acyclic because only
// unbound endpoints are ever chained; rebinding an endpoint refines its
// value in place so every alias observes the refinement.
class Bindings {
 public:
  const Value* lookup(std::string_view name) const;
  void bind(std::string name, Value v);    // bind or refine
  void merge_disjoint(const Bindings& other);
  bool empty() const { return map_.empty(); }
  size_t size() const { return map_.size(); }
  const std::map<std::string, Value, std::less<>>& raw() const { return map_; }

 private:
  std::map<std::string, Value, std::less<>> map_;
};

struct Deref {
  Value value;                       // endpoint: non-var, or an unbound var
  std::optional<std::string> var;    // last variable on the chain, if any
};

Deref deref(const Value& v, const Bindings& b);

// Proper-list view of a list value: splices bound tails. The optional var is
// the final unbound tail, if the list is open.
struct FlatList {
  std::vector<Value> items;
  std::optional<std::string> tail;
};
FlatList flatten_list(const ListVal& l, const Bindings& b);

// ---------------------------------------------------------------------------
// Core operations

struct UnifyResult {
  FsPtr fs;
  Bindings binds;
};

// Most general common refinement, or nullopt. Inputs untouched; the result
// bindings extend `in`. Occurs-check is on.
std::optional<UnifyResult> unify(const TypeHierarchy& h, const FsPtr& a,
                                 const FsPtr& b, const Bindings& in);

// Value-level unification used by DRS matching and list handling. On
// success `bs` has been extended and `out` holds the merged value.
bool unify_value(const TypeHierarchy& h, const Value& a, const Value& b,
                 Bindings& bs, Value& out);

bool occurs(std::string_view var, const Value& v, const Bindings& b);

// true iff `specific` is obtainable from `general` by adding features,
// specializing types, and instantiating general's variables consistently
bool subsumes(const TypeHierarchy& h, const Value& general, const Value& specific,
              const Bindings& b = {});

// Attribute path read with dereferencing at every step; nullopt if absent.
std::optional<Value> get_path(const FsPtr& fs, const std::vector<std::string>& path,
                              const Bindings& b);

// Every variable renamed to name_<suffix>; isomorphic otherwise.
Value rename_fresh(const Value& v, uint64_t suffix);
FsPtr rename_fresh(const FsPtr& fs, uint64_t suffix);
Bindings rename_fresh(const Bindings& b, uint64_t suffix);

// Deep substitution of bound variables; unbound variables survive.
Value resolve(const Value& v, const Bindings& b);
FsPtr resolve_fs(const FsPtr& fs, const Bindings& b);

void collect_vars(const Value& v, std::set<std::string>& out);          // all
void free_vars(const Value& v, const Bindings& b, std::set<std::string>& out);

// Structural equality after resolution (variable names compared literally).
bool equal_values(const Value& a, const Value& b);
// Equality up to a bijective renaming of variables.
bool alphabetic_variant(const Value& a, const Value& b);

// ---------------------------------------------------------------------------
// Printing (round-trips through the reader)

std::string print_value(const Value& v, const Bindings& b = {});
std::string print_fs(const FsPtr& fs, const TypeHierarchy& h, const Bindings& b = {});
std::string print_value(const Value& v, const TypeHierarchy& h, const Bindings& b);

}  // namespace mnlg
