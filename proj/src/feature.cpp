#include "mnlg/feature.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>

namespace mnlg {

// ---------------------------------------------------------------------------
// TypeHierarchy

TypeHierarchy::TypeHierarchy() {
  intern("top");
  finish();
}

TypeId TypeHierarchy::intern(const std::string& n) {
  auto it = byname_.find(n);
  if (it != byname_.end()) return it->second;
  TypeId id = static_cast<TypeId>(names_.size());
  names_.push_back(n);
  byname_.emplace(n, id);
  return id;
}

TypeHierarchy TypeHierarchy::from_edges(
    const std::vector<std::pair<std::string, std::string>>& child_parent) {
  TypeHierarchy h;
  h.names_.clear();
  h.byname_.clear();
  h.intern("top");
  std::vector<std::pair<TypeId, TypeId>> edges;
  for (const auto& [c, p] : child_parent) {
    TypeId ci = h.intern(c);
    TypeId pi = h.intern(p);
    if (ci == kTopType) throw GrammarError("type 'top' cannot have a parent");
    edges.emplace_back(ci, pi);
  }
  const int n = h.size();
  std::vector<std::vector<TypeId>> parents(n);
  for (auto [c, p] : edges) parents[c].push_back(p);
  for (TypeId t = 1; t < n; ++t)
    if (parents[t].empty())
      throw GrammarError("type '" + h.names_[t] +
                         "' has no declared parent (no path to top)");

  // reflexive-transitive closure of ≤, with cycle detection
  h.le_.assign(n, std::vector<bool>(n, false));
  for (TypeId t = 0; t < n; ++t) {
    std::vector<int> state(n, 0);  // 0 unseen, 1 on stack, 2 done
    std::vector<TypeId> stack{t};
    std::vector<TypeId> path;
    // iterative DFS up the parent edges
    while (!stack.empty()) {
      TypeId u = stack.back();
      if (state[u] == 0) {
        state[u] = 1;
        h.le_[t][u] = true;
        for (TypeId p : parents[u]) {
          if (state[p] == 1)
            throw GrammarError("type hierarchy contains a cycle through '" +
                               h.names_[p] + "'");
          if (state[p] == 0) stack.push_back(p);
        }
      } else {
        state[u] = 2;
        stack.pop_back();
      }
    }
    if (!h.le_[t][kTopType])
      throw GrammarError("type '" + h.names_[t] + "' does not reach top");
  }
  h.finish();
  return h;
}

void TypeHierarchy::finish() {
  const int n = size();
  if (le_.empty()) le_.assign(n, std::vector<bool>(n, false));
  for (TypeId t = 0; t < n; ++t) {
    le_[t][t] = true;
    le_[t][kTopType] = true;
  }
  glb_.assign(static_cast<size_t>(n) * n, kNoType);
  for (TypeId a = 0; a < n; ++a) {
    for (TypeId b = 0; b < n; ++b) {
      std::vector<TypeId> common;
      for (TypeId t = 0; t < n; ++t)
        if (le_[t][a] && le_[t][b]) common.push_back(t);
      // keep the maximal ones
      std::vector<TypeId> maximal;
      for (TypeId t : common) {
        bool dominated = false;
        for (TypeId u : common)
          if (u != t && le_[t][u]) { dominated = true; break; }
        if (!dominated) maximal.push_back(t);
      }
      if (maximal.size() > 1)
        throw GrammarError("ambiguous greatest lower bound of '" + names_[a] +
                           "' and '" + names_[b] + "'");
      if (maximal.size() == 1) glb_[a * n + b] = maximal.front();
    }
  }
}

std::optional<TypeId> TypeHierarchy::find(std::string_view name) const {
  auto it = byname_.find(name);
  if (it == byname_.end()) return std::nullopt;
  return it->second;
}

TypeId TypeHierarchy::require(std::string_view name) const {
  auto t = find(name);
  if (!t) throw GrammarError("unknown type name '" + std::string(name) + "'");
  return *t;
}

// ---------------------------------------------------------------------------
// Construction

const Value* FeatureStructure::get(std::string_view attr) const {
  auto it = std::lower_bound(
      feats.begin(), feats.end(), attr,
      [](const auto& p, std::string_view a) { return p.first < a; });
  if (it != feats.end() && it->first == attr) return &it->second;
  return nullptr;
}

FsPtr make_fs(TypeId type, std::vector<std::pair<std::string, Value>> feats) {
  std::sort(feats.begin(), feats.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto fs = std::make_shared<FeatureStructure>();
  fs->type = type;
  fs->feats = std::move(feats);
  return fs;
}

Value make_term(std::string functor, std::vector<Value> args) {
  auto t = std::make_shared<Term>();
  t->functor = std::move(functor);
  t->args = std::move(args);
  return Value{TermPtr(std::move(t))};
}

Value make_list(std::vector<Value> items, std::optional<Var> tail) {
  // the degenerate list [ | T ] is just T
  if (items.empty() && tail) return Value{*tail};
  auto l = std::make_shared<ListVal>();
  l->items = std::move(items);
  l->tail = std::move(tail);
  return Value{ListPtr(std::move(l))};
}

// ---------------------------------------------------------------------------
// Bindings

const Value* Bindings::lookup(std::string_view name) const {
  auto it = map_.find(name);
  return it == map_.end() ? nullptr : &it->second;
}

void Bindings::bind(std::string name, Value v) {
  map_.insert_or_assign(std::move(name), std::move(v));
}

void Bindings::merge_disjoint(const Bindings& other) {
  for (const auto& [k, v] : other.map_) map_.emplace(k, v);
}

Deref deref(const Value& v, const Bindings& b) {
  const Value* cur = &v;
  std::optional<std::string> last;
  while (const Var* var = as_var(*cur)) {
    last = var->name;
    const Value* next = b.lookup(var->name);
    if (!next) break;
    cur = next;
  }
  return Deref{*cur, std::move(last)};
}

FlatList flatten_list(const ListVal& l, const Bindings& b) {
  FlatList out;
  const ListVal* cur = &l;
  for (;;) {
    out.items.insert(out.items.end(), cur->items.begin(), cur->items.end());
    if (!cur->tail) return out;
    Deref d = deref(Value{*cur->tail}, b);
    if (const Var* v = as_var(d.value)) {
      out.tail = v->name;
      return out;
    }
    const ListPtr* next = as_list(d.value);
    if (!next) {
      // tail bound to a non-list: malformed, surface it as an open tail
      out.tail = cur->tail->name;
      return out;
    }
    cur = next->get();
  }
}

// ---------------------------------------------------------------------------
// Occurs check

bool occurs(std::string_view var, const Value& v, const Bindings& b) {
  switch (v.index()) {
    case 0:
      return false;
    case 1: {
      const Var& x = std::get<Var>(v);
      if (x.name == var) return true;
      const Value* bound = b.lookup(x.name);
      return bound && occurs(var, *bound, b);
    }
    case 2: {
      for (const auto& [_, fv] : std::get<FsPtr>(v)->feats)
        if (occurs(var, fv, b)) return true;
      return false;
    }
    case 3: {
      for (const Value& a : std::get<TermPtr>(v)->args)
        if (occurs(var, a, b)) return true;
      return false;
    }
    case 4: {
      const ListVal& l = *std::get<ListPtr>(v);
      for (const Value& it : l.items)
        if (occurs(var, it, b)) return true;
      return l.tail && occurs(var, Value{*l.tail}, b);
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Unification

namespace {

bool merge_nonvar(const TypeHierarchy& h, const Value& a, const Value& b,
                  Bindings& bs, Value& out);

bool merge_fs(const TypeHierarchy& h, const FsPtr& a, const FsPtr& b,
              Bindings& bs, FsPtr& out) {
  TypeId t = h.glb(a->type, b->type);
  if (t == kNoType) return false;
  std::vector<std::pair<std::string, Value>> feats;
  feats.reserve(a->feats.size() + b->feats.size());
  auto ia = a->feats.begin(), ib = b->feats.begin();
  while (ia != a->feats.end() || ib != b->feats.end()) {
    if (ib == b->feats.end() || (ia != a->feats.end() && ia->first < ib->first)) {
      feats.push_back(*ia++);
    } else if (ia == a->feats.end() || ib->first < ia->first) {
      feats.push_back(*ib++);
    } else {
      Value merged;
      if (!unify_value(h, ia->second, ib->second, bs, merged)) return false;
      feats.emplace_back(ia->first, std::move(merged));
      ++ia;
      ++ib;
    }
  }
  out = make_fs(t, std::move(feats));
  return true;
}

bool merge_list(const TypeHierarchy& h, const ListVal& la, const ListVal& lb,
                Bindings& bs, Value& out) {
  FlatList a = flatten_list(la, bs);
  FlatList b = flatten_list(lb, bs);
  if (a.items.size() > b.items.size()) std::swap(a, b);  // a is the shorter
  const size_t n = a.items.size();
  std::vector<Value> items;
  items.reserve(b.items.size());
  for (size_t i = 0; i < n; ++i) {
    Value m;
    if (!unify_value(h, a.items[i], b.items[i], bs, m)) return false;
    items.push_back(std::move(m));
  }
  if (a.items.size() == b.items.size()) {
    if (!a.tail && !b.tail) {
      out = make_list(std::move(items));
      return true;
    }
    if (a.tail && b.tail) {
      Value m;
      if (!unify_value(h, Value{Var{*a.tail}}, Value{Var{*b.tail}}, bs, m))
        return false;
      const Var* tv = as_var(m);
      out = make_list(std::move(items), tv ? std::optional<Var>(*tv) : std::nullopt);
      return true;
    }
    // one side open: its tail becomes the empty list
    const std::string& tail = a.tail ? *a.tail : *b.tail;
    bs.bind(tail, make_list({}));
    out = make_list(std::move(items));
    return true;
  }
  // a is a strict prefix: its tail must absorb the remainder of b
  if (!a.tail) return false;
  std::vector<Value> rest(b.items.begin() + static_cast<long>(n), b.items.end());
  for (const Value& r : rest) items.push_back(r);
  Value remainder = make_list(
      std::move(rest), b.tail ? std::optional<Var>(Var{*b.tail}) : std::nullopt);
  if (occurs(*a.tail, remainder, bs)) return false;
  bs.bind(*a.tail, std::move(remainder));
  out = make_list(std::move(items),
                  b.tail ? std::optional<Var>(Var{*b.tail}) : std::nullopt);
  return true;
}

bool merge_nonvar(const TypeHierarchy& h, const Value& a, const Value& b,
                  Bindings& bs, Value& out) {
  if (const Atom* aa = as_atom(a)) {
    const Atom* ab = as_atom(b);
    if (!ab || aa->text != ab->text) return false;
    out = a;
    return true;
  }
  if (const FsPtr* fa = as_fs(a)) {
    const FsPtr* fb = as_fs(b);
    if (!fb) return false;
    FsPtr merged;
    if (!merge_fs(h, *fa, *fb, bs, merged)) return false;
    out = Value{std::move(merged)};
    return true;
  }
  if (const TermPtr* ta = as_term(a)) {
    const TermPtr* tb = as_term(b);
    if (!tb) return false;
    if ((*ta)->functor != (*tb)->functor ||
        (*ta)->args.size() != (*tb)->args.size())
      return false;
    std::vector<Value> args;
    args.reserve((*ta)->args.size());
    for (size_t i = 0; i < (*ta)->args.size(); ++i) {
      Value m;
      if (!unify_value(h, (*ta)->args[i], (*tb)->args[i], bs, m)) return false;
      args.push_back(std::move(m));
    }
    out = make_term((*ta)->functor, std::move(args));
    return true;
  }
  if (const ListPtr* la = as_list(a)) {
    const ListPtr* lb = as_list(b);
    if (!lb) return false;
    return merge_list(h, **la, **lb, bs, out);
  }
  return false;
}

}  // namespace

bool unify_value(const TypeHierarchy& h, const Value& va, const Value& vb,
                 Bindings& bs, Value& out) {
  Deref a = deref(va, bs);
  Deref b = deref(vb, bs);
  const bool a_open = as_var(a.value) != nullptr;
  const bool b_open = as_var(b.value) != nullptr;
  if (a_open && b_open) {
    const std::string& an = as_var(a.value)->name;
    const std::string& bn = as_var(b.value)->name;
    if (an != bn) bs.bind(an, Value{Var{bn}});
    out = Value{Var{bn}};
    return true;
  }
  if (a_open || b_open) {
    const std::string& var = a_open ? as_var(a.value)->name : as_var(b.value)->name;
    const Value& val = a_open ? b.value : a.value;
    if (occurs(var, val, bs)) return false;
    bs.bind(var, val);
    out = Value{Var{var}};
    return true;
  }
  Value merged;
  if (!merge_nonvar(h, a.value, b.value, bs, merged)) return false;
  // Refine through the chain variables so every alias sees the merge.
  if (a.var) {
    if (occurs(*a.var, merged, bs)) return false;
    bs.bind(*a.var, merged);
  }
  if (b.var && (!a.var || *b.var != *a.var)) {
    if (occurs(*b.var, merged, bs)) return false;
    bs.bind(*b.var, merged);
  }
  if (a.var) out = Value{Var{*a.var}};
  else if (b.var) out = Value{Var{*b.var}};
  else out = std::move(merged);
  return true;
}

std::optional<UnifyResult> unify(const TypeHierarchy& h, const FsPtr& a,
                                 const FsPtr& b, const Bindings& in) {
  Bindings bs = in;
  Value out;
  if (!unify_value(h, Value{a}, Value{b}, bs, out)) return std::nullopt;
  Deref d = deref(out, bs);
  const FsPtr* fs = as_fs(d.value);
  assert(fs);
  return UnifyResult{*fs, std::move(bs)};
}

// ---------------------------------------------------------------------------
// Subsumption

namespace {

// one-way match: theta instantiates only the general side's variables
bool sub_match(const TypeHierarchy& h, const Value& gen, const Value& spec,
               std::map<std::string, Value>& theta) {
  if (const Var* g = as_var(gen)) {
    auto it = theta.find(g->name);
    if (it != theta.end()) return equal_values(it->second, spec);
    theta.emplace(g->name, spec);
    return true;
  }
  if (as_var(spec)) return false;  // non-var never subsumes a var
  if (const Atom* ga = as_atom(gen)) {
    const Atom* sa = as_atom(spec);
    return sa && ga->text == sa->text;
  }
  if (const FsPtr* gf = as_fs(gen)) {
    const FsPtr* sf = as_fs(spec);
    if (!sf) return false;
    if (!h.subtype((*sf)->type, (*gf)->type)) return false;
    for (const auto& [attr, gv] : (*gf)->feats) {
      const Value* sv = (*sf)->get(attr);
      if (!sv || !sub_match(h, gv, *sv, theta)) return false;
    }
    return true;
  }
  if (const TermPtr* gt = as_term(gen)) {
    const TermPtr* st = as_term(spec);
    if (!st || (*gt)->functor != (*st)->functor ||
        (*gt)->args.size() != (*st)->args.size())
      return false;
    for (size_t i = 0; i < (*gt)->args.size(); ++i)
      if (!sub_match(h, (*gt)->args[i], (*st)->args[i], theta)) return false;
    return true;
  }
  if (const ListPtr* gl = as_list(gen)) {
    const ListPtr* sl = as_list(spec);
    if (!sl) return false;
    const ListVal& g = **gl;
    const ListVal& s = **sl;
    if (g.items.size() > s.items.size()) return false;
    if (g.items.size() < s.items.size() && !g.tail) return false;
    for (size_t i = 0; i < g.items.size(); ++i)
      if (!sub_match(h, g.items[i], s.items[i], theta)) return false;
    if (!g.tail)
      return !s.tail && s.items.size() == g.items.size();
    std::vector<Value> rest(s.items.begin() + static_cast<long>(g.items.size()),
                            s.items.end());
    Value remainder = make_list(std::move(rest), s.tail);
    return sub_match(h, Value{*g.tail}, remainder, theta);
  }
  return false;
}

}  // namespace

bool subsumes(const TypeHierarchy& h, const Value& general, const Value& specific,
              const Bindings& b) {
  std::map<std::string, Value> theta;
  return sub_match(h, resolve(general, b), resolve(specific, b), theta);
}

// ---------------------------------------------------------------------------
// Paths

std::optional<Value> get_path(const FsPtr& fs, const std::vector<std::string>& path,
                              const Bindings& b) {
  Value cur{fs};
  for (const std::string& attr : path) {
    Deref d = deref(cur, b);
    const FsPtr* node = as_fs(d.value);
    if (!node) return std::nullopt;
    const Value* next = (*node)->get(attr);
    if (!next) return std::nullopt;
    cur = *next;
  }
  Deref d = deref(cur, b);
  return d.value;
}

// ---------------------------------------------------------------------------
// Renaming / resolution / variable collection

namespace {

Value rename_value(const Value& v, uint64_t suffix) {
  switch (v.index()) {
    case 0:
      return v;
    case 1:
      return Value{Var{std::get<Var>(v).name + "_" + std::to_string(suffix)}};
    case 2: {
      const FsPtr& fs = std::get<FsPtr>(v);
      std::vector<std::pair<std::string, Value>> feats;
      feats.reserve(fs->feats.size());
      for (const auto& [a, fv] : fs->feats)
        feats.emplace_back(a, rename_value(fv, suffix));
      return Value{make_fs(fs->type, std::move(feats))};
    }
    case 3: {
      const TermPtr& t = std::get<TermPtr>(v);
      std::vector<Value> args;
      args.reserve(t->args.size());
      for (const Value& a : t->args) args.push_back(rename_value(a, suffix));
      return make_term(t->functor, std::move(args));
    }
    case 4: {
      const ListPtr& l = std::get<ListPtr>(v);
      std::vector<Value> items;
      items.reserve(l->items.size());
      for (const Value& it : l->items) items.push_back(rename_value(it, suffix));
      std::optional<Var> tail;
      if (l->tail) tail = Var{l->tail->name + "_" + std::to_string(suffix)};
      return make_list(std::move(items), std::move(tail));
    }
  }
  return v;
}

}  // namespace

Value rename_fresh(const Value& v, uint64_t suffix) { return rename_value(v, suffix); }

FsPtr rename_fresh(const FsPtr& fs, uint64_t suffix) {
  return std::get<FsPtr>(rename_value(Value{fs}, suffix));
}

Bindings rename_fresh(const Bindings& b, uint64_t suffix) {
  Bindings out;
  for (const auto& [k, v] : b.raw())
    out.bind(k + "_" + std::to_string(suffix), rename_value(v, suffix));
  return out;
}

Value resolve(const Value& v, const Bindings& b) {
  Deref d = deref(v, b);
  switch (d.value.index()) {
    case 0:
    case 1:
      return d.value;
    case 2: {
      const FsPtr& fs = std::get<FsPtr>(d.value);
      std::vector<std::pair<std::string, Value>> feats;
      feats.reserve(fs->feats.size());
      for (const auto& [a, fv] : fs->feats) feats.emplace_back(a, resolve(fv, b));
      return Value{make_fs(fs->type, std::move(feats))};
    }
    case 3: {
      const TermPtr& t = std::get<TermPtr>(d.value);
      std::vector<Value> args;
      args.reserve(t->args.size());
      for (const Value& a : t->args) args.push_back(resolve(a, b));
      return make_term(t->functor, std::move(args));
    }
    case 4: {
      FlatList fl = flatten_list(*std::get<ListPtr>(d.value), b);
      std::vector<Value> items;
      items.reserve(fl.items.size());
      for (const Value& it : fl.items) items.push_back(resolve(it, b));
      std::optional<Var> tail;
      if (fl.tail) tail = Var{*fl.tail};
      return make_list(std::move(items), std::move(tail));
    }
  }
  return d.value;
}

FsPtr resolve_fs(const FsPtr& fs, const Bindings& b) {
  return std::get<FsPtr>(resolve(Value{fs}, b));
}

void collect_vars(const Value& v, std::set<std::string>& out) {
  switch (v.index()) {
    case 0:
      return;
    case 1:
      out.insert(std::get<Var>(v).name);
      return;
    case 2:
      for (const auto& [_, fv] : std::get<FsPtr>(v)->feats) collect_vars(fv, out);
      return;
    case 3:
      for (const Value& a : std::get<TermPtr>(v)->args) collect_vars(a, out);
      return;
    case 4: {
      const ListVal& l = *std::get<ListPtr>(v);
      for (const Value& it : l.items) collect_vars(it, out);
      if (l.tail) out.insert(l.tail->name);
      return;
    }
  }
}

void free_vars(const Value& v, const Bindings& b, std::set<std::string>& out) {
  collect_vars(resolve(v, b), out);
}

// ---------------------------------------------------------------------------
// Equality and alphabetic variance

bool equal_values(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  switch (a.index()) {
    case 0:
      return std::get<Atom>(a) == std::get<Atom>(b);
    case 1:
      return std::get<Var>(a) == std::get<Var>(b);
    case 2: {
      const FsPtr& fa = std::get<FsPtr>(a);
      const FsPtr& fb = std::get<FsPtr>(b);
      if (fa->type != fb->type || fa->feats.size() != fb->feats.size())
        return false;
      for (size_t i = 0; i < fa->feats.size(); ++i) {
        if (fa->feats[i].first != fb->feats[i].first) return false;
        if (!equal_values(fa->feats[i].second, fb->feats[i].second)) return false;
      }
      return true;
    }
    case 3: {
      const TermPtr& ta = std::get<TermPtr>(a);
      const TermPtr& tb = std::get<TermPtr>(b);
      if (ta->functor != tb->functor || ta->args.size() != tb->args.size())
        return false;
      for (size_t i = 0; i < ta->args.size(); ++i)
        if (!equal_values(ta->args[i], tb->args[i])) return false;
      return true;
    }
    case 4: {
      const ListVal& la = *std::get<ListPtr>(a);
      const ListVal& lb = *std::get<ListPtr>(b);
      if (la.items.size() != lb.items.size()) return false;
      if (la.tail.has_value() != lb.tail.has_value()) return false;
      if (la.tail && !(*la.tail == *lb.tail)) return false;
      for (size_t i = 0; i < la.items.size(); ++i)
        if (!equal_values(la.items[i], lb.items[i])) return false;
      return true;
    }
  }
  return false;
}

namespace {

bool variant_walk(const Value& a, const Value& b,
                  std::map<std::string, std::string>& fwd,
                  std::map<std::string, std::string>& rev) {
  if (a.index() != b.index()) return false;
  if (const Var* va = as_var(a)) {
    const Var* vb = as_var(b);
    auto f = fwd.find(va->name);
    auto r = rev.find(vb->name);
    if (f == fwd.end() && r == rev.end()) {
      fwd.emplace(va->name, vb->name);
      rev.emplace(vb->name, va->name);
      return true;
    }
    return f != fwd.end() && r != rev.end() && f->second == vb->name &&
           r->second == va->name;
  }
  switch (a.index()) {
    case 0:
      return std::get<Atom>(a) == std::get<Atom>(b);
    case 2: {
      const FsPtr& fa = std::get<FsPtr>(a);
      const FsPtr& fb = std::get<FsPtr>(b);
      if (fa->type != fb->type || fa->feats.size() != fb->feats.size())
        return false;
      for (size_t i = 0; i < fa->feats.size(); ++i) {
        if (fa->feats[i].first != fb->feats[i].first) return false;
        if (!variant_walk(fa->feats[i].second, fb->feats[i].second, fwd, rev))
          return false;
      }
      return true;
    }
    case 3: {
      const TermPtr& ta = std::get<TermPtr>(a);
      const TermPtr& tb = std::get<TermPtr>(b);
      if (ta->functor != tb->functor || ta->args.size() != tb->args.size())
        return false;
      for (size_t i = 0; i < ta->args.size(); ++i)
        if (!variant_walk(ta->args[i], tb->args[i], fwd, rev)) return false;
      return true;
    }
    case 4: {
      const ListVal& la = *std::get<ListPtr>(a);
      const ListVal& lb = *std::get<ListPtr>(b);
      if (la.items.size() != lb.items.size()) return false;
      if (la.tail.has_value() != lb.tail.has_value()) return false;
      for (size_t i = 0; i < la.items.size(); ++i)
        if (!variant_walk(la.items[i], lb.items[i], fwd, rev)) return false;
      if (la.tail)
        return variant_walk(Value{*la.tail}, Value{*lb.tail}, fwd, rev);
      return true;
    }
  }
  return false;
}

}  // namespace

bool alphabetic_variant(const Value& a, const Value& b) {
  std::map<std::string, std::string> fwd, rev;
  return variant_walk(a, b, fwd, rev);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool bare_atom(const std::string& s) {
  if (s.empty()) return false;
  auto alpha_start = [&] {
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
      return false;
    for (char c : s)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        return false;
    return true;
  };
  auto numeric = [&] {
    size_t i = s[0] == '-' ? 1 : 0;
    if (i >= s.size()) return false;
    bool dot = false;
    for (; i < s.size(); ++i) {
      if (s[i] == '.' && !dot) { dot = true; continue; }
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
  };
  return alpha_start() || numeric();
}

void print_atom(std::ostringstream& os, const Atom& a) {
  if (bare_atom(a.text)) {
    os << a.text;
    return;
  }
  os << '"';
  for (char c : a.text) {
    if (c == '"' || c == '\\') os << '\\';
    os << c;
  }
  os << '"';
}

void print_val(std::ostringstream& os, const Value& v, const TypeHierarchy* h,
               const Bindings& b);

std::string type_label(const TypeHierarchy* h, TypeId t) {
  if (h && t >= 0 && t < h->size()) return h->name(t);
  return "#" + std::to_string(t);
}

void print_fs_body(std::ostringstream& os, const FeatureStructure& fs,
                   const TypeHierarchy* h, const Bindings& b) {
  bool first = true;
  auto sep = [&] {
    if (!first) os << " & ";
    first = false;
  };
  if (fs.type != kTopType || fs.feats.empty()) {
    sep();
    os << '<' << type_label(h, fs.type);
  }
  for (const auto& [attr, raw] : fs.feats) {
    sep();
    os << attr << '!';
    // flatten single-attribute top-typed chains into a path
    const Value* cur = &raw;
    for (;;) {
      Deref d = deref(*cur, b);
      const FsPtr* inner = as_fs(d.value);
      if (!d.var && inner && (*inner)->type == kTopType &&
          (*inner)->feats.size() == 1) {
        os << (*inner)->feats[0].first << '!';
        cur = &(*inner)->feats[0].second;
        continue;
      }
      print_val(os, *cur, h, b);
      break;
    }
  }
}

void print_val(std::ostringstream& os, const Value& v, const TypeHierarchy* h,
               const Bindings& b) {
  Deref d = deref(v, b);
  switch (d.value.index()) {
    case 0:
      print_atom(os, std::get<Atom>(d.value));
      return;
    case 1:
      os << '?' << std::get<Var>(d.value).name;
      return;
    case 2: {
      const FeatureStructure& fs = *std::get<FsPtr>(d.value);
      if (fs.feats.empty()) {
        os << '<' << type_label(h, fs.type);
        return;
      }
      os << '(';
      print_fs_body(os, fs, h, b);
      os << ')';
      return;
    }
    case 3: {
      const Term& t = *std::get<TermPtr>(d.value);
      os << t.functor << '(';
      for (size_t i = 0; i < t.args.size(); ++i) {
        if (i) os << ',';
        print_val(os, t.args[i], h, b);
      }
      os << ')';
      return;
    }
    case 4: {
      FlatList fl = flatten_list(*std::get<ListPtr>(d.value), b);
      os << '[';
      for (size_t i = 0; i < fl.items.size(); ++i) {
        if (i) os << ',';
        print_val(os, fl.items[i], h, b);
      }
      if (fl.tail) os << '|' << '?' << *fl.tail;
      os << ']';
      return;
    }
  }
}

}  // namespace

std::string print_value(const Value& v, const Bindings& b) {
  return print_value(v, TypeHierarchy{}, b);
}

std::string print_value(const Value& v, const TypeHierarchy& h, const Bindings& b) {
  std::ostringstream os;
  Deref d = deref(v, b);
  if (const FsPtr* fs = as_fs(d.value)) {
    print_fs_body(os, **fs, &h, b);
    return os.str();
  }
  print_val(os, v, &h, b);
  return os.str();
}

std::string print_fs(const FsPtr& fs, const TypeHierarchy& h, const Bindings& b) {
  std::ostringstream os;
  print_fs_body(os, *fs, &h, b);
  return os.str();
}

}  // namespace mnlg
