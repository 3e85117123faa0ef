#include "mnlg/referring.hpp"

#include <algorithm>

namespace mnlg {

namespace {
constexpr int kTopRank = 10;
}

std::optional<int> CgState::last_mention(const std::string& r) const {
  std::optional<int> out;
  for (const auto& [act, name] : mention_log)
    if (name == r) out = act;
  return out;
}

// ---------------------------------------------------------------------------
// Referent resolution

namespace {

bool known_referent(const CgState& cg, const std::string& name) {
  return cg.is_participant(name) ||
         std::find(cg.cg.referents.begin(), cg.cg.referents.end(), name) !=
             cg.cg.referents.end();
}

}  // namespace

std::string resolve_referent(const Value& np_sem, const Bindings& binds,
                             const CgState& cg) {
  Deref d = deref(np_sem, binds);
  if (const Var* v = as_var(d.value))
    throw RealizeError("unresolved open variable ?" + v->name +
                       " in np semantics");
  if (const Atom* a = as_atom(d.value)) {
    if (known_referent(cg, a->text)) return a->text;
    throw RealizeError("'" + a->text +
                       "' is neither a common-ground referent nor a participant");
  }
  if (const TermPtr* t = as_term(d.value)) {
    if ((*t)->functor == "concept" && (*t)->args.size() == 1) {
      Deref arg = deref((*t)->args[0], binds);
      if (const Var* v = as_var(arg.value))
        throw RealizeError("unresolved concept variable ?" + v->name);
      if (const Atom* a = as_atom(arg.value)) {
        if (known_referent(cg, a->text)) return a->text;
        throw RealizeError("concept '" + a->text + "' is not in scope");
      }
    }
    throw RealizeError("np semantics " + print_value(d.value, binds) +
                       " does not denote a referent");
  }
  throw RealizeError("np semantics does not denote a referent");
}

// ---------------------------------------------------------------------------
// Salience

bool highly_salient(const CgState& cg, const std::string& referent,
                    const std::vector<std::string>& competitors) {
  auto last = cg.last_mention(referent);
  if (!last || cg.acts_seen - *last > cg.recency_window) return false;
  const int r = cg.rank(referent);
  for (const std::string& c : competitors)
    if (c != referent && cg.rank(c) >= r) return false;
  return true;
}

void update_salience(CgState& cg, int act_index,
                     const std::set<std::string>& mentioned) {
  for (auto& [_, rank] : cg.salience)
    if (rank > 0) --rank;
  for (const std::string& r : mentioned) {
    cg.salience[r] = kTopRank;
    cg.mention_log.emplace_back(act_index, r);
    if (cg.is_participant(r)) cg.introduced.insert(r);
  }
  cg.acts_seen = act_index + 1;
}

// ---------------------------------------------------------------------------
// Descriptions

namespace {

// name of the property a condition predicates: type(C,red) -> red,
// fast(x_1) -> fast
std::optional<std::string> property_name(const Value& cond) {
  const TermPtr* t = as_term(cond);
  if (!t) return std::nullopt;
  const Term& term = **t;
  if (term.functor == "type" && term.args.size() == 2) {
    if (const Atom* p = as_atom(term.args[1])) return p->text;
    return std::nullopt;
  }
  return term.functor;
}

std::vector<std::string> property_names(const std::vector<Value>& conds) {
  std::vector<std::string> out;
  for (const Value& c : conds)
    if (auto p = property_name(c)) out.push_back(*p);
  return out;
}

bool has_property(const std::vector<std::string>& props, const std::string& p) {
  return std::find(props.begin(), props.end(), p) != props.end();
}

}  // namespace

Description build_description(const std::string& referent, const CgState& cg,
                              const Lexicon& lexicon) {
  Description d;
  d.referent = referent;

  if (cg.is_participant(referent)) {
    const std::string gender = cg.participant_gender.at(referent);
    d.agreement = {{"number", "sg"}, {"person", "3"},
                   {"gender", gender.empty() ? "neut" : gender}};
    std::vector<std::string> rivals;
    for (const auto& [id, g] : cg.participant_gender)
      if (id != referent && g == gender) rivals.push_back(id);
    if (cg.introduced.count(referent) && highly_salient(cg, referent, rivals)) {
      d.kind = Description::Kind::pronoun;
    } else {
      d.kind = Description::Kind::proper_name;
    }
    return d;
  }

  const std::vector<Value> props = conditions_about(referent, cg.cg);
  const std::vector<std::string> names = property_names(props);

  // head noun: the first property with a noun reading in the lexicon
  for (const std::string& n : names) {
    if (lexicon.find_exact(n, "n")) {
      d.head = n;
      break;
    }
  }

  // competitors are describable objects sharing the head property; the
  // cluster/eventuality referents themselves never compete
  std::vector<std::string> competitors;
  if (!d.head.empty()) {
    const std::set<std::string> clusters = cluster_referents(cg.cg);
    for (const std::string& other : cg.cg.referents) {
      if (other == referent || clusters.count(other)) continue;
      std::vector<std::string> other_names;
      try {
        other_names = property_names(conditions_about(other, cg.cg));
      } catch (const PlanError&) {
        continue;
      }
      if (has_property(other_names, d.head)) competitors.push_back(other);
    }
  }

  if (highly_salient(cg, referent, competitors)) {
    d.kind = Description::Kind::pronoun;
    FeatureBundle agr{{"number", "sg"}, {"person", "3"}, {"gender", "neut"}};
    if (const LexEntry* head = lexicon.find_exact(d.head, "n")) {
      for (const auto& [k, v] : head->features) agr[k] = v;
    }
    d.agreement = agr;
    return d;
  }

  d.kind = Description::Kind::definite;
  // greedy distinguishing subset, properties taken in common-ground order
  std::map<std::string, std::vector<std::string>> rival_props;
  for (const std::string& c : competitors)
    rival_props[c] = property_names(conditions_about(c, cg.cg));

  // the head is shared by every competitor, so modifiers carry the burden
  auto excluded = [&](const std::string& rival,
                      const std::vector<std::string>& mods) {
    for (const std::string& m : mods)
      if (!has_property(rival_props[rival], m)) return true;
    return false;
  };
  auto distinguishes = [&](const std::vector<std::string>& mods) {
    for (const std::string& c : competitors)
      if (!excluded(c, mods)) return false;
    return true;
  };

  std::vector<size_t> head_idx;
  std::vector<size_t> chosen;  // modifier indices into props
  std::vector<std::string> alive = competitors;
  for (size_t i = 0; i < props.size(); ++i) {
    const std::string& name = names[i];
    if (name == d.head) {
      head_idx.push_back(i);
      continue;
    }
    if (alive.empty()) continue;
    std::vector<std::string> still;
    for (const std::string& c : alive)
      if (has_property(rival_props[c], name)) still.push_back(c);
    if (still.size() < alive.size()) {
      chosen.push_back(i);
      alive = std::move(still);
    }
  }

  if (!alive.empty()) {
    // some rival shares every property: fall back to the full set
    d.fallback_full = true;
    d.properties = props;
    for (const std::string& n : names)
      if (n != d.head) d.modifiers.push_back(n);
  } else {
    // drop picks made redundant by later ones
    for (size_t i = 0; i < chosen.size();) {
      std::vector<std::string> without;
      for (size_t j = 0; j < chosen.size(); ++j)
        if (j != i) without.push_back(names[chosen[j]]);
      if (distinguishes(without))
        chosen.erase(chosen.begin() + static_cast<long>(i));
      else
        ++i;
    }
    for (size_t i : head_idx) d.properties.push_back(props[i]);
    for (size_t i : chosen) {
      d.properties.push_back(props[i]);
      d.modifiers.push_back(names[i]);
    }
  }

  FeatureBundle agr{{"number", "sg"}, {"person", "3"}, {"gender", "neut"}};
  if (const LexEntry* head = lexicon.find_exact(d.head, "n")) {
    for (const auto& [k, v] : head->features) agr[k] = v;
  }
  d.agreement = agr;
  return d;
}

FsPtr description_request(const Description& d, const TypeHierarchy& h) {
  std::vector<std::pair<std::string, Value>> agr_feats;
  for (const auto& [k, v] : d.agreement) agr_feats.emplace_back(k, Value{Atom{v}});
  Value agr{make_fs(kTopType, std::move(agr_feats))};

  std::vector<std::pair<std::string, Value>> desc;
  switch (d.kind) {
    case Description::Kind::pronoun:
      desc.emplace_back("kind", Value{Atom{"pron"}});
      break;
    case Description::Kind::proper_name:
      desc.emplace_back("kind", Value{Atom{"name"}});
      desc.emplace_back("name", Value{Atom{d.referent}});
      break;
    case Description::Kind::definite: {
      desc.emplace_back("kind", Value{Atom{"full"}});
      if (!d.head.empty()) desc.emplace_back("head", Value{Atom{d.head}});
      std::vector<Value> mods;
      for (const std::string& m : d.modifiers) mods.push_back(Value{Atom{m}});
      desc.emplace_back("mods", make_list(std::move(mods)));
      break;
    }
  }
  return make_fs(h.require("np"),
                 {{"desc", Value{make_fs(kTopType, std::move(desc))}},
                  {"agr", agr}});
}

DerivationNode realize_np(const Description& d, const Repository& repo,
                          const Bindings& binds) {
  FsPtr request = description_request(d, repo.hierarchy);
  GenConfig cfg;
  cfg.max_solutions = 1;
  std::vector<DerivationNode> got;
  expand(request, repo, nullptr, binds, cfg,
         [&](const DerivationNode& sol, const Bindings&) {
           got.push_back(sol);
           return false;
         });
  if (got.empty())
    throw RealizeError("no np tree realizes the description of '" + d.referent +
                       "'");
  DerivationNode out{got[0].fs, {}, "referring", d.referent};
  out.children.push_back(std::move(got[0]));
  return out;
}

}  // namespace mnlg
