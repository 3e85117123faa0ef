// Referring expressions: find the referent behind an open np, build a
// description from the common ground (empty when the referent is highly
// salient), and realize it through the same tree repository as everything
// else. Salience is a recency ranking updated after every realized act.
#pragma once

#include "mnlg/generator.hpp"

namespace mnlg {

struct RealizeError : MnlgError {
  using MnlgError::MnlgError;
};

struct CgState {
  Drs cg;  // fixed at the outset of the dialogue

  // higher rank = more salient; keys are cg referents and participant ids
  std::map<std::string, int> salience;
  std::vector<std::pair<int, std::string>> mention_log;  // (act index, referent)
  std::map<std::string, std::string> participant_gender;
  std::set<std::string> introduced;  // participants already named once
  int acts_seen = 0;

  // pronouns only for referents mentioned within this many acts
  int recency_window = 2;

  bool is_participant(const std::string& id) const {
    return participant_gender.count(id) != 0;
  }
  int rank(const std::string& r) const {
    auto it = salience.find(r);
    return it == salience.end() ? 0 : it->second;
  }
  std::optional<int> last_mention(const std::string& r) const;
};

struct Description {
  enum class Kind { pronoun, proper_name, definite };
  std::string referent;
  Kind kind = Kind::definite;
  std::vector<Value> properties;  // selected type(C,P) conditions; may be empty
  std::string head;               // noun property ("car")
  std::vector<std::string> modifiers;  // remaining property names, cg order
  FeatureBundle agreement;             // number/person/gender for the np node
  bool fallback_full = false;  // set when no subset distinguishes the referent
};

// The referent bound to an open np semantics: a participant id via
// concept(...), or a common-ground referent. Throws RealizeError when the
// value does not resolve to anything in scope.
std::string resolve_referent(const Value& np_sem, const Bindings& binds,
                             const CgState& cg);

Description build_description(const std::string& referent, const CgState& cg,
                              const Lexicon& lexicon);

// Feature-structure request the description realizes through: np trees match
// on desc!kind / desc!head / desc!mods and copy agr onto the node.
FsPtr description_request(const Description& d, const TypeHierarchy& h);

// Maps a description to an np derivation via the repository (origin
// "referring"). Throws RealizeError when no np tree matches.
DerivationNode realize_np(const Description& d, const Repository& repo,
                          const Bindings& binds);

// Mentioned referents get top rank, everything else decays one step.
void update_salience(CgState& cg, int act_index,
                     const std::set<std::string>& mentioned);

// strictly top-ranked among competitors with the same head property, and
// mentioned within the recency window
bool highly_salient(const CgState& cg, const std::string& referent,
                    const std::vector<std::string>& competitors);

}  // namespace mnlg
