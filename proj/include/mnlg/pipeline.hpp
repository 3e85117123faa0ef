// Dialogue-plan XML in, script XML out. Acts are realized in temporal
// order with the referring-expression context threaded between them;
// turn-taking gestures are attached afterwards. The bench harness times the
// whole pipeline, input parse to output bytes.
#pragma once

#include "mnlg/realizer.hpp"

namespace mnlg {

struct Participant {
  std::string id;
  std::string role;
  std::string gender = "neut";
  bool polite = false;
  std::map<std::string, std::string> personality;
};

struct DialogueAct {
  std::string id;
  std::string act_type;
  std::string speaker;
  std::vector<std::string> addressees;
  std::optional<Drs> sem;  // absent = the plan said "none"
  std::optional<std::string> reaction_to;
  std::string emotion = "neutral";
};

struct DialoguePlan {
  std::vector<Participant> participants;
  Drs common_ground;
  std::vector<DialogueAct> acts;

  const Participant* find_participant(const std::string& id) const;
};

struct Utterance {
  std::string act_id;
  std::string speaker;
  std::string text;
  bool turn_take = false;
  bool turn_give = false;
  bool error = false;
  std::string error_note;
  double gen_ms = 0.0;
};

struct Script {
  std::vector<Utterance> utterances;
  double total_ms = 0.0;
};

DialoguePlan parse_plan(const std::string& xml_text);
DialoguePlan parse_plan_file(const std::string& path);

// Input node: syntactic target (s), semantics, and the currentAct bundle
// carrying the pragmatics (speaker traits, addressees, emotion, rhetorical
// link).
FsPtr build_input_node(const DialogueAct& act, const DialoguePlan& plan,
                       const TypeHierarchy& h);

// One utterance per act, same order; failures are flagged, never dropped.
Script generate_dialogue(const DialoguePlan& plan, const Repository& repo,
                         const GenConfig& cfg);

// turn_take on the first utterance and on every speaker change; turn_give
// when the following utterance changes speaker
void assign_turn_gestures(Script& script, const DialoguePlan& plan);

// Deterministic bytes: fixed attribute order, no timing data.
std::string emit_script(const Script& script);

struct BenchRow {
  std::string name;
  int acts = 0;
  double one_ms = 0.0;      // median dialogue time, max_solutions=1
  double ten_ms = 0.0;      // median dialogue time, max_solutions=10
  double per_act_one = 0.0;
  double per_act_ten = 0.0;
  double ratio = 0.0;       // ten_ms / one_ms
};

struct BenchReport {
  std::vector<BenchRow> rows;
  int repetitions = 0;
  std::string table() const;
};

// Full-pipeline medians (parse plan -> generate -> gestures -> emit) over
// `repetitions` runs per plan and mode.
BenchReport run_benchmark(
    const std::vector<std::pair<std::string, std::string>>& named_plans,
    const Repository& repo, int repetitions, const GenConfig& base = {});

}  // namespace mnlg
