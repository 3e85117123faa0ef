#include "mnlg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace mnlg {

namespace pt = boost::property_tree;

const Participant* DialoguePlan::find_participant(const std::string& id) const {
  for (const Participant& p : participants)
    if (p.id == id) return &p;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Plan parsing

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::string attr(const pt::ptree& node, const std::string& name,
                 const std::string& fallback = "") {
  return node.get<std::string>("<xmlattr>." + name, fallback);
}

std::string require_attr(const pt::ptree& node, const std::string& name,
                         const std::string& where) {
  auto v = node.get_optional<std::string>("<xmlattr>." + name);
  if (!v) throw PlanError(where + ": missing attribute '" + name + "'");
  return *v;
}

}  // namespace

DialoguePlan parse_plan(const std::string& xml_text) {
  pt::ptree doc;
  std::istringstream in(xml_text);
  try {
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw PlanError(std::string("malformed plan xml: ") + e.what());
  }
  auto root = doc.get_child_optional("dialoguePlan");
  if (!root) throw PlanError("plan xml has no <dialoguePlan> root");

  DialoguePlan plan;
  if (auto parts = root->get_child_optional("participants")) {
    for (const auto& [tag, node] : *parts) {
      if (tag != "participant") continue;
      Participant p;
      p.id = require_attr(node, "id", "participant");
      p.role = attr(node, "role");
      p.gender = attr(node, "gender", "neut");
      p.polite = attr(node, "polite", "no") == "yes";
      for (const std::string& kv : split_ws(attr(node, "personality"))) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw PlanError("participant '" + p.id +
                          "': personality entries must be trait=value");
        p.personality[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      if (plan.find_participant(p.id))
        throw PlanError("duplicate participant id '" + p.id + "'");
      plan.participants.push_back(std::move(p));
    }
  }
  if (plan.participants.empty())
    throw PlanError("plan declares no participants");

  if (auto cgt = root->get_optional<std::string>("commonGround.drs")) {
    try {
      plan.common_ground = parse_drs(*cgt);
    } catch (const GrammarError& e) {
      throw PlanError(std::string("commonGround/drs: ") + e.what());
    }
  }

  auto acts = root->get_child_optional("acts");
  if (!acts) throw PlanError("plan has no <acts> element");
  std::set<std::string> act_ids;
  for (const auto& [tag, node] : *acts) {
    if (tag != "act") continue;
    DialogueAct a;
    a.id = require_attr(node, "id", "act");
    if (!act_ids.insert(a.id).second)
      throw PlanError("duplicate act id '" + a.id + "'");
    a.act_type = require_attr(node, "type", "act '" + a.id + "'");
    a.speaker = require_attr(node, "speaker", "act '" + a.id + "'");
    if (!plan.find_participant(a.speaker))
      throw PlanError("act '" + a.id + "': unknown speaker '" + a.speaker + "'");
    for (const std::string& ad : split_ws(attr(node, "addressees"))) {
      if (!plan.find_participant(ad))
        throw PlanError("act '" + a.id + "': unknown addressee '" + ad + "'");
      a.addressees.push_back(ad);
    }
    std::string rt = attr(node, "reaction_to");
    if (!rt.empty()) {
      if (!act_ids.count(rt) || rt == a.id)
        throw PlanError("act '" + a.id + "': reaction_to '" + rt +
                        "' does not name an earlier act");
      a.reaction_to = rt;
    }
    a.emotion = attr(node, "emotion", "neutral");
    std::string sem = node.get<std::string>("sem", "none");
    if (sem != "none") {
      try {
        a.sem = parse_drs(sem);
      } catch (const GrammarError& e) {
        throw PlanError("act '" + a.id + "' sem: " + e.what());
      }
    }
    plan.acts.push_back(std::move(a));
  }
  return plan;
}

DialoguePlan parse_plan_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PlanError("cannot open plan file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_plan(text.str());
}

// ---------------------------------------------------------------------------
// Input nodes

FsPtr build_input_node(const DialogueAct& act, const DialoguePlan& plan,
                       const TypeHierarchy& h) {
  const Participant* sp = plan.find_participant(act.speaker);
  if (!sp) throw PlanError("act '" + act.id + "': unknown speaker");

  std::vector<std::pair<std::string, Value>> speaker{
      {"name", Value{Atom{sp->id}}},
      {"polite", Value{Atom{sp->polite ? "yes" : "no"}}},
      {"gender", Value{Atom{sp->gender}}},
      {"role", Value{Atom{sp->role}}},
  };
  if (!sp->personality.empty()) {
    std::vector<std::pair<std::string, Value>> traits;
    for (const auto& [k, v] : sp->personality)
      traits.emplace_back(k, Value{Atom{v}});
    speaker.emplace_back("personality", Value{make_fs(kTopType, std::move(traits))});
  }

  std::vector<Value> addressees;
  for (const std::string& ad : act.addressees)
    addressees.push_back(Value{Atom{ad}});

  std::vector<std::pair<std::string, Value>> ca{
      {"type", Value{Atom{act.act_type}}},
      {"speaker", Value{make_fs(kTopType, std::move(speaker))}},
      {"addressees", make_list(std::move(addressees))},
      {"emotion", Value{Atom{act.emotion}}},
  };
  if (act.reaction_to) ca.emplace_back("reaction_to", Value{Atom{*act.reaction_to}});

  Value sem = act.sem ? drs_to_term(*act.sem) : Value{Atom{"none"}};
  return make_fs(h.require("s"),
                 {{"sem", std::move(sem)},
                  {"currentAct", Value{make_fs(kTopType, std::move(ca))}}});
}

// ---------------------------------------------------------------------------
// Dialogue driver

Script generate_dialogue(const DialoguePlan& plan, const Repository& repo,
                         const GenConfig& cfg) {
  using clock = std::chrono::steady_clock;
  Script script;
  CgState cg;
  cg.cg = plan.common_ground;
  for (const Participant& p : plan.participants)
    cg.participant_gender[p.id] = p.gender;
  std::mt19937_64 rng(cfg.rng_seed.value_or(0));

  const auto t_start = clock::now();
  for (size_t i = 0; i < plan.acts.size(); ++i) {
    const DialogueAct& act = plan.acts[i];
    const auto t0 = clock::now();
    Utterance u;
    u.act_id = act.id;
    u.speaker = act.speaker;
    std::set<std::string> mentioned;
    try {
      FsPtr node = build_input_node(act, plan, repo.hierarchy);
      GenDiagnostics diag;
      std::vector<DerivationNode> sols = enumerate(node, repo, &cg, cfg, &diag);
      if (sols.empty()) {
        u.error = true;
        u.error_note = diag.last_failure.empty()
                           ? "no tree in the repository realizes this act"
                           : diag.last_failure;
      } else {
        const DerivationNode& chosen = select(sols, rng);
        DerivationNode agreed = apply_agreement(chosen, repo.hierarchy);
        std::vector<std::string> warnings;
        std::vector<Token> tokens =
            realize_tokens(agreed, repo.lexicon, repo.hierarchy, &warnings);
        u.text = punctuate(tokens, act.act_type);
        collect_referents(agreed, mentioned);
      }
    } catch (const RealizeError& e) {
      u.error = true;
      u.error_note = e.what();
      u.text.clear();
      mentioned.clear();
    }
    update_salience(cg, static_cast<int>(i), mentioned);
    u.gen_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    script.utterances.push_back(std::move(u));
  }
  script.total_ms =
      std::chrono::duration<double, std::milli>(clock::now() - t_start).count();
  return script;
}

void assign_turn_gestures(Script& script, const DialoguePlan& plan) {
  (void)plan;
  for (size_t i = 0; i < script.utterances.size(); ++i) {
    Utterance& u = script.utterances[i];
    u.turn_take = (i == 0) || script.utterances[i - 1].speaker != u.speaker;
    u.turn_give = (i + 1 < script.utterances.size()) &&
                  script.utterances[i + 1].speaker != u.speaker;
  }
}

// ---------------------------------------------------------------------------
// Script serialization

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string emit_script(const Script& script) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (script.utterances.empty()) {
    out += "<script/>\n";
    return out;
  }
  out += "<script>\n";
  for (const Utterance& u : script.utterances) {
    out += "  <utterance act=\"" + xml_escape(u.act_id) + "\" speaker=\"" +
           xml_escape(u.speaker) + "\"";
    if (u.error) out += " error=\"true\"";
    out += ">\n";
    if (u.turn_take) out += "    <gesture type=\"turn_take\"/>\n";
    if (u.error) {
      out += "    <text/>\n";
      out += "    <note>" + xml_escape(u.error_note) + "</note>\n";
    } else {
      out += "    <text>" + xml_escape(u.text) + "</text>\n";
    }
    if (u.turn_give) out += "    <gesture type=\"turn_give\"/>\n";
    out += "  </utterance>\n";
  }
  out += "</script>\n";
  return out;
}

// ---------------------------------------------------------------------------
// Benchmark

namespace {

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  if (n == 0) return 0.0;
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double time_run(const std::string& xml, const Repository& repo,
                const GenConfig& cfg, std::string* sink_out) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  DialoguePlan plan = parse_plan(xml);
  Script script = generate_dialogue(plan, repo, cfg);
  assign_turn_gestures(script, plan);
  std::string bytes = emit_script(script);
  const double ms =
      std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  if (sink_out) *sink_out = std::move(bytes);
  return ms;
}

}  // namespace

BenchReport run_benchmark(
    const std::vector<std::pair<std::string, std::string>>& named_plans,
    const Repository& repo, int repetitions, const GenConfig& base) {
  BenchReport report;
  report.repetitions = repetitions < 1 ? 1 : repetitions;
  for (const auto& [name, xml] : named_plans) {
    BenchRow row;
    row.name = name;
    row.acts = static_cast<int>(parse_plan(xml).acts.size());
    for (int mode : {1, 10}) {
      GenConfig cfg = base;
      cfg.max_solutions = mode;
      std::vector<double> times;
      times.reserve(static_cast<size_t>(report.repetitions));
      for (int r = 0; r < report.repetitions; ++r)
        times.push_back(time_run(xml, repo, cfg, nullptr));
      const double med = median(std::move(times));
      (mode == 1 ? row.one_ms : row.ten_ms) = med;
    }
    row.per_act_one = row.one_ms / row.acts;
    row.per_act_ten = row.ten_ms / row.acts;
    row.ratio = row.one_ms > 0 ? row.ten_ms / row.one_ms : 0.0;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string BenchReport::table() const {
  std::ostringstream os;
  os << "input  acts   =1 [ms]  <=10 [ms]  per-act =1  per-act <=10  ratio\n";
  char buf[160];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%-6s %4d %9.3f %10.3f %11.3f %13.3f %6.2f\n",
                  r.name.c_str(), r.acts, r.one_ms, r.ten_ms, r.per_act_one,
                  r.per_act_ten, r.ratio);
    os << buf;
  }
  os << "(medians over " << repetitions << " repetitions, full pipeline)\n";
  return os.str();
}

}  // namespace mnlg
