#include <doctest.h>

#include <algorithm>

#include "support.hpp"

using namespace mnlg;
using mnlg_test::Rng;

namespace {

const Repository& demo() {
  static Repository repo = load_repository(mnlg_test::demo_grammar_path());
  return repo;
}

DialoguePlan demo_plan() {
  DialoguePlan plan;
  plan.participants.push_back({"john", "seller", "m", true, {}});
  plan.participants.push_back({"mary", "customer", "f", false, {}});
  plan.common_ground = parse_drs(
      "drs([x_1,x_2,c_1,c_2,c_3,c_4],"
      "[type(c_1,car),arg1(c_1,x_1),type(c_2,red),arg1(c_2,x_1),"
      "type(c_3,car),arg1(c_3,x_2),type(c_4,blue),arg1(c_4,x_2)])");
  return plan;
}

CgState fresh_cg(const DialoguePlan& plan) {
  CgState cg;
  cg.cg = plan.common_ground;
  for (const Participant& p : plan.participants)
    cg.participant_gender[p.id] = p.gender;
  return cg;
}

FsPtr act_node(const std::string& type, const std::string& speaker,
               const std::string& sem, const std::string& emotion = "neutral") {
  DialoguePlan plan = demo_plan();
  DialogueAct act;
  act.id = "t";
  act.act_type = type;
  act.speaker = speaker;
  act.addressees = {speaker == "john" ? std::string("mary") : std::string("john")};
  act.emotion = emotion;
  if (sem != "none") act.sem = parse_drs(sem);
  return build_input_node(act, plan, demo().hierarchy);
}

}  // namespace

TEST_CASE("is_complete") {
  const TypeHierarchy& h = demo().hierarchy;
  Bindings none;
  CHECK(is_complete(parse_fs("<s & form!\"hello!\"", h), none, h) ==
        Completeness::complete_form);
  CHECK(is_complete(parse_fs("<np & sem!?X", h), none, h) ==
        Completeness::complete_np_open);
  CHECK(is_complete(parse_fs("<vp & sem!drs(_,[type(?E,?T)])", h), none, h) ==
        Completeness::incomplete);
  // np with a full drs is grammar territory, not the referring module's
  CHECK(is_complete(parse_fs("<np & sem!drs(_,[type(?E,?T)])", h), none, h) ==
        Completeness::incomplete);
  // lexical leaves are lexically realized
  CHECK(is_complete(parse_fs("<v & lemma!be", h), none, h) ==
        Completeness::complete_form);
  // form wins over np-openness
  CHECK(is_complete(parse_fs("<np & form!\"it\" & sem!?X", h), none, h) ==
        Completeness::complete_form);
}

TEST_CASE("expand: greeting template produces the published leaves") {
  DialoguePlan plan = demo_plan();
  CgState cg = fresh_cg(plan);
  GenConfig cfg;
  cfg.max_solutions = 1;
  auto sols = enumerate(act_node("greeting", "john", "none"), demo(), &cg, cfg);
  REQUIRE(sols.size() == 1);
  CHECK(sols[0].origin == "input");
  auto leaves = mnlg_test::leaf_strings(sols[0]);
  REQUIRE(leaves.size() == 3);
  CHECK(leaves[0] == "hello!");
  CHECK(leaves[1] == "My name is");
  CHECK(leaves[2] == "lemma:john");

  // the np was expanded by the referring module
  std::set<std::string> mentioned;
  collect_referents(sols[0], mentioned);
  CHECK(mentioned == std::set<std::string>{"john"});
  const DerivationNode& tree = sols[0].children[0];
  CHECK(tree.origin == "greeting_polite");
  REQUIRE(tree.children.size() == 3);
  CHECK(tree.children[2].origin == "referring");
}

TEST_CASE("expand: negation statement goes through the published rule") {
  DialoguePlan plan = demo_plan();
  CgState cg = fresh_cg(plan);
  update_salience(cg, 0, {"x_1"});  // make x_1 salient: the np comes out "it"
  GenConfig cfg;
  cfg.max_solutions = 1;
  auto sols = enumerate(
      act_node("statement", "mary",
               "drs([e],[negation(drs([],[type(e,fast),arg1(e,x_1)]))])"),
      demo(), &cg, cfg);
  REQUIRE(sols.size() == 1);
  const DerivationNode& rule = sols[0].children[0];
  CHECK(rule.origin == "s_np_vp_neg");
  REQUIRE(rule.children.size() == 2);

  const DerivationNode& np = rule.children[0];
  CHECK(np.origin == "referring");
  CHECK(np.referent == "x_1");
  auto np_sem = get_path(np.fs, {"sem"}, {});
  REQUIRE(np_sem);
  CHECK(print_value(*np_sem) == "x_1");

  const DerivationNode& vp = rule.children[1];
  auto negated = get_path(vp.fs, {"negated"}, {});
  REQUIRE(negated);
  REQUIRE(as_fs(*negated));
  CHECK((*as_fs(*negated))->type == demo().hierarchy.require("true"));
  auto vp_sem = get_path(vp.fs, {"sem"}, {});
  REQUIRE(vp_sem);
  auto vp_drs = drs_from_term(*vp_sem, {});
  REQUIRE(vp_drs);
  REQUIRE(vp_drs->conditions.size() == 1);
  CHECK(print_value(vp_drs->conditions[0]) == "type(e,fast)");
}

TEST_CASE("expand: act matched by no tree yields the empty stream") {
  DialoguePlan plan = demo_plan();
  CgState cg = fresh_cg(plan);
  GenConfig cfg;
  cfg.max_solutions = 10;
  GenDiagnostics diag;
  auto sols =
      enumerate(act_node("apology", "john", "none"), demo(), &cg, cfg, &diag);
  CHECK(sols.empty());
}

TEST_CASE("enumerate caps and ordering") {
  DialoguePlan plan = demo_plan();
  CgState cg = fresh_cg(plan);

  SUBCASE("=1 is the file-order-first derivation") {
    GenConfig cfg;
    cfg.max_solutions = 1;
    auto sols = enumerate(act_node("farewell", "mary", "none"), demo(), &cg, cfg);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].children[0].origin == "farewell");  // not farewell_casual
  }
  SUBCASE("cap larger than the solution count returns them all") {
    GenConfig cfg;
    cfg.max_solutions = 10;
    auto sols = enumerate(act_node("refusal", "john", "none"), demo(), &cg, cfg);
    CHECK(sols.size() == 2);  // refusal, refusal_blunt
  }
  SUBCASE("cap truncates in backtracking order") {
    GenConfig one, many;
    one.max_solutions = 1;
    many.max_solutions = 10;
    FsPtr node = act_node("statement", "john",
                          "drs([c],[type(c,prestigious),arg1(c,x_1)])");
    auto first = enumerate(node, demo(), &cg, one);
    auto all = enumerate(node, demo(), &cg, many);
    REQUIRE(first.size() == 1);
    REQUIRE(all.size() >= 2);
    CHECK(mnlg_test::join(mnlg_test::leaf_strings(first[0])) ==
          mnlg_test::join(mnlg_test::leaf_strings(all[0])));
  }
}

TEST_CASE("select") {
  std::vector<DerivationNode> sols(10);
  for (int i = 0; i < 10; ++i) sols[static_cast<size_t>(i)].origin = std::to_string(i);

  std::vector<DerivationNode> one(1);
  CHECK(&select(one, uint64_t{99}) == &one[0]);

  const DerivationNode& a = select(sols, uint64_t{42});
  const DerivationNode& b = select(sols, uint64_t{42});
  CHECK(&a == &b);

  // 10,000 seeded draws from 10 solutions: each bucket within 10% +- 1.5pt
  std::vector<int> counts(10, 0);
  for (uint64_t seed = 0; seed < 10000; ++seed) {
    std::mt19937_64 rng(seed);
    ++counts[select_index(10, rng)];
  }
  for (int c : counts) {
    CHECK(c >= 850);
    CHECK(c <= 1150);
  }
}

TEST_CASE("derivation invariants on the demo grammar") {
  DialoguePlan plan = demo_plan();
  CgState cg = fresh_cg(plan);
  GenConfig cfg;
  cfg.max_solutions = 50;

  std::vector<FsPtr> inputs{
      act_node("greeting", "john", "none"),
      act_node("statement", "john", "drs([c],[type(c,prestigious),arg1(c,x_1)])"),
      act_node("statement", "mary",
               "drs([e],[negation(drs([],[type(e,fast),arg1(e,x_1)]))])"),
      act_node("question", "mary", "drs([c],[type(c,safe),arg1(c,x_2)])"),
      act_node("statement", "john", "drs([c],[type(c,like),arg1(c,mary),arg2(c,x_1)])"),
  };
  const TypeHierarchy& h = demo().hierarchy;
  for (const FsPtr& input : inputs) {
    auto sols = enumerate(input, demo(), &cg, cfg);
    REQUIRE(!sols.empty());
    for (const DerivationNode& root : sols) {
      // soundness: the solution satisfies every input constraint
      CHECK(subsumes(h, Value{input}, Value{root.fs}));

      // leaf completeness
      std::vector<const DerivationNode*> leaves;
      collect_leaves(root, leaves);
      for (const DerivationNode* l : leaves) {
        bool ok = is_complete(l->fs, {}, h) == Completeness::complete_form;
        CHECK(ok);
      }

      // currentAct percolation: every node carrying the path agrees with
      // the root's speaker name
      auto root_name = get_path(root.fs, {"currentAct", "speaker", "name"}, {});
      REQUIRE(root_name);
      std::function<void(const DerivationNode&)> walk =
          [&](const DerivationNode& n) {
            auto nm = get_path(n.fs, {"currentAct", "speaker", "name"}, {});
            if (nm) CHECK(equal_values(*nm, *root_name));
            for (const DerivationNode& c : n.children) walk(c);
          };
      walk(root);
    }
  }
}

TEST_CASE("depth limit prunes left recursion instead of hanging") {
  Repository repo = load_repository_text(
      "hierarchy { phrase < top. s < phrase. }\n"
      "tree loop { mother: <s & currentAct!type!statement\n"
      "  daughters:\n"
      "    - <s & currentAct!type!statement\n"
      "}\n");
  GenConfig cfg;
  cfg.max_solutions = 5;
  cfg.depth_limit = 16;
  GenDiagnostics diag;
  Bindings none;
  FsPtr node = parse_fs("<s & currentAct!type!statement", repo.hierarchy);
  auto sols = enumerate(node, repo, nullptr, cfg, &diag);
  CHECK(sols.empty());
  CHECK(diag.depth_pruned > 0);
}

TEST_CASE("require_full_coverage rejects solutions that drop conditions") {
  Repository repo = load_repository_text(
      "hierarchy { phrase < top. s < phrase. fragment < phrase. }\n"
      "tree drop {\n"
      "  mother: <s & currentAct!type!statement & sem!drs(_,[type(?E,?T)|?R])\n"
      "  daughters:\n"
      "    - <fragment & form!\"something\"\n"
      "}\n");
  Bindings none;
  FsPtr covered = parse_fs(
      "<s & currentAct!type!statement & sem!drs([e],[type(e,fast)])",
      repo.hierarchy);
  FsPtr leftover = parse_fs(
      "<s & currentAct!type!statement & sem!drs([e],[type(e,fast),arg1(e,x_1)])",
      repo.hierarchy);

  GenConfig loose;
  loose.max_solutions = 5;
  CHECK(enumerate(covered, repo, nullptr, loose).size() == 1);
  CHECK(enumerate(leftover, repo, nullptr, loose).size() == 1);

  GenConfig strict = loose;
  strict.require_full_coverage = true;
  GenDiagnostics diag;
  CHECK(enumerate(covered, repo, nullptr, strict).size() == 1);
  CHECK(enumerate(leftover, repo, nullptr, strict, &diag).empty());
  CHECK(diag.coverage_rejected > 0);
}

TEST_CASE("enumerate agrees with the brute-force oracle") {
  DialoguePlan plan = demo_plan();
  CgState cg = fresh_cg(plan);
  update_salience(cg, 0, {"x_2"});

  const std::vector<FsPtr> inputs{
      act_node("greeting", "john", "none"),
      act_node("greeting", "mary", "none"),
      act_node("statement", "john", "drs([c],[type(c,prestigious),arg1(c,x_1)])"),
      act_node("statement", "mary",
               "drs([e],[negation(drs([],[type(e,fast),arg1(e,x_1)]))])"),
      act_node("statement", "john", "drs([c],[type(c,safe),arg1(c,x_2)])",
               "enthusiastic"),
      act_node("question", "mary", "drs([c],[type(c,safe),arg1(c,x_2)])"),
      act_node("statement", "john", "drs([c],[type(c,like),arg1(c,mary),arg2(c,x_1)])"),
      act_node("statement", "mary",
               "drs([e],[negation(drs([],[type(e,like),arg1(e,mary),arg2(e,x_2)]))])"),
      act_node("refusal", "john", "none"),
      act_node("farewell", "mary", "none"),
  };

  GenConfig cfg;
  cfg.max_solutions = 100000;  // unlimited for this grammar
  for (size_t i = 0; i < inputs.size(); ++i) {
    CAPTURE(i);
    auto engine = enumerate(inputs[i], demo(), &cg, cfg);
    mnlg_test::OracleGen oracle{demo(), &cg};
    auto brute = oracle.node(inputs[i], {}, 0);

    REQUIRE(engine.size() <= 200);
    std::vector<std::string> a, b;
    for (const DerivationNode& d : engine)
      a.push_back(mnlg_test::join(mnlg_test::leaf_strings(d)));
    for (const auto& [_, seq] : brute) b.push_back(mnlg_test::join(seq));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(!a.empty());
  }
}
