// mnlg command line: generate scripts from dialogue plans, validate grammar
// files, and benchmark the pipeline.
//
//   mnlg generate --grammar G --plan P [--max-solutions N] [--seed S]
//                 [--depth-limit D] [--require-full-coverage] [-o OUT]
//   mnlg validate --grammar G
//   mnlg bench    --grammar G --plans DIR [--reps R]
//
// Exit codes: 0 success (act-level failures are flagged in the output),
// 1 input or grammar error, 2 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mnlg/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_generate(const std::string& grammar, const std::string& plan_path,
                 int max_solutions, std::optional<uint64_t> seed,
                 int depth_limit, bool full_coverage, const std::string& out) {
  mnlg::Repository repo = mnlg::load_repository(grammar);
  mnlg::DialoguePlan plan = mnlg::parse_plan_file(plan_path);
  mnlg::GenConfig cfg;
  cfg.max_solutions = max_solutions;
  cfg.rng_seed = seed;
  cfg.depth_limit = depth_limit;
  cfg.require_full_coverage = full_coverage;
  mnlg::Script script = mnlg::generate_dialogue(plan, repo, cfg);
  mnlg::assign_turn_gestures(script, plan);
  std::string bytes = mnlg::emit_script(script);
  if (out.empty() || out == "-") {
    std::cout << bytes;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw mnlg::PlanError("cannot write output file '" + out + "'");
    f << bytes;
  }
  int failures = 0;
  for (const auto& u : script.utterances)
    if (u.error) ++failures;
  if (failures)
    std::cerr << "warning: " << failures << " of " << script.utterances.size()
              << " acts failed to realize (flagged in the output)\n";
  return 0;
}

int cmd_validate(const std::string& grammar) {
  mnlg::Repository repo = mnlg::load_repository(grammar);
  int canned = 0, templates = 0, rules = 0;
  for (const mnlg::GenTree& t : repo.trees) {
    switch (mnlg::classify(repo, t)) {
      case mnlg::TreeClass::canned: ++canned; break;
      case mnlg::TreeClass::template_: ++templates; break;
      case mnlg::TreeClass::rule: ++rules; break;
    }
  }
  std::cout << "grammar ok: " << repo.trees.size() << " trees (" << canned
            << " canned, " << templates << " templates, " << rules
            << " rules), " << repo.lexicon.size() << " lexicon entries, "
            << repo.hierarchy.size() << " types\n";
  for (const mnlg::GenTree& t : repo.trees)
    std::cout << "  " << t.id << ": "
              << mnlg::tree_class_name(mnlg::classify(repo, t)) << "\n";
  return 0;
}

int cmd_bench(const std::string& grammar, const std::string& plans_dir,
              int reps) {
  mnlg::Repository repo = mnlg::load_repository(grammar);
  std::vector<std::pair<std::string, std::string>> plans;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(plans_dir))
    if (e.is_regular_file() && e.path().extension() == ".xml")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw mnlg::PlanError("no .xml plans found in '" + plans_dir + "'");
  for (const fs::path& p : files) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    plans.emplace_back(p.stem().string(), text.str());
  }
  mnlg::BenchReport report = mnlg::run_benchmark(plans, repo, reps);
  std::cout << report.table();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multimodal NLG engine: dialogue plans to utterance scripts"};
  app.require_subcommand(1);

  std::string grammar, plan, out;
  int max_solutions = 1;
  int depth_limit = 32;
  int reps = 15;
  std::optional<uint64_t> seed;
  uint64_t seed_raw = 0;
  bool full_coverage = false;
  std::string plans_dir;

  auto* gen = app.add_subcommand("generate", "realize a dialogue plan");
  gen->add_option("--grammar", grammar, "grammar file")->required();
  gen->add_option("--plan", plan, "dialogue-plan xml")->required();
  gen->add_option("--max-solutions", max_solutions, "solution cap per act");
  auto* seed_opt = gen->add_option("--seed", seed_raw, "rng seed");
  gen->add_option("--depth-limit", depth_limit, "expansion depth limit");
  gen->add_flag("--require-full-coverage", full_coverage,
                "reject solutions that drop semantic conditions");
  gen->add_option("-o,--output", out, "output file ('-' = stdout)");

  auto* val = app.add_subcommand("validate", "load and check a grammar");
  val->add_option("--grammar", grammar, "grammar file")->required();

  auto* bench = app.add_subcommand("bench", "time the pipeline over a plan set");
  bench->add_option("--grammar", grammar, "grammar file")->required();
  bench->add_option("--plans", plans_dir, "directory of plan xml files")
      ->required();
  bench->add_option("--reps", reps, "repetitions per plan and mode");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (seed_opt->count()) seed = seed_raw;
      return cmd_generate(grammar, plan, max_solutions, seed, depth_limit,
                          full_coverage, out);
    }
    if (val->parsed()) return cmd_validate(grammar);
    if (bench->parsed()) return cmd_bench(grammar, plans_dir, reps);
  } catch (const mnlg::MnlgError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
