#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <numeric>

#include "iacsmell/annotator.hpp"
#include "iacsmell/corpus.hpp"
#include "iacsmell/curation.hpp"
#include "iacsmell/dataset.hpp"
#include "iacsmell/error.hpp"
#include "iacsmell/eval.hpp"
#include "iacsmell/gateway.hpp"
#include "iacsmell/manifest.hpp"
#include "iacsmell/parsers.hpp"
#include "iacsmell/report.hpp"
#include "iacsmell/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace iacsmell;

namespace {

constexpr const char* kVersion = "0.1.0";

struct UsageError : Error {
  using Error::Error;
};

void emit(const std::optional<std::string>& out, const std::string& data) {
  if (out && *out != "-") {
    write_file(*out, data);
  } else {
    std::cout << data;
    std::cout.flush();
  }
}

std::optional<IacLanguage> lang_option(const std::string& s) {
  if (s.empty() || text::iequals(s, "auto")) return std::nullopt;
  auto l = language_from_string(s);
  if (!l) throw UsageError("unknown language: " + s);
  return l;
}

RuleConfig rules_option(const std::string& path) {
  return path.empty() ? RuleConfig::defaults() : load_rule_config(path);
}

// Each argument is a file or a directory; directories expand to their IaC
// files. Returns (file, root it came from).
std::vector<std::pair<fs::path, fs::path>> expand(const std::vector<std::string>& args) {
  std::vector<std::pair<fs::path, fs::path>> out;
  for (const auto& a : args) {
    fs::path p(a);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      for (auto& f : list_iac_files(p)) out.emplace_back(f, p);
    } else if (fs::exists(p, ec)) {
      out.emplace_back(p, p.parent_path());
    } else {
      throw Error("no such file or directory: " + a);
    }
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  for (auto& part : text::split(s, ',')) {
    std::string t(text::trim(part));
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::map<std::string, BatchRow> rows_by_id(const std::vector<BatchRow>& rows) {
  std::map<std::string, BatchRow> m;
  for (const auto& r : rows) {
    if (!m.emplace(r.script_id, r).second) {
      throw UsageError("duplicate script_id in responses: " + r.script_id +
                       " (use --detail to pick one detail level)");
    }
  }
  return m;
}

std::vector<BatchRow> filter_detail(std::vector<BatchRow> rows, const std::string& detail) {
  if (detail.empty()) return rows;
  auto d = detail_from_string(detail);
  if (!d) throw UsageError("unknown detail: " + detail);
  std::erase_if(rows, [&](const BatchRow& r) { return r.detail != *d; });
  return rows;
}

// --- subcommands --------------------------------------------------------

int cmd_scan(const std::vector<std::string>& paths, const std::string& lang, const std::string& rules,
             const std::string& format, unsigned jobs, const std::optional<std::string>& out) {
  const RuleConfig cfg = rules_option(rules);
  std::vector<fs::path> files;
  for (auto& [f, root] : expand(paths)) files.push_back(f);
  const auto scanned = scan_files(files, cfg, jobs, lang_option(lang));
  std::vector<FileReport> reports;
  bool any = false;
  for (const auto& s : scanned) {
    FileReport r{s.path.generic_string(), s.script.language, s.detections, s.script.parse_failed,
                 s.script.parse_error};
    if (r.parse_failed) {
      std::cerr << "warning: " << r.path << ": degraded parse";
      if (r.parse_error) std::cerr << " (line " << r.parse_error->line << ": " << r.parse_error->reason << ")";
      std::cerr << '\n';
    }
    any = any || !r.detections.empty();
    reports.push_back(std::move(r));
  }
  if (format == "json") {
    emit(out, detections_to_json(reports).dump(2) + "\n");
  } else if (format == "sarif") {
    emit(out, detections_to_sarif(reports, kVersion).dump(2) + "\n");
  } else {
    emit(out, detections_to_text(reports));
  }
  return any ? 1 : 0;
}

int cmd_annotate(const std::vector<std::string>& paths, bool in_place, const std::string& out_dir,
                 const std::string& lang, const std::string& rules, unsigned jobs) {
  if (in_place && !out_dir.empty()) throw UsageError("--in-place and --out are exclusive");
  const RuleConfig cfg = rules_option(rules);
  const auto items = expand(paths);
  if (!in_place && out_dir.empty() && items.size() != 1) {
    throw UsageError("annotating several files needs --in-place or --out DIR");
  }
  std::vector<fs::path> files;
  for (auto& [f, root] : items) files.push_back(f);
  const auto scanned = scan_files(files, cfg, jobs, lang_option(lang));
  std::size_t total = 0;
  for (std::size_t i = 0; i < scanned.size(); ++i) {
    const auto& s = scanned[i];
    const std::string annotated = annotate(s.script, s.detections);
    total += s.detections.size();
    if (in_place) {
      if (annotated != s.content) write_file(s.path, annotated);
    } else if (!out_dir.empty()) {
      write_file(fs::path(out_dir) / relative_id(s.path, items[i].second), annotated);
    } else {
      std::cout << annotated;
    }
  }
  std::cerr << total << " annotation(s) in " << scanned.size() << " file(s)\n";
  return 0;
}

int cmd_curate_sample(const std::string& corpus, int per_type, std::uint64_t seed, const std::string& out,
                      const std::string& rules, unsigned jobs) {
  SampleResult r = curate_sample(corpus, per_type, seed, rules_option(rules), jobs);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  write_file(out, review_to_jsonl(r.entries));
  std::cerr << r.entries.size() << " review entries written to " << out << '\n';
  return 0;
}

int cmd_curate_finalize(const std::string& review, const std::string& out, const std::string& scripts) {
  std::vector<ReviewEntry> rows = review_from_jsonl(read_file(review));
  std::optional<fs::path> root;
  if (!scripts.empty()) root = fs::path(scripts);
  FinalizeResult r = curate_finalize(rows, root);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  write_manifest(out, r.manifest);
  std::cout << r.stats.to_json().dump(2) << '\n';
  return 0;
}

int cmd_forge(const std::string& corpus, const std::string& testset, const std::string& tasks,
              const std::string& languages, double split, const std::string& instructions,
              const std::string& config, std::optional<std::size_t> max_records, std::uint64_t seed,
              const std::string& out, const std::string& stats_out, const std::string& rules, unsigned jobs) {
  ForgeSpec spec;
  spec.corpus_dir = corpus;
  if (!testset.empty()) spec.testset_manifest = fs::path(testset);
  for (const auto& t : split_csv(tasks)) {
    auto v = task_from_string(t);
    if (!v) throw UsageError("unknown task: " + t);
    spec.tasks.insert(*v);
  }
  for (const auto& l : split_csv(languages)) {
    auto v = language_from_string(l);
    if (!v) throw UsageError("unknown language: " + l);
    spec.languages.insert(*v);
  }
  if (split < 0 || split > 1) throw UsageError("--detail-split must be within [0, 1]");
  spec.detail_split = split;
  spec.max_records = max_records;
  spec.seed = seed;
  spec.jobs = jobs;
  spec.rules = rules_option(rules);

  ForgeResult res;
  if (instructions == "llm") {
    if (config.empty()) throw UsageError("--instructions llm needs --config");
    Gateway gw(GatewayConfig::load(config), [](const std::string& m) { std::cerr << m << '\n'; });
    res = forge(spec, InstructionSource::Llm, llm_instruction_synth(gw));
  } else if (instructions == "template") {
    res = forge(spec, InstructionSource::Template);
  } else {
    throw UsageError("unknown instruction source: " + instructions);
  }
  write_file(out, to_jsonl(res.records));
  const std::string stats = res.stats.to_json().dump(2) + "\n";
  if (!stats_out.empty()) write_file(stats_out, stats);
  std::cerr << stats;
  return 0;
}

int cmd_eval_run(const std::string& manifest_path, const std::string& task, const std::string& detail,
                 const std::string& config, const std::string& out, unsigned jobs) {
  const GroundTruthManifest m = read_manifest(manifest_path);
  BatchOptions opt;
  auto t = task_from_string(task);
  if (!t) throw UsageError("unknown task: " + task);
  opt.task = *t;
  auto d = detail_from_string(detail);
  if (!d || *d == Detail::None) throw UsageError("--detail must be low or high");
  opt.detail = *d;
  opt.manifest_dir = fs::path(manifest_path).parent_path();
  opt.out = fs::path(out);
  opt.jobs = jobs;
  Gateway gw(GatewayConfig::load(config), [](const std::string& msg) { std::cerr << msg << '\n'; });
  const auto rows = run_eval_batch(gw, m, opt);
  std::size_t errors = 0;
  for (const auto& r : rows) {
    if (r.error) {
      ++errors;
      std::cerr << "error: " << r.script_id << ": " << *r.error << '\n';
    }
  }
  std::cerr << rows.size() << " responses (" << errors << " failed, " << gw.requests_sent()
            << " requests, " << gw.cache_hits() << " cache hits)\n";
  return errors ? 1 : 0;
}

int cmd_eval_score(const std::string& manifest_path, const std::string& responses, const std::string& channel,
                   const std::string& detail, const std::string& label, bool strict,
                   const std::optional<std::string>& out) {
  const GroundTruthManifest m = read_manifest(manifest_path);
  auto ch = channel_from_string(channel);
  if (!ch) throw UsageError("unknown channel: " + channel);
  const auto rows = filter_detail(batch_from_jsonl(read_file(responses)), detail);
  const auto by_id = rows_by_id(rows);

  std::map<std::string, ParsedReport> reports;
  std::map<std::string, std::string> texts;
  std::map<Detail, std::pair<std::size_t, std::size_t>> syntax;  // pass, total
  for (const auto& [id, r] : by_id) {
    const ManifestEntry* e = m.find(id);
    if (!e) throw UnknownScript("unknown script id in responses: " + id);
    if (r.error) continue;  // counts as an empty report
    ParsedReport p = parse_response(r.response, e->language, *ch);
    p.script_id = id;
    reports.emplace(id, std::move(p));
    texts.emplace(id, r.response);
    if (r.task == Task::Generation) {
      auto& s = syntax[r.detail];
      ++s.second;
      if (check_syntax(r.response, e->language).ok) ++s.first;
    }
  }
  EvalReport rep = score(m, reports);
  if (strict) rep.strict = score_strict(m, texts);
  if (!label.empty()) {
    rep.label = label;
  } else if (!rows.empty()) {
    rep.label = rows.front().model + " / " + std::string(to_string(rows.front().task));
  }
  auto rate = [&](Detail d) -> std::optional<double> {
    auto it = syntax.find(d);
    if (it == syntax.end() || it->second.second == 0) return std::nullopt;
    return static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
  };
  rep.syntax_pass_rate_low = rate(Detail::Low);
  rep.syntax_pass_rate_high = rate(Detail::High);
  emit(out, rep.to_json().dump(2) + "\n");
  return 0;
}

int cmd_eval_syntax(const std::vector<std::string>& files, const std::string& responses,
                    const std::string& manifest_path, const std::string& lang) {
  if (files.empty() == responses.empty()) throw UsageError("give either --files or --responses");
  json out = json::array();
  std::size_t pass = 0;
  std::size_t total = 0;
  auto record = [&](const std::string& id, const SyntaxResult& r) {
    ++total;
    if (r.ok) ++pass;
    json j{{"id", id}, {"ok", r.ok}};
    if (!r.ok) j["reason"] = r.reason;
    out.push_back(j);
  };
  if (!files.empty()) {
    for (auto& [f, root] : expand(files)) {
      const std::string content = read_file(f);
      auto l = lang_option(lang);
      record(f.generic_string(), check_syntax(content, l ? *l : infer_language(f.generic_string(), content)));
    }
  } else {
    if (manifest_path.empty()) throw UsageError("--responses needs --manifest for script languages");
    const GroundTruthManifest m = read_manifest(manifest_path);
    for (const auto& r : batch_from_jsonl(read_file(responses))) {
      const ManifestEntry* e = m.find(r.script_id);
      if (!e) throw UnknownScript("unknown script id in responses: " + r.script_id);
      if (r.error) continue;
      record(r.script_id + " (" + std::string(to_string(r.detail)) + ")", check_syntax(r.response, e->language));
    }
  }
  json summary{{"results", out},
               {"passed", pass},
               {"total", total},
               {"pass_rate", total ? static_cast<double>(pass) / static_cast<double>(total) : 0.0}};
  std::cout << summary.dump(2) << '\n';
  return pass == total ? 0 : 1;
}

int cmd_eval_judge(const std::string& responses, const std::string& manifest_path, const std::string& config,
                   const std::string& report_path, const std::optional<std::string>& out) {
  const GroundTruthManifest m = read_manifest(manifest_path);
  Gateway gw(GatewayConfig::load(config), [](const std::string& msg) { std::cerr << msg << '\n'; });
  std::map<Detail, std::vector<double>> scores;
  json per = json::array();
  std::size_t failures = 0;
  for (const auto& r : batch_from_jsonl(read_file(responses))) {
    if (r.task != Task::Generation || r.error) continue;
    const ManifestEntry* e = m.find(r.script_id);
    if (!e) throw UnknownScript("unknown script id in responses: " + r.script_id);
    const auto& instr = r.detail == Detail::High ? e->instruction_high : e->instruction_low;
    if (!instr) continue;
    try {
      const double s = judge_functional(gw, *instr, extract_code(r.response, e->language));
      scores[r.detail].push_back(s);
      per.push_back(json{{"script_id", r.script_id}, {"detail", to_string(r.detail)}, {"score", s}});
    } catch (const UnparseableJudgment& ex) {
      ++failures;
      std::cerr << "warning: " << r.script_id << ": " << ex.what() << '\n';
    }
  }
  auto mean = [&](Detail d) -> std::optional<double> {
    auto it = scores.find(d);
    if (it == scores.end() || it->second.empty()) return std::nullopt;
    return std::accumulate(it->second.begin(), it->second.end(), 0.0) / static_cast<double>(it->second.size());
  };
  const auto low = mean(Detail::Low);
  const auto high = mean(Detail::High);
  json result{{"functional_low", low ? json(*low) : json(nullptr)},
              {"functional_high", high ? json(*high) : json(nullptr)},
              {"unparseable", failures},
              {"scores", per}};
  if (!report_path.empty()) {
    EvalReport rep = EvalReport::from_json(json::parse(read_file(report_path)));
    if (low) rep.functional_low = low;
    if (high) rep.functional_high = high;
    write_file(report_path, rep.to_json().dump(2) + "\n");
  }
  emit(out, result.dump(2) + "\n");
  return 0;
}

int cmd_report(const std::vector<std::string>& scores, const std::string& format,
               const std::optional<std::string>& out) {
  std::vector<EvalReport> reports;
  for (const auto& p : scores) {
    json j = json::parse(read_file(p));
    if (j.is_array()) {
      for (const auto& x : j) reports.push_back(EvalReport::from_json(x));
    } else {
      reports.push_back(EvalReport::from_json(j));
    }
  }
  if (format == "json") {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    emit(out, arr.dump(2) + "\n");
  } else {
    emit(out, reports_to_markdown(reports));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Security smell scanner, dataset forge and evaluation harness for IaC scripts"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  unsigned jobs = 1;
  app.add_option("-j,--jobs", jobs, "Parallel workers for file-level work")->check(CLI::Range(1u, 256u));

  std::function<int()> run;

  // scan
  auto* scan = app.add_subcommand("scan", "Detect security smells");
  std::vector<std::string> scan_paths;
  std::string lang = "auto", rules, format = "text";
  std::optional<std::string> scan_out;
  scan->add_option("paths", scan_paths, "Files or directories")->required();
  scan->add_option("--lang", lang, "auto|ansible|chef|puppet");
  scan->add_option("--rules", rules, "Rule keyword config (TOML)");
  scan->add_option("--format", format)->check(CLI::IsMember({"text", "json", "sarif"}));
  scan->add_option("-o,--out", scan_out, "Write to a file instead of stdout");
  scan->callback([&] { run = [&] { return cmd_scan(scan_paths, lang, rules, format, jobs, scan_out); }; });

  // annotate
  auto* ann = app.add_subcommand("annotate", "Insert annotation comments above each smell");
  std::vector<std::string> ann_paths;
  bool in_place = false;
  std::string ann_out;
  ann->add_option("paths", ann_paths)->required();
  ann->add_flag("--in-place", in_place);
  ann->add_option("--out", ann_out, "Output directory");
  ann->add_option("--lang", lang);
  ann->add_option("--rules", rules);
  ann->callback([&] { run = [&] { return cmd_annotate(ann_paths, in_place, ann_out, lang, rules, jobs); }; });

  // curate
  auto* curate = app.add_subcommand("curate", "Build a reviewed test set");
  curate->require_subcommand(1);
  auto* sample = curate->add_subcommand("sample", "Sample scripts per smell type for review");
  std::string corpus, review_out;
  int per_type = 30;
  std::uint64_t seed = 0;
  sample->add_option("--corpus", corpus)->required();
  sample->add_option("--per-type", per_type)->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed)->required();
  sample->add_option("--out", review_out)->required();
  sample->add_option("--rules", rules);
  sample->callback([&] {
    run = [&] { return cmd_curate_sample(corpus, per_type, seed, review_out, rules, jobs); };
  });
  auto* fin = curate->add_subcommand("finalize", "Turn a reviewed file into a manifest");
  std::string review_in, manifest_out, scripts_dir;
  fin->add_option("--review", review_in)->required();
  fin->add_option("--out", manifest_out)->required();
  fin->add_option("--scripts", scripts_dir, "Corpus directory; adds template instructions");
  fin->callback([&] { run = [&] { return cmd_curate_finalize(review_in, manifest_out, scripts_dir); }; });

  // forge
  auto* fg = app.add_subcommand("forge", "Build the instruction-tuning dataset");
  std::string testset, tasks, languages, instructions = "template", config, forge_out, stats_out;
  double split = 0.5;
  std::optional<std::size_t> max_records;
  fg->add_option("--corpus", corpus)->required();
  fg->add_option("--testset", testset, "Manifest whose scripts are excluded");
  fg->add_option("--tasks", tasks, "gen,insp");
  fg->add_option("--languages", languages, "ansible,chef,puppet");
  fg->add_option("--detail-split", split);
  fg->add_option("--instructions", instructions)->check(CLI::IsMember({"template", "llm"}));
  fg->add_option("--config", config, "Gateway config for --instructions llm");
  fg->add_option("--max-records", max_records);
  fg->add_option("--seed", seed)->required();
  fg->add_option("--out", forge_out)->required();
  fg->add_option("--stats", stats_out, "Write stats JSON here too");
  fg->add_option("--rules", rules);
  fg->callback([&] {
    run = [&] {
      return cmd_forge(corpus, testset, tasks, languages, split, instructions, config, max_records, seed,
                       forge_out, stats_out, rules, jobs);
    };
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate model responses");
  ev->require_subcommand(1);
  std::string manifest, task, detail, responses, channel = "both", label, report_file;
  std::optional<std::string> eval_out;
  bool strict = false;

  auto* erun = ev->add_subcommand("run", "Query a model for every manifest entry");
  std::string run_detail = "low", run_out;
  erun->add_option("--manifest", manifest)->required();
  erun->add_option("--task", task)->required()->check(CLI::IsMember({"gen", "insp", "generation", "inspection"}));
  erun->add_option("--detail", run_detail)->check(CLI::IsMember({"low", "high"}));
  erun->add_option("--config", config)->required();
  erun->add_option("--out", run_out)->required();
  erun->callback([&] { run = [&] { return cmd_eval_run(manifest, task, run_detail, config, run_out, jobs); }; });

  auto* esc = ev->add_subcommand("score", "Score responses against the manifest");
  esc->add_option("--manifest", manifest)->required();
  esc->add_option("--responses", responses)->required();
  esc->add_option("--channel", channel)->check(CLI::IsMember({"comments", "prose", "both"}));
  esc->add_option("--detail", detail)->check(CLI::IsMember({"low", "high", "none"}));
  esc->add_option("--label", label);
  esc->add_flag("--strict", strict, "Add the line-level strict score");
  esc->add_option("--out", eval_out);
  esc->callback([&] {
    run = [&] { return cmd_eval_score(manifest, responses, channel, detail, label, strict, eval_out); };
  });

  auto* esy = ev->add_subcommand("syntax", "Check syntax of files or responses");
  std::vector<std::string> syntax_files;
  esy->add_option("--files", syntax_files);
  esy->add_option("--responses", responses);
  esy->add_option("--manifest", manifest);
  esy->add_option("--lang", lang);
  esy->callback([&] { run = [&] { return cmd_eval_syntax(syntax_files, responses, manifest, lang); }; });

  auto* ej = ev->add_subcommand("judge", "Score functional correctness with a judge model");
  ej->add_option("--responses", responses)->required();
  ej->add_option("--manifest", manifest)->required();
  ej->add_option("--config", config)->required();
  ej->add_option("--report", report_file, "Report JSON to update in place");
  ej->add_option("--out", eval_out);
  ej->callback([&] { run = [&] { return cmd_eval_judge(responses, manifest, config, report_file, eval_out); }; });

  // report
  auto* rp = app.add_subcommand("report", "Render score files as tables");
  std::vector<std::string> score_files;
  std::string rformat = "md";
  std::optional<std::string> rout;
  rp->add_option("--scores", score_files)->required();
  rp->add_option("--format", rformat)->check(CLI::IsMember({"md", "json"}));
  rp->add_option("--out", rout);
  rp->callback([&] { run = [&] { return cmd_report(score_files, rformat, rout); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return run ? run() : 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const MissingVerdict& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
