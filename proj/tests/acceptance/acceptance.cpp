// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "iacsmell/annotator.hpp"
#include "iacsmell/corpus.hpp"
#include "iacsmell/curation.hpp"
#include "iacsmell/dataset.hpp"
#include "iacsmell/detectors.hpp"
#include "iacsmell/digest.hpp"
#include "iacsmell/error.hpp"
#include "iacsmell/eval.hpp"
#include "iacsmell/gateway.hpp"
#include "iacsmell/manifest.hpp"
#include "iacsmell/parsers.hpp"
#include "mock_llm.hpp"
#include "mutants.hpp"
#include "synth.hpp"

using namespace iacsmell;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Collects failure notes for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 8) failures.push_back(what);
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(prec);
  o << v;
  return o.str();
}

bool r1_to_r3(SmellType t) {
  return t == SmellType::AdminByDefault || t == SmellType::EmptyPassword || t == SmellType::HardCodedSecret;
}

// 1 ---------------------------------------------------------------------------
std::string golden_detection(Check& c) {
  const auto labels = nlohmann::json::parse(testutil::slurp(testutil::golden("labels.json")));
  std::vector<std::pair<nlohmann::json, std::string>> inputs;
  for (const auto& l : labels) inputs.emplace_back(l, testutil::slurp(testutil::golden(l["file"])));
  c.expect(inputs.size() == 10, "expected 10 golden snippets");

  const auto t0 = Clock::now();
  for (const auto& [l, src] : inputs) {
    const std::string file = l["file"];
    IrScript s = parse_any(src, file);
    const auto dets = detect(s);
    const auto want = smell_from_string(l["smell"].get<std::string>());
    const int line = l["line"];
    c.expect(dets.size() == 1, file + ": " + std::to_string(dets.size()) + " detections");
    if (dets.empty()) continue;
    c.expect(want && dets[0].smell == *want, file + ": wrong type");
    c.expect(dets[0].span.start_line == line, file + ": wrong line");
    c.expect(s.lines.at(line - 1).find(l["construct"].get<std::string>()) != std::string::npos,
             file + ": construct not on the flagged line");
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 1.0, "runtime " + fmt(dt) + " s");
  return std::to_string(inputs.size()) + " snippets in " + fmt(dt, 4) + " s";
}

// 2 ---------------------------------------------------------------------------
std::string false_positive_regression(Check& c) {
  for (const char* src : {"- name: x\n  debug:\n    msg: \"000000000\"\n",
                          "- name: x\n  lineinfile:\n    line: \"serial=000000000\"\n",
                          "file { '/etc/x':\n  content => '000000000',\n}\n",
                          "template '/etc/x' do\n  variables(id: '000000000')\nend\n"}) {
    IrScript s = parse_any(src, std::string(src).starts_with("- ") ? "a.yml"
                               : std::string(src).starts_with("file") ? "a.pp" : "a.rb");
    for (const auto& d : detect(s))
      c.expect(d.smell != SmellType::UnrestrictedIpAddress, "000000000 flagged as unrestricted IP");
  }

  // Golden R1-R3 snippets with the flagged literal swapped for interpolation.
  const std::vector<std::string> forms = {
      "\"{{ %s }}\"", "'{{ %s }}'", "\"{{ %s | default(omit) }}\"", "\"{{ lookup('env', '%s') }}\"",
      "\"{{ vault_%s }}\""};
  const std::vector<std::string> names = {"db_password", "svc_user", "login_secret", "x1", "become_account"};
  int mutated = 0, still_flagged = 0;
  const auto labels = nlohmann::json::parse(testutil::slurp(testutil::golden("labels.json")));
  for (const auto& l : labels) {
    const auto t = smell_from_string(l["smell"].get<std::string>());
    if (!t || !r1_to_r3(*t)) continue;
    const std::string file = l["file"];
    IrScript orig = parse_any(testutil::slurp(testutil::golden(file)), file);
    const int line = l["line"];
    std::string& flagged = orig.lines.at(line - 1);
    const std::size_t colon = flagged.find(':');
    for (const auto& form : forms) {
      for (const auto& name : names) {
        std::string value = form;
        value.replace(value.find("%s"), 2, name);
        std::vector<std::string> lines = orig.lines;
        lines[line - 1] = flagged.substr(0, colon + 1) + " " + value;
        std::string text;
        for (const auto& ln : lines) text += ln + "\n";
        IrScript m = parse_any(text, file);
        ++mutated;
        bool any = false;
        for (const auto& d : detect(m)) any = any || r1_to_r3(d.smell);
        if (any) {
          ++still_flagged;
          c.expect(false, file + " with " + value + " still flagged");
        }
      }
    }
  }
  c.expect(mutated >= 100, "only " + std::to_string(mutated) + " mutants");

  // Same property on synthetic scripts in all three languages.
  std::mt19937_64 rng(2024);
  synth::Options opt;
  opt.interpolate_secrets = true;
  int synthetic = 0;
  for (int i = 0; i < 150; ++i) {
    const auto lang = static_cast<IacLanguage>(i % 3);
    auto sc = synth::make_script(rng, lang, {SmellType::HardCodedSecret, SmellType::EmptyPassword,
                                             SmellType::AdminByDefault}, i, opt);
    for (const auto& d : detect(parse_as(lang, sc.content, sc.path))) {
      c.expect(!r1_to_r3(d.smell), "synthetic " + sc.path + " flagged " + std::string(smell_id(d.smell)));
    }
    ++synthetic;
  }
  return std::to_string(mutated) + " golden mutants (" + std::to_string(still_flagged) + " flagged), " +
         std::to_string(synthetic) + " synthetic";
}

// 3 ---------------------------------------------------------------------------
std::string metric_algebra(Check& c) {
  struct Row {
    const char* model;
    const char* task;
    double p, r, f1;
  };
  const Row rows[] = {
      {"CodeGen2.5", "gen", .600, .158, .250},  {"CodeGen2.5", "insp", .600, .016, .031},
      {"StarCoder", "gen", 0, 0, 0},            {"StarCoder", "insp", 0, 0, 0},
      {"WizardCoder", "gen", .359, .135, .196}, {"WizardCoder", "insp", .455, .183, .261},
      {"CodeLlama", "gen", .459, .198, .276},   {"CodeLlama", "insp", .633, .199, .303},
      {"Vicuna", "gen", .481, .280, .354},      {"Vicuna", "insp", .720, .377, .495},
      {"Llama2", "gen", .403, .386, .394},      {"Llama2", "insp", .588, .298, .396},
      {"GPT3.5", "gen", .462, .378, .416},      {"GPT3.5", "insp", .664, .476, .555},
      {"GPT4", "gen", .525, .575, .549},        {"GPT4", "insp", .673, .529, .592},
  };
  double worst = 0;
  for (const auto& r : rows) {
    const double got = f1_score(r.p, r.r);
    worst = std::max(worst, std::abs(got - r.f1));
    c.expect(std::abs(got - r.f1) <= 0.001,
             std::string(r.model) + "/" + r.task + ": " + fmt(got) + " vs " + fmt(r.f1));
  }
  // A model that reports nothing: P, R and F1 are all zero rather than NaN.
  Counts silent = make_counts(0, 0, 840);
  c.expect(silent.precision == 0 && silent.recall == 0 && silent.f1 == 0, "zero-report convention");
  Counts none = make_counts(0, 0, 0);
  c.expect(none.precision == 0 && none.recall == 0 && none.f1 == 0, "empty counts convention");
  return "16 rows, max |dF1| = " + fmt(worst, 4);
}

// 4 ---------------------------------------------------------------------------
std::string round_trip(Check& c) {
  auto corpus = synth::make_corpus(404, 500, 0.8);
  const auto t0 = Clock::now();
  int stripped_ok = 0, recovered = 0;
  for (const auto& sc : corpus) {
    IrScript s = parse_as(sc.language, sc.content, sc.path);
    const auto dets = detect(s);
    const std::string annotated = annotate(s, dets);
    if (strip_annotations(annotated) == sc.content) ++stripped_ok;
    else c.expect(false, sc.path + ": strip(annotate) differs");
    std::array<int, kSmellCount> want{};
    for (const auto& d : dets) ++want[index_of(d.smell)];
    if (parse_response(annotated, sc.language).reported == want) ++recovered;
    else c.expect(false, sc.path + ": multiset not recovered");
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 10.0, "runtime " + fmt(dt) + " s");
  return std::to_string(stripped_ok) + "/500 byte-exact, " + std::to_string(recovered) + "/500 recovered, " +
         fmt(dt, 2) + " s";
}

// 5 ---------------------------------------------------------------------------
std::string scoring_oracle(Check& c) {
  auto corpus = synth::make_corpus(55, 120, 0.7);
  GroundTruthManifest m;
  std::map<std::string, ParsedReport> oracle;
  for (const auto& sc : corpus) {
    if (sc.expected.empty()) continue;
    ManifestEntry e;
    e.script_id = sc.path;
    e.path = sc.path;
    e.language = sc.language;
    e.verified = true;
    ParsedReport r;
    r.script_id = sc.path;
    for (const auto& x : sc.expected) {
      e.truth.push_back(TruthItem{x.smell, x.line, ""});
      ++r.reported[index_of(x.smell)];
    }
    m.entries.push_back(e);
    oracle[sc.path] = r;
  }
  EvalReport full = score(m, oracle);
  c.expect(full.overall.precision == 1.0 && full.overall.recall == 1.0 && full.overall.f1 == 1.0,
           "oracle did not score 1.000");
  EvalReport empty = score(m, {});
  c.expect(empty.overall.precision == 0.0 && empty.overall.recall == 0.0 && empty.overall.f1 == 0.0,
           "empty reports did not score 0.000");

  std::mt19937_64 rng(5150);
  int trials = 0;
  for (; trials < 1000; ++trials) {
    std::map<std::string, ParsedReport> partial;
    long reported = 0, truth = 0;
    for (const auto& e : m.entries) {
      truth += static_cast<long>(e.truth.size());
      if (rng() % 4 == 0) continue;  // script left out entirely
      ParsedReport r;
      r.script_id = e.script_id;
      for (SmellType t : kAllSmells) {
        r.reported[index_of(t)] = static_cast<int>(rng() % 3);
        reported += r.reported[index_of(t)];
      }
      partial[e.script_id] = r;
    }
    EvalReport s = score(m, partial);
    const bool ok = s.overall.tp + s.overall.fn == truth && s.overall.tp + s.overall.fp == reported;
    c.expect(ok, "trial " + std::to_string(trials) + " breaks count identities");
    if (!ok) break;
  }
  return "oracle F1 " + fmt(full.overall.f1) + ", empty F1 " + fmt(empty.overall.f1) + ", " +
         std::to_string(trials) + " random trials";
}

// 6 ---------------------------------------------------------------------------
std::string forge_counting(Check& c) {
  testutil::TempDir dir("acc-forge");
  std::mt19937_64 rng(66);
  const int S = 45, C = 20, T = 6;
  std::vector<synth::Script> corpus, held_out;
  const std::vector<SmellType> all(kAllSmells.begin(), kAllSmells.end());
  for (int i = 0; i < S + C + T; ++i) {
    const auto lang = static_cast<IacLanguage>(i % 3);
    std::vector<SmellType> smells;
    if (i < S || i >= S + C) {
      do {
        smells = {all[rng() % all.size()]};
      } while (!synth::supports(lang, smells[0]));
    }
    auto sc = synth::make_script(rng, lang, smells, i);
    (i >= S + C ? held_out : corpus).push_back(sc);
  }
  synth::write_corpus(dir / "corpus", corpus);
  synth::write_corpus(dir / "corpus", held_out);
  // Held-out copies: one exact, the rest re-indented so only the normalized
  // hash matches.
  GroundTruthManifest m;
  std::set<std::string> test_hashes;
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    ManifestEntry e;
    e.script_id = held_out[i].path;
    e.path = held_out[i].path;
    std::string variant = held_out[i].content;
    if (i > 0) variant = "\n" + variant + "\n\n";
    e.sha256 = sha256_hex(variant);
    e.normalized_sha256 = normalized_sha256_hex(variant);
    test_hashes.insert(sha256_hex(held_out[i].content));
    test_hashes.insert(normalized_sha256_hex(held_out[i].content));
    m.entries.push_back(e);
  }
  write_manifest(dir / "test.jsonl", m);

  ForgeSpec spec;
  spec.corpus_dir = dir / "corpus";
  spec.testset_manifest = dir / "test.jsonl";
  spec.seed = 7;
  ForgeResult a = forge(spec, InstructionSource::Template);
  ForgeResult b = forge(spec, InstructionSource::Template);
  c.expect(a.records.size() == static_cast<std::size_t>(2 * S),
           std::to_string(a.records.size()) + " records, expected " + std::to_string(2 * S));
  const long low = static_cast<long>(a.stats.generation_low), high = static_cast<long>(a.stats.generation_high);
  c.expect(low + high == S && std::abs(low - high) <= 1, "split " + std::to_string(low) + "/" + std::to_string(high));
  int overlap = 0;
  for (const auto& r : a.records) {
    const std::string src = r.task == Task::Inspection ? r.input : strip_annotations(r.output);
    overlap += test_hashes.count(sha256_hex(src)) + test_hashes.count(normalized_sha256_hex(src));
  }
  c.expect(overlap == 0, std::to_string(overlap) + " hash overlaps");
  c.expect(a.stats.excluded_by_testset == static_cast<std::size_t>(T), "excluded count");
  c.expect(to_jsonl(a.records) == to_jsonl(b.records), "library runs differ");

  // The CLI writes byte-identical files across two seeded runs.
  const std::string base = testutil::quote(IACSMELL_CLI) + " forge --corpus " +
                           testutil::quote((dir / "corpus").string()) + " --testset " +
                           testutil::quote((dir / "test.jsonl").string()) + " --seed 7 --out ";
  const auto r1 = testutil::run(base + testutil::quote((dir / "one.jsonl").string()));
  const auto r2 = testutil::run(base + testutil::quote((dir / "two.jsonl").string()));
  c.expect(r1.code == 0 && r2.code == 0, "cli forge failed");
  const std::string one = testutil::slurp(dir / "one.jsonl");
  c.expect(!one.empty() && one == testutil::slurp(dir / "two.jsonl"), "cli outputs differ");
  c.expect(one == to_jsonl(a.records), "cli output differs from library output");
  return "S=" + std::to_string(S) + " C=" + std::to_string(C) + " -> " + std::to_string(a.records.size()) +
         " records, low/high " + std::to_string(low) + "/" + std::to_string(high) + ", overlap " +
         std::to_string(overlap);
}

// 7 ---------------------------------------------------------------------------
std::string curation_shape(Check& c) {
  testutil::TempDir dir("acc-cur");
  synth::write_corpus(dir / "corpus", synth::make_covering_corpus(77, 30));
  const std::string review = (dir / "review.jsonl").string();
  const auto r = testutil::run(testutil::quote(IACSMELL_CLI) + " curate sample --corpus " +
                               testutil::quote((dir / "corpus").string()) + " --per-type 30 --seed 3 --out " +
                               testutil::quote(review));
  c.expect(r.code == 0, "curate sample exit " + std::to_string(r.code));
  auto rows = review_from_jsonl(testutil::slurp(review));
  c.expect(rows.size() == 270, std::to_string(rows.size()) + " entries");

  // Mixed verdicts; a detection listed in several rows is kept only when
  // every row keeps it.
  std::mt19937_64 rng(12);
  std::map<std::tuple<std::string, int, int>, bool> keep;
  for (auto& row : rows) {
    for (auto& d : row.detections) {
      const bool k = rng() % 3 != 0;
      d.verdict = k ? Verdict::Keep : Verdict::FalsePositive;
      auto key = std::make_tuple(row.script_id, static_cast<int>(d.smell), d.line);
      auto it = keep.find(key);
      keep[key] = (it == keep.end() ? true : it->second) && k;
    }
  }
  std::ofstream(review) << review_to_jsonl(rows);
  const std::string manifest = (dir / "m.jsonl").string();
  const auto fin = testutil::run(testutil::quote(IACSMELL_CLI) + " curate finalize --review " +
                                 testutil::quote(review) + " --out " + testutil::quote(manifest));
  c.expect(fin.code == 0, "curate finalize exit " + std::to_string(fin.code));
  const auto stats = nlohmann::json::parse(fin.out);
  const GroundTruthManifest m = read_manifest(manifest);

  std::size_t kept = 0;
  std::array<std::size_t, kSmellCount> per{};
  std::set<std::string> scripts;
  for (const auto& [key, k] : keep) {
    if (!k) continue;
    ++kept;
    ++per[static_cast<std::size_t>(std::get<1>(key))];
    scripts.insert(std::get<0>(key));
  }
  c.expect(m.weakness_count() == kept, "manifest weaknesses " + std::to_string(m.weakness_count()) +
                                           " vs kept " + std::to_string(kept));
  c.expect(m.entries.size() == scripts.size(), "manifest scripts");
  c.expect(stats["weaknesses"] == kept, "stats.weaknesses");
  c.expect(stats["scripts"] == m.entries.size(), "stats.scripts");
  c.expect(stats["rows"] == rows.size(), "stats.rows");
  for (SmellType t : kAllSmells) {
    c.expect(stats["per_type"][std::string(smell_id(t))] == per[index_of(t)],
             "stats.per_type " + std::string(smell_id(t)));
  }
  for (const auto& e : m.entries) c.expect(e.verified && !e.truth.empty(), e.script_id + " not verified");
  return std::to_string(rows.size()) + " pre-review entries, " + std::to_string(kept) + " kept weaknesses in " +
         std::to_string(m.entries.size()) + " scripts";
}

// 8 ---------------------------------------------------------------------------
std::string syntax_mutants(Check& c) {
  const auto labels = nlohmann::json::parse(testutil::slurp(testutil::golden("labels.json")));
  std::vector<std::pair<std::string, IacLanguage>> files;
  for (const auto& l : labels)
    files.emplace_back(l["file"], *language_from_string(l["language"].get<std::string>()));
  for (const char* f : {"generation_sample.yml", "inspection_sample.pp", "bind_mounts.rb", "npm_heredoc.rb",
                        "iterm_package.pp", "tempest_sudo.yml"}) {
    files.emplace_back(std::string("../fixtures/") + f, infer_language(f, ""));
  }
  std::size_t golden_ok = 0, mutants = 0, rejected = 0;
  for (const auto& [f, lang] : files) {
    const std::string src = testutil::slurp(testutil::golden(f));
    if (check_syntax(src, lang).ok) ++golden_ok;
    else c.expect(false, f + " rejected: " + check_syntax(src, lang).reason);
    for (const auto& m : mutants::terminator_mutants(src, lang)) {
      ++mutants;
      if (!check_syntax(m, lang).ok) ++rejected;
      else c.expect(false, f + ": a terminator mutant passed");
    }
  }
  for (int k = 0; k <= 4; ++k) {
    const double got = parse_judgment(std::to_string(k));
    c.expect(got == k / 4.0, "judgment " + std::to_string(k) + " -> " + fmt(got));
  }
  return std::to_string(golden_ok) + "/" + std::to_string(files.size()) + " scripts pass, " +
         std::to_string(rejected) + "/" + std::to_string(mutants) + " mutants rejected";
}

// 9 ---------------------------------------------------------------------------
std::string gateway_hermeticity(Check& c) {
  const char* key_env = "IACSMELL_ACCEPTANCE_KEY";
  const std::string key = "sk-acceptance-7f3e9a1b2c4d";
  ::setenv(key_env, key.c_str(), 1);
  testutil::TempDir dir("acc-gw");
  std::vector<std::string> logs;
  std::mutex log_mu;
  auto logger = [&](const std::string& m) {
    std::lock_guard lk(log_mu);
    logs.push_back(m);
  };
  auto cfg = [&](const mockllm::Server& s, const fs::path& cache) {
    GatewayConfig g;
    g.base_url = s.base_url();
    g.model_name = "mock";
    g.api_key_env = key_env;
    g.cache_dir = cache;
    g.backoff_ms = 1;
    g.max_in_flight = 3;
    return g;
  };

  {
    mockllm::Server s([](const nlohmann::json& req, int call, httplib::Response& res) {
      if (call <= 2) {
        res.status = 429;
        return;
      }
      mockllm::echo(req, call, res);
    });
    Gateway gw(cfg(s, dir / "c429"), logger);
    const Completion r = gw.complete_ex(PromptKind::InspectAndWarn, "x");
    c.expect(r.attempts == 3 && s.calls() == 3, "429 retry: " + std::to_string(s.calls()) + " calls");
  }
  {
    mockllm::Server s([](const nlohmann::json&, int, httplib::Response& res) { res.status = 401; });
    Gateway gw(cfg(s, dir / "c401"), logger);
    bool auth = false;
    try {
      gw.complete(PromptKind::InspectAndWarn, "x");
    } catch (const AuthError&) {
      auth = true;
    }
    c.expect(auth && s.calls() == 1, "401: " + std::to_string(s.calls()) + " calls");
  }

  // Full pipeline: inspection batch, generation batch, judge on each
  // generated script. The second run must be served from the cache.
  GroundTruthManifest m;
  for (const auto& sc : synth::make_corpus(90, 12, 1.0)) {
    ManifestEntry e;
    e.script_id = sc.path;
    e.path = sc.path;
    e.language = sc.language;
    e.instruction_low = "Write a " + std::string(to_string(sc.language)) + " script " + sc.path + ".";
    e.instruction_high = "1. Step for " + sc.path + ".";
    m.entries.push_back(e);
    write_file(dir / "scripts" / sc.path, sc.content);
  }
  write_manifest(dir / "scripts" / "manifest.jsonl", m);
  mockllm::Server s([](const nlohmann::json& req, int call, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(15));
    const std::string content = req["messages"][0]["content"];
    if (content.find("0 to 4") != std::string::npos || content.find("0-4") != std::string::npos) {
      res.set_content(mockllm::completion_body("3"), "application/json");
      return;
    }
    mockllm::echo(req, call, res);
  });
  auto pipeline = [&](Gateway& gw, const std::string& tag) {
    BatchOptions insp;
    insp.task = Task::Inspection;
    insp.manifest_dir = dir / "scripts";
    insp.out = dir / ("insp-" + tag + ".jsonl");
    insp.jobs = 8;
    run_eval_batch(gw, m, insp);
    for (Detail d : {Detail::Low, Detail::High}) {
      BatchOptions gen = insp;
      gen.task = Task::Generation;
      gen.detail = d;
      gen.out = dir / ("gen-" + std::string(to_string(d)) + "-" + tag + ".jsonl");
      auto rows = run_eval_batch(gw, m, gen);
      std::vector<std::future<double>> scores;
      for (const auto& r : rows) {
        const ManifestEntry* e = m.find(r.script_id);
        const std::string instr = d == Detail::Low ? *e->instruction_low : *e->instruction_high;
        scores.push_back(std::async(std::launch::async, [&gw, instr, resp = r.response] {
          return judge_functional(gw, instr, resp);
        }));
      }
      for (auto& f : scores) c.expect(f.get() == 0.75, "judge score");
    }
  };
  Gateway first(cfg(s, dir / "cache"), logger);
  pipeline(first, "a");
  const int after_first = s.calls();
  c.expect(after_first == static_cast<int>(m.entries.size()) * 5, "first run sent " + std::to_string(after_first));
  c.expect(s.max_in_flight() <= 3, "in-flight peaked at " + std::to_string(s.max_in_flight()));
  Gateway second(cfg(s, dir / "cache"), logger);
  pipeline(second, "b");
  c.expect(second.requests_sent() == 0 && s.calls() == after_first,
           "second run sent " + std::to_string(s.calls() - after_first));

  bool key_sent = true;
  for (const auto& h : s.auth_headers()) key_sent = key_sent && h == "Bearer " + key;
  c.expect(key_sent, "authorization header");
  std::size_t artifacts = 0;
  for (const auto& f : fs::recursive_directory_iterator(dir.path())) {
    if (!f.is_regular_file()) continue;
    ++artifacts;
    c.expect(testutil::slurp(f.path()).find(key) == std::string::npos, "key found in " + f.path().string());
  }
  for (const auto& l : logs) c.expect(l.find(key) == std::string::npos, "key found in a log line");
  return "first run " + std::to_string(after_first) + " requests, second run " +
         std::to_string(second.requests_sent()) + ", peak in-flight " + std::to_string(s.max_in_flight()) +
         ", " + std::to_string(artifacts) + " artifacts clean";
}

// 10 --------------------------------------------------------------------------
std::string throughput(Check& c) {
  testutil::TempDir dir("acc-tp");
  synth::Options opt;
  opt.min_lines = 50;
  auto corpus = synth::make_corpus(1010, 1000, 0.6, opt);
  synth::write_corpus(dir.path(), corpus);
  std::size_t lines = 0;
  for (const auto& sc : corpus) lines += static_cast<std::size_t>(std::count(sc.content.begin(), sc.content.end(), '\n'));

  const auto t0 = Clock::now();
  const auto files = list_iac_files(dir.path());
  const auto scanned = scan_files(files, RuleConfig::defaults(), 1);
  const double dt = seconds_since(t0);
  std::size_t dets = 0;
  for (const auto& f : scanned) dets += f.detections.size();
  c.expect(scanned.size() == 1000, std::to_string(scanned.size()) + " files scanned");
  c.expect(dt < 5.0, "took " + fmt(dt) + " s");
  return std::to_string(scanned.size()) + " scripts, avg " + std::to_string(lines / 1000) + " lines, " +
         std::to_string(dets) + " detections, " + fmt(dt, 2) + " s";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string(Check&)>>> criteria = {
      {"golden detections", golden_detection},
      {"false-positive regression", false_positive_regression},
      {"metric algebra", metric_algebra},
      {"round-trip invariants", round_trip},
      {"scoring oracle", scoring_oracle},
      {"forge counting", forge_counting},
      {"curation shape", curation_shape},
      {"syntax mutants and judge scale", syntax_mutants},
      {"gateway hermeticity", gateway_hermeticity},
      {"throughput", throughput},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    std::string summary;
    try {
      summary = criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first;
    if (!summary.empty()) std::cout << " (" << summary << ")";
    std::cout << "\n";
    for (const auto& f : c.failures) std::cout << "    " << f << "\n";
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
