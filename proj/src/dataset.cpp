#include "iacsmell/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "iacsmell/annotator.hpp"
#include "iacsmell/corpus.hpp"
#include "iacsmell/digest.hpp"
#include "iacsmell/error.hpp"
#include "iacsmell/manifest.hpp"
#include "iacsmell/parsers.hpp"
#include "iacsmell/text.hpp"

namespace iacsmell {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Task t) {
  return t == Task::Generation ? "generation" : "inspection";
}

std::string_view to_string(Detail d) {
  switch (d) {
    case Detail::Low: return "low";
    case Detail::High: return "high";
    case Detail::None: return "none";
  }
  return "none";
}

std::optional<Task> task_from_string(std::string_view s) {
  if (text::iequals(s, "generation") || text::iequals(s, "gen")) return Task::Generation;
  if (text::iequals(s, "inspection") || text::iequals(s, "insp")) return Task::Inspection;
  return std::nullopt;
}

std::optional<Detail> detail_from_string(std::string_view s) {
  if (text::iequals(s, "low")) return Detail::Low;
  if (text::iequals(s, "high")) return Detail::High;
  if (text::iequals(s, "none")) return Detail::None;
  return std::nullopt;
}

json to_json(const DatasetRecord& r) {
  json smells = json::array();
  for (SmellType s : r.smells) smells.push_back(smell_id(s));
  return json{{"id", r.id},
              {"task", to_string(r.task)},
              {"language", to_string(r.language)},
              {"detail", to_string(r.detail)},
              {"instruction", r.instruction},
              {"input", r.input},
              {"output", r.output},
              {"smells", smells},
              {"source", {{"repo", r.source_repo}, {"path", r.source_path}}}};
}

DatasetRecord record_from_json(const json& j) {
  DatasetRecord r;
  r.id = j.at("id").get<std::string>();
  auto task = task_from_string(j.at("task").get<std::string>());
  auto lang = language_from_string(j.at("language").get<std::string>());
  auto detail = detail_from_string(j.at("detail").get<std::string>());
  if (!task || !lang || !detail) throw Error("malformed dataset record " + r.id);
  r.task = *task;
  r.language = *lang;
  r.detail = *detail;
  r.instruction = j.at("instruction").get<std::string>();
  r.input = j.at("input").get<std::string>();
  r.output = j.at("output").get<std::string>();
  for (const auto& s : j.at("smells")) {
    auto smell = smell_from_string(s.get<std::string>());
    if (!smell) throw Error("unknown smell in record " + r.id);
    r.smells.push_back(*smell);
  }
  r.source_repo = j.at("source").at("repo").get<std::string>();
  r.source_path = j.at("source").at("path").get<std::string>();
  return r;
}

std::string to_jsonl(const std::vector<DatasetRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<DatasetRecord> records_from_jsonl(std::string_view text) {
  std::vector<DatasetRecord> out;
  for (const std::string& line : text::split(text, '\n')) {
    if (text::trim(line).empty()) continue;
    out.push_back(record_from_json(json::parse(line)));
  }
  return out;
}

namespace {

std::string_view language_title(IacLanguage lang) {
  switch (lang) {
    case IacLanguage::Ansible: return "Ansible";
    case IacLanguage::Chef: return "Chef";
    case IacLanguage::Puppet: return "Puppet";
  }
  return "IaC";
}

std::string_view file_noun(IacLanguage lang) {
  switch (lang) {
    case IacLanguage::Ansible: return "Ansible playbook file";
    case IacLanguage::Chef: return "Chef recipe file";
    case IacLanguage::Puppet: return "Puppet manifest file";
  }
  return "file";
}

std::string one_line(std::string_view v, std::size_t max = 80) {
  std::string out;
  for (char c : v) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    if (c == ' ' && !out.empty() && out.back() == ' ') continue;
    out.push_back(c);
  }
  return text::excerpt(text::trim(out), max);
}

bool is_ansible_task(const IrScript& s, const IrUnit& u) {
  return s.language == IacLanguage::Ansible && u.kind != "play" && u.kind != "bare" &&
         u.kind != "degraded";
}

// Index of the attribute that only repeats the unit name, if any.
std::optional<std::size_t> name_attribute(const IrUnit& u) {
  if (u.name.empty()) return std::nullopt;
  for (std::size_t i = 0; i < u.attributes.size(); ++i) {
    if (u.attributes[i].key_norm == "name" && u.attributes[i].value_raw == u.name) return i;
  }
  return std::nullopt;
}

std::string attribute_key(const IrAttribute& a) {
  return std::string(text::unquote(text::trim(a.key_raw)));
}

std::string low_instruction(const IrScript& s) {
  const RuleConfig rules = RuleConfig::defaults();
  std::vector<std::string> what;
  std::vector<std::string> settings;
  for (const auto& u : s.units) {
    if (what.size() < 4) {
      std::string phrase;
      if (u.kind == "play") {
        phrase = "defines the play";
      } else if (is_ansible_task(s, u)) {
        phrase = "uses the " + u.kind + " module";
      } else if (u.kind == "bare" || u.kind == "degraded") {
        phrase = "sets configuration values";
      } else {
        phrase = "declares a " + u.kind;
      }
      if (!u.name.empty()) phrase += " \"" + one_line(u.name, 60) + "\"";
      if (std::find(what.begin(), what.end(), phrase) == what.end()) what.push_back(phrase);
    }
    auto skip = name_attribute(u);
    for (std::size_t i = 0; i < u.attributes.size() && settings.size() < 8; ++i) {
      const IrAttribute& a = u.attributes[i];
      if (skip && *skip == i) continue;
      if (a.value_kind != ValueKind::Literal) continue;
      if (rules.secret_keys.contains(a.key_norm) || rules.password_keys.contains(a.key_norm)) {
        continue;
      }
      if (a.value_raw.find('\n') != std::string::npos) continue;
      settings.push_back(attribute_key(a) + "=" + one_line(a.value_raw, 60));
    }
  }
  const std::string_view lang = language_title(s.language);
  std::string out = std::string(lang == "Ansible" ? "Write an " : "Write a ") +
                    std::string(lang) + " script";
  if (!what.empty()) out += " that " + text::join(what, ", ");
  if (!settings.empty()) out += "; set " + text::join(settings, ", ");
  out += ".";
  return out;
}

std::string high_instruction(const IrScript& s) {
  std::vector<std::string> steps;
  steps.push_back("Create a new " + std::string(file_noun(s.language)) + ".");
  std::size_t next_case = 0;
  auto emit_cases_before = [&](int line) {
    while (next_case < s.cases.size() && s.cases[next_case].span.start_line <= line) {
      const IrCase& c = s.cases[next_case++];
      steps.push_back("Add a case statement on " + one_line(c.subject, 60) + " with " +
                      std::to_string(c.branch_count) +
                      (c.branch_count == 1 ? " branch." : " branches."));
    }
  };
  for (const auto& u : s.units) {
    emit_cases_before(u.span.start_line);
    const std::string name = one_line(u.name, 80);
    if (u.kind == "play") {
      steps.push_back(name.empty() ? "Add a play." : "Add a play with the name \"" + name + "\".");
    } else if (is_ansible_task(s, u)) {
      steps.push_back(name.empty() ? "Add a task." : "Add a task with the name \"" + name + "\".");
      if (u.kind != "task" && u.kind != "block") {
        steps.push_back("Use the \"" + u.kind + "\" module.");
      }
    } else if (u.kind == "bare" || u.kind == "degraded") {
      steps.push_back("Add the following settings.");
    } else {
      steps.push_back(name.empty() ? "Add a " + u.kind + "."
                                   : "Add a " + u.kind + " with the name \"" + name + "\".");
    }
    auto skip = name_attribute(u);
    for (std::size_t i = 0; i < u.attributes.size(); ++i) {
      if (skip && *skip == i) continue;
      const IrAttribute& a = u.attributes[i];
      steps.push_back("Set the \"" + attribute_key(a) + "\" parameter to \"" +
                      one_line(a.value_raw) + "\".");
    }
  }
  emit_cases_before(static_cast<int>(s.lines.size()) + 1);
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out += std::to_string(i + 1) + ". " + steps[i];
    if (i + 1 < steps.size()) out.push_back('\n');
  }
  return out;
}

}  // namespace

std::string template_instruction(const IrScript& script, Detail detail) {
  return detail == Detail::High ? high_instruction(script) : low_instruction(script);
}

std::string synth_instruction(const IrScript& script, Detail detail, InstructionSource source,
                              const InstructionSynth& llm) {
  if (source == InstructionSource::Llm) {
    if (!llm) throw Error("no instruction model configured");
    return llm(script, detail);
  }
  return template_instruction(script, detail);
}

json ForgeStats::to_json() const {
  return json{{"scanned", scanned},
              {"clean", clean},
              {"eligible", eligible},
              {"excluded_by_testset", excluded_by_testset},
              {"duplicates", duplicates},
              {"filtered_out", filtered_out},
              {"generation_low", generation_low},
              {"generation_high", generation_high},
              {"inspection", inspection},
              {"synth_failures", synth_failures},
              {"records_per_language", records_per_language},
              {"smells", smells}};
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    // unbiased draw in [0, i) by rejection
    const std::uint64_t bound = static_cast<std::uint64_t>(i);
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(perm[i - 1], perm[static_cast<std::size_t>(r % bound)]);
  }
  return perm;
}

namespace {

struct Eligible {
  std::string rel_path;
  std::string repo;
  IrScript script;
  std::vector<Detection> detections;
};

std::string record_id(const DatasetRecord& r) {
  return sha256_hex(std::string(to_string(r.task)) + "\n" + std::string(to_string(r.detail)) +
                    "\n" + r.source_path + "\n" + r.input + "\n" + r.output)
      .substr(0, 32);
}

}  // namespace

ForgeResult forge(const ForgeSpec& spec, InstructionSource source, const InstructionSynth& llm) {
  if (spec.detail_split < 0.0 || spec.detail_split > 1.0) {
    throw Error("detail split must lie in [0, 1]");
  }
  if (!fs::is_directory(spec.corpus_dir)) {
    throw EmptyCorpus("corpus directory not found: " + spec.corpus_dir.string());
  }
  std::unordered_set<std::string> excluded_exact;
  std::unordered_set<std::string> excluded_norm;
  if (spec.testset_manifest) {
    GroundTruthManifest m = read_manifest(*spec.testset_manifest);
    for (const auto& e : m.entries) {
      if (!e.sha256.empty()) excluded_exact.insert(e.sha256);
      if (!e.normalized_sha256.empty()) excluded_norm.insert(e.normalized_sha256);
    }
  }

  const std::vector<fs::path> files = list_iac_files(spec.corpus_dir);
  if (files.empty()) throw EmptyCorpus("no IaC scripts under " + spec.corpus_dir.string());

  ForgeResult result;
  ForgeStats& st = result.stats;
  std::vector<ScannedFile> scanned = scan_files(files, spec.rules, spec.jobs);
  st.scanned = scanned.size();

  std::vector<Eligible> eligible;
  std::unordered_set<std::string> seen;
  for (auto& f : scanned) {
    const std::string stripped = strip_annotations(f.content);
    if (stripped != f.content) {
      f.script = parse_as(f.script.language, stripped, f.script.source_path);
      f.detections = detect(f.script, spec.rules);
    }
    if (f.detections.empty()) {
      ++st.clean;
      continue;
    }
    const std::string text = f.script.text();
    if (excluded_exact.contains(sha256_hex(text)) ||
        excluded_norm.contains(normalized_sha256_hex(text))) {
      ++st.excluded_by_testset;
      continue;
    }
    if (!seen.insert(sha256_hex(text)).second) {
      ++st.duplicates;
      continue;
    }
    Eligible e;
    e.rel_path = relative_id(f.path, spec.corpus_dir);
    auto slash = e.rel_path.find('/');
    e.repo = slash == std::string::npos ? "" : e.rel_path.substr(0, slash);
    e.script = std::move(f.script);
    e.detections = std::move(f.detections);
    eligible.push_back(std::move(e));
  }
  st.eligible = eligible.size();

  // Detail levels are fixed over the whole eligible set so that language or
  // task filters select subsets of one and the same dataset.
  const std::size_t n = eligible.size();
  const auto low_count = static_cast<std::size_t>(std::llround(spec.detail_split * static_cast<double>(n)));
  std::vector<Detail> detail(n, Detail::High);
  const std::vector<std::size_t> perm = seeded_permutation(n, spec.seed);
  for (std::size_t k = 0; k < low_count && k < n; ++k) detail[perm[k]] = Detail::Low;

  const bool want_gen = spec.tasks.empty() || spec.tasks.contains(Task::Generation);
  const bool want_insp = spec.tasks.empty() || spec.tasks.contains(Task::Inspection);

  for (std::size_t i = 0; i < n; ++i) {
    Eligible& e = eligible[i];
    if (!spec.languages.empty() && !spec.languages.contains(e.script.language)) {
      ++st.filtered_out;
      continue;
    }
    const std::string input = e.script.text();
    const std::string output = annotate(e.script, e.detections);
    std::vector<SmellType> smells;
    for (const auto& d : e.detections) smells.push_back(d.smell);

    auto base = [&](Task task, Detail d) {
      DatasetRecord r;
      r.task = task;
      r.language = e.script.language;
      r.detail = d;
      r.output = output;
      r.smells = smells;
      r.source_repo = e.repo;
      r.source_path = e.rel_path;
      return r;
    };
    if (want_gen) {
      DatasetRecord r = base(Task::Generation, detail[i]);
      try {
        r.instruction = synth_instruction(e.script, detail[i], source, llm);
        r.id = record_id(r);
        result.records.push_back(std::move(r));
      } catch (const Error&) {
        ++st.synth_failures;
      }
    }
    if (want_insp) {
      DatasetRecord r = base(Task::Inspection, Detail::None);
      r.instruction = std::string(kInspectionInstruction);
      r.input = input;
      r.id = record_id(r);
      result.records.push_back(std::move(r));
    }
  }

  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const DatasetRecord& a, const DatasetRecord& b) {
                     if (a.source_path != b.source_path) return a.source_path < b.source_path;
                     return a.task < b.task;
                   });
  if (spec.max_records && result.records.size() > *spec.max_records) {
    result.records.resize(*spec.max_records);
  }
  for (const auto& r : result.records) {
    if (r.task == Task::Generation) {
      (r.detail == Detail::Low ? st.generation_low : st.generation_high)++;
    } else {
      ++st.inspection;
    }
    ++st.records_per_language[std::string(to_string(r.language))];
    if (r.task == Task::Inspection || !want_insp) {
      for (SmellType s : r.smells) ++st.smells[std::string(smell_id(s))];
    }
  }
  return result;
}

}  // namespace iacsmell
