#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "iacsmell/annotator.hpp"
#include "iacsmell/dataset.hpp"
#include "iacsmell/digest.hpp"
#include "iacsmell/error.hpp"
#include "iacsmell/manifest.hpp"
#include "iacsmell/parsers.hpp"
#include "synth.hpp"

using namespace iacsmell;
using testutil::TempDir;

namespace {

ForgeSpec spec_for(const std::filesystem::path& dir, std::uint64_t seed = 7) {
  ForgeSpec s;
  s.corpus_dir = dir;
  s.seed = seed;
  return s;
}

std::size_t count_if_task(const std::vector<DatasetRecord>& r, Task t) {
  return static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [&](const auto& x) { return x.task == t; }));
}

}  // namespace

TEST_CASE("seeded permutation") {
  for (std::size_t n : {0u, 1u, 2u, 17u, 500u}) {
    auto p = seeded_permutation(n, 3);
    std::vector<std::size_t> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(sorted[i] == i);
    CHECK(seeded_permutation(n, 3) == p);
  }
  CHECK(seeded_permutation(50, 1) != seeded_permutation(50, 2));
}

TEST_CASE("template instructions") {
  IrScript gen_sample = parse_ansible(testutil::slurp(testutil::fixture("generation_sample.yml")), "sample.yml");
  const std::string high = template_instruction(gen_sample, Detail::High);
  CHECK(high.starts_with("1. "));
  CHECK(high.find("Set the \"name\" parameter to \"ansible\".") != std::string::npos);
  const std::string low = template_instruction(gen_sample, Detail::Low);
  CHECK(low.find("Ansible") != std::string::npos);
  CHECK(low.find('\n') == std::string::npos);
  // the secret value never leaks into the low-detail summary
  CHECK(low.find("@ns1bl3") == std::string::npos);

  IrScript empty = parse_puppet("", "e.pp");
  const std::string e = template_instruction(empty, Detail::Low);
  CHECK(e.find("Puppet") != std::string::npos);
  CHECK(std::count(e.begin(), e.end(), '.') >= 1);

  CHECK(synth_instruction(gen_sample, Detail::Low, InstructionSource::Llm,
                          [](const IrScript&, Detail) { return std::string("stub"); }) == "stub");
  CHECK_THROWS_AS(synth_instruction(gen_sample, Detail::Low, InstructionSource::Llm), Error);
}

TEST_CASE("forge counts and detail balance") {
  TempDir dir("forge");
  std::mt19937_64 rng(1);
  std::vector<synth::Script> corpus;
  for (int i = 0; i < 10; ++i) {
    corpus.push_back(synth::make_script(rng, static_cast<IacLanguage>(i % 3), {SmellType::HardCodedSecret}, i));
  }
  for (int i = 10; i < 15; ++i) corpus.push_back(synth::make_script(rng, static_cast<IacLanguage>(i % 3), {}, i));
  synth::write_corpus(dir.path(), corpus);

  ForgeResult r = forge(spec_for(dir.path()), InstructionSource::Template);
  CHECK(r.records.size() == 20);
  CHECK(r.stats.scanned == 15);
  CHECK(r.stats.clean == 5);
  CHECK(r.stats.generation_low == 5);
  CHECK(r.stats.generation_high == 5);
  CHECK(r.stats.inspection == 10);

  std::set<std::string> ids;
  for (const auto& rec : r.records) {
    ids.insert(rec.id);
    CHECK(rec.id.size() == 32);
    if (rec.task == Task::Generation) {
      CHECK(rec.input.empty());
      CHECK(rec.detail != Detail::None);
    } else {
      CHECK(rec.detail == Detail::None);
      CHECK(rec.instruction == kInspectionInstruction);
      CHECK(strip_annotations(rec.output) == rec.input);
    }
    IrScript s = parse_as(rec.language, strip_annotations(rec.output), "x");
    std::vector<SmellType> got;
    for (const auto& d : detect(s)) got.push_back(d.smell);
    CHECK(got == rec.smells);
  }
  CHECK(ids.size() == r.records.size());
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    CHECK(r.records[i - 1].source_path <= r.records[i].source_path);
  }
}

TEST_CASE("forge is deterministic and split stays within one") {
  TempDir dir("forge-det");
  synth::write_corpus(dir.path(), synth::make_corpus(9, 61, 0.8));
  for (double split : {0.0, 0.3, 0.5, 0.77, 1.0}) {
    ForgeSpec s = spec_for(dir.path(), 42);
    s.detail_split = split;
    s.jobs = 3;
    ForgeResult a = forge(s, InstructionSource::Template);
    s.jobs = 1;
    ForgeResult b = forge(s, InstructionSource::Template);
    CHECK(to_jsonl(a.records) == to_jsonl(b.records));
    const double gen = static_cast<double>(a.stats.generation_low + a.stats.generation_high);
    CHECK(std::abs(static_cast<double>(a.stats.generation_low) - split * gen) <= 1.0);
  }
  ForgeResult c = forge(spec_for(dir.path(), 43), InstructionSource::Template);
  ForgeResult d = forge(spec_for(dir.path(), 42), InstructionSource::Template);
  CHECK(to_jsonl(c.records) != to_jsonl(d.records));
}

TEST_CASE("jsonl round trip") {
  TempDir dir("forge-json");
  synth::write_corpus(dir.path(), synth::make_corpus(2, 12, 1.0));
  ForgeResult r = forge(spec_for(dir.path()), InstructionSource::Template);
  const std::string jl = to_jsonl(r.records);
  CHECK(records_from_jsonl(jl) == r.records);
  CHECK(jl.find("\r") == std::string::npos);
  CHECK(jl.back() == '\n');
}

TEST_CASE("test-set exclusion by exact and whitespace-normalized hash") {
  TempDir dir("forge-ex");
  auto corpus = synth::make_corpus(5, 12, 1.0);
  synth::write_corpus(dir.path(), corpus);
  GroundTruthManifest m;
  ManifestEntry exact;
  exact.script_id = "a";
  exact.sha256 = sha256_hex(corpus[0].content);
  m.entries.push_back(exact);
  ManifestEntry norm;
  norm.script_id = "b";
  norm.normalized_sha256 = normalized_sha256_hex(corpus[1].content + "\n\n   ");
  m.entries.push_back(norm);
  write_manifest(dir / "testset.jsonl", m);

  ForgeSpec s = spec_for(dir.path());
  s.testset_manifest = dir / "testset.jsonl";
  ForgeResult r = forge(s, InstructionSource::Template);
  CHECK(r.stats.excluded_by_testset == 2);
  for (const auto& rec : r.records) {
    const std::string src = strip_annotations(rec.output);
    CHECK(sha256_hex(src) != exact.sha256);
    CHECK(normalized_sha256_hex(src) != norm.normalized_sha256);
  }

  s.testset_manifest = dir / "missing.jsonl";
  CHECK_THROWS_AS(forge(s, InstructionSource::Template), ManifestUnreadable);
}

TEST_CASE("annotated and duplicate inputs") {
  TempDir dir("forge-dup");
  auto corpus = synth::make_corpus(6, 6, 1.0);
  synth::write_corpus(dir.path(), corpus);
  // an already annotated copy and a plain duplicate of script 0
  IrScript s0 = parse_as(corpus[0].language, corpus[0].content, "x");
  iacsmell::write_file(dir / ("z_annotated" + synth::ext(corpus[0].language)), annotate(s0, detect(s0)));
  iacsmell::write_file(dir / ("z_copy" + synth::ext(corpus[0].language)), corpus[0].content);
  ForgeResult r = forge(spec_for(dir.path()), InstructionSource::Template);
  CHECK(r.stats.duplicates == 2);
  CHECK(r.stats.eligible == 6);
}

TEST_CASE("filters") {
  TempDir dir("forge-filter");
  synth::write_corpus(dir.path(), synth::make_corpus(3, 30, 0.9));
  ForgeResult all = forge(spec_for(dir.path()), InstructionSource::Template);

  ForgeSpec ab = spec_for(dir.path());
  ab.languages = {IacLanguage::Ansible, IacLanguage::Chef};
  ForgeSpec c = spec_for(dir.path());
  c.languages = {IacLanguage::Puppet};
  auto r1 = forge(ab, InstructionSource::Template).records;
  auto r2 = forge(c, InstructionSource::Template).records;
  // the two language filters partition the unfiltered output
  std::multiset<std::string> merged, full;
  for (auto& x : r1) merged.insert(x.id);
  for (auto& x : r2) merged.insert(x.id);
  for (auto& x : all.records) full.insert(x.id);
  CHECK(merged == full);

  ForgeSpec g = spec_for(dir.path());
  g.tasks = {Task::Generation};
  auto gen = forge(g, InstructionSource::Template).records;
  CHECK(count_if_task(gen, Task::Inspection) == 0);
  CHECK(gen.size() == count_if_task(all.records, Task::Generation));

  ForgeSpec mx = spec_for(dir.path());
  mx.max_records = 5;
  CHECK(forge(mx, InstructionSource::Template).records.size() == 5);
}

TEST_CASE("llm instruction failures skip the record") {
  TempDir dir("forge-llm");
  synth::write_corpus(dir.path(), synth::make_corpus(4, 6, 1.0));
  int calls = 0;
  ForgeResult r = forge(spec_for(dir.path()), InstructionSource::Llm, [&](const IrScript&, Detail d) -> std::string {
    if (++calls % 2 == 0) throw GatewayError("down");
    return d == Detail::Low ? "Write it." : "1. Write it.";
  });
  CHECK(r.stats.synth_failures == 3);
  CHECK(count_if_task(r.records, Task::Generation) == 3);
  CHECK(count_if_task(r.records, Task::Inspection) == 6);
}

TEST_CASE("empty corpus") {
  TempDir dir("forge-empty");
  CHECK_THROWS_AS(forge(spec_for(dir.path()), InstructionSource::Template), EmptyCorpus);
  CHECK_THROWS_AS(forge(spec_for(dir / "nope"), InstructionSource::Template), EmptyCorpus);
}
