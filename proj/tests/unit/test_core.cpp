#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "iacsmell/config.hpp"
#include "iacsmell/digest.hpp"
#include "iacsmell/error.hpp"
#include "iacsmell/ir.hpp"
#include "iacsmell/smells.hpp"
#include "iacsmell/text.hpp"

using namespace iacsmell;

TEST_CASE("catalog has nine types with the published CWE ids") {
  // CWE numbers checked against the weakness list and the worked examples
  const std::array<int, 9> cwe = {250, 258, 798, 284, 546, 319, 327, 494, 478};
  std::set<std::string_view> titles;
  std::set<std::string_view> labels;
  REQUIRE(kAllSmells.size() == 9);
  for (std::size_t i = 0; i < kAllSmells.size(); ++i) {
    const SmellInfo& info = smell_info(kAllSmells[i]);
    CHECK(info.cwe == cwe[i]);
    CHECK(index_of(info.type) == i);
    titles.insert(info.title);
    labels.insert(info.short_label);
    CHECK(rule_id(info.type) == "IAC-CWE-" + std::to_string(cwe[i]));
  }
  CHECK(titles.size() == 9);
  CHECK(labels.size() == 9);
  CHECK(smell_info(SmellType::HardCodedSecret).short_label == "HardCd");
  CHECK(smell_info(SmellType::MissingDefaultCase).short_label == "NoDefSw");
}

TEST_CASE("advice table is frozen") {
  CHECK(smell_advice(SmellType::HardCodedSecret) ==
        "please remove hard-coded secrets to prevent exposure of sensitive information.");
  CHECK(smell_advice(SmellType::UnrestrictedIpAddress) == "please do not bind to 0.0.0.0.");
  CHECK(smell_advice(SmellType::HttpWithoutTls) ==
        "please use HTTPS instead of HTTP to prevent man-in-the-middle attacks.");
  CHECK(smell_title(SmellType::MissingDefaultCase) == "Missing default in case statement");
}

TEST_CASE("smell names parse in every accepted spelling") {
  for (SmellType t : kAllSmells) {
    CHECK(smell_from_string(smell_id(t)) == t);
    CHECK(smell_from_string(rule_id(t)) == t);
    CHECK(smell_from_string("CWE-" + std::to_string(smell_info(t).cwe)) == t);
    CHECK(smell_from_string(text::lower(smell_title(t))) == t);
    CHECK(smell_from_title_prefix(std::string(smell_title(t)) + ": whatever") == t);
  }
  CHECK_FALSE(smell_from_string("CWE-77"));
  CHECK(smell_from_title_prefix("hardcoded secrets: x") == SmellType::HardCodedSecret);
  CHECK_FALSE(smell_from_title_prefix("Nothing to see"));
}

TEST_CASE("language inference") {
  CHECK(infer_language("site.yml", "") == IacLanguage::Ansible);
  CHECK(infer_language("site.yaml", "") == IacLanguage::Ansible);
  CHECK(infer_language("default.rb", "") == IacLanguage::Chef);
  CHECK(infer_language("init.pp", "") == IacLanguage::Puppet);
  CHECK(infer_language("notes", "---\n- name: x\n  apt: name=y\n") == IacLanguage::Ansible);
  CHECK(infer_language("recipe", "package 'x' do\n  action :install\nend\n") == IacLanguage::Chef);
  CHECK(infer_language("manifest", "class foo {\n  file { '/x': ensure => file }\n}\n") == IacLanguage::Puppet);
  CHECK_THROWS_AS(infer_language("README", "hello world"), UnknownLanguage);
  CHECK(language_from_string("PUPPET") == IacLanguage::Puppet);
  CHECK_FALSE(language_from_string("salt"));
}

TEST_CASE("span validity") {
  CHECK(Span{1, 1, 0}.valid_within(1));
  CHECK(Span{2, 3, 4}.valid_within(3));
  CHECK_FALSE(Span{0, 1, 0}.valid_within(3));
  CHECK_FALSE(Span{3, 2, 0}.valid_within(3));
  CHECK_FALSE(Span{1, 4, 0}.valid_within(3));
}

TEST_CASE("key normalization") {
  CHECK(normalize_key("Password") == "password");
  CHECK(normalize_key("'login_password'") == "login_password");
  CHECK(normalize_key("mysql::server::root_password") == "root_password");
  CHECK(normalize_key("community.mysql.user") == "user");
  CHECK(normalize_key("$db_pass") == "db_pass");
  CHECK(normalize_key(":password") == "password");
  // idempotent over a spread of shapes
  for (std::string k : {"A.B.C", "x::Y", "'Q'", "$v", "node['a']['Pw']", "plain", "", "a.", "::"}) {
    const std::string once = normalize_key(k);
    CHECK(normalize_key(once) == once);
  }
}

TEST_CASE("value classification per language") {
  CHECK(classify_value("{{ pw }}", IacLanguage::Ansible) == ValueKind::VariableRef);
  CHECK(classify_value("1234", IacLanguage::Ansible) == ValueKind::Literal);
  CHECK(classify_value("", IacLanguage::Ansible) == ValueKind::Empty);
  CHECK(classify_value("#{pw}", IacLanguage::Chef) == ValueKind::VariableRef);
  CHECK(classify_value("node['a']['pw']", IacLanguage::Chef) == ValueKind::VariableRef);
  CHECK(classify_value("$pw", IacLanguage::Puppet) == ValueKind::VariableRef);
  CHECK(classify_value("${pw}x", IacLanguage::Puppet) == ValueKind::VariableRef);
  CHECK(classify_value("$pw", IacLanguage::Ansible) == ValueKind::Literal);
  CHECK(classify_value("", IacLanguage::Puppet) == ValueKind::Empty);
}

TEST_CASE("line splitting keeps CR and records the final newline") {
  bool nl = false;
  auto lines = split_lines("a\r\nb\n", &nl);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "a\r");
  CHECK(nl);
  lines = split_lines("a\nb", &nl);
  CHECK(lines.size() == 2);
  CHECK_FALSE(nl);
  CHECK(split_lines("", &nl).empty());
}

TEST_CASE("utf-8 sanitizing") {
  std::string ok = "caf\xc3\xa9";
  CHECK_FALSE(sanitize_utf8(ok));
  std::string bad = "a\xff" "b";
  CHECK(sanitize_utf8(bad));
  CHECK(bad == "a\xef\xbf\xbd" "b");
}

TEST_CASE("annotation prefix rule") {
  CHECK(is_annotation_text(" Security smell! Hard-coded secret: x"));
  CHECK(is_annotation_text("Security smell! x"));
  CHECK_FALSE(is_annotation_text(" security note"));
}

TEST_CASE("sha256 vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(normalized_sha256_hex("a  b\n\tc ") == normalized_sha256_hex("a b c"));
  CHECK(normalized_sha256_hex("a b") != normalized_sha256_hex("ab"));
}

TEST_CASE("text helpers") {
  CHECK(text::contains_word("use MD5 here", "md5"));
  CHECK(text::contains_word("hash_md5", "md5"));
  CHECK_FALSE(text::contains_word("md55", "md5"));
  CHECK_FALSE(text::contains_word("xmd5", "md5"));
  CHECK(text::unquote("'x'") == "x");
  CHECK(text::unquote("\"x'") == "\"x'");
  const std::string e = text::excerpt(std::string(200, 'a'), 120);
  CHECK(e.size() <= 120);
  CHECK(e.ends_with("..."));
  // never splits a multibyte sequence
  std::string s;
  for (int i = 0; i < 100; ++i) s += "\xc3\xa9";
  std::string cut = text::excerpt(s, 121);
  std::string copy = cut;
  CHECK_FALSE(sanitize_utf8(copy));
}

TEST_CASE("config subset") {
  auto c = ConfigFile::parse(
      "# top\nname = \"x\"\n[rules]\nlist = [\"a\", 'b',\n  \"c\"]\nn = 3\nf = 0.5\nflag = true\n");
  CHECK(c.get_string("name") == "x");
  CHECK(c.get_list("rules.list") == std::vector<std::string>{"a", "b", "c"});
  CHECK(c.get_int("rules.n") == 3);
  CHECK(c.get_double("rules.f") == doctest::Approx(0.5));
  CHECK(c.get_double("rules.n") == doctest::Approx(3.0));
  CHECK(c.get_bool("rules.flag") == true);
  CHECK_FALSE(c.has("rules.missing"));
  try {
    ConfigFile::parse("a = 1\nb = [\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK_THROWS_AS(ConfigFile::parse("just words\n"), ConfigError);
}
