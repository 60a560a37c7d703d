#include "iacsmell/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

#include "iacsmell/config.hpp"
#include "iacsmell/error.hpp"
#include "iacsmell/text.hpp"

namespace iacsmell {
namespace {

constexpr std::size_t kEvidenceMax = 120;

std::set<std::string> merge(std::initializer_list<const std::set<std::string>*> sets,
                            std::initializer_list<const char*> extra) {
  std::set<std::string> out;
  for (const auto* s : sets) out.insert(s->begin(), s->end());
  for (const char* e : extra) out.insert(e);
  return out;
}

Detection make(SmellType smell, Span span, std::string_view evidence) {
  return Detection{smell, span, text::excerpt(evidence, kEvidenceMax),
                   std::string(smell_advice(smell))};
}

std::string attr_evidence(const IrAttribute& a) {
  std::string v = a.value_raw;
  std::replace(v.begin(), v.end(), '\n', ' ');
  return a.key_raw + ": " + v;
}

// Splits a value into tokens on whitespace, quotes, commas and brackets.
// '/' is kept so URLs and CIDR blocks stay whole.
std::vector<std::string_view> value_tokens(std::string_view v) {
  static constexpr std::string_view seps = " \t\r\n'\"`,;()[]{}=<>|";
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < v.size()) {
    while (i < v.size() && seps.find(v[i]) != std::string_view::npos) ++i;
    std::size_t b = i;
    while (i < v.size() && seps.find(v[i]) == std::string_view::npos) ++i;
    if (i > b) out.push_back(v.substr(b, i - b));
  }
  return out;
}

bool is_unrestricted_ip(std::string_view tok) {
  if (!tok.starts_with("0.0.0.0")) return false;
  std::string_view rest = tok.substr(7);
  if (rest.empty()) return true;
  if (rest.front() != ':' || rest.size() == 1) return false;
  return std::all_of(rest.begin() + 1, rest.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::string http_host(std::string_view value, std::size_t at) {
  std::size_t b = at + 7;
  std::size_t e = b;
  while (e < value.size() && value[e] != '/' && value[e] != ':' && value[e] != '?' &&
         value[e] != '#' && value[e] != '"' && value[e] != '\'' &&
         !std::isspace(static_cast<unsigned char>(value[e]))) {
    ++e;
  }
  return text::lower(value.substr(b, e - b));
}

bool lacks_tls(std::string_view value, const RuleConfig& cfg) {
  const std::string lower = text::lower(value);
  std::size_t at = lower.find("http://");
  while (at != std::string::npos) {
    const std::string host = http_host(lower, at);
    bool allowed = std::any_of(cfg.http_allowlist.begin(), cfg.http_allowlist.end(),
                               [&](const std::string& a) {
                                 return !a.empty() && host.find(a) != std::string::npos;
                               });
    if (!allowed) return true;
    at = lower.find("http://", at + 7);
  }
  return false;
}

bool has_weak_algo(std::string_view s, const RuleConfig& cfg) {
  return std::any_of(cfg.weak_algo_tokens.begin(), cfg.weak_algo_tokens.end(),
                     [&](const std::string& t) { return text::contains_word(s, t); });
}

bool is_artifact_url(std::string_view value, const RuleConfig& cfg) {
  for (std::string_view tok : value_tokens(value)) {
    if (tok.find("://") == std::string_view::npos) continue;
    std::size_t cut = tok.find_first_of("?#");
    if (cut != std::string_view::npos) tok = tok.substr(0, cut);
    for (const auto& ext : cfg.artifact_extensions) {
      if (text::ends_with_ci(tok, ext)) return true;
    }
  }
  return false;
}

void scan_attribute(const IrAttribute& a, const IrUnit& unit, const RuleConfig& cfg,
                    std::vector<Detection>& out) {
  const std::string& key = a.key_norm;
  const bool literal = a.value_kind == ValueKind::Literal;
  const std::string value_lower = text::lower(text::trim(a.value_raw));

  bool admin = false;
  if (literal && cfg.user_keys.contains(key) && cfg.privileged_values.contains(value_lower)) {
    out.push_back(make(SmellType::AdminByDefault, a.span, attr_evidence(a)));
    admin = true;
  }
  bool empty_pw = false;
  if (a.value_kind == ValueKind::Empty && cfg.password_keys.contains(key)) {
    out.push_back(make(SmellType::EmptyPassword, a.span, attr_evidence(a)));
    empty_pw = true;
  }
  if (!admin && !empty_pw && literal && !value_lower.empty() &&
      cfg.secret_keys.contains(key) && !cfg.non_secret_values.contains(value_lower) &&
      !cfg.privileged_values.contains(value_lower) &&
      !value_lower.starts_with("$ansible_vault")) {
    out.push_back(make(SmellType::HardCodedSecret, a.span, attr_evidence(a)));
  }
  if (literal) {
    auto toks = value_tokens(a.value_raw);
    if (std::any_of(toks.begin(), toks.end(), is_unrestricted_ip)) {
      out.push_back(make(SmellType::UnrestrictedIpAddress, a.span, attr_evidence(a)));
    }
    if (lacks_tls(a.value_raw, cfg)) {
      out.push_back(make(SmellType::HttpWithoutTls, a.span, attr_evidence(a)));
    }
  }
  if (has_weak_algo(key, cfg) || (literal && has_weak_algo(a.value_raw, cfg))) {
    out.push_back(make(SmellType::WeakCryptoAlgorithm, a.span, attr_evidence(a)));
  }
  bool integrity = literal && cfg.integrity_disable_keys.contains(key) &&
                   cfg.integrity_disable_values.contains(value_lower);
  if (!integrity && literal && is_artifact_url(a.value_raw, cfg)) {
    integrity = std::none_of(unit.attributes.begin(), unit.attributes.end(),
                             [&](const IrAttribute& s) {
                               return cfg.checksum_keys.contains(s.key_norm);
                             });
  }
  if (integrity) {
    out.push_back(make(SmellType::NoIntegrityCheck, a.span, attr_evidence(a)));
  }
}

void replace_if_present(const ConfigFile& cfg, const std::string& name,
                        std::set<std::string>& target) {
  for (const std::string& key : {"rules." + name, name}) {
    if (auto list = cfg.get_list(key)) {
      target.clear();
      for (const auto& v : *list) target.insert(text::lower(v));
      return;
    }
  }
}

}  // namespace

RuleConfig RuleConfig::defaults() {
  RuleConfig c;
  c.password_keys = {"password", "passwd", "pwd", "pass", "login_password", "root_password"};
  c.user_keys = {"user", "username", "remote_user", "become_user", "owner", "admin_user"};
  c.secret_keys = merge({&c.password_keys, &c.user_keys},
                        {"secret", "token", "api_key", "apikey", "private_key", "ssh_key",
                         "cert", "credential", "login_user"});
  c.privileged_values = {"root", "admin", "administrator"};
  c.suspicious_tokens = {"todo", "fixme", "hack", "xxx", "bug", "workaround"};
  c.weak_algo_tokens = {"md4", "md5", "sha1", "sha-1", "rc4", "arcfour"};
  c.integrity_disable_keys = {"gpgcheck", "repo_gpgcheck"};
  c.checksum_keys = {"checksum", "sha256", "sha256sum", "sha512", "sha512sum",
                     "gpg", "gpgcheck", "signature"};
  c.artifact_extensions = {".tar", ".tar.gz", ".tgz", ".zip", ".gz",
                           ".bz2", ".deb", ".rpm", ".jar", ".sh"};
  c.non_secret_values = {"true", "false", "yes", "no", "all", "any", "none", "*"};
  c.integrity_disable_values = {"false", "no", "0"};
  return c;
}

RuleConfig rule_config_from_text(std::string_view toml) {
  const ConfigFile file = ConfigFile::parse(toml);
  RuleConfig c = RuleConfig::defaults();
  replace_if_present(file, "password_keys", c.password_keys);
  replace_if_present(file, "secret_keys", c.secret_keys);
  replace_if_present(file, "user_keys", c.user_keys);
  replace_if_present(file, "privileged_values", c.privileged_values);
  replace_if_present(file, "suspicious_tokens", c.suspicious_tokens);
  replace_if_present(file, "weak_algo_tokens", c.weak_algo_tokens);
  replace_if_present(file, "integrity_disable_keys", c.integrity_disable_keys);
  replace_if_present(file, "checksum_keys", c.checksum_keys);
  replace_if_present(file, "artifact_extensions", c.artifact_extensions);
  replace_if_present(file, "http_allowlist", c.http_allowlist);
  replace_if_present(file, "non_secret_values", c.non_secret_values);
  replace_if_present(file, "integrity_disable_values", c.integrity_disable_values);
  return c;
}

RuleConfig load_rule_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read rule config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return rule_config_from_text(text);
}

std::vector<Detection> detect(const IrScript& script, const RuleConfig& cfg) {
  std::vector<Detection> out;
  for (const auto& unit : script.units) {
    for (const auto& attr : unit.attributes) scan_attribute(attr, unit, cfg, out);
  }
  for (const auto& c : script.comments) {
    if (c.is_annotation) continue;
    bool hit = std::any_of(cfg.suspicious_tokens.begin(), cfg.suspicious_tokens.end(),
                           [&](const std::string& t) { return text::contains_word(c.text, t); });
    if (hit) out.push_back(make(SmellType::SuspiciousComment, c.span, "# " + c.text));
  }
  for (const auto& c : script.cases) {
    if (!c.has_default) {
      out.push_back(make(SmellType::MissingDefaultCase, c.span, "case " + c.subject));
    }
  }
  const int n = static_cast<int>(script.lines.size());
  std::erase_if(out, [&](const Detection& d) { return !d.span.valid_within(n); });
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    if (a.span.start_line != b.span.start_line) return a.span.start_line < b.span.start_line;
    return a.smell < b.smell;
  });
  return out;
}

}  // namespace iacsmell
