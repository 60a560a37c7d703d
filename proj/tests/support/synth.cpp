#include "synth.hpp"

#include <algorithm>
#include <fstream>

namespace synth {

namespace {

struct Block {
  std::vector<std::string> lines;
  std::optional<std::pair<SmellType, int>> smell;  // type, offset into lines
};

std::string n(int v) { return std::to_string(v); }

int pick(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Block clean_block(std::mt19937_64& rng, IacLanguage lang, int k) {
  const int v = pick(rng, 0, 2);
  switch (lang) {
    case IacLanguage::Ansible:
      if (v == 0) return {{"- name: install pkg" + n(k), "  apt:", "    name: pkg" + n(k), "    state: present"}, {}};
      if (v == 1) {
        return {{"- name: render config " + n(k), "  template:", "    src: app" + n(k) + ".conf.j2",
                 "    dest: /etc/app" + n(k) + ".conf", "    mode: \"0644\""}, {}};
      }
      return {{"- name: start service " + n(k), "  service:", "    name: svc" + n(k), "    state: started",
               "    enabled: true"}, {}};
    case IacLanguage::Chef:
      if (v == 0) return {{"package 'pkg" + n(k) + "' do", "  action :install", "end"}, {}};
      if (v == 1) {
        return {{"template '/etc/app" + n(k) + ".conf' do", "  source 'app" + n(k) + ".conf.erb'",
                 "  mode '0644'", "end"}, {}};
      }
      return {{"service 'svc" + n(k) + "' do", "  action [:enable, :start]", "end"}, {}};
    case IacLanguage::Puppet:
      if (v == 0) return {{"package { 'pkg" + n(k) + "':", "  ensure => installed,", "}"}, {}};
      if (v == 1) {
        return {{"file { '/etc/app" + n(k) + ".conf':", "  ensure => file,", "  mode   => '0644',", "}"}, {}};
      }
      return {{"service { 'svc" + n(k) + "':", "  ensure => running,", "  enable => true,", "}"}, {}};
  }
  return {};
}

// `interp` replaces R1-R3 literals with variable references.
Block smell_block(IacLanguage lang, SmellType t, int k, bool interp) {
  using S = SmellType;
  const bool secretish = t == S::AdminByDefault || t == S::EmptyPassword || t == S::HardCodedSecret;
  std::optional<std::pair<SmellType, int>> mark;
  auto at = [&](int off) {
    if (!(interp && secretish)) mark = std::make_pair(t, off);
  };
  Block b;
  switch (lang) {
    case IacLanguage::Ansible: {
      const std::string var = "\"{{ v" + n(k) + " }}\"";
      switch (t) {
        case S::AdminByDefault:
          b.lines = {"- name: run step " + n(k), "  command: /usr/bin/step" + n(k),
                     "  become_user: " + (interp ? var : std::string("root"))};
          at(2);
          break;
        case S::EmptyPassword:
          b.lines = {"- name: db user " + n(k), "  mysql_user:", "    name: app" + n(k),
                     "    password: " + (interp ? var : std::string("\"\""))};
          at(3);
          break;
        case S::HardCodedSecret:
          b.lines = {"- name: api user " + n(k), "  mysql_user:", "    name: api" + n(k),
                     "    password: " + (interp ? var : "\"s3cret" + n(k) + "\"")};
          at(3);
          break;
        case S::UnrestrictedIpAddress:
          b.lines = {"- name: listen " + n(k), "  lineinfile:", "    path: /etc/svc" + n(k) + ".conf",
                     "    line: \"bind 0.0.0.0\""};
          at(3);
          break;
        case S::SuspiciousComment:
          b.lines = {"# TODO: pin the version of tool" + n(k), "- name: install tool" + n(k), "  apt:",
                     "    name: tool" + n(k)};
          at(0);
          break;
        case S::HttpWithoutTls:
          b.lines = {"- name: add repo " + n(k), "  apt_repository:",
                     "    repo: \"deb http://mirror" + n(k) + ".example.org/debian stable main\""};
          at(2);
          break;
        case S::WeakCryptoAlgorithm:
          b.lines = {"- name: hash file " + n(k), "  stat:", "    path: /srv/file" + n(k),
                     "    checksum_algorithm: md5"};
          at(3);
          break;
        case S::NoIntegrityCheck:
          b.lines = {"- name: repo " + n(k), "  yum_repository:", "    name: repo" + n(k),
                     "    baseurl: https://repo" + n(k) + ".example.org/el8", "    gpgcheck: no"};
          at(4);
          break;
        case S::MissingDefaultCase:
          break;
      }
      break;
    }
    case IacLanguage::Chef: {
      const std::string var = "node['app" + n(k) + "']['value']";
      switch (t) {
        case S::AdminByDefault:
          b.lines = {"execute 'step" + n(k) + "' do", "  command '/usr/bin/step" + n(k) + "'",
                     "  user " + (interp ? var : std::string("'root'")), "end"};
          at(2);
          break;
        case S::EmptyPassword:
          b.lines = {"mysql_user 'app" + n(k) + "' do", "  password " + (interp ? var : std::string("''")), "end"};
          at(1);
          break;
        case S::HardCodedSecret:
          b.lines = {"mysql_user 'api" + n(k) + "' do",
                     "  password " + (interp ? var : "'s3cret" + n(k) + "'"), "end"};
          at(1);
          break;
        case S::UnrestrictedIpAddress:
          b.lines = {"service_config 'svc" + n(k) + "' do", "  bind_address '0.0.0.0'", "end"};
          at(1);
          break;
        case S::SuspiciousComment:
          b.lines = {"# FIXME: temporary workaround for build " + n(k), "package 'tool" + n(k) + "' do",
                     "  action :install", "end"};
          at(0);
          break;
        case S::HttpWithoutTls:
          b.lines = {"apt_repository 'repo" + n(k) + "' do",
                     "  uri 'http://mirror" + n(k) + ".example.org/debian'", "end"};
          at(1);
          break;
        case S::WeakCryptoAlgorithm:
          b.lines = {"app_digest 'file" + n(k) + "' do", "  hash_type 'md5'", "end"};
          at(1);
          break;
        case S::NoIntegrityCheck:
          b.lines = {"remote_file '/tmp/tool" + n(k) + ".tar.gz' do",
                     "  source 'https://dl" + n(k) + ".example.org/tool" + n(k) + ".tar.gz'", "end"};
          at(1);
          break;
        case S::MissingDefaultCase:
          b.lines = {"case node['platform']", "when 'debian'", "  package 'a" + n(k) + "'", "end"};
          at(0);
          break;
      }
      break;
    }
    case IacLanguage::Puppet: {
      const std::string var = "$app" + n(k) + "_value";
      switch (t) {
        case S::AdminByDefault:
          b.lines = {"exec { 'step" + n(k) + "':", "  command => '/usr/bin/step" + n(k) + "',",
                     "  user    => " + (interp ? var : std::string("'root'")) + ",", "}"};
          at(2);
          break;
        case S::EmptyPassword:
          b.lines = {"mysql_user { 'app" + n(k) + "':", "  password => " + (interp ? var : std::string("''")) + ",", "}"};
          at(1);
          break;
        case S::HardCodedSecret:
          b.lines = {"mysql_user { 'api" + n(k) + "':",
                     "  password => " + (interp ? var : "'s3cret" + n(k) + "'") + ",", "}"};
          at(1);
          break;
        case S::UnrestrictedIpAddress:
          b.lines = {"svc_config { 'svc" + n(k) + "':", "  bind_address => '0.0.0.0',", "}"};
          at(1);
          break;
        case S::SuspiciousComment:
          b.lines = {"# HACK: remove after migration " + n(k), "package { 'tool" + n(k) + "':",
                     "  ensure => installed,", "}"};
          at(0);
          break;
        case S::HttpWithoutTls:
          b.lines = {"apt::source { 'repo" + n(k) + "':",
                     "  location => 'http://mirror" + n(k) + ".example.org/debian',", "}"};
          at(1);
          break;
        case S::WeakCryptoAlgorithm:
          b.lines = {"app_digest { 'file" + n(k) + "':", "  hash_type => 'md5',", "}"};
          at(1);
          break;
        case S::NoIntegrityCheck:
          b.lines = {"yumrepo { 'repo" + n(k) + "':", "  baseurl  => 'https://r" + n(k) + ".example.org',",
                     "  gpgcheck => '0',", "}"};
          at(2);
          break;
        case S::MissingDefaultCase:
          b.lines = {"case $facts['os']['family'] {", "  'Debian': {",
                     "    package { 'a" + n(k) + "': ensure => present }", "  }", "}"};
          at(0);
          break;
      }
      break;
    }
  }
  b.smell = mark;
  return b;
}

}  // namespace

std::string ext(IacLanguage lang) {
  switch (lang) {
    case IacLanguage::Ansible: return ".yml";
    case IacLanguage::Chef: return ".rb";
    case IacLanguage::Puppet: return ".pp";
  }
  return "";
}

bool supports(IacLanguage lang, SmellType t) {
  return !(lang == IacLanguage::Ansible && t == SmellType::MissingDefaultCase);
}

Script make_script(std::mt19937_64& rng, IacLanguage lang, const std::vector<SmellType>& smells, int index,
                   const Options& opt) {
  std::vector<Block> blocks;
  int k = index * 100;
  for (SmellType t : smells) blocks.push_back(smell_block(lang, t, ++k, opt.interpolate_secrets));
  int lines = 0;
  for (const auto& b : blocks) lines += static_cast<int>(b.lines.size());
  while (lines < opt.min_lines) {
    blocks.push_back(clean_block(rng, lang, ++k));
    lines += static_cast<int>(blocks.back().lines.size());
  }
  std::shuffle(blocks.begin(), blocks.end(), rng);

  Script s;
  s.language = lang;
  s.path = "s" + std::to_string(index) + ext(lang);
  int line = 1;
  if (lang == IacLanguage::Ansible) {
    s.content = "---\n";
    ++line;
  }
  for (const auto& b : blocks) {
    if (b.smell) s.expected.push_back({b.smell->first, line + b.smell->second});
    for (const auto& l : b.lines) {
      s.content += l;
      s.content += '\n';
      ++line;
    }
  }
  std::sort(s.expected.begin(), s.expected.end(), [](const Expect& a, const Expect& b) {
    return a.line != b.line ? a.line < b.line : a.smell < b.smell;
  });
  return s;
}

std::vector<Script> make_corpus(std::uint64_t seed, std::size_t count, double smelly, const Options& opt) {
  std::mt19937_64 rng(seed);
  std::vector<Script> out;
  const std::size_t n_smelly = static_cast<std::size_t>(static_cast<double>(count) * smelly + 0.5);
  for (std::size_t i = 0; i < count; ++i) {
    const auto lang = static_cast<IacLanguage>(i % 3);
    std::vector<SmellType> smells;
    if (i < n_smelly) {
      const int m = pick(rng, 1, 3);
      while (static_cast<int>(smells.size()) < m) {
        auto t = static_cast<SmellType>(pick(rng, 0, 8));
        if (supports(lang, t)) smells.push_back(t);
      }
    }
    out.push_back(make_script(rng, lang, smells, static_cast<int>(i), opt));
  }
  return out;
}

std::vector<Script> make_covering_corpus(std::uint64_t seed, std::size_t per_type, const Options& opt) {
  std::mt19937_64 rng(seed);
  std::vector<Script> out;
  int index = 0;
  for (SmellType t : iacsmell::kAllSmells) {
    for (std::size_t i = 0; i < per_type; ++i) {
      auto lang = static_cast<IacLanguage>(index % 3);
      if (!supports(lang, t)) lang = IacLanguage::Chef;
      out.push_back(make_script(rng, lang, {t}, index, opt));
      ++index;
    }
  }
  return out;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<Script>& scripts) {
  std::filesystem::create_directories(dir);
  for (const auto& s : scripts) {
    std::ofstream(dir / s.path, std::ios::binary) << s.content;
  }
}

}  // namespace synth
