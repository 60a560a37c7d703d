#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <regex>
#include <set>

#include "iacsmell/parsers.hpp"
#include "iacsmell/text.hpp"
#include "parse_common.hpp"
#include "yaml_scan.hpp"

namespace iacsmell {
namespace {

const std::set<std::string, std::less<>> kTaskKeywords = {
    "action", "any_errors_fatal", "args", "always", "async", "become",
    "become_exe", "become_flags", "become_method", "become_user", "block",
    "changed_when", "check_mode", "collections", "connection", "debugger",
    "delay", "delegate_facts", "delegate_to", "diff", "environment",
    "failed_when", "fact_path", "force_handlers", "gather_facts",
    "gather_subset", "gather_timeout", "handlers", "hosts", "ignore_errors",
    "ignore_unreachable", "listen", "local_action", "loop", "loop_control",
    "max_fail_percentage", "module_defaults", "name", "no_log", "notify",
    "order", "poll", "port", "post_tasks", "pre_tasks", "register",
    "remote_user", "rescue", "retries", "roles", "run_once", "serial",
    "strategy", "su", "su_user", "sudo", "sudo_user", "tags", "tasks",
    "throttle", "timeout", "until", "vars", "vars_files", "vars_prompt",
    "when"};

const std::set<std::string, std::less<>> kNestedTaskKeys = {
    "tasks", "pre_tasks", "post_tasks", "handlers", "block", "rescue",
    "always"};

bool is_keyword(std::string_view key) {
  return kTaskKeywords.contains(key) || key.starts_with("with_");
}

std::string last_dot_segment(std::string_view s) {
  std::size_t pos = s.rfind('.');
  return std::string(pos == std::string_view::npos ? s : s.substr(pos + 1));
}

class AnsibleBuilder {
 public:
  explicit AnsibleBuilder(IrScript& script) : script_(script) {}

  void document(const YAML::Node& root) {
    if (!root || root.IsNull() || root.IsScalar()) return;
    if (root.IsSequence()) {
      for (const auto& item : root) {
        if (item.IsMap()) {
          bool play = item["hosts"] || item["import_playbook"];
          unit_from_map(item, play ? "play" : "task");
        }
      }
    } else if (root.IsMap()) {
      bool play = root["hosts"] || root["tasks"];
      unit_from_map(root, play ? "play" : "bare");
    }
  }

 private:
  static int line_of(const YAML::Node& n) {
    const YAML::Mark m = n.Mark();
    return m.is_null() ? 0 : m.line + 1;
  }
  static int col_of(const YAML::Node& n) {
    const YAML::Mark m = n.Mark();
    return m.is_null() ? 0 : m.column + 1;
  }

  static std::string task_kind(const YAML::Node& map) {
    if (map["block"]) return "block";
    for (const auto& kv : map) {
      if (!kv.first.IsScalar()) continue;
      const std::string& key = kv.first.Scalar();
      if (key == "action" || key == "local_action") {
        if (kv.second.IsScalar()) {
          std::string v = kv.second.Scalar();
          return last_dot_segment(v.substr(0, v.find(' ')));
        }
        if (kv.second.IsMap() && kv.second["module"] &&
            kv.second["module"].IsScalar()) {
          return last_dot_segment(kv.second["module"].Scalar());
        }
        continue;
      }
      if (!is_keyword(key)) return last_dot_segment(key);
    }
    return "task";
  }

  int unit_from_map(const YAML::Node& map, const std::string& role) {
    IrUnit unit;
    unit.kind = role == "task" ? task_kind(map) : role;
    if (map["name"] && map["name"].IsScalar()) unit.name = map["name"].Scalar();
    const int start = std::max(1, line_of(map));
    int max_line = start;
    collect(map, unit, max_line);
    unit.span = Span{start, max_line, col_of(map)};
    script_.units.push_back(std::move(unit));
    return max_line;
  }

  void add_scalar(IrUnit& unit, const std::string& key, const YAML::Node& key_node,
                  const YAML::Node& value, int& max_line) {
    int key_line = line_of(key_node);
    if (key_line == 0) key_line = line_of(value);
    if (key_line == 0) return;
    std::string text = value.IsScalar() ? value.Scalar() : std::string();
    int end_line = std::max(key_line, line_of(value));
    end_line += static_cast<int>(std::count(text.begin(), text.end(), '\n'));
    Span span{key_line, end_line, col_of(key_node)};
    unit.attributes.push_back(
        make_attribute(key, std::move(text), IacLanguage::Ansible, span));
    max_line = std::max(max_line, end_line);
  }

  void collect_sequence(const std::string& key, const YAML::Node& key_node,
                        const YAML::Node& seq, IrUnit& unit, int& max_line) {
    for (const auto& item : seq) {
      if (item.IsScalar()) {
        add_scalar(unit, key, item, item, max_line);
      } else if (item.IsMap()) {
        collect(item, unit, max_line);
      } else if (item.IsSequence()) {
        collect_sequence(key, key_node, item, unit, max_line);
      }
    }
  }

  void collect(const YAML::Node& map, IrUnit& unit, int& max_line) {
    for (const auto& kv : map) {
      if (!kv.first.IsScalar()) continue;
      const std::string& key = kv.first.Scalar();
      const YAML::Node& value = kv.second;
      max_line = std::max(max_line, line_of(kv.first));
      if (!value || value.IsNull() || value.IsScalar()) {
        add_scalar(unit, key, kv.first, value, max_line);
      } else if (value.IsMap()) {
        collect(value, unit, max_line);
      } else if (value.IsSequence()) {
        if (kNestedTaskKeys.contains(key)) {
          for (const auto& item : value) {
            if (item.IsMap()) {
              max_line = std::max(max_line, unit_from_map(item, "task"));
            }
          }
        } else {
          collect_sequence(key, kv.first, value, unit, max_line);
        }
      }
    }
  }

  IrScript& script_;
};

// Textual fallback for YAML that does not load.
void degraded_extract(IrScript& script, const detail::YamlScan& scan) {
  static const std::regex kv_line(
      R"(^(\s*)(-\s+)?("[^"]*"|'[^']*'|[^\s#'"\-][^#]*?|-[^\s#][^#]*?)\s*:(?:\s+(.*))?$)");
  IrUnit current{"bare", "", {}, Span{1, 1, 0}};
  bool have_unit = false;
  auto flush = [&](int end_line) {
    if (have_unit || !current.attributes.empty()) {
      current.span.end_line = std::max(current.span.start_line, end_line);
      script.units.push_back(std::move(current));
    }
    current = IrUnit{"bare", "", {}, Span{1, 1, 0}};
    have_unit = false;
  };

  const int n = static_cast<int>(script.lines.size());
  int last_attr_line = 0;
  for (int li = 0; li < n; ++li) {
    if (scan.inside_scalar[li]) continue;
    std::string line = script.lines[li];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (!std::regex_match(line, m, kv_line)) continue;
    const int line_no = li + 1;
    if (m[2].matched) {
      flush(line_no - 1);
      current.kind = "degraded";
      current.span = Span{line_no, line_no, static_cast<int>(m[1].length()) + 1};
      have_unit = true;
    }
    std::string key = m[3].str();
    std::string value = m[4].matched ? m[4].str() : std::string();
    std::string_view v = text::trim(value);
    bool block = false;
    if (!v.empty() && (v.front() == '"' || v.front() == '\'')) {
      std::size_t close = v.find(v.front(), 1);
      v = close == std::string_view::npos ? v.substr(1) : v.substr(1, close - 1);
    } else {
      if (std::size_t hash = v.find(" #"); hash != std::string_view::npos) {
        v = text::rtrim(v.substr(0, hash));
      }
      block = !v.empty() && (v.front() == '|' || v.front() == '>') &&
              v.size() <= 3;
    }
    if (v.empty() && !m[4].matched) {
      // A parent key: skip when the next content line is nested deeper.
      int own_indent = static_cast<int>(m[1].length()) +
                       (m[2].matched ? static_cast<int>(m[2].length()) : 0);
      bool parent = false;
      for (int k = li + 1; k < n; ++k) {
        std::string_view next = script.lines[k];
        if (text::trim(next).empty()) continue;
        parent = static_cast<int>(text::indentation(next).size()) > own_indent ||
                 text::trim(next).starts_with("- ");
        break;
      }
      if (parent) continue;
    }
    Span span{line_no, line_no, static_cast<int>(m[1].length()) + 1};
    IrAttribute attr = make_attribute(std::string(text::unquote(key)),
                                      std::string(v), IacLanguage::Ansible, span);
    if (block && attr.value_kind != ValueKind::VariableRef) {
      attr.value_kind = ValueKind::Block;
    }
    if (!have_unit && current.attributes.empty()) {
      current.span = Span{line_no, line_no, 0};
    }
    current.attributes.push_back(std::move(attr));
    current.span.end_line = line_no;
    last_attr_line = line_no;
  }
  flush(std::max(last_attr_line, current.span.end_line));
}

}  // namespace

IrScript parse_ansible(std::string_view content, std::string_view path) {
  IrScript script = detail::start_script(IacLanguage::Ansible, content, path);
  const detail::YamlScan scan = detail::scan_yaml(script.lines);
  for (const auto& c : scan.comments) {
    script.comments.push_back(detail::make_comment(c.text, c.line, c.col));
  }

  bool loaded = false;
  if (!scan.error) {
    try {
      std::vector<YAML::Node> docs = YAML::LoadAll(script.text());
      AnsibleBuilder builder(script);
      for (const auto& doc : docs) builder.document(doc);
      loaded = true;
    } catch (const YAML::Exception& e) {
      script.units.clear();
      script.parse_error =
          ParseError{e.mark.is_null() ? 0 : e.mark.line + 1, e.msg};
    }
  } else {
    script.parse_error = scan.error;
  }

  if (!loaded) {
    script.parse_failed = true;
    degraded_extract(script, scan);
  }
  detail::finish_script(script);
  return script;
}

}  // namespace iacsmell
