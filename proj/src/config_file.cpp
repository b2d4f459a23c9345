#include "maglev/config_file.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace maglev {
namespace {

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& what) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

/// Strips a # comment, respecting double-quoted strings.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool parse_number(const std::string& s, double* out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

ConfigValue parse_value(const std::string& raw, const std::string& origin,
                        int line) {
  ConfigValue v;
  v.line = line;
  const std::string s = trim(raw);
  if (s.empty()) fail(origin, line, "missing value");

  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      fail(origin, line, "unterminated string");
    v.type = ConfigValue::Type::String;
    v.text = s.substr(1, s.size() - 2);
    return v;
  }
  if (s == "true" || s == "false") {
    v.type = ConfigValue::Type::Boolean;
    v.boolean = (s == "true");
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']') fail(origin, line, "unterminated array");
    v.type = ConfigValue::Type::NumberList;
    std::stringstream items(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
      const std::string it = trim(item);
      if (it.empty()) continue;
      double num = 0.0;
      if (!parse_number(it, &num))
        fail(origin, line, "array element is not a number: '" + it + "'");
      v.list.push_back(num);
    }
    return v;
  }
  if (parse_number(s, &v.number)) {
    v.type = ConfigValue::Type::Number;
    return v;
  }
  fail(origin, line, "unrecognized value: '" + s + "'");
}

}  // namespace

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

ConfigFile ConfigFile::parse(const std::string& text,
                             const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::stringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail(origin, line, "empty section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(origin, line, "expected 'key = value': '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(origin, line, "empty key");
    if (cfg.sections_[section].count(key))
      fail(origin, line, "duplicate key '" + section + "." + key + "'");
    cfg.sections_[section][key] =
        parse_value(s.substr(eq + 1), origin, line);
  }
  return cfg;
}

const ConfigValue* ConfigFile::find(const std::string& section,
                                    const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end()) return nullptr;
  const auto it = sec->second.find(key);
  return it == sec->second.end() ? nullptr : &it->second;
}

bool ConfigFile::has(const std::string& section,
                     const std::string& key) const {
  return find(section, key) != nullptr;
}

ConfigValue ConfigFile::take(const std::string& section,
                             const std::string& key, ConfigValue::Type want,
                             const char* want_name) {
  const ConfigValue* v = find(section, key);
  if (v == nullptr)
    throw std::runtime_error(origin_ + ": missing key " + section + "." +
                             key);
  if (v->type != want)
    fail(origin_, v->line,
         "key " + section + "." + key + " must be a " + want_name);
  consumed_[section + "." + key] = true;
  return *v;
}

double ConfigFile::number(const std::string& section, const std::string& key,
                          double fallback) {
  if (!has(section, key)) return fallback;
  return take(section, key, ConfigValue::Type::Number, "number").number;
}

std::int64_t ConfigFile::integer(const std::string& section,
                                 const std::string& key,
                                 std::int64_t fallback) {
  if (!has(section, key)) return fallback;
  const ConfigValue v =
      take(section, key, ConfigValue::Type::Number, "number");
  const auto i = static_cast<std::int64_t>(v.number);
  if (static_cast<double>(i) != v.number)
    fail(origin_, v.line, "key " + section + "." + key + " must be integral");
  return i;
}

std::uint64_t ConfigFile::unsigned_integer(const std::string& section,
                                           const std::string& key,
                                           std::uint64_t fallback) {
  if (!has(section, key)) return fallback;
  const ConfigValue v =
      take(section, key, ConfigValue::Type::Number, "number");
  if (v.number < 0.0)
    fail(origin_, v.line, "key " + section + "." + key + " must be >= 0");
  const auto i = static_cast<std::uint64_t>(v.number);
  if (static_cast<double>(i) != v.number)
    fail(origin_, v.line, "key " + section + "." + key + " must be integral");
  return i;
}

bool ConfigFile::boolean(const std::string& section, const std::string& key,
                         bool fallback) {
  if (!has(section, key)) return fallback;
  return take(section, key, ConfigValue::Type::Boolean, "boolean").boolean;
}

std::string ConfigFile::text(const std::string& section,
                             const std::string& key,
                             const std::string& fallback) {
  if (!has(section, key)) return fallback;
  return take(section, key, ConfigValue::Type::String, "string").text;
}

std::vector<double> ConfigFile::numbers(const std::string& section,
                                        const std::string& key,
                                        const std::vector<double>& fallback) {
  if (!has(section, key)) return fallback;
  return take(section, key, ConfigValue::Type::NumberList, "number array")
      .list;
}

std::vector<std::string> ConfigFile::leftovers() const {
  std::vector<std::string> out;
  for (const auto& [name, keys] : sections_)
    for (const auto& [key, value] : keys) {
      const std::string id = name + "." + key;
      if (!consumed_.count(id)) out.push_back(id);
    }
  return out;
}

}  // namespace maglev
