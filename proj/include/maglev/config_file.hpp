#pragma once

// Minimal sectioned key/value reader for the scenario files: [section]
// headers, `key = value` lines, # comments, and scalar values (number,
// bool, quoted string) plus flat numeric arrays. Unknown keys are kept so
// callers can reject typos.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace maglev {

struct ConfigValue {
  enum class Type { Number, Boolean, String, NumberList };
  Type type = Type::Number;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  std::vector<double> list;
  int line = 0;  ///< source line, for error messages
};

class ConfigFile {
 public:
  /// Parses a file; throws std::runtime_error with file:line context.
  static ConfigFile load(const std::string& path);
  /// Parses from memory; `origin` names the source in error messages.
  static ConfigFile parse(const std::string& text,
                          const std::string& origin = "<string>");

  [[nodiscard]] bool has(const std::string& section,
                         const std::string& key) const;

  /// Typed getters; throw std::runtime_error on type mismatch. The value
  /// is consumed, so leftovers can be reported as unknown keys.
  double number(const std::string& section, const std::string& key,
                double fallback);
  std::int64_t integer(const std::string& section, const std::string& key,
                       std::int64_t fallback);
  std::uint64_t unsigned_integer(const std::string& section,
                                 const std::string& key,
                                 std::uint64_t fallback);
  bool boolean(const std::string& section, const std::string& key,
               bool fallback);
  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback);
  std::vector<double> numbers(const std::string& section,
                              const std::string& key,
                              const std::vector<double>& fallback);

  /// Keys never consumed by a getter, as "section.key" strings.
  [[nodiscard]] std::vector<std::string> leftovers() const;

 private:
  const ConfigValue* find(const std::string& section,
                          const std::string& key) const;
  ConfigValue take(const std::string& section, const std::string& key,
                   ConfigValue::Type want, const char* want_name);

  std::string origin_;
  std::map<std::string, std::map<std::string, ConfigValue>> sections_;
  std::map<std::string, bool> consumed_;
};

}  // namespace maglev
