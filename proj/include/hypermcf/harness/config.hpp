#pragma once
// Flat key=value configuration with command-line overrides.
//
// Values may be arithmetic expressions ("atanh(0.5)", "-4", "1e3*sqrt(2)") or
// comma-separated lists of them. Every key must be declared in the schema of
// the command; anything else is a ConfigError before any computation starts.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hypermcf::harness {

/// Evaluates +, -, *, /, ^, parentheses, the constants pi and e, and the
/// functions sqrt exp log sin cos tan sinh cosh tanh asinh acosh atanh abs.
/// Throws ConfigError on malformed input or a non-finite result.
[[nodiscard]] double evaluate_expression(const std::string& text);

struct KeySpec {
  std::string name;
  std::string default_value;
  std::string help;
};

class Config {
 public:
  explicit Config(std::vector<KeySpec> schema);

  /// Parses a file of "key = value" lines; '#' starts a comment.
  void load_file(const std::string& path);
  /// Applies one "key=value" override.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  [[nodiscard]] std::string str(const std::string& key) const;
  [[nodiscard]] double real(const std::string& key) const;
  [[nodiscard]] std::int64_t integer(const std::string& key) const;
  [[nodiscard]] bool flag(const std::string& key) const;
  [[nodiscard]] std::vector<double> reals(const std::string& key) const;
  [[nodiscard]] std::vector<int> integers(const std::string& key) const;

  /// Effective key/value pairs in schema order (for manifests).
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> entries() const;
  [[nodiscard]] const std::vector<KeySpec>& schema() const { return schema_; }
  /// One "key (default): help" line per key.
  [[nodiscard]] std::string describe() const;

 private:
  [[nodiscard]] const std::string& raw(const std::string& key) const;
  std::vector<KeySpec> schema_;
  std::map<std::string, std::string> values_;
};

}  // namespace hypermcf::harness
