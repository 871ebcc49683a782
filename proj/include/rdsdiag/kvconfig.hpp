#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rdsdiag {

// "key = value" lines; '#' starts a comment; later keys override earlier ones.
class KvConfig {
 public:
  static KvConfig parse(std::string_view text);
  static KvConfig load(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  void merge(const KvConfig& other);  // other wins

  std::optional<std::string> text(const std::string& key) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;
  double number_or(const std::string& key, double fallback) const;
  long long integer_or(const std::string& key, long long fallback) const;
  std::uint64_t seed_or(const std::string& key, std::uint64_t fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;  // comma separated
  std::vector<std::string> list(const std::string& key) const;

  // Keys under a prefix, with the prefix stripped.
  std::vector<std::pair<std::string, std::string>> with_prefix(const std::string& prefix) const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  // InvalidConfig naming the first key not matched by an allowed key or
  // "prefix.*" pattern.
  void reject_unknown(const std::vector<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> entries_;
};

std::vector<std::string> split_list(std::string_view text, char sep = ',');
std::string trim(std::string_view text);

}  // namespace rdsdiag
