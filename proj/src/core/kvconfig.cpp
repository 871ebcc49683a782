#include "rdsdiag/kvconfig.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include "rdsdiag/csv.hpp"
#include "rdsdiag/error.hpp"

namespace rdsdiag {

std::string trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(sep, start), text.size());
    std::string item = trim(text.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

KvConfig KvConfig::parse(std::string_view text) {
  KvConfig cfg;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string cleaned = trim(line);
    if (cleaned.empty()) continue;
    const auto eq = cleaned.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::InvalidConfig, "config line " + std::to_string(line_no) + " has no '='");
    }
    const std::string key = trim(std::string_view(cleaned).substr(0, eq));
    if (key.empty()) fail(ErrorCode::InvalidConfig, "config line " + std::to_string(line_no) + " has an empty key");
    cfg.entries_[key] = trim(std::string_view(cleaned).substr(eq + 1));
  }
  return cfg;
}

KvConfig KvConfig::load(const std::string& path) { return parse(read_text_file(path)); }

bool KvConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

void KvConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void KvConfig::merge(const KvConfig& other) {
  for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

std::optional<std::string> KvConfig::text(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KvConfig::text_or(const std::string& key, const std::string& fallback) const {
  return text(key).value_or(fallback);
}

namespace {

double to_number(const std::string& key, const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    fail(ErrorCode::InvalidConfig, "config key '" + key + "' expects a number, got '" + s + "'");
  }
  return v;
}

}  // namespace

double KvConfig::number_or(const std::string& key, double fallback) const {
  auto v = text(key);
  return v ? to_number(key, *v) : fallback;
}

long long KvConfig::integer_or(const std::string& key, long long fallback) const {
  auto v = text(key);
  if (!v) return fallback;
  long long out = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size()) {
    fail(ErrorCode::InvalidConfig, "config key '" + key + "' expects an integer, got '" + *v + "'");
  }
  return out;
}

std::uint64_t KvConfig::seed_or(const std::string& key, std::uint64_t fallback) const {
  auto v = text(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size()) {
    fail(ErrorCode::InvalidConfig, "config key '" + key + "' expects an unsigned integer, got '" + *v + "'");
  }
  return out;
}

bool KvConfig::flag_or(const std::string& key, bool fallback) const {
  auto v = text(key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  fail(ErrorCode::InvalidConfig, "config key '" + key + "' expects true/false, got '" + *v + "'");
}

std::vector<double> KvConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : list(key)) out.push_back(to_number(key, item));
  return out;
}

std::vector<std::string> KvConfig::list(const std::string& key) const {
  auto v = text(key);
  return v ? split_list(*v) : std::vector<std::string>{};
}

std::vector<std::pair<std::string, std::string>> KvConfig::with_prefix(const std::string& prefix) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : entries_) {
    if (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0) {
      out.emplace_back(k.substr(prefix.size()), v);
    }
  }
  return out;
}

void KvConfig::reject_unknown(const std::vector<std::string>& allowed) const {
  for (const auto& [k, v] : entries_) {
    bool ok = false;
    for (const auto& a : allowed) {
      if (a.size() >= 2 && a.compare(a.size() - 2, 2, ".*") == 0) {
        const std::string prefix = a.substr(0, a.size() - 1);
        ok = k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0;
      } else {
        ok = k == a;
      }
      if (ok) break;
    }
    if (!ok) fail(ErrorCode::InvalidConfig, "unknown config key '" + k + "'");
  }
}

}  // namespace rdsdiag
