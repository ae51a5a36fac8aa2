#include "fracsource/config.hpp"

#include "fracsource/csv_io.hpp"

#include <charconv>
#include <sstream>

namespace fracsource::config {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& value) {
  std::string v = value;
  for (char& c : v)
    if (c == ',') c = ' ';
  std::istringstream in(v);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* what) {
  throw ConfigError(key + ": expected " + what + ", got '" + value + "'");
}

}  // namespace

KeyValues parse(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues load(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path))
    throw ConfigError("config file not found: " + path.string());
  return parse(io::read_file(path));
}

double to_double(const std::string& key, const std::string& value) {
  try {
    return io::parse_double(trim(value));
  } catch (const std::invalid_argument&) {
    bad(key, value, "a number");
  }
}

std::size_t to_size(const std::string& key, const std::string& value) {
  const auto v = trim(value);
  std::size_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    bad(key, value, "a non-negative integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  const auto v = trim(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, value, "true or false");
}

std::vector<double> to_doubles(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& t : tokens(value)) out.push_back(to_double(key, t));
  return out;
}

std::vector<std::uint64_t> to_seeds(const std::string& key, const std::string& value) {
  std::vector<std::uint64_t> out;
  for (const auto& t : tokens(value)) {
    std::uint64_t s = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), s);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) bad(key, value, "unsigned integers");
    out.push_back(s);
  }
  return out;
}

}  // namespace fracsource::config
