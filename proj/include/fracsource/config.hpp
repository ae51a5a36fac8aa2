#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracsource::config {

/// Invalid or unreadable configuration; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using KeyValues = std::map<std::string, std::string>;

/// `key = value` per line, `#` starts a comment, blank lines ignored. A
/// repeated key keeps the last value.
KeyValues parse(const std::string& text);
KeyValues load(const std::filesystem::path& path);

double to_double(const std::string& key, const std::string& value);
std::size_t to_size(const std::string& key, const std::string& value);
bool to_bool(const std::string& key, const std::string& value);
/// Comma- and/or whitespace-separated numbers.
std::vector<double> to_doubles(const std::string& key, const std::string& value);
std::vector<std::uint64_t> to_seeds(const std::string& key, const std::string& value);

}  // namespace fracsource::config
