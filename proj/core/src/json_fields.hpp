#pragma once

// Strict field reading on top of nlohmann::json. Every problem is appended
// to a shared list so a whole document is diagnosed in one pass.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace casc::detail {

using json = nlohmann::json;

/// Parses `text`, converting a syntax error into "source:line:col: message".
json parse_json_or_throw(const std::string& text, const std::string& source);

/// Whole file contents; throws ScenarioError when unreadable.
std::string read_text_file(const std::filesystem::path& path);

class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path, std::vector<std::string>& problems)
      : node_(node), path_(std::move(path)), problems_(problems) {
    if (!node_.is_object()) {
      problem(path_.empty() ? "document" : path_, "expected an object");
      valid_ = false;
    }
  }

  bool valid() const { return valid_; }

  bool has(const char* key) const { return valid_ && node_.contains(key); }

  /// Marks `key` as known and returns the child, or nullptr when absent.
  const json* child(const char* key) {
    known_.insert(key);
    if (!has(key)) return nullptr;
    return &node_.at(key);
  }

  bool number(const char* key, double& out, bool required = false) {
    const json* v = child(key);
    if (!v) return missing(key, required);
    if (!v->is_number()) return problem(field(key), "expected a number");
    out = v->get<double>();
    return true;
  }

  bool unsigned_int(const char* key, std::uint64_t& out, std::uint64_t max,
                    bool required = false) {
    const json* v = child(key);
    if (!v) return missing(key, required);
    return unsigned_value(*v, field(key), out, max);
  }

  bool number_array(const char* key, std::vector<double>& out, bool required = false) {
    const json* v = child(key);
    if (!v) return missing(key, required);
    if (!v->is_array()) return problem(field(key), "expected an array of numbers");
    std::vector<double> values;
    bool ok = true;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& item = (*v)[i];
      if (!item.is_number()) {
        ok = problem(field(key) + "[" + std::to_string(i) + "]", "expected a number");
        continue;
      }
      values.push_back(item.get<double>());
    }
    if (ok) out = std::move(values);
    return ok;
  }

  bool unsigned_array(const char* key, std::vector<std::uint64_t>& out, std::uint64_t max,
                      bool required = false) {
    const json* v = child(key);
    if (!v) return missing(key, required);
    if (!v->is_array()) return problem(field(key), "expected an array of integers");
    std::vector<std::uint64_t> values;
    bool ok = true;
    for (std::size_t i = 0; i < v->size(); ++i) {
      std::uint64_t value = 0;
      if (unsigned_value((*v)[i], field(key) + "[" + std::to_string(i) + "]", value, max)) {
        values.push_back(value);
      } else {
        ok = false;
      }
    }
    if (ok) out = std::move(values);
    return ok;
  }

  bool string(const char* key, std::string& out, bool required = false) {
    const json* v = child(key);
    if (!v) return missing(key, required);
    if (!v->is_string()) return problem(field(key), "expected a string");
    out = v->get<std::string>();
    return true;
  }

  /// Reports every key that was never asked for.
  void reject_unknown() {
    if (!valid_) return;
    for (const auto& [key, value] : node_.items()) {
      if (!known_.contains(key)) problem(field(key), "unknown field '" + key + "'");
    }
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool problem(const std::string& where, const std::string& what) {
    problems_.push_back(where + ": " + what);
    return false;
  }

 private:
  bool missing(const char* key, bool required) {
    if (required) problem(field(key), "required field missing");
    return false;
  }

  bool unsigned_value(const json& v, const std::string& where, std::uint64_t& out,
                      std::uint64_t max) {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      const auto value = v.get<std::uint64_t>();
      if (value > max) return problem(where, "value " + std::to_string(value) + " above " +
                                                 std::to_string(max));
      out = value;
      return true;
    }
    return problem(where, "expected a non-negative integer");
  }

  const json& node_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> known_;
  bool valid_ = true;
};

}  // namespace casc::detail
