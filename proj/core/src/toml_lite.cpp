// Copyright 2026 The epp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "epp/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <string>
#include <vector>

#include "epp/operator.hpp"

namespace epp {

namespace {

using json = nlohmann::json;

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  json run() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_all();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (!eof() && peek() == '[') fail("arrays of tables are not supported");
        skip_ws();
        const auto path = parse_key_path();
        skip_ws();
        expect(']');
        table = &descend(root, path);
      } else {
        const auto path = parse_key_path();
        skip_ws();
        expect('=');
        skip_ws();
        json value = parse_value();
        json& parent = descend(*table, {path.begin(), path.end() - 1});
        if (parent.contains(path.back())) fail("duplicate key '" + path.back() + "'");
        parent[path.back()] = std::move(value);
      }
      end_of_line();
    }
    return root;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error("TOML line " + std::to_string(line_) + ": " + what);
  }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (!eof() && peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  // Whitespace, newlines and comments, as allowed inside arrays.
  void skip_all() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (!eof() && peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }

  json& descend(json& base, const std::vector<std::string>& path) {
    json* node = &base;
    for (const auto& key : path) {
      if (!node->contains(key)) (*node)[key] = json::object();
      node = &(*node)[key];
      if (!node->is_object()) {
        fail("key '" + key + "' is not a table");
      }
    }
    return *node;
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path;
    while (true) {
      skip_ws();
      path.push_back(parse_key());
      skip_ws();
      if (!eof() && peek() == '.') {
        ++pos_;
        continue;
      }
      return path;
    }
  }

  std::string parse_key() {
    if (eof()) fail("expected a key");
    if (peek() == '"') return parse_string();
    std::string key;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        key.push_back(c);
        ++pos_;
      } else {
        break;
      }
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::string parse_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = peek();
      ++pos_;
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (eof()) fail("bad escape");
      const char e = peek();
      ++pos_;
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
    return out;
  }

  json parse_value() {
    if (eof()) fail("expected a value");
    const char c = peek();
    if (c == '"') {
      if (s_.substr(pos_, 3) == "\"\"\"") fail("multi-line strings are not supported");
      return parse_string();
    }
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return parse_number();
  }

  json parse_array() {
    expect('[');
    json arr = json::array();
    while (true) {
      skip_all();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(parse_value());
      skip_all();
      if (!eof() && peek() == ',') {
        ++pos_;
        continue;
      }
      skip_all();
      expect(']');
      return arr;
    }
  }

  json parse_inline_table() {
    expect('{');
    json obj = json::object();
    skip_ws();
    if (!eof() && peek() == '}') {
      ++pos_;
      return obj;
    }
    while (true) {
      const auto path = parse_key_path();
      skip_ws();
      expect('=');
      skip_ws();
      json value = parse_value();
      json& parent = descend(obj, {path.begin(), path.end() - 1});
      parent[path.back()] = std::move(value);
      skip_ws();
      if (!eof() && peek() == ',') {
        ++pos_;
        skip_ws();
        continue;
      }
      expect('}');
      return obj;
    }
  }

  json parse_number() {
    std::string tok;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
          c == '.' || c == '_') {
        if (c != '_') tok.push_back(c);
        ++pos_;
      } else {
        break;
      }
    }
    if (tok.empty()) fail("expected a value");
    std::string body = tok;
    bool negative = false;
    if (body[0] == '+' || body[0] == '-') {
      negative = body[0] == '-';
      body.erase(0, 1);
    }
    if (body == "inf") {
      return negative ? -std::numeric_limits<double>::infinity()
                      : std::numeric_limits<double>::infinity();
    }
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
    const bool is_float = body.find_first_of(".eE") != std::string::npos;
    const char* first = tok.data() + (tok[0] == '+' ? 1 : 0);
    const char* last = tok.data() + tok.size();
    if (is_float) {
      double v = 0.0;
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || res.ptr != last) fail("bad number '" + tok + "'");
      return v;
    }
    std::int64_t v = 0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) fail("bad value '" + tok + "'");
    return v;
  }
};

}  // namespace

nlohmann::json parse_toml_subset(std::string_view text) {
  return Parser(text).run();
}

}  // namespace epp
