#pragma once

#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace wsg {

/// Minimal ordered JSON value for reports. Keys keep insertion order and
/// numbers are emitted with 17 significant digits, so identical runs produce
/// byte-identical documents.
class Json {
 public:
  Json() : value_(nullptr) {}
  Json(bool b) : value_(b) {}
  Json(double v) : value_(v) {}
  Json(int v) : value_(static_cast<double>(v)) {}
  Json(long v) : value_(static_cast<double>(v)) {}
  Json(const char* s) : value_(std::string(s)) {}
  Json(std::string s) : value_(std::move(s)) {}

  static Json object() {
    Json j;
    j.value_ = Object{};
    return j;
  }
  static Json array() {
    Json j;
    j.value_ = Array{};
    return j;
  }

  Json& set(const std::string& key, Json v) {
    std::get<Object>(value_).emplace_back(key, std::move(v));
    return *this;
  }
  Json& push(Json v) {
    std::get<Array>(value_).push_back(std::move(v));
    return *this;
  }
  bool empty_array() const {
    return std::holds_alternative<Array>(value_) && std::get<Array>(value_).empty();
  }

  std::string dump(int indent = 0) const {
    std::string out;
    write(out, indent, 0);
    return out;
  }

 private:
  using Array = std::vector<Json>;
  using Object = std::vector<std::pair<std::string, Json>>;
  std::variant<std::nullptr_t, bool, double, std::string, Array, Object> value_;

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
      }
    }
    return out;
  }

  void write(std::string& out, int indent, int depth) const {
    const std::string pad = indent ? std::string(static_cast<size_t>(indent) * (depth + 1), ' ') : "";
    const std::string close_pad = indent ? std::string(static_cast<size_t>(indent) * depth, ' ') : "";
    const char* nl = indent ? "\n" : "";
    if (std::holds_alternative<std::nullptr_t>(value_)) {
      out += "null";
    } else if (std::holds_alternative<bool>(value_)) {
      out += std::get<bool>(value_) ? "true" : "false";
    } else if (std::holds_alternative<double>(value_)) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(value_));
      out += buf;
    } else if (std::holds_alternative<std::string>(value_)) {
      out += '"' + escape(std::get<std::string>(value_)) + '"';
    } else if (std::holds_alternative<Array>(value_)) {
      const Array& a = std::get<Array>(value_);
      if (a.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      out += nl;
      for (size_t k = 0; k < a.size(); ++k) {
        out += pad;
        a[k].write(out, indent, depth + 1);
        if (k + 1 < a.size()) out += ',';
        out += nl;
      }
      out += close_pad;
      out += ']';
    } else {
      const Object& o = std::get<Object>(value_);
      if (o.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      out += nl;
      for (size_t k = 0; k < o.size(); ++k) {
        out += pad;
        out += '"' + escape(o[k].first) + "\": ";
        o[k].second.write(out, indent, depth + 1);
        if (k + 1 < o.size()) out += ',';
        out += nl;
      }
      out += close_pad;
      out += '}';
    }
  }
};

}  // namespace wsg
