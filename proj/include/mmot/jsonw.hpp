#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace mmot {

// Deterministic JSON emitter: fixed key order, doubles at 17 significant
// digits, no locale dependence. Used for all output artifacts.
class JsonWriter {
 public:
  std::string str() const { return out_; }

  static std::string num17(double v) {
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    if (std::isnan(v)) return "\"nan\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  void open_object() { punct('{'); }
  void close_object() {
    out_ += '}';
    fresh_ = false;
  }
  void open_array() { punct('['); }
  void close_array() {
    out_ += ']';
    fresh_ = false;
  }
  void key(const std::string& k) {
    comma();
    out_ += '"' + escape(k) + "\":";
    fresh_ = true;
  }
  void value(double v) {
    comma();
    out_ += num17(v);
  }
  void value(long v) {
    comma();
    out_ += std::to_string(v);
  }
  void value(int v) { value(static_cast<long>(v)); }
  void value(bool v) {
    comma();
    out_ += v ? "true" : "false";
  }
  void value(const std::string& v) {
    comma();
    out_ += '"' + escape(v) + '"';
  }
  void value(const char* v) { value(std::string(v)); }

  static std::string escape(const std::string& s) {
    std::string r;
    for (char c : s) {
      switch (c) {
        case '"': r += "\\\""; break;
        case '\\': r += "\\\\"; break;
        case '\n': r += "\\n"; break;
        case '\t': r += "\\t"; break;
        default: r += c;
      }
    }
    return r;
  }

 private:
  void comma() {
    if (!fresh_ && !out_.empty() && out_.back() != '{' && out_.back() != '[' &&
        out_.back() != ':')
      out_ += ',';
    fresh_ = false;
  }
  void punct(char c) {
    comma();
    out_ += c;
    fresh_ = true;
  }

  std::string out_;
  bool fresh_ = true;
};

}  // namespace mmot
