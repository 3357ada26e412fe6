#include "core/canonical_json.hpp"

#include <cmath>
#include <cstdio>

namespace jeanie {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void JsonValue::write(std::string& out) const {
  struct Visitor {
    std::string& out;
    void operator()(std::nullptr_t) const { out += "null"; }
    void operator()(bool b) const { out += b ? "true" : "false"; }
    void operator()(long long i) const { out += std::to_string(i); }
    void operator()(double d) const { out += format_double(d); }
    void operator()(const std::string& s) const {
      out += '"';
      out += json_escape(s);
      out += '"';
    }
    void operator()(const Array& a) const {
      out += '[';
      bool first = true;
      for (const auto& v : a) {
        if (!first) out += ',';
        first = false;
        v.write(out);
      }
      out += ']';
    }
    void operator()(const Object& o) const {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : o) {
        if (!first) out += ',';
        first = false;
        out += '"';
        out += json_escape(k);
        out += "\":";
        v.write(out);
      }
      out += '}';
    }
  };
  std::visit(Visitor{out}, value_);
}

std::string JsonValue::dump() const {
  std::string out;
  write(out);
  return out;
}

}  // namespace jeanie
