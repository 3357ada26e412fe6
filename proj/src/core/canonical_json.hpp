#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace jeanie {

// Canonical JSON emitter: object keys sorted, doubles printed with 17
// significant digits so payloads are bit-reproducible and round-trip exactly.
class JsonValue {
 public:
  using Object = std::map<std::string, JsonValue>;
  using Array = std::vector<JsonValue>;

  JsonValue() : value_(nullptr) {}
  JsonValue(std::nullptr_t) : value_(nullptr) {}
  JsonValue(bool b) : value_(b) {}
  JsonValue(int i) : value_(static_cast<long long>(i)) {}
  JsonValue(long long i) : value_(i) {}
  JsonValue(unsigned long long i) : value_(static_cast<long long>(i)) {}
  JsonValue(double d) : value_(d) {}
  JsonValue(const char* s) : value_(std::string(s)) {}
  JsonValue(std::string s) : value_(std::move(s)) {}
  JsonValue(Array a) : value_(std::move(a)) {}
  JsonValue(Object o) : value_(std::move(o)) {}

  static JsonValue object() { return JsonValue(Object{}); }
  static JsonValue array() { return JsonValue(Array{}); }

  JsonValue& operator[](const std::string& key) { return std::get<Object>(value_)[key]; }
  void push_back(JsonValue v) { std::get<Array>(value_).push_back(std::move(v)); }

  std::string dump() const;

 private:
  std::variant<std::nullptr_t, bool, long long, double, std::string, Array, Object> value_;

  void write(std::string& out) const;
};

std::string json_escape(const std::string& s);
std::string format_double(double v);  // %.17g, non-finite becomes null

}  // namespace jeanie
