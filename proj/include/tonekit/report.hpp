#pragma once

#include <json.hpp>

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace tonekit {

// %.17g; non-finite values become "nan", "inf", "-inf".
std::string format_double(double v);

// Compact JSON with every floating-point number at 17 significant digits.
// Object keys keep nlohmann's sorted order.
std::string to_json_text(const nlohmann::json& value, int indent = 2);

// RFC 4180: fields with a comma, quote, CR or LF are quoted, quotes doubled,
// records end in CRLF.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);
  void row(std::initializer_list<std::string> fields) { row(std::vector<std::string>(fields)); }
  static std::string quote(const std::string& field);

private:
  std::ostream& out_;
};

// Left-aligned columns separated by two spaces.
std::string text_table(const std::vector<std::vector<std::string>>& rows);

} // namespace tonekit
