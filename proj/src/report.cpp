#include "tonekit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace tonekit {

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void emit(std::string& out, const nlohmann::json& v, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0)
      return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
  case nlohmann::json::value_t::object: {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!first)
        out += ',';
      first = false;
      newline(depth + 1);
      out += nlohmann::json(it.key()).dump();
      out += indent < 0 ? ":" : ": ";
      emit(out, it.value(), indent, depth + 1);
    }
    newline(depth);
    out += '}';
    return;
  }
  case nlohmann::json::value_t::array: {
    if (v.empty()) {
      out += "[]";
      return;
    }
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i)
        out += ',';
      newline(depth + 1);
      emit(out, v[i], indent, depth + 1);
    }
    newline(depth);
    out += ']';
    return;
  }
  case nlohmann::json::value_t::number_float: {
    const double d = v.get<double>();
    // JSON has no non-finite numbers.
    out += std::isfinite(d) ? format_double(d) : "null";
    return;
  }
  default:
    out += v.dump();
  }
}

} // namespace

std::string to_json_text(const nlohmann::json& value, int indent) {
  std::string out;
  emit(out, value, indent, 0);
  return out;
}

std::string CsvWriter::quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos)
    return field;
  std::string q = "\"";
  for (char c : field) {
    if (c == '"')
      q += '"';
    q += c;
  }
  return q + '"';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i)
      out_ << ',';
    out_ << quote(fields[i]);
  }
  out_ << "\r\n";
}

std::string text_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (width.size() <= i)
        width.push_back(0);
      width[i] = std::max(width[i], r[i].size());
    }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size())
        line.append(width[i] - r[i].size() + 2, ' ');
    }
    out += line + '\n';
  }
  return out;
}

} // namespace tonekit
