#include <cstdio>
#include <sstream>

#include "povmkit/scenario.hpp"

namespace povmkit {

namespace {

std::string number_text(const Json& j) {
  if (j.is_number_integer() || j.is_number_unsigned()) return j.dump();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", j.get<double>());
  return buf;
}

bool is_complex_entry(const Json& j) {
  return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

bool is_matrix(const Json& j) {
  if (!j.is_array() || j.empty()) return false;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != j.size()) return false;
    for (const auto& e : row) {
      if (!is_complex_entry(e)) return false;
    }
  }
  return true;
}

std::string complex_text(const Json& e) {
  const double re = e[0].get<double>();
  const double im = e[1].get<double>();
  char buf[96];
  if (im == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12g", re);
  } else {
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", re, im);
  }
  return buf;
}

bool is_scalar_list(const Json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j) {
    if (e.is_structured()) return false;
  }
  return true;
}

std::string scalar_text(const Json& j) {
  if (j.is_number()) return number_text(j);
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

void write(std::ostream& os, const Json& j, int indent);

void write_value(std::ostream& os, const Json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (is_matrix(v)) {
    os << '\n';
    for (const auto& row : v) {
      os << pad << "  [";
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? ", " : "") << complex_text(row[c]);
      os << "]\n";
    }
  } else if (is_scalar_list(v)) {
    os << " [";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << scalar_text(v[i]);
    os << "]\n";
  } else if (v.is_structured()) {
    os << '\n';
    write(os, v, indent + 2);
  } else {
    os << ' ' << scalar_text(v) << '\n';
  }
}

void write(std::ostream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      os << pad << it.key() << ':';
      write_value(os, it.value(), indent);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      os << pad << '[' << i << "]:";
      write_value(os, j[i], indent);
    }
  } else {
    os << pad << scalar_text(j) << '\n';
  }
}

}  // namespace

Json Report::to_json() const {
  Json out = Json::object();
  out["status"] = to_string(status);
  out["command"] = command;
  out["exit_code"] = exit_code;
  out["options"] = options;
  out["payload"] = payload;
  out["diagnostics"] = diagnostics;
  return out;
}

std::string render(const Report& report, OutputFormat format) {
  if (format == OutputFormat::Json) return report.to_json().dump(2) + "\n";
  std::ostringstream os;
  os << "status: " << to_string(report.status) << '\n';
  os << "command: " << (report.command.empty() ? "-" : report.command) << '\n';
  os << "options:";
  write_value(os, report.options, 0);
  if (!report.payload.empty()) {
    os << "payload:";
    write_value(os, report.payload, 0);
  }
  for (const auto& d : report.diagnostics) os << "diagnostic: " << d << '\n';
  return os.str();
}

}  // namespace povmkit
