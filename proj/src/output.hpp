#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

namespace fadesim {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class T, class = std::enable_if_t<std::is_integral_v<T>>>
  static std::string cell(T v) {
    return std::to_string(v);
  }

  std::ofstream out_;
};

std::string build_id();
std::string version_string();

// Writes <csv_path>.json next to an output file.
void write_sidecar(const std::string& csv_path, const nlohmann::json& meta);

}  // namespace fadesim
