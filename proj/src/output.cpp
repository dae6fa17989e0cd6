#include "output.hpp"

#include <array>

#include "errors.hpp"
#include "fadesim_build.hpp"

namespace fadesim {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
  if (!out_) throw IoError("cannot write " + path);
  for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
  out_ << '\n';
}

std::string build_id() { return FADESIM_BUILD_ID; }
std::string version_string() { return FADESIM_VERSION; }

void write_sidecar(const std::string& csv_path, const nlohmann::json& meta) {
  std::ofstream out(csv_path + ".json");
  if (!out) throw IoError("cannot write " + csv_path + ".json");
  out << meta.dump(2) << '\n';
}

}  // namespace fadesim
