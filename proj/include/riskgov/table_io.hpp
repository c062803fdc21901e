#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskgov/errors.hpp"
#include "riskgov/version.hpp"

namespace riskgov {

// Shortest round-trip decimal form; locale-free and deterministic.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Comma-separated table with a commented header block recording the resolved
// configuration and master seed, so any output file can be regenerated from
// its own header.
class TableWriter {
 public:
  TableWriter(const std::string& path, const std::vector<std::string>& columns,
              const nlohmann::json& config, std::uint64_t seed)
      : out_(path, std::ios::binary) {
    if (!out_) throw parse_error("cannot open output file '" + path + "'");
    out_ << "# riskgov " << kVersion << "\n";
    out_ << "# seed: " << seed << "\n";
    out_ << "# config: " << config.dump() << "\n";
    out_ << "# columns: " << join(columns) << "\n";
    out_ << join(columns) << "\n";
  }

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    (write_cell(cells, first), ...);
    out_ << "\n";
  }

 private:
  static std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) s += ',';
      s += parts[i];
    }
    return s;
  }

  template <class T>
  void write_cell(const T& v, bool& first) {
    if (!first) out_ << ',';
    first = false;
    if constexpr (std::is_same_v<T, double>)
      out_ << format_double(v);
    else if constexpr (std::is_same_v<T, bool>)
      out_ << (v ? 1 : 0);
    else
      out_ << v;
  }

  std::ofstream out_;
};

}  // namespace riskgov
