#include "endocapm/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "endocapm/errors.hpp"

namespace endocapm {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string sweep_records_to_csv(const std::vector<SweepRecord>& records) {
  std::string out =
      "gamma,n_assets,hhi,mu_max_over_r,mu_min_over_r,n_starts,"
      "converged_max,converged_min,seed\n";
  for (const SweepRecord& rec : records) {
    out += format_double(rec.gamma);
    out += ',';
    out += std::to_string(rec.n_assets);
    out += ',';
    out += format_double(rec.hhi);
    out += ',';
    out += format_double(rec.mu_max_over_r);
    out += ',';
    out += format_double(rec.mu_min_over_r);
    out += ',';
    out += std::to_string(rec.n_starts);
    out += ',';
    out += rec.converged_max ? "true" : "false";
    out += ',';
    out += rec.converged_min ? "true" : "false";
    out += ',';
    out += std::to_string(rec.seed);
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream stream(tmp, std::ios::binary | std::ios::trunc);
    if (!stream) {
      throw Error(ErrorCode::ConfigError, "cannot open " + tmp.string() + " for writing");
    }
    stream.write(content.data(), static_cast<std::streamsize>(content.size()));
    stream.flush();
    if (!stream) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::ConfigError, "failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::ConfigError,
                "cannot move output into place at " + target.string());
  }
}

}  // namespace endocapm
