#include "rovib/manifest.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

namespace rovib {

std::uint64_t fnv1a_hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file for hashing: " + path);
  std::uint64_t h = 14695981039346656037ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

void RunManifest::write(const std::string& path) const {
  nlohmann::json j;
  j["version"] = version;
  j["command"] = command;
  j["model_path"] = model_path;
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << model_hash;
  j["model_hash_fnv1a"] = hex.str();
  j["params"] = params;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["timestamp_informational"] = buf;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write manifest: " + path);
  out << j.dump(1) << "\n";
}

std::string format_cm1(double e) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << e;
  return ss.str();
}

void write_pipeline_csv(const std::vector<PipelineRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write results csv: " + path);
  out << "schedule_point,tau_au,n_st,reference,omega_size,raw_energy_cm1,"
         "combined_energy_cm1,label,exact_energy_cm1,error_cm1\n";
  for (const auto& r : rows) {
    out << r.point << "," << format_cm1(r.tau_au) << "," << r.n_st << "," << r.reference << ","
        << r.omega_size << "," << format_cm1(r.raw_energy_cm1) << ","
        << format_cm1(r.combined_energy_cm1) << "," << r.label << ",";
    if (r.exact_energy_cm1) out << format_cm1(*r.exact_energy_cm1);
    out << ",";
    if (r.error_cm1) out << format_cm1(*r.error_cm1);
    out << "\n";
  }
}

void write_baseline_csv(const std::vector<BaselineRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write baseline csv: " + path);
  out << "method,reference,omega_size,energy_cm1,std_cm1,label\n";
  for (const auto& r : rows) {
    out << r.method << "," << r.reference << "," << r.omega_size << ","
        << format_cm1(r.energy_cm1) << ",";
    if (r.std_cm1 >= 0) out << format_cm1(r.std_cm1);
    out << "," << r.label << "\n";
  }
}

}  // namespace rovib
