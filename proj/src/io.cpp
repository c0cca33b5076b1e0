#include "chainmix/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace chainmix {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir =
      target.has_parent_path() ? target.parent_path() : fs::path(".");
  const fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write_text: cannot open " +
                                       tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("atomic_write_text: write failed");
  }
  fs::rename(tmp, target);
}

std::string tv_profile_csv(const TVProfile& profile) {
  profile.validate();
  const bool with_se = profile.kind != ProfileKind::exact;
  std::string out = with_se ? "time,value,se\n" : "time,value\n";
  for (std::size_t i = 0; i < profile.times.size(); ++i) {
    out += format_double(profile.times[i]);
    out += ',';
    out += format_double(profile.values[i]);
    if (with_se) {
      out += ',';
      out += format_double(profile.se[i]);
    }
    out += '\n';
  }
  return out;
}

std::string prob_vector_csv(const ProbVector& p) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < p.p.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(p.p[i]);
    out += '\n';
  }
  return out;
}

std::string jump_path_csv(const JumpPath<EpiState>& path) {
  std::string out = "time,x1,x2\n";
  auto row = [&out](double t, const EpiState& s) {
    out += format_double(t);
    out += ',';
    out += std::to_string(s.x1);
    out += ',';
    out += std::to_string(s.x2);
    out += '\n';
  };
  row(0.0, path.states.at(0));
  for (std::size_t i = 0; i < path.times.size(); ++i)
    row(path.times[i], path.states[i + 1]);
  return out;
}

}  // namespace chainmix
