#include "ssmp/path_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ssmp {
namespace {

void append_number(std::string* out, double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  *out += buffer;
}

void append_row(std::string* out, size_t path_id, double time, double value,
                bool flagged) {
  *out += std::to_string(path_id);
  *out += ',';
  append_number(out, time);
  *out += ',';
  append_number(out, value);
  *out += ',';
  *out += flagged ? '1' : '0';
  *out += '\n';
}

}  // namespace

std::string paths_to_csv(const std::vector<SamplePath>& paths) {
  std::string out = "path_id,time,value,absorbed\n";
  for (size_t id = 0; id < paths.size(); ++id) {
    const SamplePath& path = paths[id];
    for (size_t k = 0; k < path.times.size(); ++k) {
      const bool flagged =
          path.absorbed && path.times[k] >= path.absorption_time;
      append_row(&out, id, path.times[k], path.values[k], flagged);
    }
  }
  return out;
}

std::string levy_paths_to_csv(const std::vector<LevyPath>& paths) {
  std::string out = "path_id,time,value,absorbed\n";
  for (size_t id = 0; id < paths.size(); ++id) {
    const LevyPath& path = paths[id];
    for (size_t k = 0; k < path.times.size(); ++k)
      append_row(&out, id, path.times[k], path.values[k], false);
    if (path.killed)
      append_row(&out, id, path.kill_time,
                 -std::numeric_limits<double>::infinity(), true);
  }
  return out;
}

void write_text_file(const std::string& file_path,
                     const std::string& content) {
  std::ofstream out(file_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open \"" + file_path +
                                     "\" for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw std::runtime_error("write to \"" + file_path + "\" failed");
}

std::string read_text_file(const std::string& file_path) {
  std::ifstream in(file_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open \"" + file_path + "\"");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read from \"" + file_path +
                                         "\" failed");
  return text.str();
}

}  // namespace ssmp
