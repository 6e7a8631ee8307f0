#pragma once
// Delimited-text export of simulated paths plus small file helpers.  All
// floating-point fields are printed with "%.17g", so identical in-memory
// paths always serialize to byte-identical text.

#include <string>
#include <vector>

#include "ssmp/levy_sim.hpp"
#include "ssmp/sample_path.hpp"

namespace ssmp {

// Header row "path_id,time,value,absorbed"; one row per path node in path
// order.  The absorbed flag is 0 before a path's absorption time and 1 from
// the absorption node on (always 0 for paths that never hit zero).
std::string paths_to_csv(const std::vector<SamplePath>& paths);

// Same columns for log-magnitude paths.  Killed paths get one extra row at
// the kill time with value "-inf" and flag 1; all other rows carry flag 0.
std::string levy_paths_to_csv(const std::vector<LevyPath>& paths);

// Throw std::runtime_error naming the file on any I/O failure.
void write_text_file(const std::string& file_path,
                     const std::string& content);
std::string read_text_file(const std::string& file_path);

}  // namespace ssmp
