#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mdi::cli {

struct PendingFile {
  std::filesystem::path path;
  std::string contents;
};

/// Writes every file to a temporary sibling first and renames them into place
/// only after all writes succeeded. On failure the temporaries are removed
/// and std::runtime_error names the offending path.
void commit_files(const std::vector<PendingFile>& files);

}  // namespace mdi::cli
