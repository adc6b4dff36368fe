#include "mdi_cli/atomic_output.hpp"

#include <fstream>
#include <stdexcept>
#include <system_error>

namespace mdi::cli {

namespace fs = std::filesystem;

void commit_files(const std::vector<PendingFile>& files) {
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& f : files) {
    fs::path tmp = f.path;
    tmp += ".partial";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      cleanup();
      throw std::runtime_error("cannot write " + f.path.string());
    }
    temps.push_back(tmp);
    out << f.contents;
    out.close();
    if (!out) {
      cleanup();
      throw std::runtime_error("write failed for " + f.path.string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::error_code ec;
    fs::rename(temps[i], files[i].path, ec);
    if (ec) {
      cleanup();
      throw std::runtime_error("cannot move output into place at " + files[i].path.string() + ": " + ec.message());
    }
  }
}

}  // namespace mdi::cli
