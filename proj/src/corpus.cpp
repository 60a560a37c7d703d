#include "iacsmell/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "iacsmell/error.hpp"
#include "iacsmell/parsers.hpp"

namespace iacsmell {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<fs::path> list_iac_files(const fs::path& root) {
  std::vector<fs::path> out;
  if (fs::is_regular_file(root)) return {root};
  if (!fs::is_directory(root)) throw Error("no such file or directory: " + root.string());
  for (const auto& entry :
       fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied)) {
    if (!entry.is_regular_file()) continue;
    if (language_from_extension(entry.path().string())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.generic_string() < b.generic_string();
  });
  return out;
}

std::string relative_id(const fs::path& path, const fs::path& base) {
  std::error_code ec;
  fs::path rel = fs::relative(path, base, ec);
  if (ec || rel.empty() || rel.native().starts_with("..")) return path.generic_string();
  return rel.generic_string();
}

std::vector<ScannedFile> scan_files(const std::vector<fs::path>& files, const RuleConfig& cfg,
                                    unsigned jobs, std::optional<IacLanguage> forced) {
  std::vector<ScannedFile> out(files.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::size_t error_index = files.size();
  std::mutex error_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        ScannedFile f;
        f.path = files[i];
        f.content = read_file(files[i]);
        const std::string p = files[i].generic_string();
        f.script = forced ? parse_as(*forced, f.content, p) : parse_any(f.content, p);
        f.detections = detect(f.script, cfg);
        out[i] = std::move(f);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (i < error_index) {
          error_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace iacsmell
