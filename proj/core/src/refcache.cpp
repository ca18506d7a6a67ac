#include "mlp/refcache.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>

namespace mlp {

namespace fs = std::filesystem;

fs::path cache_directory() {
  if (const char* env = std::getenv("MLP_CACHE_DIR"); env && *env)
    return fs::path(env);
  if (const char* home = std::getenv("HOME"); home && *home)
    return fs::path(home) / ".cache" / "mlp";
  return fs::path(".mlp_cache");
}

fs::path cache_file(uint64_t key, double dt_ref) {
  uint64_t dt_bits = 0;
  std::memcpy(&dt_bits, &dt_ref, sizeof(dt_bits));
  char name[48];
  std::snprintf(name, sizeof(name), "ref-%016llx-%016llx.bin",
                static_cast<unsigned long long>(key),
                static_cast<unsigned long long>(dt_bits));
  return cache_directory() / name;
}

namespace {

void warn_corrupt(const fs::path& path) {
  std::fprintf(stderr, "mlp: reference cache file %s is unusable; recomputing\n",
               path.string().c_str());
}

} // namespace

std::optional<std::vector<Vec>> load_reference(uint64_t key, double dt_ref,
                                               size_t nodes, int dim) {
  const fs::path path = cache_file(key, dt_ref);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;

  uint64_t file_key = 0, file_nodes = 0;
  double file_dt = 0.0;
  in.read(reinterpret_cast<char*>(&file_key), sizeof(file_key));
  in.read(reinterpret_cast<char*>(&file_dt), sizeof(file_dt));
  in.read(reinterpret_cast<char*>(&file_nodes), sizeof(file_nodes));
  if (!in || file_key != key || file_dt != dt_ref || file_nodes != nodes) {
    warn_corrupt(path);
    return std::nullopt;
  }

  std::vector<Vec> states(nodes, Vec(dim));
  std::vector<double> row(static_cast<size_t>(dim) * 2);
  for (size_t n = 0; n < nodes; ++n) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) {
      warn_corrupt(path);
      return std::nullopt;
    }
    for (int j = 0; j < dim; ++j)
      states[n](j) = Complex(row[2 * j], row[2 * j + 1]);
  }
  if (in.peek() != std::ifstream::traits_type::eof()) {
    warn_corrupt(path);
    return std::nullopt;
  }
  return states;
}

void store_reference(uint64_t key, double dt_ref,
                     const std::vector<Vec>& states) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);

  std::error_code ec;
  fs::create_directories(cache_directory(), ec);
  const fs::path path = cache_file(key, dt_ref);
  fs::path tmp = path;
  tmp += ".tmp";

  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return; // cache is best-effort; the caller recomputes anyway
    const uint64_t nodes = states.size();
    out.write(reinterpret_cast<const char*>(&key), sizeof(key));
    out.write(reinterpret_cast<const char*>(&dt_ref), sizeof(dt_ref));
    out.write(reinterpret_cast<const char*>(&nodes), sizeof(nodes));
    std::vector<double> row;
    for (const Vec& v : states) {
      row.resize(static_cast<size_t>(v.size()) * 2);
      for (int j = 0; j < v.size(); ++j) {
        row[2 * j] = v(j).real();
        row[2 * j + 1] = v(j).imag();
      }
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) {
      fs::remove(tmp, ec);
      return;
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) fs::remove(tmp, ec);
}

} // namespace mlp
