#include "floquet/opalg.hpp"

#include "floquet/error.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>

namespace floquet::opalg {

std::string cache_directory() {
  const char* dir = std::getenv("FLOQUET_DPT_CACHE_DIR");
  return dir ? std::string(dir) : std::string();
}

namespace {

std::filesystem::path cache_file(TableKind kind, int r) {
  return std::filesystem::path(cache_directory()) /
         (to_string(kind) + "_order" + std::to_string(r) + ".v1.txt");
}

std::unique_ptr<CoefficientTable> load_from_disk(TableKind kind, int r) {
  if (cache_directory().empty()) return nullptr;
  std::ifstream in(cache_file(kind, r));
  if (!in) return nullptr;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    auto t = std::make_unique<CoefficientTable>(deserialize(buf.str()));
    if (t->kind != kind || t->order != r) return nullptr;
    return t;
  } catch (const ValidationError&) {
    return nullptr;  // stale or foreign file: recompute
  }
}

void store_to_disk(const CoefficientTable& t) {
  if (cache_directory().empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(cache_directory(), ec);
  const auto path = cache_file(t.kind, t.order);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << serialize(t);
  }
  std::filesystem::rename(tmp, path, ec);
}

class TableCache {
public:
  static TableCache& instance() {
    static TableCache c;
    return c;
  }

  const CoefficientTable& get(TableKind kind, int r) {
    if (r < 1) throw ValidationError("coefficient table order must be >= 1");
    const Key key{kind, r};
    {
      std::shared_lock lock(mutex_);
      if (auto it = tables_.find(key); it != tables_.end()) return *it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = tables_.find(key); it != tables_.end()) return *it->second;
    auto table = load_from_disk(kind, r);
    if (!table) {
      table = std::make_unique<CoefficientTable>(kind == TableKind::Heff ? compute_heff_table(r)
                                                                         : compute_w_table(r));
      store_to_disk(*table);
    }
    return *tables_.emplace(key, std::move(table)).first->second;
  }

private:
  using Key = std::pair<TableKind, int>;
  std::shared_mutex mutex_;
  std::map<Key, std::unique_ptr<CoefficientTable>> tables_;
};

}  // namespace

const CoefficientTable& coefficient_table(TableKind kind, int r) {
  return TableCache::instance().get(kind, r);
}
const CoefficientTable& heff_table(int r) { return coefficient_table(TableKind::Heff, r); }
const CoefficientTable& w_table(int r) { return coefficient_table(TableKind::W, r); }

}  // namespace floquet::opalg
