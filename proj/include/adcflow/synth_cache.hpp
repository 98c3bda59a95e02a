#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "adcflow/synth.hpp"

namespace adcflow {

struct CacheKey {
  int m = 0;
  int r = 0;
  std::uint64_t config_hash = 0;
  std::uint64_t model_hash = 0;

  auto operator<=>(const CacheKey&) const = default;
};

// One record per key in a line-delimited text file: tagged key=value
// pairs with hexfloat doubles and a trailing content hash. Corrupt lines
// are discarded with a warning and resynthesized. Writes are serialized;
// reads hit the in-memory snapshot loaded at open.
class SynthCache {
 public:
  explicit SynthCache(std::string path);

  std::optional<SynthResult> find(const CacheKey& key) const;
  void store(const CacheKey& key, const SynthResult& result);

  std::size_t size() const;
  int discarded_records() const { return discarded_; }
  const std::string& path() const { return path_; }

  static std::string serialize_record(const CacheKey& key,
                                      const SynthResult& result);
  static std::optional<std::pair<CacheKey, SynthResult>> parse_record(
      const std::string& line);

 private:
  void load();

  std::string path_;
  mutable std::mutex mu_;
  std::map<CacheKey, SynthResult> entries_;
  int discarded_ = 0;
};

// Cache-through synthesis keyed on (m, r, config hash, model hash).
SynthResult get_or_synthesize(const MdacSpec& spec, const DeviceModel& dm,
                              const SynthOptions& opts, SynthCache& cache,
                              bool* cache_hit = nullptr);

}  // namespace adcflow
