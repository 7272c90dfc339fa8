#pragma once

#include <map>
#include <memory>
#include <mutex>

namespace hybridq::detail {

// Thread-safe memo for immutable, query-free planning results.
template <class Key, class Value>
class Memo {
 public:
  template <class Make>
  std::shared_ptr<const Value> get(const Key& key, Make&& make) {
    {
      std::lock_guard lock(mu_);
      if (auto it = map_.find(key); it != map_.end()) return it->second;
    }
    auto value = std::make_shared<const Value>(make());
    std::lock_guard lock(mu_);
    return map_.emplace(key, std::move(value)).first->second;
  }

 private:
  std::mutex mu_;
  std::map<Key, std::shared_ptr<const Value>> map_;
};

}  // namespace hybridq::detail
