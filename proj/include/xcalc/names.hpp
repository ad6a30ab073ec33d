#pragma once

#include <set>
#include <string>

namespace xcalc {

// Fresh-name supply for one reduction/parse session. Sockets draw from
// v0, v1, ..., plugs from g0, g1, ...; a name already marked used is
// skipped, so freshness is relative to everything the session has seen.
// Deterministic: the same sequence of calls yields the same names.
class NameGen {
public:
  NameGen() = default;

  void mark_used(const std::string& name) { used_.insert(name); }

  template <typename It>
  void mark_used(It first, It last) {
    for (; first != last; ++first) used_.insert(*first);
  }

  std::string fresh_socket() { return fresh("v", socket_counter_); }
  std::string fresh_plug() { return fresh("g", plug_counter_); }

  bool is_used(const std::string& name) const { return used_.count(name) > 0; }

private:
  std::string fresh(const char* prefix, unsigned long& counter) {
    for (;;) {
      std::string candidate = prefix + std::to_string(counter++);
      if (used_.insert(candidate).second) return candidate;
    }
  }

  std::set<std::string> used_;
  unsigned long socket_counter_ = 0;
  unsigned long plug_counter_ = 0;
};

}  // namespace xcalc
