#pragma once

#include <cstdint>

namespace ncguard::cost {

/// Per-thread tallies of the operations the overhead model prices.
struct Counters {
  std::uint64_t field_mults = 0;
  std::uint64_t modexps = 0;

  Counters operator-(const Counters& o) const {
    return {field_mults - o.field_mults, modexps - o.modexps};
  }
};

inline Counters& counters() {
  thread_local Counters c;
  return c;
}

inline void count_mult() { ++counters().field_mults; }
inline void count_exp() { ++counters().modexps; }

/// Captures the counters at construction; `elapsed()` is the delta since then.
class Scope {
 public:
  Scope() : start_(counters()) {}
  Counters elapsed() const { return counters() - start_; }

 private:
  Counters start_;
};

}  // namespace ncguard::cost
