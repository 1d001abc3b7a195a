#include "percap/parallel.hpp"

#include <cstdlib>
#include <string>

namespace percap {

unsigned worker_count() {
  if (const char* env = std::getenv("PERCAP_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // Malformed values fall through to the hardware default.
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

}  // namespace percap
