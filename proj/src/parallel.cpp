#include "fqrp/parallel.hpp"

namespace fqrp {

namespace {
std::atomic<unsigned> g_workers{0};
}

void set_worker_count(unsigned workers) { g_workers = workers; }

unsigned worker_count() {
  const unsigned w = g_workers;
  if (w != 0) return w;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace fqrp
