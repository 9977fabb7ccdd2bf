#include <atomic>
#include <cstdlib>

#include "hetrinet/kernels.hpp"

namespace hetrinet::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Table* resolve(const std::string& mode) {
  if (mode == "scalar") return &scalar_table();
  if (mode == "avx2") {
#ifdef HETRINET_HAVE_AVX2
    if (avx2_table() != nullptr && cpu_has_avx2()) return avx2_table();
#endif
    throw Error("kernels: avx2 variant requested but not available");
  }
  if (mode == "auto" || mode.empty()) {
#ifdef HETRINET_HAVE_AVX2
    if (avx2_table() != nullptr && cpu_has_avx2()) return avx2_table();
#endif
    return &scalar_table();
  }
  throw Error("kernels: unknown variant '" + mode + "' (scalar|avx2|auto)");
}

std::atomic<const Table*> g_active{nullptr};

const Table* init_from_env() {
  const char* env = std::getenv("HETRINET_KERNELS");
  return resolve(env != nullptr ? env : "auto");
}

}  // namespace

#ifndef HETRINET_HAVE_AVX2
const Table* avx2_table() { return nullptr; }
#endif

const Table& active() {
  const Table* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = init_from_env();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

std::string select(const std::string& mode) {
  const Table* t = resolve(mode);
  g_active.store(t, std::memory_order_release);
  return t->name;
}

std::string active_name() { return active().name; }

}  // namespace hetrinet::kernels
