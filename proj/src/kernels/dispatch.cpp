#include <atomic>
#include <cstdlib>
#include <string>

#include "acns/kernels.hpp"

namespace acns::kernels {

#if defined(ACNS_HAVE_AVX2)
const Table& avx2_table_impl();
#endif
#if defined(ACNS_HAVE_NEON)
const Table& neon_table_impl();
#endif

const Table* avx2_table() {
#if defined(ACNS_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const Table* neon_table() {
#if defined(ACNS_HAVE_NEON)
  return &neon_table_impl();
#else
  return nullptr;
#endif
}

namespace {

const Table* best_available() {
  if (const Table* t = avx2_table()) return t;
  if (const Table* t = neon_table()) return t;
  return &scalar_table();
}

const Table* by_name(std::string_view name) {
  if (name == "scalar") return &scalar_table();
  if (name == "avx2") return avx2_table();
  if (name == "neon") return neon_table();
  if (name == "auto") return best_available();
  return nullptr;
}

const Table* initial_choice() {
  if (const char* env = std::getenv("ACNS_KERNELS")) {
    if (const Table* t = by_name(env)) return t;
  }
  return best_available();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{initial_choice()};
  return table;
}

}  // namespace

const Table& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const Table* t = by_name(name);
  if (t == nullptr) return false;
  current().store(t, std::memory_order_release);
  return true;
}

std::vector<std::string_view> available() {
  std::vector<std::string_view> out{"scalar"};
  if (avx2_table()) out.emplace_back("avx2");
  if (neon_table()) out.emplace_back("neon");
  return out;
}

}  // namespace acns::kernels
