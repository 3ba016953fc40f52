#include "vri/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace vri::kernels {

const Backend* avx2_backend_impl();  // defined in kernels_avx2.cpp

namespace {

const Backend* detect() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) {
    if (const Backend* b = avx2_backend_impl()) return b;
  }
#endif
  return &scalar_backend();
}

std::atomic<const Backend*> g_active{nullptr};

}  // namespace

const Backend& active() {
  const Backend* b = g_active.load(std::memory_order_acquire);
  if (b == nullptr) {
    b = detect();
    g_active.store(b, std::memory_order_release);
  }
  return *b;
}

void force(const std::string& name) {
  if (name == "auto") {
    g_active.store(detect(), std::memory_order_release);
    return;
  }
  if (name == "scalar") {
    g_active.store(&scalar_backend(), std::memory_order_release);
    return;
  }
  if (name == "avx2") {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) {
      if (const Backend* b = avx2_backend_impl()) {
        g_active.store(b, std::memory_order_release);
        return;
      }
    }
#endif
    throw std::invalid_argument("avx2 backend not available on this machine");
  }
  throw std::invalid_argument("unknown kernel backend: " + name);
}

std::vector<std::string> available() {
  std::vector<std::string> names{"scalar"};
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && avx2_backend_impl() != nullptr) {
    names.emplace_back("avx2");
  }
#endif
  return names;
}

}  // namespace vri::kernels
