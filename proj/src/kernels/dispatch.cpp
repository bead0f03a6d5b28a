#include "wadg/kernels.hpp"

#include "wadg/errors.hpp"

#include <atomic>

namespace wadg::kernels {

namespace {

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(WADG_BUILD_AVX2) && (defined(__x86_64__) || defined(_M_X64))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(WADG_BUILD_NEON)
      return true; // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

std::atomic<const VTable*> g_active{&detail::scalar_vtable};
std::atomic<Backend> g_active_backend{Backend::scalar};

struct AutoSelect {
  AutoSelect() { select_auto(); }
};
const AutoSelect g_auto_select;

} // namespace

const VTable& table(Backend b) {
  if (!available(b))
    throw config_error("kernel backend not available on this machine: " + name(b));
  switch (b) {
    case Backend::scalar:
      return detail::scalar_vtable;
    case Backend::avx2:
#if defined(WADG_BUILD_AVX2)
      return detail::avx2_vtable;
#else
      break;
#endif
    case Backend::neon:
#if defined(WADG_BUILD_NEON)
      return detail::neon_vtable;
#else
      break;
#endif
  }
  throw config_error("kernel backend not compiled in: " + name(b));
}

bool available(Backend b) { return cpu_supports(b); }

Backend active() { return g_active_backend.load(std::memory_order_relaxed); }

void select(Backend b) {
  const VTable& t = table(b); // validates availability
  g_active.store(&t, std::memory_order_relaxed);
  g_active_backend.store(b, std::memory_order_relaxed);
}

void select_auto() {
  if (available(Backend::avx2)) {
    select(Backend::avx2);
  } else if (available(Backend::neon)) {
    select(Backend::neon);
  } else {
    select(Backend::scalar);
  }
}

std::string name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

Backend backend_from_name(const std::string& name) {
  if (name == "scalar") return Backend::scalar;
  if (name == "avx2") return Backend::avx2;
  if (name == "neon") return Backend::neon;
  if (name == "auto") {
    if (available(Backend::avx2)) return Backend::avx2;
    if (available(Backend::neon)) return Backend::neon;
    return Backend::scalar;
  }
  throw config_error("unknown kernel backend name: " + name);
}

std::vector<Backend> compiled_backends() {
  std::vector<Backend> out{Backend::scalar};
#if defined(WADG_BUILD_AVX2)
  out.push_back(Backend::avx2);
#endif
#if defined(WADG_BUILD_NEON)
  out.push_back(Backend::neon);
#endif
  return out;
}

} // namespace wadg::kernels
