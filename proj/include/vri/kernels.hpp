#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vri::kernels {

// Data-parallel kernels used by the inner loops of the pipeline.
// Each entry has a scalar reference implementation and may have SIMD
// variants; the active backend is chosen once at startup from CPU
// features and can be overridden with force().
//
// Reductions accumulate left-to-right within a backend, so results are
// deterministic for a fixed backend. Different backends may differ in
// the last bits (different summation order); equivalence tests bound
// that difference.
struct Backend {
  const char* name;

  double (*sum)(const double* x, std::size_t n);
  double (*sum_sq)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);

  // x[i] *= s
  void (*scale)(double* x, std::size_t n, double s);

  // out[i] = |x[i]| / d[i] where d[i] > 0, else 0
  void (*abs_div)(const double* x, const double* d, double* out, std::size_t n);

  std::size_t (*count_ge)(const double* x, std::size_t n, double q);

  // Appends base + i for every x[i] >= q, in increasing i. Caller must
  // have reserved count_ge() slots at out. Returns number written.
  std::size_t (*collect_ge)(const double* x, std::size_t n, double q,
                            std::size_t base, std::size_t* out);

  // sum of (y[i] - c0*b0[i] - c1*b1[i] - c2*b2[i])^2; b2 may be null
  // (then c2 is ignored). Used by DFA window detrending.
  double (*detrend_sq)(const double* y, const double* b0, const double* b1,
                       const double* b2, double c0, double c1, double c2,
                       std::size_t n);
};

const Backend& scalar_backend();

// Active backend: "avx2" when the CPU supports it, else "scalar".
const Backend& active();

// Force a backend by name: "auto", "scalar", "avx2".
// Throws std::invalid_argument for unknown names or unavailable backends.
void force(const std::string& name);

std::vector<std::string> available();

}  // namespace vri::kernels
