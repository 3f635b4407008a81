#pragma once

// Data-parallel inner loops shared by the descriptor, clustering and metric code.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2+FMA
// variant compiled in its own translation unit. The table is picked once at
// first use from CPUID; EIGENTRAJ_KERNELS=scalar|avx2 overrides the choice.
// Variants agree to rounding, not bit for bit (different summation order).

#include <cstddef>
#include <string_view>

namespace eigentraj::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // out (rows x rows) = A * A^T for row-major A (rows x cols). Both triangles are written.
  void (*gram)(const double* a, std::size_t rows, std::size_t cols, double* out);

  // out (n x m, row-major) = squared Euclidean distance between each of n points and
  // each of m centers; points and centers are row-major with `dim` columns.
  void (*squared_distances)(const double* points, std::size_t n, const double* centers, std::size_t m,
                            std::size_t dim, double* out);

  // out[t] = |a_t - b_t| for interleaved 2D point arrays (x0, y0, x1, y1, ...).
  void (*point_distances)(const double* a, const double* b, std::size_t npoints, double* out);
};

// The table in use for this process.
const KernelTable& active();

// A specific variant, or nullptr when it is not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa);

bool supported(Isa isa);
std::string_view name(Isa isa);

namespace scalar {
extern const KernelTable table;
}

#if defined(EIGENTRAJ_HAVE_AVX2)
namespace avx2 {
extern const KernelTable table;
}
#endif

}  // namespace eigentraj::kernels
