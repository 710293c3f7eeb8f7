#pragma once

// Dense double-precision kernels used by the distance and centroid code.
//
// Every kernel has a portable scalar reference in redsense::simd::scalar and,
// on x86-64 builds, an AVX2/FMA variant in redsense::simd::avx2. The public
// entry points below route through a kernel table chosen once at startup from
// the CPU's reported features; tests can pin the table with force_isa().
// Variants agree to within rounding (different summation order), never
// bit-for-bit, so anything that must be reproducible across machines should
// pin the ISA.

#include <cstddef>
#include <span>
#include <string_view>

namespace redsense::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

// Best ISA supported by both the build and the running CPU.
Isa detected_isa() noexcept;
// ISA currently used by the dispatching entry points.
Isa active_isa() noexcept;
// Pins dispatch to `isa`. Returns false (and leaves dispatch unchanged) when
// the ISA is unavailable.
bool force_isa(Isa isa) noexcept;
// Restores dispatch to detected_isa().
void reset_isa() noexcept;

struct KernelTable {
  double (*squared_l2)(const double* a, const double* b, std::size_t n);
  void (*squared_l2_rows)(const double* point, const double* rows, std::size_t n_rows,
                          std::size_t dim, double* out);
  void (*add_into)(double* acc, const double* x, std::size_t n);
  void (*scale)(double* v, std::size_t n, double s);
};

const KernelTable& kernels_for(Isa isa);

namespace scalar {
double squared_l2(const double* a, const double* b, std::size_t n);
void squared_l2_rows(const double* point, const double* rows, std::size_t n_rows,
                     std::size_t dim, double* out);
void add_into(double* acc, const double* x, std::size_t n);
void scale(double* v, std::size_t n, double s);
}  // namespace scalar

#if defined(REDSENSE_HAVE_AVX2)
namespace avx2 {
double squared_l2(const double* a, const double* b, std::size_t n);
void squared_l2_rows(const double* point, const double* rows, std::size_t n_rows,
                     std::size_t dim, double* out);
void add_into(double* acc, const double* x, std::size_t n);
void scale(double* v, std::size_t n, double s);
}  // namespace avx2
#endif

// Dispatching entry points. Sizes are checked by the callers; these assume
// a.size() == b.size().
double squared_l2(std::span<const double> a, std::span<const double> b);
double l2(std::span<const double> a, std::span<const double> b);
// out[r] = ||point - rows[r]||^2 for a row-major matrix of rows.size()/dim rows.
void squared_l2_rows(std::span<const double> point, std::span<const double> rows,
                     std::size_t dim, std::span<double> out);
void add_into(std::span<double> acc, std::span<const double> x);
void scale(std::span<double> v, double s);

}  // namespace redsense::simd
