#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <string_view>

#include "redsense/simd/kernels.hpp"

namespace redsense::simd {

namespace {

constexpr KernelTable kScalarTable{&scalar::squared_l2, &scalar::squared_l2_rows,
                                   &scalar::add_into, &scalar::scale};
#if defined(REDSENSE_HAVE_AVX2)
constexpr KernelTable kAvx2Table{&avx2::squared_l2, &avx2::squared_l2_rows, &avx2::add_into,
                                 &avx2::scale};
#endif

bool cpu_has_avx2() noexcept {
#if defined(REDSENSE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa probe() noexcept {
  // REDSENSE_SIMD=scalar pins the reference kernels for a whole process.
  if (const char* env = std::getenv("REDSENSE_SIMD"); env && std::string_view(env) == "scalar") {
    return Isa::scalar;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{probe()};
  return isa;
}

const KernelTable& table() { return kernels_for(active().load(std::memory_order_relaxed)); }

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

Isa detected_isa() noexcept {
  static const Isa isa = probe();
  return isa;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

bool force_isa(Isa isa) noexcept {
  if (isa == Isa::avx2 && !cpu_has_avx2()) return false;
  active().store(isa, std::memory_order_relaxed);
  return true;
}

void reset_isa() noexcept { active().store(detected_isa(), std::memory_order_relaxed); }

const KernelTable& kernels_for(Isa isa) {
#if defined(REDSENSE_HAVE_AVX2)
  if (isa == Isa::avx2) return kAvx2Table;
#else
  (void)isa;
#endif
  return kScalarTable;
}

double squared_l2(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return table().squared_l2(a.data(), b.data(), a.size());
}

double l2(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_l2(a, b));
}

void squared_l2_rows(std::span<const double> point, std::span<const double> rows,
                     std::size_t dim, std::span<double> out) {
  assert(point.size() == dim);
  assert(dim == 0 || rows.size() % dim == 0);
  const std::size_t n_rows = dim == 0 ? out.size() : rows.size() / dim;
  assert(out.size() >= n_rows);
  table().squared_l2_rows(point.data(), rows.data(), n_rows, dim, out.data());
}

void add_into(std::span<double> acc, std::span<const double> x) {
  assert(acc.size() == x.size());
  table().add_into(acc.data(), x.data(), acc.size());
}

void scale(std::span<double> v, double s) { table().scale(v.data(), v.size(), s); }

}  // namespace redsense::simd
