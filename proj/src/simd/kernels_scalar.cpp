#include "redsense/simd/kernels.hpp"

namespace redsense::simd::scalar {

double squared_l2(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void squared_l2_rows(const double* point, const double* rows, std::size_t n_rows,
                     std::size_t dim, double* out) {
  for (std::size_t r = 0; r < n_rows; ++r) out[r] = squared_l2(point, rows + r * dim, dim);
}

void add_into(double* acc, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void scale(double* v, std::size_t n, double s) {
  for (std::size_t i = 0; i < n; ++i) v[i] *= s;
}

}  // namespace redsense::simd::scalar
