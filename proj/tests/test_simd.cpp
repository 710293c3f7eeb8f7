#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "redsense/simd/kernels.hpp"

using namespace redsense::simd;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double naive_sq(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (long double)(a[i] - b[i]) * (a[i] - b[i]);
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("scalar kernels match naive arithmetic") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 300u}) {
    const auto a = random_vector(rng, n);
    const auto b = random_vector(rng, n);
    CHECK(scalar::squared_l2(a.data(), b.data(), n) == doctest::Approx(naive_sq(a, b)).epsilon(1e-12));
  }
  const double a[] = {0, 0};
  const double b[] = {3, 4};
  CHECK(scalar::squared_l2(a, b, 2) == 25.0);
}

TEST_CASE("every available isa agrees with the scalar reference") {
  std::vector<Isa> isas{Isa::scalar};
  if (detected_isa() == Isa::avx2) isas.push_back(Isa::avx2);
  MESSAGE("detected isa: " << isa_name(detected_isa()));
  std::mt19937_64 rng(9);
  for (Isa isa : isas) {
    const auto& k = kernels_for(isa);
    for (std::size_t dim : {1u, 2u, 3u, 5u, 8u, 13u, 64u, 385u}) {
      const auto p = random_vector(rng, dim);
      const std::size_t rows = 7;
      const auto m = random_vector(rng, dim * rows);
      std::vector<double> out(rows), ref(rows);
      k.squared_l2_rows(p.data(), m.data(), rows, dim, out.data());
      scalar::squared_l2_rows(p.data(), m.data(), rows, dim, ref.data());
      for (std::size_t r = 0; r < rows; ++r) CHECK(out[r] == doctest::Approx(ref[r]).epsilon(1e-12));
      CHECK(k.squared_l2(p.data(), m.data(), dim) == doctest::Approx(scalar::squared_l2(p.data(), m.data(), dim)).epsilon(1e-12));

      auto acc = random_vector(rng, dim);
      auto acc_ref = acc;
      k.add_into(acc.data(), p.data(), dim);
      scalar::add_into(acc_ref.data(), p.data(), dim);
      CHECK(acc == acc_ref);
      k.scale(acc.data(), dim, 0.25);
      scalar::scale(acc_ref.data(), dim, 0.25);
      CHECK(acc == acc_ref);
    }
  }
}

TEST_CASE("force_isa pins dispatch") {
  REQUIRE(force_isa(Isa::scalar));
  CHECK(active_isa() == Isa::scalar);
  const std::vector<double> a{1, 1, 1};
  const std::vector<double> b{2, 2, 2};
  CHECK(l2(a, b) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  reset_isa();
  CHECK(active_isa() == detected_isa());
  CHECK(l2(a, b) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
}
