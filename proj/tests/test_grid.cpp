#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "wmlab/grid.hpp"

using namespace wmlab;

namespace {

// Independent oracle: direct O(N^2) quadrature of the transform sum.
cplx direct_dft_1d(const SampledFunction& f, double xi) {
  const Grid& g = f.grid;
  cplx acc(0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    double x = g.coord(static_cast<int>(j));
    acc += f.at(j, 0) * std::exp(cplx(0.0, -2.0 * M_PI * x * xi));
  }
  return acc * g.spacing();
}

}  // namespace

TEST_CASE("make_grid node sets and preconditions") {
  Grid g = make_grid(1, 8, 1.0);
  CHECK(g.coord(0) == doctest::Approx(-0.5));
  CHECK(g.coord(7) == doctest::Approx(0.375));
  CHECK(g.freq(0) == doctest::Approx(-4.0));
  CHECK(g.freq(7) == doctest::Approx(3.0));
  CHECK(g.spacing() == doctest::Approx(0.125));

  Grid g2 = make_grid(2, 16, 2.0);
  CHECK(g2.size() == 256);
  CHECK(g2.freq(9) - g2.freq(8) == doctest::Approx(0.5));

  CHECK_THROWS(make_grid(1, 7, 1.0));
  CHECK_THROWS(make_grid(1, 12, 1.0));  // even but not a power of two
  CHECK_THROWS(make_grid(1, 8, -1.0));
  CHECK_THROWS(make_grid(4, 8, 1.0));
  CHECK_THROWS(make_grid(1, 4, 1.0));
}

TEST_CASE("zero maps to zero both ways") {
  Grid g = make_grid(1, 64, 4.0);
  SampledFunction f(g, 1);
  auto F = forward_dft(f);
  for (auto& v : F.values) CHECK(std::abs(v) == 0.0);
  SampledSpectrum Z(g, 1);
  auto z = inverse_dft(Z);
  for (auto& v : z.values) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("round trip and Parseval, 1-d and 2-d") {
  for (int n : {1, 2}) {
    int N = (n == 1) ? 256 : 64;
    Grid g = make_grid(n, N, 3.0);
    Rng rng(42 + n);
    SampledFunction f(g, 2);
    for (auto& v : f.values) v = rng.cnormal();

    auto F = forward_dft(f);
    auto back = inverse_dft(F);
    double maxerr = 0.0, maxf = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      maxerr = std::max(maxerr, std::abs(back.values[i] - f.values[i]));
      maxf = std::max(maxf, std::abs(f.values[i]));
    }
    CHECK(maxerr <= 1e-12 * maxf);

    double hn = std::pow(g.spacing(), n);
    double Ln = std::pow(g.box_length(), n);
    double space = 0.0, freq = 0.0;
    for (auto& v : f.values) space += std::norm(v);
    for (auto& v : F.values) freq += std::norm(v);
    space *= hn;
    freq /= Ln;
    CHECK(std::fabs(space - freq) <= 1e-10 * space);
  }
}

TEST_CASE("Gaussian is its own transform under this convention") {
  Grid g = make_grid(1, 4096, 40.0);
  auto f = sample(FunctionSpec::gaussian(1.0), g, 1);
  auto F = forward_dft(f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double xi = g.freq(static_cast<int>(i));
    if (std::fabs(xi) <= 4.0) {
      double expect = std::exp(-M_PI * xi * xi);
      CHECK(std::abs(F.at(i, 0) - expect) <= 1e-8);
    }
  }
  // Cross-check the FFT path against direct quadrature at a few frequencies.
  for (double xi : {-2.5, -1.0, 0.0, 0.7, 3.1}) {
    int s = static_cast<int>(std::lround(xi * g.box_length())) +
            g.axis_points() / 2;
    cplx oracle = direct_dft_1d(f, g.freq(s));
    CHECK(std::abs(F.at(static_cast<std::size_t>(s), 0) - oracle) <= 1e-10);
  }
}

TEST_CASE("modulation shifts the spectrum circularly") {
  Grid g = make_grid(1, 256, 8.0);
  auto base = sample(FunctionSpec::random_bandlimited(4.0, 7), g, 1);
  double a = 2.0;  // grid-aligned shift: a*L = 16 nodes
  SampledFunction mod(g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.coord(static_cast<int>(i));
    mod.at(i, 0) =
        base.at(i, 0) * std::exp(cplx(0.0, 2.0 * M_PI * a * x));
  }
  auto Fb = forward_dft(base);
  auto Fm = forward_dft(mod);
  int shift = static_cast<int>(std::lround(a * g.box_length()));
  double maxdev = 0.0;
  for (int s = 0; s < g.axis_points(); ++s) {
    int src = s - shift;
    if (src < 0 || src >= g.axis_points()) continue;  // band stays interior
    maxdev = std::max(maxdev, std::abs(Fm.at(s, 0) - Fb.at(src, 0)));
  }
  CHECK(maxdev <= 1e-10);
}

TEST_CASE("single frequency node inverts to a pure exponential") {
  Grid g = make_grid(1, 64, 2.0);
  SampledSpectrum F(g, 1);
  int s = 40;
  F.at(s, 0) = 1.0;
  auto f = inverse_dft(F);
  double xi = g.freq(s);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.coord(static_cast<int>(i));
    cplx expect = std::exp(cplx(0.0, 2.0 * M_PI * xi * x)) / g.box_length();
    CHECK(std::abs(f.at(i, 0) - expect) <= 1e-12);
  }
}

TEST_CASE("sample: gaussian positive and symmetric") {
  Grid g = make_grid(1, 64, 8.0);
  auto f = sample(FunctionSpec::gaussian(1.0), g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(f.at(i, 0).real() > 0.0);
    CHECK(f.at(i, 0).imag() == 0.0);
  }
  // even about 0: nodes j and N-j mirror
  for (int j = 1; j < 64; ++j)
    CHECK(f.at(j, 0).real() ==
          doctest::Approx(f.at(64 - j, 0).real()).epsilon(1e-12));
}

TEST_CASE("sample: random band-limited respects its band") {
  Grid g = make_grid(1, 256, 4.0);
  double B = 6.0;
  auto f = sample(FunctionSpec::random_bandlimited(B, 99), g, 2);
  auto F = forward_dft(f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::fabs(g.freq(static_cast<int>(i))) > B)
      CHECK(F.fiber_norm(i) <= 1e-12);
  }
}

TEST_CASE("sample: compact bump vanishes outside its support") {
  Grid g = make_grid(1, 256, 8.0);
  auto f = sample(FunctionSpec::bump(1.0), g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.coord(static_cast<int>(i));
    if (std::fabs(x) > 1.0) CHECK(std::abs(f.at(i, 0)) == 0.0);
  }
  CHECK_THROWS(FunctionSpec::parse_kind("not_a_kind", FunctionSpec{}));
}

TEST_CASE("translation identity for band-limited input") {
  // f(x - t) for grid-aligned t corresponds to spectrum * exp(-2 pi i t xi)
  Grid g = make_grid(1, 128, 4.0);
  auto f = sample(FunctionSpec::random_bandlimited(3.0, 5), g, 1);
  int steps = 8;
  double t = steps * g.spacing();
  auto F = forward_dft(f);
  SampledSpectrum Ft(g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double xi = g.freq(static_cast<int>(i));
    Ft.at(i, 0) = F.at(i, 0) * std::exp(cplx(0.0, -2.0 * M_PI * t * xi));
  }
  auto ft = inverse_dft(Ft);
  double maxdev = 0.0;
  for (int j = 0; j < g.axis_points(); ++j) {
    int src = (j - steps + g.axis_points()) % g.axis_points();
    maxdev = std::max(maxdev, std::abs(ft.at(j, 0) - f.at(src, 0)));
  }
  CHECK(maxdev <= 1e-10);
}
