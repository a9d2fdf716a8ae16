#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "wmlab/multiplier.hpp"

using namespace wmlab;

namespace {

double rel_l2_error(const SampledFunction& a, const SampledFunction& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  return std::sqrt(num / den);
}

double l2(const SampledFunction& f) {
  double s = 0.0;
  for (auto& v : f.values) s += std::norm(v);
  return std::sqrt(s * std::pow(f.grid.spacing(), f.grid.dim()));
}

}  // namespace

TEST_CASE("identity multiplier returns f") {
  Grid g = make_grid(1, 128, 4.0);
  auto f = sample(FunctionSpec::random_bandlimited(8.0, 3), g, 2);
  auto out = apply_multiplier(identity_symbol(g, 2), f);
  double m = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    m = std::max(m, std::abs(out.values[i] - f.values[i]));
  CHECK(m <= 1e-12 * f.max_abs());

  SampledFunction wrong(g, 3);
  CHECK_THROWS(apply_multiplier(identity_symbol(g, 2), wrong));
}

TEST_CASE("translation symbol acts as circular shift") {
  Grid g = make_grid(1, 256, 8.0);
  auto f = sample(FunctionSpec::random_bandlimited(4.0, 11), g, 1);
  double a = 4 * g.spacing();  // grid-aligned
  auto m = make_symbol(g, 1, 1, [a](const std::vector<double>& xi) {
    Matrix v(1, 1);
    v(0, 0) = std::exp(cplx(0.0, 2.0 * M_PI * xi[0] * a));
    return v;
  });
  auto out = apply_multiplier(m, f);
  double maxerr = 0.0;
  for (int j = 0; j < 256; ++j) {
    int src = (j + 4) % 256;  // f(x + a)
    maxerr = std::max(maxerr, std::abs(out.values[j] - f.values[src]));
  }
  CHECK(maxerr <= 1e-10);
}

TEST_CASE("derivative symbol 2 pi i xi on sin(2 pi x)") {
  Grid g = make_grid(1, 128, 1.0);
  SampledFunction f(g, 1);
  for (int j = 0; j < 128; ++j) f.values[j] = std::sin(2.0 * M_PI * g.coord(j));
  auto m = make_symbol(g, 1, 1, [](const std::vector<double>& xi) {
    Matrix v(1, 1);
    v(0, 0) = cplx(0.0, 2.0 * M_PI * xi[0]);
    return v;
  });
  auto out = apply_multiplier(m, f);
  for (int j = 0; j < 128; ++j) {
    double expect = 2.0 * M_PI * std::cos(2.0 * M_PI * g.coord(j));
    CHECK(std::abs(out.values[j] - expect) <= 1e-8);
  }
}

TEST_CASE("frequency cutoff: band containment and partition") {
  Grid g = make_grid(1, 128, 4.0);
  auto f = sample(FunctionSpec::random_bandlimited(3.0, 21), g, 1);

  auto full = frequency_cutoff(Box::interval(-8.0, 8.0), f);
  CHECK(rel_l2_error(full, f) <= 1e-12);

  auto none = frequency_cutoff(Box::interval(5.0, 9.0), f);
  CHECK(none.max_abs() <= 1e-12 * f.max_abs());

  // indicator partition: Delta(A) f + Delta(A^c within band) f = f
  auto left = frequency_cutoff(Box::interval(-8.0, 0.5), f);
  auto right = frequency_cutoff(Box::interval(0.5, 8.0), f);
  double maxerr = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    maxerr = std::max(maxerr, std::abs(left.values[i] + right.values[i] -
                                       f.values[i]));
  CHECK(maxerr <= 1e-12 * f.max_abs());
}

TEST_CASE("cutoff idempotence and disjointness") {
  Grid g = make_grid(1, 128, 4.0);
  auto f = sample(FunctionSpec::random_bandlimited(8.0, 5), g, 1);
  Box A = Box::interval(-2.0, 1.0);
  Box B = Box::interval(1.0, 3.0);  // half-open => disjoint from A
  auto Af = frequency_cutoff(A, f);
  auto AAf = frequency_cutoff(A, Af);
  CHECK(rel_l2_error(AAf, Af) <= 1e-12);
  auto ABf = frequency_cutoff(A, frequency_cutoff(B, f));
  CHECK(ABf.max_abs() <= 1e-12 * f.max_abs());
}

TEST_CASE("coordinate cutoff factorizes and composes") {
  Grid g = make_grid(2, 32, 4.0);
  auto f = sample(FunctionSpec::random_bandlimited(3.0, 9), g, 1);
  Interval I{-1.0, 2.0}, J{0.0, 3.0};
  auto both = coordinate_cutoff(1, J, coordinate_cutoff(0, I, f));
  auto boxed = frequency_cutoff(Box({I.lo, J.lo}, {I.hi, J.hi}), f);
  CHECK(rel_l2_error(both, boxed) <= 1e-12);

  auto ident = coordinate_cutoff(0, Interval{-1e18, 1e18}, f);
  CHECK(rel_l2_error(ident, f) <= 1e-12);

  // Delta_j[I] Delta_j[I'] = Delta_j[I cap I']
  Interval I2{0.5, 4.0};
  auto comp = coordinate_cutoff(0, I2, coordinate_cutoff(0, I, f));
  auto inter = coordinate_cutoff(0, Interval{0.5, 2.0}, f);
  CHECK(rel_l2_error(comp, inter) <= 1e-12);

  CHECK_THROWS(coordinate_cutoff(2, I, f));
}

TEST_CASE("Hilbert quadrature: symmetric cancellation and zero input") {
  Grid g = make_grid(1, 256, 8.0);
  // The kernel is odd about the evaluation point, so for f symmetric about
  // x0 the paired contributions at x0 +- s cancel exactly; the antipodal
  // node carries kernel value cot(pi/2) = 0.
  auto f = sample(FunctionSpec::gaussian(1.0), g, 1);
  auto H = hilbert_transform_quadrature(f);
  int center = 128;  // x = 0, the symmetry center
  CHECK(g.coord(center) == doctest::Approx(0.0));
  CHECK(std::abs(H.values[center]) <= 1e-8);

  SampledFunction z(g, 1);
  auto Hz = hilbert_transform_quadrature(z);
  CHECK(Hz.max_abs() == 0.0);

  Grid g2 = make_grid(2, 16, 1.0);
  SampledFunction f2(g2, 1);
  CHECK_THROWS(hilbert_transform_quadrature(f2));
}

TEST_CASE("Hilbert quadrature matches the -pi i sgn multiplier") {
  Grid g = make_grid(1, 4096, 40.0);
  auto f = sample(FunctionSpec::gaussian(1.0), g, 1);
  auto Hq = hilbert_transform_quadrature(f);
  auto Hm = apply_multiplier(hilbert_symbol(g), f);
  CHECK(rel_l2_error(Hq, Hm) <= 1e-2);
}

TEST_CASE("adjoint symbol: trivial cases and involution") {
  Grid g = make_grid(1, 64, 4.0);
  auto id = identity_symbol(g, 2);
  auto idadj = adjoint_symbol(id);
  for (std::size_t i = 0; i < id.values.size(); ++i)
    CHECK(std::abs(idadj.values[i] - id.values[i]) <= 1e-15);

  // m = i sgn: conjugation flips the sign, reflection flips it back -- at
  // every node except Nyquist, which reflects to itself and only conjugates
  auto isgn = make_symbol(g, 1, 1, [](const std::vector<double>& xi) {
    Matrix v(1, 1);
    v(0, 0) = cplx(0.0, xi[0] > 0 ? 1.0 : (xi[0] < 0 ? -1.0 : 0.0));
    return v;
  });
  auto madj = adjoint_symbol(isgn);
  for (std::size_t i = 1; i < isgn.values.size(); ++i)
    CHECK(std::abs(madj.values[i] - isgn.values[i]) <= 1e-15);
  CHECK(std::abs(madj.values[0] - std::conj(isgn.values[0])) <= 1e-15);

  // involution on a random matrix symbol
  Rng rng(3);
  MatrixSymbol m(g, 2, 2);
  for (auto& v : m.values) v = rng.cnormal();
  auto mm = adjoint_symbol(adjoint_symbol(m));
  for (std::size_t i = 0; i < m.values.size(); ++i)
    CHECK(std::abs(mm.values[i] - m.values[i]) <= 1e-15);
}

TEST_CASE("duality pairing <T_m f, g> = <f, T_m~* g>") {
  Grid g = make_grid(1, 128, 4.0);
  Rng rng(17);
  MatrixSymbol m(g, 2, 2);
  for (auto& v : m.values) v = rng.cnormal();
  auto f = sample(FunctionSpec::random_bandlimited(6.0, 31), g, 2);
  auto gg = sample(FunctionSpec::random_bandlimited(6.0, 32), g, 2);
  auto lhs = duality_pairing(apply_multiplier(m, f), gg);
  auto rhs = duality_pairing(f, apply_multiplier(adjoint_symbol(m), gg));
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
}

TEST_CASE("linearity and composition") {
  Grid g = make_grid(1, 128, 4.0);
  Rng rng(8);
  MatrixSymbol m1(g, 1, 1), m2(g, 1, 1);
  for (auto& v : m1.values) v = rng.cnormal();
  for (auto& v : m2.values) v = rng.cnormal();
  auto f = sample(FunctionSpec::random_bandlimited(8.0, 41), g, 1);
  auto h = sample(FunctionSpec::random_bandlimited(8.0, 42), g, 1);

  cplx a(0.3, -1.1), b(2.0, 0.7);
  SampledFunction comb(g, 1);
  for (std::size_t i = 0; i < comb.values.size(); ++i)
    comb.values[i] = a * f.values[i] + b * h.values[i];
  auto lhs = apply_multiplier(m1, comb);
  auto r1 = apply_multiplier(m1, f);
  auto r2 = apply_multiplier(m1, h);
  double maxerr = 0.0, scale = lhs.max_abs();
  for (std::size_t i = 0; i < lhs.values.size(); ++i)
    maxerr = std::max(maxerr, std::abs(lhs.values[i] - a * r1.values[i] -
                                       b * r2.values[i]));
  CHECK(maxerr <= 1e-12 * std::max(1.0, scale));

  // T_{m1} T_{m2} = T_{m1 m2}
  auto seq = apply_multiplier(m1, apply_multiplier(m2, f));
  MatrixSymbol prod(g, 1, 1);
  for (std::size_t i = 0; i < prod.values.size(); ++i)
    prod.values[i] = m1.values[i] * m2.values[i];
  auto direct = apply_multiplier(prod, f);
  CHECK(rel_l2_error(seq, direct) <= 1e-10);
}

TEST_CASE("unimodular scalar symbols are L2 isometries") {
  Grid g = make_grid(1, 256, 4.0);
  Rng rng(12);
  MatrixSymbol m(g, 1, 1);
  for (auto& v : m.values)
    v = std::exp(cplx(0.0, rng.uniform(0.0, 2.0 * M_PI)));
  auto f = sample(FunctionSpec::random_bandlimited(16.0, 51), g, 1);
  auto out = apply_multiplier(m, f);
  CHECK(std::fabs(l2(out) - l2(f)) <= 1e-10 * l2(f));
}

TEST_CASE("symbol JSON specs") {
  Grid g = make_grid(1, 64, 4.0);
  auto s1 = symbol_from_json({{"kind", "sgn"}}, g);
  CHECK(s1.values[0] == cplx(-1.0));
  auto s2 = symbol_from_json(
      {{"kind", "indicator"},
       {"box", {{"lo", {0.0}}, {"hi", {1e18}}}}},
      g);
  CHECK(std::abs(s2.values[0]) == 0.0);

  auto s3 = symbol_from_json(
      {{"kind", "resolvent"}, {"A", {{1.0, 0.0}, {0.0, 2.0}}}}, g);
  CHECK(s3.d_in == 2);
  double xi = g.freq(40);
  CHECK(std::abs(s3.node_matrix(40)(0, 0) -
                 cplx(0, xi) / (cplx(0, xi) - 1.0)) <= 1e-12);

  CHECK_THROWS(symbol_from_json({{"kind", "nope"}}, g));
}
