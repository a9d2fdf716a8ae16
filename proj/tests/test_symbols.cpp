#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "wmlab/symbols.hpp"

using namespace wmlab;

namespace {

// Independent spectral-norm oracle: power iteration on A^H A with explicit
// loops (no shared code with the SVD path).
double power_norm(const Matrix& A, int iters = 400) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(A.cols());
  v.normalize();
  double lam = 0.0;
  for (int i = 0; i < iters; ++i) {
    Eigen::VectorXcd w = A.adjoint() * (A * v);
    lam = w.norm();
    if (lam == 0.0) return 0.0;
    v = w / lam;
  }
  return std::sqrt(lam);
}

}  // namespace

TEST_CASE("r_bound basics") {
  // Kahane contraction family {c Id : |c| <= 1}
  OperatorFamily fam;
  for (int i = 0; i < 64; ++i) {
    double th = 2.0 * M_PI * i / 64.0;
    for (double r : {0.25, 0.5, 1.0})
      fam.members.push_back(r * std::exp(cplx(0, th)) *
                            Matrix::Identity(2, 2));
  }
  CHECK(r_bound(fam) == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(4);
  Matrix A(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) A(r, c) = rng.cnormal();
  OperatorFamily single;
  single.members.push_back(A);
  CHECK(r_bound(single) == doctest::Approx(power_norm(A)).epsilon(1e-10));

  CHECK_THROWS(r_bound(OperatorFamily{}));
}

TEST_CASE("r_bound equals the Rademacher-definition optimum") {
  // three matrices in C^2: exhaustive sign patterns + dense unit tuples
  Rng rng(9);
  std::vector<Matrix> T(3, Matrix(2, 2));
  for (auto& m : T)
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m(r, c) = rng.cnormal();
  OperatorFamily fam{T};
  double rb = r_bound(fam);

  // (a) Rademacher orthonormality: mean over the 8 sign patterns of
  // ||sum eps_k T_k x_k||^2 equals sum ||T_k x_k||^2 for random tuples
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::VectorXcd> x(3, Eigen::VectorXcd(2));
    for (auto& v : x)
      for (int i = 0; i < 2; ++i) v(i) = rng.cnormal();
    double direct = 0.0;
    for (int k = 0; k < 3; ++k) direct += (T[k] * x[k]).squaredNorm();
    double mean = 0.0;
    for (int pat = 0; pat < 8; ++pat) {
      Eigen::VectorXcd s = Eigen::VectorXcd::Zero(2);
      for (int k = 0; k < 3; ++k)
        s += ((pat >> k) & 1 ? -1.0 : 1.0) * (T[k] * x[k]);
      mean += s.squaredNorm();
    }
    mean /= 8.0;
    CHECK(std::fabs(mean - direct) <= 1e-10 * std::max(1.0, direct));
  }

  // (b) the optimum over tuples: sup ratio sqrt(sum ||T_k x_k||^2 /
  // sum ||x_k||^2) = max_k ||T_k||; maximize per k by power iteration
  double opt = 0.0;
  for (int k = 0; k < 3; ++k) opt = std::max(opt, power_norm(T[k]));
  CHECK(std::fabs(rb - opt) <= 1e-6 * opt);
}

TEST_CASE("r_bound subadditive under union, submultiplicative under product") {
  Rng rng(13);
  OperatorFamily A, B, U, P;
  for (int i = 0; i < 5; ++i) {
    Matrix a(2, 2), b(2, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        a(r, c) = rng.cnormal();
        b(r, c) = rng.cnormal();
      }
    A.members.push_back(a);
    B.members.push_back(b);
  }
  U = A;
  for (auto& m : B.members) U.members.push_back(m);
  CHECK(r_bound(U) ==
        doctest::Approx(std::max(r_bound(A), r_bound(B))).epsilon(1e-12));
  for (auto& a : A.members)
    for (auto& b : B.members) P.members.push_back(a * b);
  CHECK(r_bound(P) <= r_bound(A) * r_bound(B) * (1 + 1e-12));
}

TEST_CASE("mikhlin_norm_1d closed forms") {
  Grid g = make_grid(1, 64, 4.0);
  auto sgn = sgn_symbol(g);
  auto rep = mikhlin_norm_1d(sgn);
  CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.breakdown.at("k=1") == doctest::Approx(0.0));
  CHECK(rep.is_lower_bound);

  auto id = identity_symbol(g, 2);
  CHECK(mikhlin_norm_1d(id).value == doctest::Approx(1.0));

  // resolvent symbol for lambda > 0: sup |m| -> 1, sup |xi m'| = 1/2,
  // independent of lambda
  for (double lam : {0.5, 1.0, 4.0}) {
    Matrix A = lam * Matrix::Identity(1, 1);
    auto m = maxreg_symbol(A, g);
    auto r = mikhlin_norm_1d(m);
    CHECK(std::fabs(r.value - 1.0) <= 1e-3);
    CHECK(std::fabs(r.breakdown.at("k=1") - 0.5) <= 1e-3);
  }
}

TEST_CASE("mikhlin_norm_rect: identity, quotient symbol, half-plane cutoff") {
  Grid g = make_grid(2, 32, 4.0);
  auto fam = blocking_rects(2, -3, 3);

  auto id = identity_symbol(g, 1);
  CHECK(mikhlin_norm_rect(id, fam).value == doctest::Approx(1.0));

  // m = xi1 xi2 / |xi|^2: finite, refinement-stable within 2%
  auto m = make_symbol(g, 1, 1, [](const std::vector<double>& xi) {
    Matrix v(1, 1);
    double r2 = xi[0] * xi[0] + xi[1] * xi[1];
    v(0, 0) = r2 > 0 ? xi[0] * xi[1] / r2 : 0.0;
    return v;
  });
  auto r8 = mikhlin_norm_rect(m, fam, 8);
  auto r16 = mikhlin_norm_rect(m, fam, 16);
  CHECK(r8.value > 0.0);
  CHECK(std::fabs(r16.value - r8.value) <= 0.02 * r8.value);

  // m = 1_{xi1 >= 0}: constant on every member interior
  auto half = make_symbol(g, 1, 1, [](const std::vector<double>& xi) {
    Matrix v(1, 1);
    v(0, 0) = xi[0] >= 0 ? 1.0 : 0.0;
    return v;
  });
  CHECK(mikhlin_norm_rect(half, fam).value == doctest::Approx(1.0));

  FreqRectFamily empty = fam;
  empty.members.clear();
  CHECK_THROWS(mikhlin_norm_rect(id, empty));
}

TEST_CASE("mikhlin_norm_aniso") {
  Grid g = make_grid(2, 32, 4.0);
  std::vector<double> ones{1.0, 1.0};
  auto fam_iso = blocking_rects(2, -2, 2);
  auto fam_a1 = aniso_blocking_rects(ones, -2, 2);

  auto m = make_symbol(g, 1, 1, [](const std::vector<double>& xi) {
    Matrix v(1, 1);
    v(0, 0) = std::sin(xi[0]) * std::exp(-0.1 * std::fabs(xi[1]));
    return v;
  });
  auto a = mikhlin_norm_aniso(m, ones, fam_a1, 6);
  auto b = mikhlin_norm_rect(m, fam_iso, 6);
  CHECK(std::fabs(a.value - b.value) <= 1e-10 * std::max(1.0, b.value));

  // heat-type symbol with a = (2, 1)
  std::vector<double> avec{2.0, 1.0};
  auto fam_heat = aniso_blocking_rects(avec, -2, 2);
  auto heat = make_symbol(g, 1, 1, [](const std::vector<double>& xi) {
    Matrix v(1, 1);
    cplx den(xi[1] * xi[1], xi[0]);
    v(0, 0) = den == cplx(0.0) ? 0.0 : cplx(0.0, xi[0]) / den;
    return v;
  });
  auto h6 = mikhlin_norm_aniso(heat, avec, fam_heat, 6);
  auto h12 = mikhlin_norm_aniso(heat, avec, fam_heat, 12);
  CHECK(h6.value > 0.0);
  CHECK(std::fabs(h12.value - h6.value) <= 0.02 * h6.value);

  CHECK_THROWS(mikhlin_norm_aniso(m, {1.0, -1.0}, fam_a1));
}

TEST_CASE("anisotropic distance homogeneity") {
  Rng rng(23);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> xi{rng.normal() * 3, rng.normal() * 3};
    std::vector<double> avec{0.5 + 2 * rng.uniform(), 0.5 + 2 * rng.uniform()};
    double lam = std::pow(2.0, rng.uniform(-2.0, 2.0));
    std::vector<double> scaled{std::pow(lam, avec[0]) * xi[0],
                               std::pow(lam, avec[1]) * xi[1]};
    double lhs = aniso_distance(scaled, avec);
    double rhs = lam * aniso_distance(xi, avec);
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs));
  }
}

TEST_CASE("hoermander condition closed forms and scaling") {
  Grid g = make_grid(1, 64, 4.0);
  std::vector<double> ladder{0.5, 1.0, 2.0, 4.0};

  for (double s : {1.5, 2.0}) {
    auto rep = hoermander_condition(identity_symbol(g, 1), s, 1, ladder);
    CHECK(std::fabs(rep.constant - std::pow(2.0, 1.0 / s)) <= 1e-6);
    auto reps = hoermander_condition(sgn_symbol(g), s, 1, ladder);
    CHECK(std::fabs(reps.constant - rep.constant) <= 1e-9);
  }

  auto zero = make_symbol(g, 1, 1, [](const std::vector<double>&) {
    return Matrix(Matrix::Zero(1, 1));
  });
  CHECK(hoermander_condition(zero, 2.0, 1, ladder).constant == 0.0);

  CHECK_THROWS(hoermander_condition(identity_symbol(g, 1), 3.0, 1, ladder));
  CHECK_THROWS(hoermander_condition(identity_symbol(g, 1), 2.0, 2, ladder));

  // scaling invariance: C(m or lam, ladder R) = C(m, ladder lam R)
  double lam = 3.0;
  auto base = maxreg_symbol(Matrix::Identity(1, 1), g);
  auto scaled = make_symbol(g, 1, 1, [&base, lam](const std::vector<double>& xi) {
    return base.value_fn({lam * xi[0]});
  });
  std::vector<double> ladder2;
  for (double R : ladder) ladder2.push_back(lam * R);
  auto c1 = hoermander_condition(scaled, 2.0, 1, ladder);
  auto c2 = hoermander_condition(base, 2.0, 1, ladder2);
  CHECK(std::fabs(c1.constant - c2.constant) <= 1e-6 * c2.constant);

  // 2-d identity: annulus area constant (3 pi R^2)^{1/s} R^{-2/s} = (3 pi)^{1/s}
  Grid g2 = make_grid(2, 16, 4.0);
  auto rep2 = hoermander_condition(identity_symbol(g2, 1), 2.0, 1, {1.0});
  CHECK(std::fabs(rep2.constant - std::sqrt(3.0 * M_PI)) <= 1e-6);
}

TEST_CASE("dyadic partition of unity") {
  auto phi = dyadic_partition_of_unity();
  CHECK(phi(0.49999999) == 0.0);
  CHECK(phi(2.0000001) == 0.0);
  CHECK(phi(1.0) + phi(2.0) + phi(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  for (double r : {0.75, 1.0, 1.3, 2.7, 0.2, 31.0}) {
    double total = 0.0;
    for (int j = -8; j <= 8; ++j) total += phi(std::ldexp(r, -j));
    CHECK(std::fabs(total - 1.0) <= 1e-10);
  }
  // disjoint supports at distance >= 2
  for (double r = 0.51; r < 2.0; r += 0.01)
    CHECK(phi(r) * phi(r * 4.0) == 0.0);
}

TEST_CASE("approximative kernels") {
  Grid g = make_grid(1, 1024, 8.0);
  auto zero = make_symbol(g, 1, 1, [](const std::vector<double>&) {
    return Matrix(Matrix::Zero(1, 1));
  });
  auto Kz = approx_kernel(zero, 4, g);
  for (auto& v : Kz.total) CHECK(std::abs(v) == 0.0);

  // band overflow rejected
  CHECK_THROWS(approx_kernel(identity_symbol(g, 1), 9, g));

  // identity symbol: K_N acts as band-pass identity on covered bands
  int order = 5;  // 2^5 = 32 <= 1024/32
  auto K = approx_kernel(identity_symbol(g, 1), order, g);
  SampledSpectrum F(g, 1);
  Rng rng(3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double xi = std::fabs(g.freq(static_cast<int>(i)));
    if (xi >= std::ldexp(1.0, -order + 1) && xi <= std::ldexp(1.0, order - 1))
      F.at(i, 0) = rng.cnormal();
  }
  auto f = inverse_dft(F);
  auto out = K.convolve(f);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    num += std::norm(out.values[i] - f.values[i]);
    den += std::norm(f.values[i]);
  }
  CHECK(std::sqrt(num / den) <= 1e-8);

  // spectral consistency: F(K_N) = m * sum phi at the nodes
  auto phi = dyadic_partition_of_unity();
  auto spec = K.spectrum();
  double maxdev = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double xi = g.freq(static_cast<int>(i));
    double target = 0.0;
    for (int j = -order; j <= order; ++j)
      target += phi(std::ldexp(std::fabs(xi), -j));
    maxdev = std::max(maxdev, std::abs(spec.at(i, 0) - target));
  }
  CHECK(maxdev <= 1e-8);
}

TEST_CASE("Hilbert kernel matches the quadrature") {
  Grid g = make_grid(1, 4096, 10.0);
  int order = 6;  // 64 <= 4096/40
  auto K = approx_kernel(hilbert_symbol(g), order, g);
  auto f = sample(FunctionSpec::gaussian(1.0), g, 1);
  auto viaK = K.convolve(f);
  auto viaQ = hilbert_transform_quadrature(f);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    num += std::norm(viaK.values[i] - viaQ.values[i]);
    den += std::norm(viaQ.values[i]);
  }
  CHECK(std::sqrt(num / den) <= 5e-2);
}

TEST_CASE("p-Hoermander sequence of the truncated Hilbert kernel") {
  // The annuli need a handful of nodes even at k = 0, so y is several
  // coarse-grid cells and the box leaves room for 2^9 y.
  Grid g1 = make_grid(1, 16384, 8.0);
  Grid g2 = make_grid(1, 32768, 8.0);
  double yc = 8 * g1.spacing();
  auto K1 = approx_kernel(hilbert_symbol(g1), 6, g1);
  auto K2 = approx_kernel(hilbert_symbol(g2), 6, g2);

  auto zeroK = approx_kernel(
      make_symbol(g1, 1, 1,
                  [](const std::vector<double>&) {
                    return Matrix(Matrix::Zero(1, 1));
                  }),
      6, g1);
  auto rz = check_p_hoermander(zeroK, 1.0, {yc}, 8);
  CHECK(rz.sum == 0.0);

  auto r1 = check_p_hoermander(K1, 1.0, {yc}, 8);
  auto r2 = check_p_hoermander(K2, 1.0, {yc}, 8);
  CHECK(r1.sum > 0.0);
  CHECK(std::isfinite(r1.sum));
  CHECK(std::fabs(r2.sum - r1.sum) <= 0.10 * r1.sum);

  // scale self-similarity: per-k values stable as y shrinks along the
  // ladder, for annuli above the kernel oscillation scale 2^{-order-1}
  auto ra = check_p_hoermander(K2, 1.0, {2 * yc}, 6);
  auto rb = check_p_hoermander(K2, 1.0, {yc}, 6);
  for (int k = 4; k <= 6; ++k)
    CHECK(std::fabs(ra.a[k] - rb.a[k]) <= 0.10 * std::max(ra.a[k], rb.a[k]));

  CHECK_THROWS(check_p_hoermander(K1, 1.0, {yc}, 30));
}

TEST_CASE("uniformly R-bounded variation of dyadic restrictions") {
  Grid g = make_grid(1, 64, 4.0);
  // measure norm 2 + log 2 for every dyadic interval
  for (int k : {-3, 0, 2}) {
    for (int eta : {1, -1}) {
      auto rep = rbdd_variation_1d(identity_symbol(g, 2),
                                   DyadicInterval{k, eta});
      CHECK(std::fabs(rep.measure_norm - (2.0 + std::log(2.0))) <= 1e-9);
      CHECK(rep.tau_r_bound <= 1.0 + 1e-12);  // endpoints Id, eta m' = 0
    }
  }
  // m = sgn on a positive interval: endpoint values are Id, interior 0
  auto rep = rbdd_variation_1d(sgn_symbol(g), DyadicInterval{1, 1});
  CHECK(rep.tau_r_bound == doctest::Approx(1.0));
}

TEST_CASE("maximal regularity symbol") {
  Grid g = make_grid(1, 256, 8.0);
  // scalar lambda: |m(xi)| = |xi| / sqrt(xi^2 + lambda^2) <= 1, -> 1
  double lam = 2.0;
  auto m = maxreg_symbol(lam * Matrix::Identity(1, 1), g);
  double maxmod = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double xi = g.freq(static_cast<int>(i));
    double expect = std::fabs(xi) / std::sqrt(xi * xi + lam * lam);
    CHECK(std::fabs(std::abs(m.values[i]) - expect) <= 1e-12);
    maxmod = std::max(maxmod, std::abs(m.values[i]));
  }
  CHECK(maxmod <= 1.0);
  CHECK(maxmod > 0.99);

  // diag(1,2): Mikhlin norm 1 within 1e-3 (per-eigenvalue closed form)
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  auto md = maxreg_symbol(A, g);
  CHECK(std::fabs(mikhlin_norm_1d(md).value - 1.0) <= 1e-3);

  // spectrum touching iR rejected
  Matrix rot = Matrix::Zero(2, 2);
  rot(0, 1) = -1.0;
  rot(1, 0) = 1.0;  // eigenvalues +- i
  CHECK_THROWS(maxreg_symbol(rot, g));
  Matrix neg = -Matrix::Identity(2, 2);
  CHECK_THROWS(maxreg_symbol(neg, g));
}

TEST_CASE("full-space Mikhlin norm") {
  Grid g = make_grid(1, 64, 4.0);
  CHECK(mikhlin_norm_full(identity_symbol(g, 2), 1).value ==
        doctest::Approx(1.0));
  // 1-d, order 1: agrees with the dedicated 1-d norm on the same ladder
  auto m = maxreg_symbol(2.0 * Matrix::Identity(1, 1), g);
  double full = mikhlin_norm_full(m, 1).value;
  double oned = mikhlin_norm_1d(m).value;
  CHECK(std::fabs(full - oned) <= 1e-12 * oned);

  // 2-d quotient symbol: finite, and the breakdown covers |alpha|_1 <= 2
  Grid g2 = make_grid(2, 16, 4.0);
  auto q = make_symbol(g2, 1, 1, [](const std::vector<double>& xi) {
    Matrix v(1, 1);
    double r2 = xi[0] * xi[0] + xi[1] * xi[1];
    v(0, 0) = r2 > 0 ? xi[0] * xi[1] / r2 : 0.0;
    return v;
  });
  auto rep = mikhlin_norm_full(q, 2, LogLadder{}, 24);
  CHECK(rep.breakdown.size() == 6);  // (0,0),(1,0),(0,1),(1,1),(2,0),(0,2)
  CHECK(rep.value > 0.0);
  CHECK(std::isfinite(rep.value));

  CHECK_THROWS(mikhlin_norm_full(identity_symbol(g, 1), 2));
}

TEST_CASE("report serialization carries full breakdowns") {
  Grid g = make_grid(1, 64, 4.0);
  auto rep = mikhlin_norm_1d(sgn_symbol(g));
  auto j = rep.to_json();
  CHECK(j["value"] == 1.0);
  CHECK(j["breakdown"].contains("k=0"));
  CHECK(j["breakdown"].contains("k=1"));
  CHECK(j["derivative_source"] == "analytic");
  CHECK(j["is_lower_bound"] == true);

  auto hr = hoermander_condition(identity_symbol(g, 1), 2.0, 1, {1.0, 2.0});
  auto hj = hr.to_json();
  CHECK(hj["breakdown"].size() == 4);  // 2 alphas x 2 R values
  CHECK(hj["constant"].get<double>() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("Leibniz-type bound for products of rational symbols") {
  Grid g = make_grid(1, 64, 4.0);
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    double l1 = 0.5 + 2 * rng.uniform(), l2 = 0.5 + 2 * rng.uniform();
    auto m1 = maxreg_symbol(l1 * Matrix::Identity(1, 1), g);
    auto m2 = maxreg_symbol(l2 * Matrix::Identity(1, 1), g);
    MatrixSymbol prod = m1;
    prod.value_fn = [m1, m2](const std::vector<double>& xi) {
      return Matrix(m1.value_fn(xi) * m2.value_fn(xi));
    };
    prod.deriv_fn = nullptr;
    prod.deriv_order = 0;
    auto rp = mikhlin_norm_1d(prod);
    auto r1 = mikhlin_norm_1d(m1);
    auto r2 = mikhlin_norm_1d(m2);
    double lhs = rp.breakdown.at("k=1");
    double rhs = r1.breakdown.at("k=1") * r2.breakdown.at("k=0") +
                 r1.breakdown.at("k=0") * r2.breakdown.at("k=1");
    CHECK(lhs <= rhs + 1e-8);
  }
}
