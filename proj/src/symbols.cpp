#include "wmlab/symbols.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace wmlab {

double spectral_norm(const Matrix& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double r_bound(const OperatorFamily& T) {
  if (T.members.empty())
    throw std::invalid_argument("r_bound: empty operator family");
  double best = 0.0;
  for (const auto& m : T.members) {
    double s = spectral_norm(m);
    if (!std::isfinite(s))
      throw std::invalid_argument("r_bound: non-finite member norm");
    best = std::max(best, s);
  }
  return best;
}

OperatorFamily family_from_symbol(
    const MatrixSymbol& m, const std::vector<std::vector<double>>& points) {
  OperatorFamily fam;
  fam.members.reserve(points.size());
  for (const auto& xi : points) fam.members.push_back(m.eval(xi));
  return fam;
}

std::vector<double> LogLadder::points() const {
  int decades = std::max(1, (int)std::ceil(std::log10(hi / lo)));
  int count = decades * points_per_decade;
  std::vector<double> out;
  out.reserve(count + 1);
  for (int i = 0; i <= count; ++i)
    out.push_back(lo * std::pow(hi / lo, double(i) / count));
  return out;
}

nlohmann::json MikhlinReport::to_json() const {
  nlohmann::json b;
  for (const auto& [k, v] : breakdown) b[k] = v;
  return {{"value", value},
          {"breakdown", b},
          {"sample_grid", sample_grid},
          {"derivative_source",
           source == DerivSource::Analytic ? "analytic" : "finite_difference"},
          {"is_lower_bound", is_lower_bound}};
}

MikhlinReport mikhlin_norm_1d(const MatrixSymbol& m, const LogLadder& ladder) {
  if (m.grid.dim() != 1)
    throw std::invalid_argument("mikhlin_norm_1d: 1-d symbols only");
  if (!m.value_fn)
    throw std::invalid_argument("mikhlin_norm_1d: needs a value closure");
  if (!m.deriv_fn && ladder.points_per_decade < 64)
    throw std::invalid_argument(
        "mikhlin_norm_1d: finite differences need >= 64 points per decade");

  MikhlinReport rep;
  rep.source = m.deriv_fn ? DerivSource::Analytic : DerivSource::FiniteDifference;
  auto pts = ladder.points();
  double sup0 = 0.0, sup1 = 0.0;
  std::vector<int> one{1};
  for (double r : pts) {
    for (double sgn : {1.0, -1.0}) {
      std::vector<double> xi{sgn * r};
      sup0 = std::max(sup0, spectral_norm(m.eval(xi)));
      sup1 = std::max(sup1, spectral_norm(Matrix(xi[0] * m.derivative(one, xi))));
    }
  }
  rep.breakdown["k=0"] = sup0;
  rep.breakdown["k=1"] = sup1;
  rep.value = std::max(sup0, sup1);
  std::ostringstream os;
  os << "log ladder |xi| in [" << ladder.lo << ", " << ladder.hi << "], "
     << ladder.points_per_decade << " pts/decade, both signs";
  rep.sample_grid = os.str();
  return rep;
}

namespace {

// geometric sample magnitudes inside a factor [lo, hi); a zero lower corner
// starts 12 octaves below the top. Never touches coordinate hyperplanes.
std::vector<double> factor_samples(double lo, double hi, int count) {
  double eff_lo = lo > 0.0 ? lo * (1.0 + 1e-9) : hi * std::ldexp(1.0, -12);
  double eff_hi = hi * (1.0 - 1e-9);
  std::vector<double> out;
  if (count == 1) {
    out.push_back(std::sqrt(eff_lo * eff_hi));
    return out;
  }
  for (int i = 0; i < count; ++i)
    out.push_back(eff_lo * std::pow(eff_hi / eff_lo, double(i) / (count - 1)));
  return out;
}

MikhlinReport mikhlin_rect_impl(const MatrixSymbol& m,
                                const FreqRectFamily& family,
                                int samples_per_axis) {
  if (family.members.empty())
    throw std::invalid_argument("mikhlin_norm_rect: empty family");
  if (!m.value_fn)
    throw std::invalid_argument("mikhlin_norm_rect: needs a value closure");
  const int n = family.n;
  if (m.grid.dim() != n)
    throw std::invalid_argument("mikhlin_norm_rect: dimension mismatch");

  MikhlinReport rep;
  rep.source = m.deriv_fn ? DerivSource::Analytic : DerivSource::FiniteDifference;

  // multi-indices with |alpha|_inf <= 1
  std::vector<std::vector<int>> alphas;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> a(n, 0);
    for (int j = 0; j < n; ++j)
      if (mask & (1 << j)) a[j] = 1;
    alphas.push_back(a);
  }

  std::vector<double> sup(alphas.size(), 0.0);
  std::vector<double> xi(n);
  for (const auto& member : family.members) {
    std::vector<std::vector<double>> axis_pts(n);
    for (int j = 0; j < n; ++j)
      axis_pts[j] = factor_samples(
          member.lo_mag(j, family.avec, family.trunc_scale()),
          member.hi_mag(j, family.avec), samples_per_axis);
    std::vector<int> idx(n, 0);
    for (;;) {
      for (int j = 0; j < n; ++j)
        xi[j] = member.eta[j] * axis_pts[j][idx[j]];
      for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        const auto& alpha = alphas[ai];
        int order = 0;
        for (int v : alpha) order += v;
        double wfac = 1.0;
        if (order > 0) {
          switch (family.kind) {
            case FreqRectFamily::Kind::Product:
              for (int j = 0; j < n; ++j)
                if (alpha[j]) wfac *= std::fabs(xi[j]);
              break;
            case FreqRectFamily::Kind::Blocking: {
              double r = 0.0;
              for (int j = 0; j < n; ++j) r += xi[j] * xi[j];
              wfac = std::pow(std::sqrt(r), order);
              break;
            }
            case FreqRectFamily::Kind::AnisoBlocking:
              wfac = std::pow(aniso_distance(xi, family.avec), order);
              break;
          }
        }
        double v = wfac * spectral_norm(order == 0 ? m.eval(xi)
                                                   : m.derivative(alpha, xi));
        sup[ai] = std::max(sup[ai], v);
      }
      int j = 0;
      while (j < n && ++idx[j] == (int)axis_pts[j].size()) idx[j++] = 0;
      if (j == n) break;
    }
  }

  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    std::ostringstream key;
    key << "alpha=(";
    for (int j = 0; j < n; ++j) key << (j ? "," : "") << alphas[ai][j];
    key << ")";
    rep.breakdown[key.str()] = sup[ai];
    rep.value = std::max(rep.value, sup[ai]);
  }
  std::ostringstream os;
  os << family.members.size() << " rectangles, " << samples_per_axis
     << " samples/axis (geometric)";
  rep.sample_grid = os.str();
  return rep;
}

}  // namespace

MikhlinReport mikhlin_norm_rect(const MatrixSymbol& m,
                                const FreqRectFamily& family,
                                int samples_per_axis) {
  return mikhlin_rect_impl(m, family, samples_per_axis);
}

MikhlinReport mikhlin_norm_aniso(const MatrixSymbol& m,
                                 const std::vector<double>& avec,
                                 const FreqRectFamily& family,
                                 int samples_per_axis) {
  for (double a : avec)
    if (!(a > 0.0))
      throw std::invalid_argument("mikhlin_norm_aniso: a_j must be positive");
  if (family.kind != FreqRectFamily::Kind::AnisoBlocking &&
      family.kind != FreqRectFamily::Kind::Blocking)
    throw std::invalid_argument(
        "mikhlin_norm_aniso: expects an anisotropic blocking family");
  return mikhlin_rect_impl(m, family, samples_per_axis);
}

MikhlinReport mikhlin_norm_full(const MatrixSymbol& m, int l,
                                const LogLadder& ladder, int directions) {
  if (!m.value_fn)
    throw std::invalid_argument("mikhlin_norm_full: needs a value closure");
  const int n = m.grid.dim();
  if (l < 0 || l > n)
    throw std::invalid_argument("mikhlin_norm_full: order l in [0, n]");

  // multi-indices with |alpha|_1 <= l
  std::vector<std::vector<int>> alphas;
  std::vector<int> a(n, 0);
  std::function<void(int, int)> gen = [&](int axis, int remaining) {
    if (axis == n) {
      alphas.push_back(a);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      a[axis] = v;
      gen(axis + 1, remaining - v);
    }
    a[axis] = 0;
  };
  gen(0, l);

  // directions off the coordinate hyperplanes
  std::vector<std::vector<double>> dirs;
  if (n == 1) {
    dirs = {{1.0}, {-1.0}};
  } else {
    Rng rng(2025);
    for (int d = 0; d < directions; ++d) {
      std::vector<double> u(n);
      double norm2 = 0.0;
      for (int ax = 0; ax < n; ++ax) {
        do {
          u[ax] = rng.normal();
        } while (std::fabs(u[ax]) < 1e-3);
        norm2 += u[ax] * u[ax];
      }
      for (int ax = 0; ax < n; ++ax) u[ax] /= std::sqrt(norm2);
      dirs.push_back(u);
    }
  }

  MikhlinReport rep;
  rep.source =
      m.deriv_fn ? DerivSource::Analytic : DerivSource::FiniteDifference;
  std::vector<double> sup(alphas.size(), 0.0);
  std::vector<double> xi(n);
  for (double r : ladder.points()) {
    for (const auto& u : dirs) {
      for (int ax = 0; ax < n; ++ax) xi[ax] = r * u[ax];
      for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        int order = 0;
        for (int v : alphas[ai]) order += v;
        double v = std::pow(r, order) *
                   spectral_norm(order == 0 ? m.eval(xi)
                                            : m.derivative(alphas[ai], xi));
        sup[ai] = std::max(sup[ai], v);
      }
    }
  }
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    std::ostringstream key;
    key << "alpha=(";
    for (int j = 0; j < n; ++j) key << (j ? "," : "") << alphas[ai][j];
    key << ")";
    rep.breakdown[key.str()] = sup[ai];
    rep.value = std::max(rep.value, sup[ai]);
  }
  std::ostringstream os;
  os << "radial log ladder x " << dirs.size() << " directions";
  rep.sample_grid = os.str();
  return rep;
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::fabs(dt) < 1e-15) break;
    }
    x[i] = t;
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

// integral over the annulus {R < |xi| < 2R} of a scalar integrand.
double annulus_integral(int n, double R, int quad_points,
                        const std::function<double(const std::vector<double>&)>& f) {
  std::vector<double> gx, gw;
  gauss_legendre(quad_points, gx, gw);
  auto radial = [&](double r) { return R * 1.5 + 0.5 * R * r; };  // [R, 2R]
  const double rjac = 0.5 * R;
  double acc = 0.0;
  if (n == 1) {
    std::vector<double> xi(1);
    for (int i = 0; i < quad_points; ++i) {
      double r = radial(gx[i]);
      for (double s : {1.0, -1.0}) {
        xi[0] = s * r;
        acc += gw[i] * rjac * f(xi);
      }
    }
    return acc;
  }
  if (n == 2) {
    const int M = 4 * quad_points;  // periodic trapezoid in the angle
    std::vector<double> xi(2);
    for (int i = 0; i < quad_points; ++i) {
      double r = radial(gx[i]);
      double wr = gw[i] * rjac * r;  // polar jacobian
      double sub = 0.0;
      for (int j = 0; j < M; ++j) {
        double th = 2.0 * M_PI * j / M;
        xi[0] = r * std::cos(th);
        xi[1] = r * std::sin(th);
        sub += f(xi);
      }
      acc += wr * sub * (2.0 * M_PI / M);
    }
    return acc;
  }
  // n == 3: r x cos(theta) Gauss, phi trapezoid
  const int M = 2 * quad_points;
  std::vector<double> xi(3);
  for (int i = 0; i < quad_points; ++i) {
    double r = radial(gx[i]);
    double wr = gw[i] * rjac * r * r;
    for (int k = 0; k < quad_points; ++k) {
      double c = gx[k];  // cos(theta) in [-1, 1]
      double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      double sub = 0.0;
      for (int j = 0; j < M; ++j) {
        double ph = 2.0 * M_PI * j / M;
        xi[0] = r * s * std::cos(ph);
        xi[1] = r * s * std::sin(ph);
        xi[2] = r * c;
        sub += f(xi);
      }
      acc += wr * gw[k] * sub * (2.0 * M_PI / M);
    }
  }
  return acc;
}

}  // namespace

nlohmann::json HoermanderReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [alpha, R, v] : breakdown)
    rows.push_back({{"alpha", alpha}, {"R", R}, {"value", v}});
  return {{"constant", constant}, {"breakdown", rows}};
}

HoermanderReport hoermander_condition(const MatrixSymbol& m, double s, int l,
                                      const std::vector<double>& R_ladder,
                                      HoermanderMode mode, int quad_points) {
  if (!(s > 1.0 && s <= 2.0))
    throw std::invalid_argument("hoermander_condition: s must be in (1, 2]");
  const int n = m.grid.dim();
  if (l > n)
    throw std::invalid_argument("hoermander_condition: l > n not allowed");
  if (R_ladder.empty())
    throw std::invalid_argument("hoermander_condition: empty R ladder");

  MatrixSymbol sym = mode == HoermanderMode::Adjoint ? adjoint_symbol(m) : m;
  if (!sym.value_fn)
    throw std::invalid_argument("hoermander_condition: needs a value closure");

  // multi-indices with |alpha|_1 <= l
  std::vector<std::vector<int>> alphas;
  std::vector<int> a(n, 0);
  std::function<void(int, int)> gen = [&](int axis, int remaining) {
    if (axis == n) {
      alphas.push_back(a);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      a[axis] = v;
      gen(axis + 1, remaining - v);
    }
    a[axis] = 0;
  };
  gen(0, l);

  HoermanderReport rep;
  const int d_in = sym.d_in;
  for (const auto& alpha : alphas) {
    int order = 0;
    for (int v : alpha) order += v;
    std::ostringstream key;
    key << "(";
    for (int j = 0; j < n; ++j) key << (j ? "," : "") << alpha[j];
    key << ")";
    for (double R : R_ladder) {
      double worst = 0.0;
      for (int b = 0; b < d_in; ++b) {
        Eigen::VectorXcd u = Eigen::VectorXcd::Zero(d_in);
        u(b) = 1.0;
        auto integrand = [&](const std::vector<double>& xi) {
          Matrix d = order == 0 ? sym.eval(xi) : sym.derivative(alpha, xi);
          return std::pow((d * u).norm(), s);
        };
        double I = annulus_integral(n, R, quad_points, integrand);
        double v = std::pow(std::pow(R, s * order - n) * I, 1.0 / s);
        worst = std::max(worst, v);
      }
      rep.breakdown.emplace_back(key.str(), R, worst);
      rep.constant = std::max(rep.constant, worst);
    }
  }
  return rep;
}

namespace {
double smooth_step(double t) {
  // C^inf step: 0 for t <= 0, 1 for t >= 1, s(t) + s(1-t) = 1
  auto gexp = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  double g1 = gexp(t), g2 = gexp(1.0 - t);
  return g1 / (g1 + g2);
}
}  // namespace

double DyadicProfile::operator()(double r) const {
  if (r <= 0.0) return 0.0;
  double u = std::log2(r);
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return u <= 0.0 ? smooth_step(u + 1.0) : smooth_step(1.0 - u);
}

double DyadicProfile::eval(const std::vector<double>& xi) const {
  double r2 = 0.0;
  for (double t : xi) r2 += t * t;
  return (*this)(std::sqrt(r2));
}

DyadicProfile dyadic_partition_of_unity() { return DyadicProfile{}; }

Matrix KernelTable::kernel_at(std::size_t node) const {
  Matrix m(d_out, d_in);
  for (int r = 0; r < d_out; ++r)
    for (int c = 0; c < d_in; ++c)
      m(r, c) = total[(node * d_out + r) * d_in + c];
  return m;
}

SampledFunction KernelTable::convolve(const SampledFunction& f) const {
  if (!(f.grid == grid) || f.fiber_dim != d_in)
    throw std::invalid_argument("KernelTable::convolve: incompatible input");
  // h^n-weighted circular convolution via the transform
  SampledFunction kf(grid, d_out * d_in);
  kf.values = total;
  auto FK = forward_dft(kf);
  auto Ff = forward_dft(f);
  SampledSpectrum G(grid, d_out);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int r = 0; r < d_out; ++r) {
      cplx acc(0.0);
      for (int c = 0; c < d_in; ++c)
        acc += FK.at(i, r * d_in + c) * Ff.at(i, c);
      G.at(i, r) = acc;
    }
  }
  return inverse_dft(G);
}

SampledSpectrum KernelTable::spectrum() const {
  SampledFunction kf(grid, d_out * d_in);
  kf.values = total;
  return forward_dft(kf);
}

KernelTable approx_kernel(const MatrixSymbol& m, int order, const Grid& g) {
  if (!(m.grid == g))
    throw std::invalid_argument("approx_kernel: symbol grid mismatch");
  if (std::ldexp(1.0, order) > g.axis_points() / (4.0 * g.box_length()))
    throw std::invalid_argument("approx_kernel: band overflow (2^N too large "
                                "for the grid)");
  auto phi = dyadic_partition_of_unity();
  KernelTable K;
  K.order = order;
  K.grid = g;
  K.d_in = m.d_in;
  K.d_out = m.d_out;
  K.total.assign(g.size() * m.d_in * m.d_out, cplx(0.0));
  std::vector<double> xi(g.dim());
  for (int j = -order; j <= order; ++j) {
    SampledSpectrum mj(g, m.d_in * m.d_out);
    double scale = std::ldexp(1.0, -j);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.freq_coords(i, xi.data());
      double r2 = 0.0;
      for (double t : xi) r2 += t * t;
      double w = phi(scale * std::sqrt(r2));
      if (w != 0.0)
        for (int c = 0; c < m.d_in * m.d_out; ++c)
          mj.at(i, c) = w * m.values[i * m.d_in * m.d_out + c];
    }
    auto kj = inverse_dft(mj);
    K.blocks.push_back(kj.values);
    for (std::size_t t = 0; t < K.total.size(); ++t)
      K.total[t] += kj.values[t];
  }
  return K;
}

PHoermanderReport check_p_hoermander(const KernelTable& K, double p,
                                     const std::vector<double>& y_ladder,
                                     int k_max) {
  if (p < 1.0) throw std::invalid_argument("check_p_hoermander: p >= 1");
  if (y_ladder.empty())
    throw std::invalid_argument("check_p_hoermander: empty y ladder");
  const Grid& g = K.grid;
  const int n = g.dim();
  const int N = g.axis_points();
  const double h = g.spacing();
  double ymax = 0.0;
  for (double y : y_ladder) ymax = std::max(ymax, std::fabs(y));
  if (std::ldexp(ymax, k_max + 1) >= g.box_length() / 2)
    throw std::invalid_argument(
        "check_p_hoermander: annulus exits the grid box (k too large)");

  const double pprime_inv = 1.0 - 1.0 / p;  // n/p' exponent uses 1/p' = 1-1/p
  PHoermanderReport rep;
  rep.a.assign(k_max + 1, 0.0);
  const double hn = std::pow(h, n);

  std::vector<int> s(n), shifted(n);
  std::vector<double> x(n);
  for (double yval : y_ladder) {
    int ysteps = (int)std::lround(yval / h);
    if (ysteps == 0)
      throw std::invalid_argument("check_p_hoermander: y below grid spacing");
    double y = ysteps * h;
    for (int k = 0; k <= k_max; ++k) {
      double rlo = std::ldexp(std::fabs(y), k);
      double rhi = std::ldexp(std::fabs(y), k + 1);
      for (int b = 0; b < K.d_in; ++b) {
        Eigen::VectorXcd u = Eigen::VectorXcd::Zero(K.d_in);
        u(b) = 1.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          g.node_coords(i, x.data());
          double r2 = 0.0;
          for (double t : x) r2 += t * t;
          double r = std::sqrt(r2);
          if (r <= rlo || r >= rhi) continue;
          g.unflatten(i, s.data());
          shifted = s;
          shifted[0] = ((s[0] - ysteps) % N + N) % N;  // x - y, periodic
          std::size_t si = g.flatten(shifted.data());
          Matrix diff = K.kernel_at(si) - K.kernel_at(i);
          acc += std::pow((diff * u).norm(), p);
        }
        double val = std::pow(acc * hn, 1.0 / p);
        double norm_factor = std::pow(rlo, -double(n) * pprime_inv);
        rep.a[k] = std::max(rep.a[k], val / norm_factor);
      }
    }
  }
  for (double v : rep.a) rep.sum += v;
  return rep;
}

RbddVariationReport rbdd_variation_1d(const MatrixSymbol& m,
                                      const DyadicInterval& I,
                                      int interior_samples) {
  if (m.grid.dim() != 1)
    throw std::invalid_argument("rbdd_variation_1d: 1-d symbols only");
  if (!m.value_fn)
    throw std::invalid_argument("rbdd_variation_1d: needs a value closure");
  RbddVariationReport rep;
  // ||mu|| = |delta_a| + |-delta_b| + int_I d eta / |eta|
  rep.measure_norm = 2.0 + std::log(I.abs_hi() / I.abs_lo());

  OperatorFamily fam;
  fam.members.push_back(m.eval({I.lo()}));
  fam.members.push_back(m.eval({I.hi()}));
  std::vector<int> one{1};
  for (int i = 1; i < interior_samples; ++i) {
    double mag = I.abs_lo() *
                 std::pow(I.abs_hi() / I.abs_lo(), double(i) / interior_samples);
    std::vector<double> xi{I.eta * mag};
    fam.members.push_back(Matrix(xi[0] * m.derivative(one, xi)));
  }
  rep.tau_r_bound = r_bound(fam);
  return rep;
}

MatrixSymbol maxreg_symbol(const Matrix& A, const Grid& g) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("maxreg_symbol: A must be square");
  const int d = static_cast<int>(A.rows());
  Eigen::ComplexEigenSolver<Matrix> es(A);
  for (int i = 0; i < d; ++i)
    if (es.eigenvalues()(i).real() <= 0.0)
      throw std::invalid_argument(
          "maxreg_symbol: spectrum of A must lie in the open right "
          "half-plane");

  Matrix Acopy = A;
  auto value = [Acopy, d](const std::vector<double>& xi) {
    Matrix M = cplx(0.0, xi[0]) * Matrix::Identity(d, d) - Acopy;
    return Matrix(cplx(0.0, xi[0]) * M.inverse());
  };
  auto m = make_symbol(g, d, d, value);
  m.deriv_order = 1;
  m.deriv_fn = [Acopy, d](const std::vector<int>& alpha,
                          const std::vector<double>& xi) {
    int o = 0;
    for (int v : alpha) o += v;
    Matrix M = cplx(0.0, xi[0]) * Matrix::Identity(d, d) - Acopy;
    Matrix Minv = M.inverse();
    if (o == 0) return Matrix(cplx(0.0, xi[0]) * Minv);
    return Matrix(cplx(0.0, -1.0) * Acopy * Minv * Minv);
  };
  return m;
}

}  // namespace wmlab
