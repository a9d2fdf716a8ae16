#include "wmlab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace wmlab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// FFTW plans are cached per (rank, N). Buffers are fftw_malloc'ed so the
// planner sees the alignment it will execute with.
struct FftwPlanEntry {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan fwd{};
  fftw_plan bwd{};
  std::size_t size = 0;
  std::mutex use;  // buffers are shared; concurrent callers serialize per size

  ~FftwPlanEntry() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

FftwPlanEntry& plan_for(int rank, int N) {
  static std::map<std::pair<int, int>, std::unique_ptr<FftwPlanEntry>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(rank, N);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto entry = std::make_unique<FftwPlanEntry>();
  std::size_t sz = 1;
  for (int a = 0; a < rank; ++a) sz *= static_cast<std::size_t>(N);
  entry->size = sz;
  entry->in = fftw_alloc_complex(sz);
  entry->out = fftw_alloc_complex(sz);
  std::vector<int> dims(rank, N);
  entry->fwd = fftw_plan_dft(rank, dims.data(), entry->in, entry->out,
                             FFTW_FORWARD, FFTW_ESTIMATE);
  entry->bwd = fftw_plan_dft(rank, dims.data(), entry->in, entry->out,
                             FFTW_BACKWARD, FFTW_ESTIMATE);
  auto& ref = *entry;
  cache.emplace(key, std::move(entry));
  return ref;
}

}  // namespace

Grid::Grid(int dim, int axis_points, double box_length)
    : n_(dim), N_(axis_points), L_(box_length) {
  size_ = 1;
  for (int a = 0; a < n_; ++a) size_ *= static_cast<std::size_t>(N_);
}

void Grid::unflatten(std::size_t idx, int* out) const {
  for (int a = n_ - 1; a >= 0; --a) {
    out[a] = static_cast<int>(idx % N_);
    idx /= N_;
  }
}

std::size_t Grid::flatten(const int* s) const {
  std::size_t idx = 0;
  for (int a = 0; a < n_; ++a) idx = idx * N_ + static_cast<std::size_t>(s[a]);
  return idx;
}

void Grid::node_coords(std::size_t idx, double* out) const {
  int s[3];
  unflatten(idx, s);
  for (int a = 0; a < n_; ++a) out[a] = coord(s[a]);
}

void Grid::freq_coords(std::size_t idx, double* out) const {
  int s[3];
  unflatten(idx, s);
  for (int a = 0; a < n_; ++a) out[a] = freq(s[a]);
}

Grid make_grid(int dim, int axis_points, double box_length) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("make_grid: dimension must be 1, 2 or 3");
  if (!is_power_of_two(axis_points) || axis_points < 8)
    throw std::invalid_argument(
        "make_grid: axis size must be a power of two >= 8");
  if (!(box_length > 0.0))
    throw std::invalid_argument("make_grid: box length must be positive");
  return Grid(dim, axis_points, box_length);
}

double SampledFunction::fiber_norm(std::size_t node) const {
  double s = 0.0;
  for (int c = 0; c < fiber_dim; ++c) s += std::norm(at(node, c));
  return std::sqrt(s);
}

double SampledFunction::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    m = std::max(m, fiber_norm(i));
  return m;
}

double SampledSpectrum::fiber_norm(std::size_t node) const {
  double s = 0.0;
  for (int c = 0; c < fiber_dim; ++c) s += std::norm(at(node, c));
  return std::sqrt(s);
}

namespace {

// Natural (centered) storage index s per axis corresponds to FFT-order index
// m = (s + N/2) mod N, and the modulation by exp(+/- pi i k) induced by the
// centered box is the parity sign (-1)^s (N/2 is even for all supported N).
inline int fft_order(int s, int N) { return (s + N / 2) & (N - 1); }

inline int parity(const int* s, int n) {
  int p = 0;
  for (int a = 0; a < n; ++a) p ^= (s[a] & 1);
  return p;
}

}  // namespace

SampledSpectrum forward_dft(const SampledFunction& f) {
  const Grid& g = f.grid;
  for (const cplx& v : f.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("forward_dft: non-finite sample");

  SampledSpectrum F(g, f.fiber_dim);
  auto& plan = plan_for(g.dim(), g.axis_points());
  std::lock_guard<std::mutex> lock(plan.use);
  const std::size_t sz = g.size();
  const int n = g.dim();
  const int N = g.axis_points();
  const double scale = std::pow(g.spacing(), n);

  std::vector<int> s(n);
  for (int c = 0; c < f.fiber_dim; ++c) {
    for (std::size_t i = 0; i < sz; ++i) {
      plan.in[i][0] = f.values[i * f.fiber_dim + c].real();
      plan.in[i][1] = f.values[i * f.fiber_dim + c].imag();
    }
    fftw_execute(plan.fwd);
    for (std::size_t i = 0; i < sz; ++i) {
      g.unflatten(i, s.data());
      std::size_t m = 0;
      for (int a = 0; a < n; ++a)
        m = m * N + static_cast<std::size_t>(fft_order(s[a], N));
      double sign = parity(s.data(), n) ? -scale : scale;
      F.values[i * f.fiber_dim + c] =
          cplx(plan.out[m][0] * sign, plan.out[m][1] * sign);
    }
  }
  return F;
}

SampledFunction inverse_dft(const SampledSpectrum& F) {
  const Grid& g = F.grid;
  SampledFunction f(g, F.fiber_dim);
  auto& plan = plan_for(g.dim(), g.axis_points());
  std::lock_guard<std::mutex> lock(plan.use);
  const std::size_t sz = g.size();
  const int n = g.dim();
  const int N = g.axis_points();
  const double scale = 1.0 / std::pow(g.box_length(), n);

  std::vector<int> s(n);
  for (int c = 0; c < F.fiber_dim; ++c) {
    for (std::size_t i = 0; i < sz; ++i) {
      g.unflatten(i, s.data());
      std::size_t m = 0;
      for (int a = 0; a < n; ++a)
        m = m * N + static_cast<std::size_t>(fft_order(s[a], N));
      double sign = parity(s.data(), n) ? -1.0 : 1.0;
      const cplx v = F.values[i * F.fiber_dim + c] * sign;
      plan.in[m][0] = v.real();
      plan.in[m][1] = v.imag();
    }
    fftw_execute(plan.bwd);
    for (std::size_t i = 0; i < sz; ++i)
      f.values[i * F.fiber_dim + c] =
          cplx(plan.out[i][0] * scale, plan.out[i][1] * scale);
  }
  return f;
}

FunctionSpec FunctionSpec::gaussian(double width) {
  FunctionSpec s;
  s.kind = Kind::Gaussian;
  s.width = width;
  return s;
}

FunctionSpec FunctionSpec::modulated_gaussian(std::vector<double> a,
                                              double width) {
  FunctionSpec s;
  s.kind = Kind::ModulatedGaussian;
  s.modulation = std::move(a);
  s.width = width;
  return s;
}

FunctionSpec FunctionSpec::bump(double radius, std::vector<double> center) {
  FunctionSpec s;
  s.kind = Kind::Bump;
  s.width = radius;
  s.center = std::move(center);
  return s;
}

FunctionSpec FunctionSpec::random_bandlimited(double band,
                                              std::uint64_t seed) {
  FunctionSpec s;
  s.kind = Kind::RandomBandlimited;
  s.band = band;
  s.seed = seed;
  return s;
}

FunctionSpec FunctionSpec::parse_kind(const std::string& name,
                                      FunctionSpec base) {
  if (name == "gaussian")
    base.kind = Kind::Gaussian;
  else if (name == "modulated_gaussian")
    base.kind = Kind::ModulatedGaussian;
  else if (name == "bump")
    base.kind = Kind::Bump;
  else if (name == "random_bandlimited")
    base.kind = Kind::RandomBandlimited;
  else
    throw std::invalid_argument("unsupported function constructor: " + name);
  return base;
}

SampledFunction sample(const FunctionSpec& spec, const Grid& grid,
                       int fiber_dim) {
  const int n = grid.dim();
  std::vector<double> c(spec.center);
  c.resize(n, 0.0);

  if (spec.kind == FunctionSpec::Kind::RandomBandlimited) {
    SampledSpectrum F(grid, fiber_dim);
    Rng rng(spec.seed);
    std::vector<double> xi(n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid.freq_coords(i, xi.data());
      double m = 0.0;
      for (int a = 0; a < n; ++a) m = std::max(m, std::fabs(xi[a]));
      if (m <= spec.band) {
        for (int d = 0; d < fiber_dim; ++d) F.at(i, d) = rng.cnormal();
      }
    }
    return inverse_dft(F);
  }

  SampledFunction f(grid, fiber_dim);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node_coords(i, x.data());
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) {
      double t = (x[a] - c[a]) / spec.width;
      r2 += t * t;
    }
    cplx v(0.0);
    switch (spec.kind) {
      case FunctionSpec::Kind::Gaussian:
        v = std::exp(-M_PI * r2);
        break;
      case FunctionSpec::Kind::ModulatedGaussian: {
        double phase = 0.0;
        for (int a = 0; a < n && a < (int)spec.modulation.size(); ++a)
          phase += spec.modulation[a] * x[a];
        v = std::exp(-M_PI * r2) *
            std::exp(cplx(0.0, 2.0 * M_PI * phase));
        break;
      }
      case FunctionSpec::Kind::Bump:
        v = (r2 < 1.0) ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
        break;
      default:
        break;
    }
    for (int d = 0; d < fiber_dim; ++d) f.at(i, d) = v;
  }
  return f;
}

std::uint64_t Rng::next_u64() {
  // splitmix64; fixed sequence regardless of platform.
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

cplx Rng::cnormal() { return cplx(normal(), normal()) / std::sqrt(2.0); }

int Rng::uniform_int(int lo, int hi) {
  return lo + static_cast<int>(next_u64() % (static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace wmlab
