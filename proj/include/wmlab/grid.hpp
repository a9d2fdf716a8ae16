// Periodic discretization of R^n and the discrete Fourier transform the
// rest of the library is built on.
//
// Conventions (single source of truth):
//   spatial nodes    x_j  = -L/2 + j*h,  h = L/N,  j = 0..N-1 per axis
//   frequency nodes  xi_k = k/L,         k = -N/2..N/2-1 per axis
//   forward:  F(xi) = h^n sum_j f(x_j) exp(-2 pi i x_j . xi)
//   inverse:  f(x)  = L^-n sum_k F(xi_k) exp(+2 pi i x . xi_k)
// The pair is an exact two-sided inverse; Parseval reads
//   h^n sum |f|^2 = L^-n sum |F|^2.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wmlab {

using cplx = std::complex<double>;

class Grid {
public:
  Grid() = default;
  Grid(int dim, int axis_points, double box_length);

  int dim() const { return n_; }
  int axis_points() const { return N_; }
  double box_length() const { return L_; }
  double spacing() const { return L_ / N_; }
  std::size_t size() const { return size_; }

  // Per-axis node coordinates. `s` is the storage index 0..N-1.
  double coord(int s) const { return -L_ / 2 + s * spacing(); }
  double freq(int s) const { return (s - N_ / 2) / L_; }
  int freq_int(int s) const { return s - N_ / 2; }

  // xi -> -xi on the frequency grid. The Nyquist index s=0 (k=-N/2) has no
  // mirror node and maps to itself.
  int reflect(int s) const { return s == 0 ? 0 : N_ - s; }

  void unflatten(std::size_t idx, int* out) const;
  std::size_t flatten(const int* s) const;

  // Physical coordinates of a flattened node (spatial / frequency).
  void node_coords(std::size_t idx, double* out) const;
  void freq_coords(std::size_t idx, double* out) const;

  bool operator==(const Grid& o) const {
    return n_ == o.n_ && N_ == o.N_ && L_ == o.L_;
  }

private:
  int n_ = 1;
  int N_ = 8;
  double L_ = 1.0;
  std::size_t size_ = 8;
};

Grid make_grid(int dim, int axis_points, double box_length);

struct SampledFunction {
  Grid grid;
  int fiber_dim = 1;
  // node-major: values[node * fiber_dim + component]
  std::vector<cplx> values;

  SampledFunction() = default;
  SampledFunction(const Grid& g, int d)
      : grid(g), fiber_dim(d), values(g.size() * d, cplx(0.0)) {}
  cplx& at(std::size_t node, int c) { return values[node * fiber_dim + c]; }
  const cplx& at(std::size_t node, int c) const {
    return values[node * fiber_dim + c];
  }
  double fiber_norm(std::size_t node) const;
  double max_abs() const;
};

struct SampledSpectrum {
  Grid grid;
  int fiber_dim = 1;
  std::vector<cplx> values;

  SampledSpectrum() = default;
  SampledSpectrum(const Grid& g, int d)
      : grid(g), fiber_dim(d), values(g.size() * d, cplx(0.0)) {}
  cplx& at(std::size_t node, int c) { return values[node * fiber_dim + c]; }
  const cplx& at(std::size_t node, int c) const {
    return values[node * fiber_dim + c];
  }
  double fiber_norm(std::size_t node) const;
};

SampledSpectrum forward_dft(const SampledFunction& f);
SampledFunction inverse_dft(const SampledSpectrum& F);

// Built-in test functions.
struct FunctionSpec {
  enum class Kind { Gaussian, ModulatedGaussian, Bump, RandomBandlimited };
  Kind kind = Kind::Gaussian;
  double width = 1.0;              // Gaussian scale / bump radius
  std::vector<double> center;      // defaults to origin
  std::vector<double> modulation;  // frequency vector a in e^{2 pi i a.x}
  double band = 1.0;               // RandomBandlimited: |xi|_inf <= band
  std::uint64_t seed = 1;

  static FunctionSpec gaussian(double width = 1.0);
  static FunctionSpec modulated_gaussian(std::vector<double> a,
                                         double width = 1.0);
  static FunctionSpec bump(double radius = 1.0,
                           std::vector<double> center = {});
  static FunctionSpec random_bandlimited(double band, std::uint64_t seed);
  static FunctionSpec parse_kind(const std::string& name, FunctionSpec base);
};

SampledFunction sample(const FunctionSpec& spec, const Grid& grid,
                       int fiber_dim = 1);

// Deterministic RNG used throughout the lab (splitmix64 core). The
// real-valued draws are hand-rolled so sequences do not depend on the
// implementation-defined std distributions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next_u64();
  double uniform();                 // [0, 1)
  double uniform(double a, double b);
  double normal();
  cplx cnormal();
  int uniform_int(int lo, int hi);  // inclusive

private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wmlab
