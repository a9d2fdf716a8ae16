// Symbol calculus: R-bounds of matrix families, Mikhlin norms over ladders
// and rectangle families, Hoermander integral conditions, the dyadic
// partition of unity, approximative kernels with p-Hoermander checks, the
// uniformly-R-bounded-variation measure norm, and the maximal regularity
// symbol i xi (i xi - A)^{-1}.
//
// On finite-dimensional Euclidean fibers Rademacher orthonormality gives
// || sum eps_k T_k x_k ||^2_{L^2(Omega)} = sum ||T_k x_k||^2, so the R-bound
// of a family equals the supremum of operator norms; that is the quantity
// computed here. The Rademacher definition itself is kept as a test oracle.
#pragma once

#include <map>

#include "wmlab/lp_decomp.hpp"
#include "wmlab/multiplier.hpp"

namespace wmlab {

struct OperatorFamily {
  std::vector<Matrix> members;
};

// sup of spectral norms; exact R-bound on Euclidean fibers.
double r_bound(const OperatorFamily& T);

double spectral_norm(const Matrix& m);

// Builds the family {weight(xi) * d^alpha m(xi)} over a sample-point set.
OperatorFamily family_from_symbol(
    const MatrixSymbol& m, const std::vector<std::vector<double>>& points);

struct LogLadder {
  double lo = std::ldexp(1.0, -12);
  double hi = std::ldexp(1.0, 12);
  int points_per_decade = 64;
  std::vector<double> points() const;  // positive magnitudes
};

enum class DerivSource { Analytic, FiniteDifference };

struct MikhlinReport {
  double value = 0.0;
  std::map<std::string, double> breakdown;  // per multi-index
  std::string sample_grid;
  DerivSource source = DerivSource::Analytic;
  bool is_lower_bound = true;
  nlohmann::json to_json() const;
};

// ||m||_{RM} = sup_{k=0,1} R{ xi^k m^(k)(xi) : xi != 0 } on a log ladder.
MikhlinReport mikhlin_norm_1d(const MatrixSymbol& m, const LogLadder& ladder = {});

// Rectangle-family Mikhlin norms. Weight factor per multi-index alpha with
// |alpha|_inf <= 1: the blocking family uses |xi|^{|alpha|}, the product
// family uses |xi^alpha|, the anisotropic family uses |xi|_a^{|alpha|}.
MikhlinReport mikhlin_norm_rect(const MatrixSymbol& m,
                                const FreqRectFamily& family,
                                int samples_per_axis = 8);

MikhlinReport mikhlin_norm_aniso(const MatrixSymbol& m,
                                 const std::vector<double>& avec,
                                 const FreqRectFamily& family,
                                 int samples_per_axis = 8);

// Full-space Mikhlin norm sup_{|alpha|_1 <= l} R{ |xi|^{|alpha|} d^alpha
// m(xi) : xi != 0 }, sampled on a radial log ladder times a direction set;
// sample points avoid the coordinate hyperplanes (essential-R-bound
// realization).
MikhlinReport mikhlin_norm_full(const MatrixSymbol& m, int l,
                                const LogLadder& ladder = {},
                                int directions = 16);

struct HoermanderReport {
  double constant = 0.0;
  // per (alpha, R) worst value over the norming basis
  std::vector<std::tuple<std::string, double, double>> breakdown;
  nlohmann::json to_json() const;
};

enum class HoermanderMode { Direct, Adjoint };

// Worst C in (R^{s|alpha|-n} int_{R<|xi|<2R} ||d^alpha m(xi) u||^s dxi)^{1/s}
// <= C ||u|| over |alpha|_1 <= l, R in the ladder, u in the standard basis.
// Adjoint mode applies the condition to m~* (the basis is norming on
// Euclidean fibers).
HoermanderReport hoermander_condition(const MatrixSymbol& m, double s, int l,
                                      const std::vector<double>& R_ladder,
                                      HoermanderMode mode = HoermanderMode::Direct,
                                      int quad_points = 96);

// Smooth radial dyadic profile: supp phi subset {1/2 <= |xi| <= 2} and
// sum_j phi(2^{-j} xi) = 1 for xi != 0.
struct DyadicProfile {
  double operator()(double r) const;      // radial value at |xi| = r
  double eval(const std::vector<double>& xi) const;
};
DyadicProfile dyadic_partition_of_unity();

struct KernelTable {
  int order = 0;  // truncation N
  Grid grid;
  int d_in = 1, d_out = 1;
  // per-block spatial kernels k_j, j = -N..N, node-major matrix entries
  std::vector<std::vector<cplx>> blocks;
  std::vector<cplx> total;  // K_N = sum of blocks

  Matrix kernel_at(std::size_t node) const;
  // h^n-weighted circular convolution K_N * f
  SampledFunction convolve(const SampledFunction& f) const;
  // spectrum of K_N (for the consistency check against m * sum phi)
  SampledSpectrum spectrum() const;
};

KernelTable approx_kernel(const MatrixSymbol& m, int order, const Grid& g);

struct PHoermanderReport {
  std::vector<double> a;  // a_k, k = 0..k_max
  double sum = 0.0;
};

// Measured pointwise p-Hoermander sequence of the truncated kernel:
// a_k = sup_{y,u} ( int_{2^k|y|<|x|<2^{k+1}|y|} ||[K(x-y)-K(x)]u||^p dx )^{1/p}
//       / ( (2^k |y|)^{-n/p'} ||u|| ).
PHoermanderReport check_p_hoermander(const KernelTable& K, double p,
                                     const std::vector<double>& y_ladder,
                                     int k_max);

struct RbddVariationReport {
  double measure_norm = 0.0;  // ||mu_{m,I}|| = 2 + int_I |eta|^{-1} d eta
  double tau_r_bound = 0.0;   // R-bound of the sampled tau_{m,I}
};

// tau_{m,I}(eta) = m 1_{{a_I,b_I}} + eta m'(eta) 1_{(a_I,b_I)} and
// d mu_{m,I} = d(delta_{a_I} - delta_{b_I}) + 1_{(a_I,b_I)} eta^{-1} d lambda;
// for a dyadic interval the measure norm is 2 + log 2.
RbddVariationReport rbdd_variation_1d(const MatrixSymbol& m,
                                      const DyadicInterval& I,
                                      int interior_samples = 128);

// m(xi) = i xi (i xi - A)^{-1}; requires spec(A) in the open right
// half-plane. Tabulated with analytic derivative m'(xi) = -i A (i xi - A)^{-2}.
MatrixSymbol maxreg_symbol(const Matrix& A, const Grid& g);

}  // namespace wmlab
