// Littlewood-Paley frequency families: the dyadic intervals I_{k,eta} =
// eta [2^k, 2^{k+1}], the product family (products of dyadic intervals), the
// blocking family built from the index partition
//   J_{ln+r} = (Z cap (-inf, l+1])^r x {l+1} x (Z cap (-inf, l])^{n-r-1},
// its anisotropic variant, reconstruction, and empirical unconditionality
// constants under random signs.
//
// A blocking member with index k is *defined* as the union of product
// rectangles over J_k, so the connection identity E_k = union over J_k holds
// exactly by corner arithmetic. (An equivalent closed form reads
// E_{ln+r} = prod_{j<=r} [0, 2^{l+2}) x [2^{l+1}, 2^{l+2}) x
// prod_{j>r+1} [0, 2^{l+1}) per axis magnitude; re-indexing k by n shifts
// every scale by one level and yields the same family.)
//
// Realization on the discrete frequency grid is half-open per axis in
// standard coordinates: a signed factor eta [c, d] becomes [c, d) for
// eta = +1 and [-d, -c) for eta = -1. Factors written eta [0, d] are
// realized with the family's truncation cutoff 2^{a l_min} as lower
// magnitude; ideal (untruncated) corners keep 0 and are what scaling
// statements are about.
#pragma once

#include <optional>
#include <set>

#include "wmlab/grid.hpp"
#include "wmlab/weights.hpp"
#include "json.hpp"

namespace wmlab {

struct DyadicInterval {
  int k = 0;
  int eta = 1;  // sign
  double abs_lo() const { return std::ldexp(1.0, k); }
  double abs_hi() const { return std::ldexp(1.0, k + 1); }
  // realized half-open interval in standard coordinates
  double lo() const { return eta > 0 ? abs_lo() : -abs_hi(); }
  double hi() const { return eta > 0 ? abs_hi() : -abs_lo(); }
  bool contains(double xi) const { return xi >= lo() && xi < hi(); }
};

std::vector<DyadicInterval> dyadic_intervals(int k_min, int k_max);

// |x|_a = (sum |x_j|^{2/a_j})^{1/2}
double aniso_distance(const std::vector<double>& x,
                      const std::vector<double>& avec);

struct FreqRect {
  std::vector<int> eta;        // per-axis signs
  std::vector<bool> lo_zero;   // factor eta [0, hi]?
  std::vector<int> lo_scale;   // |corner| = 2^{a_j * scale} when !lo_zero
  std::vector<int> hi_scale;
  // metadata
  int block_k = 0;                 // blocking families
  std::vector<int> product_k;      // product family per-axis scales

  double lo_mag(int axis, const std::vector<double>& avec,
                std::optional<int> trunc_scale) const;
  double hi_mag(int axis, const std::vector<double>& avec) const;
  // half-open membership; truncated magnitudes when trunc_scale is set
  bool contains(const std::vector<double>& xi, const std::vector<double>& avec,
                std::optional<int> trunc_scale) const;
  // realized corners in standard coordinates (for Box conversion / export)
  Box to_box(const std::vector<double>& avec,
             std::optional<int> trunc_scale) const;
};

struct FreqRectFamily {
  enum class Kind { Product, Blocking, AnisoBlocking };
  Kind kind = Kind::Blocking;
  int n = 1;
  int l_min = 0, l_max = 0;
  std::vector<double> avec;  // all ones unless anisotropic
  std::vector<FreqRect> members;
  bool truncated = true;  // realize [0,.] factors with the l_min cutoff

  std::optional<int> trunc_scale() const {
    return truncated ? std::optional<int>(l_min) : std::nullopt;
  }
  bool member_contains(std::size_t idx, const std::vector<double>& xi) const {
    return members[idx].contains(xi, avec, trunc_scale());
  }
  std::string describe() const;
  std::string to_csv() const;  // one row per member: k, eta, corners
};

// J_k for k = l*n + r, clipped below at l_cutoff; returns the index tuples.
std::vector<std::vector<int>> blocking_index_set(int k, int n, int l_cutoff);

FreqRectFamily blocking_rects(int n, int l_min, int l_max);
FreqRectFamily product_rects(int n, int k_min, int k_max);
FreqRectFamily aniso_blocking_rects(const std::vector<double>& avec, int l_min,
                                    int l_max);

// Sum of member cutoffs. Throws LeakError when f has spectral mass outside
// the family union.
struct LeakError : std::runtime_error {
  double leaked_mass;
  explicit LeakError(double mass)
      : std::runtime_error("reconstruct: spectrum leaks outside the family "
                           "union, mass fraction " +
                           std::to_string(mass)),
        leaked_mass(mass) {}
};

SampledFunction reconstruct(const SampledFunction& f,
                            const FreqRectFamily& family);

// Nodes of the grid inside the family union (for building test functions).
std::vector<bool> family_union_mask(const FreqRectFamily& family,
                                    const Grid& g);

// Random band-limited functions with spectrum inside the family union; when
// `adversarial` is set the first two are single-member and two-member
// concentrations.
std::vector<SampledFunction> family_test_functions(const FreqRectFamily& family,
                                                   const Grid& g, int count,
                                                   std::uint64_t seed,
                                                   bool adversarial = true);

struct SignSampling {
  enum class Mode { Exhaustive, MonteCarlo } mode = Mode::Exhaustive;
  int samples = 1000;
  std::uint64_t seed = 1;
};

struct UnconditionalityReport {
  double c_plus = 0.0;   // lower bound for the U+ constant
  double c_minus = 0.0;  // lower bound for the U- constant
  std::string sampling;
  std::string test_set;
  nlohmann::json to_json() const;
};

// Empirical U+/U- constants of {Delta[E] : E in family} on L^p_w: per test
// function f the L^2(Omega) average of ||sum eps Delta f||_{L^p_w} over sign
// patterns (exhaustive when the active member count allows, Monte Carlo
// otherwise) against ||f||_{L^p_w}.
UnconditionalityReport unconditionality_constants(
    const FreqRectFamily& family, double p, const Weight& w,
    const std::vector<SampledFunction>& test_fns, const SignSampling& signs);

}  // namespace wmlab
