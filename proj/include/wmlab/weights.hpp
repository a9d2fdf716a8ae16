// Weight functions and the Muckenhoupt-type characteristics: [w]_{A_p} over
// cubes and rectangles, the two-weight variant, Fujii-Wilson A_infty, the
// A_p^r characteristic and the p-dual weight.
//
// Every characteristic is defined as a supremum over an infinite box
// family; here it is evaluated over a finite candidate family and therefore
// always flagged as a lower bound.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wmlab/grid.hpp"
#include "json.hpp"

namespace wmlab {

struct Box {
  std::vector<double> lo, hi;

  Box() = default;
  Box(std::vector<double> l, std::vector<double> h);
  static Box interval(double a, double b) { return Box({a}, {b}); }

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  double side(int axis) const { return hi[axis] - lo[axis]; }
  bool is_cube(double tol = 1e-12) const;
  bool contains_zero() const;
  std::string describe() const;
};

enum class BoxShape { Cubes, Rectangles };

class Weight {
public:
  enum class Kind { Constant, Power, CoordPower, Tabulated };

  static Weight constant(double c);
  static Weight power(double a);  // |x|^a, radial
  static Weight coord_power(std::vector<double> a);  // prod_j |x_j|^{a_j}
  static Weight tabulated(const Grid& g, std::vector<double> values);

  Kind kind() const { return kind_; }
  double power_exponent() const { return a_; }
  const std::vector<double>& coord_exponents() const { return coord_a_; }
  double constant_value() const { return c_; }

  // Pointwise value; infinite at the singularity of negative powers.
  double eval(const double* x, int n) const;
  // Value with the singular node replaced by the exact average over the cell
  // of width h centered at x (power kinds only need this at x = 0).
  double eval_cell_avg(const double* x, int n, double h) const;

  Weight dual(double p) const;  // w'_p = w^{-1/(p-1)}
  Weight pow(double r) const;   // w^r

  nlohmann::json to_json() const;
  static Weight from_json(const nlohmann::json& j);

  std::string describe() const;

private:
  Weight() = default;
  Kind kind_ = Kind::Constant;
  double c_ = 1.0;
  double a_ = 0.0;
  std::vector<double> coord_a_;
  Grid tab_grid_;
  std::vector<double> tab_values_;
};

struct Quadrature {
  int per_axis = 512;  // midpoint resolution per axis for non-closed-form
};

// integral of w over the box. Closed form for constant/coordinate-power and
// 1-d radial power; midpoint quadrature otherwise, skipping the singular
// cell of power weights.
double integrate(const Weight& w, const Box& box, const Quadrature& q = {});

struct CharacteristicEstimate {
  double value = 0.0;
  std::string family;
  bool is_lower_bound = true;
};

CharacteristicEstimate ap_characteristic(const Weight& w, double p,
                                         BoxShape shape,
                                         const std::vector<Box>& candidates,
                                         const Quadrature& q = {});

CharacteristicEstimate two_weight_characteristic(
    const Weight& w, const Weight& s, double p, BoxShape shape,
    const std::vector<Box>& candidates, const Quadrature& q = {});

// Fujii-Wilson A_infty: sup_A (1/w(A)) int_A M(w 1_A). The maximal function
// is evaluated discretely on the supplied grid with the supplied window
// scales (node counts per axis).
CharacteristicEstimate ainf_characteristic(const Weight& w, BoxShape shape,
                                           const std::vector<Box>& candidates,
                                           const Grid& grid,
                                           const std::vector<int>& scales);

// [w,s]_{A_p^r} = sup_Q (s^r(Q)/|Q|)^{1/r-1/p} (w(Q)/|Q|)^{1/p}, cubes only.
CharacteristicEstimate apr_characteristic(const Weight& w, const Weight& s,
                                          double p, double r,
                                          const std::vector<Box>& candidates,
                                          const Quadrature& q = {});

// Discrete Hardy-Littlewood maximal function. Windows are axis-parallel
// boxes of side lengths drawn from `scales` (node counts), at every grid
// position fully inside the domain; cubes use equal sides, rectangles any
// combination. Exact: with scales = {1..N} this is the supremum over all
// node boxes.
SampledFunction maximal_function(const SampledFunction& f, BoxShape shape,
                                 const std::vector<int>& scales);

// Candidate families. Log-spaced widths; per width, straddling offsets
// around the power-weight singularity at 0 plus one-sided translates.
std::vector<Box> interval_family(double w_min, double w_max,
                                 int widths_per_decade = 8,
                                 int straddle_steps = 64,
                                 int offset_steps = 16);
// n-dimensional products of the 1-d ladder (restricted sizes).
std::vector<Box> rect_family(int n, double w_min, double w_max,
                             int widths_per_decade = 3, int straddle_steps = 6,
                             int offset_steps = 3);
std::vector<Box> cube_family(int n, double w_min, double w_max,
                             int widths_per_decade = 6, int offset_steps = 8);

}  // namespace wmlab
