// Fourier multiplier operators T_m for matrix-valued symbols, frequency and
// coordinate cutoffs, the principal-value Hilbert transform, and symbol
// adjoints.
//
// Box membership of frequency nodes is half-open, [lo, hi) per axis, so
// indicator partitions are exact on the discrete grid. sgn(0) := 0.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "wmlab/grid.hpp"
#include "wmlab/weights.hpp"
#include "json.hpp"

namespace wmlab {

using Matrix = Eigen::MatrixXcd;

// Matrix-valued symbol tabulated on the frequency nodes of a grid, with
// optional analytic closures for off-grid evaluation and derivatives.
struct MatrixSymbol {
  Grid grid;
  int d_in = 1, d_out = 1;
  // node-major, row-major within the fiber: values[(node*d_out + r)*d_in + c]
  std::vector<cplx> values;

  // optional closures; `alpha` is a multi-index, one entry per axis
  std::function<Matrix(const std::vector<double>& xi)> value_fn;
  std::function<Matrix(const std::vector<int>& alpha,
                       const std::vector<double>& xi)>
      deriv_fn;
  int deriv_order = 0;

  MatrixSymbol() = default;
  MatrixSymbol(const Grid& g, int din, int dout)
      : grid(g),
        d_in(din),
        d_out(dout),
        values(g.size() * din * dout, cplx(0.0)) {}

  Matrix node_matrix(std::size_t node) const;
  void set_node_matrix(std::size_t node, const Matrix& m);

  bool has_closure() const { return static_cast<bool>(value_fn); }
  Matrix eval(const std::vector<double>& xi) const;
  // analytic derivative if available, else central finite differences of the
  // value closure with relative step 1e-4 per axis
  Matrix derivative(const std::vector<int>& alpha,
                    const std::vector<double>& xi) const;
};

// Tabulates a closure on the grid (and verifies nothing: the table is the
// closure's own values).
MatrixSymbol make_symbol(const Grid& g, int d_in, int d_out,
                         std::function<Matrix(const std::vector<double>&)> f);

// Common symbols.
MatrixSymbol identity_symbol(const Grid& g, int d = 1);
MatrixSymbol sgn_symbol(const Grid& g);             // sgn(xi_1), sgn(0) = 0
MatrixSymbol hilbert_symbol(const Grid& g);         // -pi i sgn(xi), 1-d
MatrixSymbol indicator_symbol(const Grid& g, const Box& box);
MatrixSymbol halfline_symbol(const Grid& g, int axis = 0);  // 1_{xi_axis >= 0}

nlohmann::json symbol_spec_to_json(const MatrixSymbol& m);
MatrixSymbol symbol_from_json(const nlohmann::json& spec, const Grid& g);

SampledFunction apply_multiplier(const MatrixSymbol& m,
                                 const SampledFunction& f);

// Delta(A) = T_{1_A}; box is half-open per axis.
SampledFunction frequency_cutoff(const Box& box, const SampledFunction& f);

struct Interval {
  double lo, hi;  // hi may be +inf (use huge), lo -inf
};

// Delta_j[I]: spectrum multiplied by 1_I(xi_j); axis is 0-based.
SampledFunction coordinate_cutoff(int axis, const Interval& I,
                                  const SampledFunction& f);

// Principal-value Riemann sum for (Hf)(x) = p.v. int f(t)/(x-t) dt on the
// periodic box, skipping the singular node (truncation eps = h). The kernel
// is the periodization sum_m 1/(x-t+mL) = (pi/L) cot(pi (x-t)/L), whose
// Fourier multiplier is exactly -pi i sgn(xi); the Riemann sum itself is
// first-order accurate in h.
SampledFunction hilbert_transform_quadrature(const SampledFunction& f);

// m~*(xi) = [m(-xi)]^*, conjugate transpose at the reflected node; the
// Nyquist node maps to itself.
MatrixSymbol adjoint_symbol(const MatrixSymbol& m);

// The norming duality pairing used for adjoint checks: a bilinear-type
// pairing <u, v> = h^n sum_x <u(x), conj(v(-x))>. Under it
// <T_m f, g> = <f, T_{m~*} g> exactly.
cplx duality_pairing(const SampledFunction& u, const SampledFunction& v);

}  // namespace wmlab
