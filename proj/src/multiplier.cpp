#include "wmlab/multiplier.hpp"

#include <cmath>

namespace wmlab {

// defined in symbols.cpp
MatrixSymbol maxreg_symbol(const Matrix& A, const Grid& g);

Matrix MatrixSymbol::node_matrix(std::size_t node) const {
  Matrix m(d_out, d_in);
  for (int r = 0; r < d_out; ++r)
    for (int c = 0; c < d_in; ++c)
      m(r, c) = values[(node * d_out + r) * d_in + c];
  return m;
}

void MatrixSymbol::set_node_matrix(std::size_t node, const Matrix& m) {
  for (int r = 0; r < d_out; ++r)
    for (int c = 0; c < d_in; ++c)
      values[(node * d_out + r) * d_in + c] = m(r, c);
}

Matrix MatrixSymbol::eval(const std::vector<double>& xi) const {
  if (!value_fn)
    throw std::invalid_argument("symbol has no off-grid value closure");
  return value_fn(xi);
}

Matrix MatrixSymbol::derivative(const std::vector<int>& alpha,
                                const std::vector<double>& xi) const {
  int order = 0;
  for (int a : alpha) order += a;
  if (order == 0) return eval(xi);
  if (deriv_fn && order <= deriv_order) return deriv_fn(alpha, xi);
  if (!value_fn)
    throw std::invalid_argument(
        "symbol derivative unavailable: no closure to differentiate");
  // central finite difference in the first axis with alpha_j > 0, recursing
  // on the remaining order
  int axis = -1;
  for (std::size_t a = 0; a < alpha.size(); ++a)
    if (alpha[a] > 0) {
      axis = static_cast<int>(a);
      break;
    }
  std::vector<int> rest(alpha);
  rest[axis] -= 1;
  double step = 1e-4 * std::max(std::fabs(xi[axis]), 1e-8);
  std::vector<double> xp(xi), xm(xi);
  xp[axis] += step;
  xm[axis] -= step;
  return (derivative(rest, xp) - derivative(rest, xm)) / (2.0 * step);
}

MatrixSymbol make_symbol(const Grid& g, int d_in, int d_out,
                         std::function<Matrix(const std::vector<double>&)> f) {
  MatrixSymbol m(g, d_in, d_out);
  std::vector<double> xi(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.freq_coords(i, xi.data());
    m.set_node_matrix(i, f(xi));
  }
  m.value_fn = std::move(f);
  return m;
}

MatrixSymbol identity_symbol(const Grid& g, int d) {
  auto m = make_symbol(g, d, d, [d](const std::vector<double>&) {
    return Matrix::Identity(d, d);
  });
  m.deriv_order = 8;
  m.deriv_fn = [d](const std::vector<int>& alpha, const std::vector<double>&) {
    int o = 0;
    for (int a : alpha) o += a;
    return o == 0 ? Matrix(Matrix::Identity(d, d)) : Matrix(Matrix::Zero(d, d));
  };
  return m;
}

namespace {
double sgn(double t) { return t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0); }
}  // namespace

MatrixSymbol sgn_symbol(const Grid& g) {
  auto m = make_symbol(g, 1, 1, [](const std::vector<double>& xi) {
    Matrix v(1, 1);
    v(0, 0) = sgn(xi[0]);
    return v;
  });
  m.deriv_order = 8;
  m.deriv_fn = [](const std::vector<int>& alpha, const std::vector<double>& xi) {
    Matrix v(1, 1);
    int o = 0;
    for (int a : alpha) o += a;
    v(0, 0) = o == 0 ? sgn(xi[0]) : 0.0;
    return v;
  };
  return m;
}

MatrixSymbol hilbert_symbol(const Grid& g) {
  if (g.dim() != 1)
    throw std::invalid_argument("hilbert_symbol: 1-d grids only");
  auto m = make_symbol(g, 1, 1, [](const std::vector<double>& xi) {
    Matrix v(1, 1);
    v(0, 0) = cplx(0.0, -M_PI * sgn(xi[0]));
    return v;
  });
  m.deriv_order = 8;
  m.deriv_fn = [](const std::vector<int>& alpha, const std::vector<double>& xi) {
    Matrix v(1, 1);
    int o = 0;
    for (int a : alpha) o += a;
    v(0, 0) = o == 0 ? cplx(0.0, -M_PI * sgn(xi[0])) : cplx(0.0);
    return v;
  };
  return m;
}

MatrixSymbol indicator_symbol(const Grid& g, const Box& box) {
  if (box.dim() != g.dim())
    throw std::invalid_argument("indicator_symbol: box dimension mismatch");
  Box b = box;
  return make_symbol(g, 1, 1, [b](const std::vector<double>& xi) {
    Matrix v(1, 1);
    bool in = true;
    for (int a = 0; a < (int)xi.size(); ++a)
      if (xi[a] < b.lo[a] || xi[a] >= b.hi[a]) in = false;
    v(0, 0) = in ? 1.0 : 0.0;
    return v;
  });
}

MatrixSymbol halfline_symbol(const Grid& g, int axis) {
  return make_symbol(g, 1, 1, [axis](const std::vector<double>& xi) {
    Matrix v(1, 1);
    v(0, 0) = xi[axis] >= 0.0 ? 1.0 : 0.0;
    return v;
  });
}

SampledFunction apply_multiplier(const MatrixSymbol& m,
                                 const SampledFunction& f) {
  if (!(m.grid == f.grid))
    throw std::invalid_argument("apply_multiplier: grid mismatch");
  if (m.d_in != f.fiber_dim)
    throw std::invalid_argument("apply_multiplier: fiber dimension mismatch");
  SampledSpectrum F = forward_dft(f);
  SampledSpectrum G(f.grid, m.d_out);
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    for (int r = 0; r < m.d_out; ++r) {
      cplx acc(0.0);
      for (int c = 0; c < m.d_in; ++c)
        acc += m.values[(i * m.d_out + r) * m.d_in + c] * F.at(i, c);
      G.at(i, r) = acc;
    }
  }
  return inverse_dft(G);
}

SampledFunction frequency_cutoff(const Box& box, const SampledFunction& f) {
  const Grid& g = f.grid;
  if (box.dim() != g.dim())
    throw std::invalid_argument("frequency_cutoff: box dimension mismatch");
  SampledSpectrum F = forward_dft(f);
  std::vector<double> xi(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.freq_coords(i, xi.data());
    bool in = true;
    for (int a = 0; a < g.dim(); ++a)
      if (xi[a] < box.lo[a] || xi[a] >= box.hi[a]) in = false;
    if (!in)
      for (int c = 0; c < f.fiber_dim; ++c) F.at(i, c) = 0.0;
  }
  return inverse_dft(F);
}

SampledFunction coordinate_cutoff(int axis, const Interval& I,
                                  const SampledFunction& f) {
  const Grid& g = f.grid;
  if (axis < 0 || axis >= g.dim())
    throw std::invalid_argument("coordinate_cutoff: axis out of range");
  SampledSpectrum F = forward_dft(f);
  std::vector<double> xi(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.freq_coords(i, xi.data());
    if (xi[axis] < I.lo || xi[axis] >= I.hi)
      for (int c = 0; c < f.fiber_dim; ++c) F.at(i, c) = 0.0;
  }
  return inverse_dft(F);
}

SampledFunction hilbert_transform_quadrature(const SampledFunction& f) {
  const Grid& g = f.grid;
  if (g.dim() != 1)
    throw std::invalid_argument("hilbert_transform_quadrature: 1-d only");
  const int N = g.axis_points();
  const double h = g.spacing();
  const double L = g.box_length();
  // On the periodic box the kernel 1/(x-t) periodizes to
  // sum_m 1/(x-t+mL) = (pi/L) cot(pi (x-t)/L), whose Fourier multiplier is
  // -pi i sgn(xi) exactly at every nonzero frequency. Toeplitz in i-j, so
  // precompute one kernel row.
  std::vector<double> kern(N, 0.0);
  for (int m = 1; m < N; ++m)
    kern[m] = (M_PI / L) / std::tan(M_PI * m / N);
  SampledFunction out(g, f.fiber_dim);
  for (int i = 0; i < N; ++i) {
    for (int c = 0; c < f.fiber_dim; ++c) {
      cplx acc(0.0);
      for (int j = 0; j < N; ++j) {
        if (j == i) continue;  // |x - t| >= eps = h
        int m = i - j;
        if (m < 0) m += N;
        acc += f.at(j, c) * kern[m];
      }
      out.at(i, c) = acc * h;
    }
  }
  return out;
}

MatrixSymbol adjoint_symbol(const MatrixSymbol& m) {
  MatrixSymbol out(m.grid, m.d_out, m.d_in);
  const Grid& g = m.grid;
  const int n = g.dim();
  std::vector<int> s(n), rs(n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.unflatten(i, s.data());
    for (int a = 0; a < n; ++a) rs[a] = g.reflect(s[a]);
    Matrix v = m.node_matrix(g.flatten(rs.data()));
    out.set_node_matrix(i, v.adjoint());
  }
  if (m.value_fn) {
    auto base = m.value_fn;
    out.value_fn = [base](const std::vector<double>& xi) {
      std::vector<double> neg(xi);
      for (auto& t : neg) t = -t;
      return Matrix(base(neg).adjoint());
    };
  }
  if (m.deriv_fn) {
    auto based = m.deriv_fn;
    out.deriv_order = m.deriv_order;
    out.deriv_fn = [based](const std::vector<int>& alpha,
                           const std::vector<double>& xi) {
      std::vector<double> neg(xi);
      for (auto& t : neg) t = -t;
      int o = 0;
      for (int a : alpha) o += a;
      Matrix d = based(alpha, neg).adjoint();
      return Matrix((o % 2 ? -1.0 : 1.0) * d);
    };
  }
  return out;
}

cplx duality_pairing(const SampledFunction& u, const SampledFunction& v) {
  if (!(u.grid == v.grid) || u.fiber_dim != v.fiber_dim)
    throw std::invalid_argument("duality_pairing: incompatible functions");
  const Grid& g = u.grid;
  const int n = g.dim();
  const int N = g.axis_points();
  std::vector<int> s(n), rs(n);
  cplx acc(0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.unflatten(i, s.data());
    // spatial reflection x -> -x in periodic indexing (0 stays put)
    for (int a = 0; a < n; ++a) rs[a] = s[a] == 0 ? 0 : N - s[a];
    std::size_t ri = g.flatten(rs.data());
    for (int c = 0; c < u.fiber_dim; ++c)
      acc += u.at(i, c) * std::conj(v.at(ri, c));
  }
  return acc * std::pow(g.spacing(), n);
}

nlohmann::json symbol_spec_to_json(const MatrixSymbol& m) {
  return {{"kind", "tabulated"},
          {"d_in", m.d_in},
          {"d_out", m.d_out},
          {"grid",
           {{"n", m.grid.dim()},
            {"N", m.grid.axis_points()},
            {"L", m.grid.box_length()}}}};
}

MatrixSymbol symbol_from_json(const nlohmann::json& spec, const Grid& g) {
  std::string kind = spec.at("kind").get<std::string>();
  if (kind == "identity") return identity_symbol(g, spec.value("d", 1));
  if (kind == "sgn") return sgn_symbol(g);
  if (kind == "hilbert") return hilbert_symbol(g);
  if (kind == "halfline") return halfline_symbol(g, spec.value("axis", 0));
  if (kind == "indicator") {
    auto lo = spec.at("box").at("lo").get<std::vector<double>>();
    auto hi = spec.at("box").at("hi").get<std::vector<double>>();
    return indicator_symbol(g, Box(lo, hi));
  }
  if (kind == "resolvent") {
    auto rows = spec.at("A").get<std::vector<std::vector<double>>>();
    int d = static_cast<int>(rows.size());
    Matrix A(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) A(r, c) = rows[r][c];
    return maxreg_symbol(A, g);
  }
  if (kind == "tabulated") {
    auto vals = spec.at("values").get<std::vector<std::vector<double>>>();
    int din = spec.value("d_in", 1), dout = spec.value("d_out", 1);
    MatrixSymbol m(g, din, dout);
    if (vals.size() != m.values.size())
      throw std::invalid_argument("tabulated symbol: wrong value count");
    for (std::size_t i = 0; i < vals.size(); ++i)
      m.values[i] = cplx(vals[i][0], vals[i][1]);
    return m;
  }
  throw std::invalid_argument("unknown symbol kind: " + kind);
}

}  // namespace wmlab
