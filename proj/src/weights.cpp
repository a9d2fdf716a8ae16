#include "wmlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace wmlab {

Box::Box(std::vector<double> l, std::vector<double> h)
    : lo(std::move(l)), hi(std::move(h)) {
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("Box: corner dimension mismatch");
  for (std::size_t a = 0; a < lo.size(); ++a)
    if (!(hi[a] > lo[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a]))
      throw std::invalid_argument("Box: needs positive finite volume");
}

double Box::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= side(a);
  return v;
}

bool Box::is_cube(double tol) const {
  for (int a = 1; a < dim(); ++a)
    if (std::fabs(side(a) - side(0)) > tol * side(0)) return false;
  return true;
}

bool Box::contains_zero() const {
  for (int a = 0; a < dim(); ++a)
    if (lo[a] > 0.0 || hi[a] < 0.0) return false;
  return true;
}

std::string Box::describe() const {
  std::ostringstream os;
  for (int a = 0; a < dim(); ++a)
    os << (a ? " x " : "") << "[" << lo[a] << "," << hi[a] << "]";
  return os.str();
}

Weight Weight::constant(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("constant weight must be > 0");
  Weight w;
  w.kind_ = Kind::Constant;
  w.c_ = c;
  return w;
}

Weight Weight::power(double a) {
  Weight w;
  w.kind_ = Kind::Power;
  w.a_ = a;
  return w;
}

Weight Weight::coord_power(std::vector<double> a) {
  for (double e : a)
    if (e <= -1.0)
      throw std::invalid_argument(
          "coord_power: exponent <= -1 is not locally integrable");
  Weight w;
  w.kind_ = Kind::CoordPower;
  w.coord_a_ = std::move(a);
  return w;
}

Weight Weight::tabulated(const Grid& g, std::vector<double> values) {
  if (values.size() != g.size())
    throw std::invalid_argument("tabulated weight: value count != grid size");
  Weight w;
  w.kind_ = Kind::Tabulated;
  w.tab_grid_ = g;
  w.tab_values_ = std::move(values);
  return w;
}

double Weight::eval(const double* x, int n) const {
  switch (kind_) {
    case Kind::Constant:
      return c_;
    case Kind::Power: {
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
      return std::pow(r2, a_ / 2.0);
    }
    case Kind::CoordPower: {
      double v = 1.0;
      for (int a = 0; a < n; ++a)
        v *= std::pow(std::fabs(x[a]),
                      a < (int)coord_a_.size() ? coord_a_[a] : 0.0);
      return v;
    }
    case Kind::Tabulated: {
      int s[3];
      for (int a = 0; a < n; ++a) {
        double t = (x[a] + tab_grid_.box_length() / 2) / tab_grid_.spacing();
        s[a] = std::clamp(static_cast<int>(std::lround(t)), 0,
                          tab_grid_.axis_points() - 1);
      }
      return tab_values_[tab_grid_.flatten(s)];
    }
  }
  return 1.0;
}

namespace {

// int_alpha^beta |t|^a dt. Closed form for a != -1 anywhere (the
// antiderivative sign(t)|t|^{a+1}/(a+1) is valid across 0 when a > -1);
// a <= -1 is rejected on intervals through 0.
double power_interval_integral(double a, double alpha, double beta) {
  if (a <= -1.0 && alpha <= 0.0 && beta >= 0.0)
    throw std::invalid_argument(
        "power integral: exponent <= -1 not integrable across 0");
  if (a == -1.0) {
    return std::log(std::fabs(beta)) - std::log(std::fabs(alpha));
  }
  auto F = [a](double t) {
    return (t >= 0 ? 1.0 : -1.0) * std::pow(std::fabs(t), a + 1.0) / (a + 1.0);
  };
  return F(beta) - F(alpha);
}

}  // namespace

double Weight::eval_cell_avg(const double* x, int n, double h) const {
  bool at_origin = true;
  for (int a = 0; a < n; ++a)
    if (std::fabs(x[a]) > h * 1e-9) at_origin = false;
  if (!at_origin || (kind_ != Kind::Power && kind_ != Kind::CoordPower))
    return eval(x, n);
  if (kind_ == Kind::CoordPower) {
    double v = 1.0;
    for (int a = 0; a < n; ++a) {
      double e = a < (int)coord_a_.size() ? coord_a_[a] : 0.0;
      v *= power_interval_integral(e, -h / 2, h / 2) / h;
    }
    return v;
  }
  if (n == 1) return power_interval_integral(a_, -h / 2, h / 2) / h;
  // radial power in n >= 2: midpoint average over the cell, center excluded
  const int K = 16;
  double sum = 0.0;
  int cnt = 0;
  std::vector<double> y(n);
  std::vector<int> idx(n, 0);
  for (;;) {
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) {
      y[a] = -h / 2 + (idx[a] + 0.5) * h / K;
      r2 += y[a] * y[a];
    }
    if (r2 > 0) {
      sum += std::pow(r2, a_ / 2.0);
      ++cnt;
    }
    int a = 0;
    while (a < n && ++idx[a] == K) idx[a++] = 0;
    if (a == n) break;
  }
  return sum / cnt;
}

Weight Weight::dual(double p) const {
  if (!(p > 1.0)) throw std::invalid_argument("dual weight needs p > 1");
  return pow(-1.0 / (p - 1.0));
}

Weight Weight::pow(double r) const {
  switch (kind_) {
    case Kind::Constant: {
      Weight w;
      w.kind_ = Kind::Constant;
      w.c_ = std::pow(c_, r);
      return w;
    }
    case Kind::Power: {
      Weight w;
      w.kind_ = Kind::Power;
      w.a_ = a_ * r;
      return w;
    }
    case Kind::CoordPower: {
      Weight w;
      w.kind_ = Kind::CoordPower;
      w.coord_a_ = coord_a_;
      for (auto& v : w.coord_a_) v *= r;
      return w;
    }
    case Kind::Tabulated: {
      Weight w;
      w.kind_ = Kind::Tabulated;
      w.tab_grid_ = tab_grid_;
      w.tab_values_ = tab_values_;
      for (auto& t : w.tab_values_) t = std::pow(t, r);
      return w;
    }
  }
  return *this;
}

nlohmann::json Weight::to_json() const {
  switch (kind_) {
    case Kind::Constant:
      return {{"kind", "constant"}, {"c", c_}};
    case Kind::Power:
      return {{"kind", "power"}, {"a", a_}};
    case Kind::CoordPower:
      return {{"kind", "coord_power"}, {"a", coord_a_}};
    case Kind::Tabulated:
      return {{"kind", "tabulated"},
              {"grid",
               {{"n", tab_grid_.dim()},
                {"N", tab_grid_.axis_points()},
                {"L", tab_grid_.box_length()}}},
              {"values", tab_values_}};
  }
  return {};
}

Weight Weight::from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return constant(j.at("c").get<double>());
  if (kind == "power") return power(j.at("a").get<double>());
  if (kind == "coord_power")
    return coord_power(j.at("a").get<std::vector<double>>());
  if (kind == "tabulated") {
    auto gj = j.at("grid");
    Grid g = make_grid(gj.at("n").get<int>(), gj.at("N").get<int>(),
                       gj.at("L").get<double>());
    return tabulated(g, j.at("values").get<std::vector<double>>());
  }
  throw std::invalid_argument("unknown weight kind: " + kind);
}

std::string Weight::describe() const { return to_json().dump(); }

double integrate(const Weight& w, const Box& box, const Quadrature& q) {
  const int n = box.dim();
  switch (w.kind()) {
    case Weight::Kind::Constant:
      return w.constant_value() * box.volume();
    case Weight::Kind::CoordPower: {
      double v = 1.0;
      for (int a = 0; a < n; ++a) {
        double e =
            a < (int)w.coord_exponents().size() ? w.coord_exponents()[a] : 0.0;
        v *= power_interval_integral(e, box.lo[a], box.hi[a]);
      }
      return v;
    }
    case Weight::Kind::Power: {
      double a = w.power_exponent();
      if (n == 1) return power_interval_integral(a, box.lo[0], box.hi[0]);
      if (a <= -n && box.contains_zero())
        throw std::invalid_argument(
            "integrate: |x|^a with a <= -n not integrable across 0");
      const int K = q.per_axis;
      std::vector<int> idx(n, 0);
      std::vector<double> x(n);
      double cellv = 1.0;
      for (int a2 = 0; a2 < n; ++a2) cellv *= box.side(a2) / K;
      double sum = 0.0;
      for (;;) {
        double r2 = 0.0;
        for (int a2 = 0; a2 < n; ++a2) {
          x[a2] = box.lo[a2] + (idx[a2] + 0.5) * box.side(a2) / K;
          r2 += x[a2] * x[a2];
        }
        if (r2 > 0) sum += std::pow(r2, a / 2.0);
        int a2 = 0;
        while (a2 < n && ++idx[a2] == K) idx[a2++] = 0;
        if (a2 == n) break;
      }
      return sum * cellv;
    }
    case Weight::Kind::Tabulated: {
      // node-count quadrature over nodes inside [lo, hi), non-finite
      // (singular) nodes excluded
      nlohmann::json j = w.to_json();
      Grid g = make_grid(j["grid"]["n"].get<int>(), j["grid"]["N"].get<int>(),
                         j["grid"]["L"].get<double>());
      auto vals = j["values"].get<std::vector<double>>();
      if (g.dim() != n)
        throw std::invalid_argument("integrate: box/grid dimension mismatch");
      double hn = std::pow(g.spacing(), n);
      std::vector<double> x(n);
      double sum = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        g.node_coords(i, x.data());
        bool in = true;
        for (int a = 0; a < n; ++a)
          if (x[a] < box.lo[a] || x[a] >= box.hi[a]) in = false;
        if (in && std::isfinite(vals[i])) sum += vals[i];
      }
      return sum * hn;
    }
  }
  return 0.0;
}

namespace {

double box_value_pair(const Weight& w, const Weight& s_dual, double p,
                      const Box& A, const Quadrature& q) {
  double vol = A.volume();
  double mw = integrate(w, A, q) / vol;
  double ms = integrate(s_dual, A, q) / vol;
  return mw * std::pow(ms, p - 1.0);
}

void check_dual_integrable(const Weight& dual_w,
                           const std::vector<Box>& candidates) {
  if (dual_w.kind() == Weight::Kind::CoordPower) {
    const auto& ee = dual_w.coord_exponents();
    for (int j = 0; j < (int)ee.size(); ++j) {
      if (ee[j] > -1.0) continue;
      for (const auto& A : candidates)
        if (j < A.dim() && A.lo[j] <= 0.0 && A.hi[j] >= 0.0)
          throw std::invalid_argument(
              "dual weight not integrable: exponent <= -1 in 1-d factor " +
              std::to_string(j + 1));
    }
  } else if (dual_w.kind() == Weight::Kind::Power) {
    for (const auto& A : candidates)
      if (A.dim() == 1 && A.contains_zero() && dual_w.power_exponent() <= -1.0)
        throw std::invalid_argument(
            "dual weight not integrable: exponent <= -1 in 1-d factor 1");
  }
}

std::vector<Box> filter_shape(const std::vector<Box>& candidates,
                              BoxShape shape) {
  if (shape == BoxShape::Rectangles) return candidates;
  std::vector<Box> out;
  for (const auto& b : candidates)
    if (b.is_cube()) out.push_back(b);
  return out;
}

}  // namespace

CharacteristicEstimate two_weight_characteristic(
    const Weight& w, const Weight& s, double p, BoxShape shape,
    const std::vector<Box>& candidates, const Quadrature& q) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("characteristic needs p in (1, inf)");
  auto boxes = filter_shape(candidates, shape);
  if (boxes.empty())
    throw std::invalid_argument("characteristic: empty candidate family");
  Weight sd = s.dual(p);
  check_dual_integrable(sd, boxes);
  double best = 0.0;
  for (const auto& A : boxes)
    best = std::max(best, box_value_pair(w, sd, p, A, q));
  CharacteristicEstimate e;
  e.value = best;
  e.family = std::to_string(boxes.size()) + " candidate boxes, " +
             (shape == BoxShape::Cubes ? "cubes" : "rectangles");
  e.is_lower_bound = true;
  return e;
}

CharacteristicEstimate ap_characteristic(const Weight& w, double p,
                                         BoxShape shape,
                                         const std::vector<Box>& candidates,
                                         const Quadrature& q) {
  return two_weight_characteristic(w, w, p, shape, candidates, q);
}

CharacteristicEstimate apr_characteristic(const Weight& w, const Weight& s,
                                          double p, double r,
                                          const std::vector<Box>& candidates,
                                          const Quadrature& q) {
  if (!(1.0 < r && r < p))
    throw std::invalid_argument("apr_characteristic needs 1 < r < p");
  auto boxes = filter_shape(candidates, BoxShape::Cubes);
  if (boxes.empty())
    throw std::invalid_argument("apr_characteristic: empty cube family");
  Weight sr = s.pow(r);
  double best = 0.0;
  for (const auto& A : boxes) {
    double vol = A.volume();
    double msr = integrate(sr, A, q) / vol;
    double mw = integrate(w, A, q) / vol;
    best = std::max(best,
                    std::pow(msr, 1.0 / r - 1.0 / p) * std::pow(mw, 1.0 / p));
  }
  CharacteristicEstimate e;
  e.value = best;
  e.family = std::to_string(boxes.size()) + " candidate cubes";
  e.is_lower_bound = true;
  return e;
}

SampledFunction maximal_function(const SampledFunction& f, BoxShape shape,
                                 const std::vector<int>& scales) {
  if (scales.empty())
    throw std::invalid_argument("maximal_function: empty scale list");
  if (f.fiber_dim != 1)
    throw std::invalid_argument("maximal_function: scalar fiber required");
  const Grid& g = f.grid;
  const int n = g.dim();
  const int N = g.axis_points();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (f.values[i].real() < -1e-14 || std::fabs(f.values[i].imag()) > 1e-14)
      throw std::invalid_argument("maximal_function: f must be nonnegative");
  for (int s : scales)
    if (s < 1 || s > N)
      throw std::invalid_argument("maximal_function: scale out of range");

  // n-d prefix sums for O(1) box sums
  std::vector<double> pref(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) pref[i] = f.values[i].real();
  for (int axis = 0; axis < n; ++axis) {
    std::size_t stride = 1;
    for (int a = axis + 1; a < n; ++a) stride *= N;
    std::size_t outer = g.size() / N;
    for (std::size_t o = 0; o < outer; ++o) {
      std::size_t inner = o % stride;
      std::size_t major = o / stride;
      std::size_t base = major * stride * N + inner;
      for (int j = 1; j < N; ++j)
        pref[base + j * stride] += pref[base + (j - 1) * stride];
    }
  }
  int corner_idx[3];
  auto box_sum = [&](const int* lo, const int* len) {
    double acc = 0.0;
    int corners = 1 << n;
    for (int c = 0; c < corners; ++c) {
      bool skip = false;
      int sign = 1;
      for (int a = 0; a < n; ++a) {
        if (c & (1 << a)) {
          corner_idx[a] = lo[a] - 1;
          sign = -sign;
          if (corner_idx[a] < 0) {
            skip = true;
            break;
          }
        } else {
          corner_idx[a] = lo[a] + len[a] - 1;
        }
      }
      if (skip) continue;
      acc += sign * pref[g.flatten(corner_idx)];
    }
    return acc;
  };

  // side-length combinations: cubes use equal sides, rectangles any product
  std::vector<std::vector<int>> combos;
  if (shape == BoxShape::Cubes || n == 1) {
    for (int s : scales) combos.push_back(std::vector<int>(n, s));
  } else {
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) total *= scales.size();
    std::vector<int> cur(n);
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t tt = t;
      for (int a = 0; a < n; ++a) {
        cur[a] = scales[tt % scales.size()];
        tt /= scales.size();
      }
      combos.push_back(cur);
    }
  }

  SampledFunction out(g, 1);
  std::vector<double> window_avg(g.size());
  std::vector<int> lo(n), len(n);
  for (const auto& sides : combos) {
    double cnt = 1.0;
    for (int a = 0; a < n; ++a) cnt *= sides[a];
    // average of every fully-inside window, stored at its anchor corner
    std::fill(window_avg.begin(), window_avg.end(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.unflatten(i, lo.data());
      bool ok = true;
      for (int a = 0; a < n; ++a)
        if (lo[a] + sides[a] > N) ok = false;
      if (!ok) continue;
      for (int a = 0; a < n; ++a) len[a] = sides[a];
      window_avg[i] = box_sum(lo.data(), len.data()) / cnt;
    }
    // node x sees anchors in [x - side + 1, x] per axis: running max pass
    // along each axis (monotone deque)
    std::vector<double> tmp = window_avg;
    for (int axis = 0; axis < n; ++axis) {
      std::size_t stride = 1;
      for (int a = axis + 1; a < n; ++a) stride *= N;
      std::size_t outer = g.size() / N;
      std::vector<double> line(N), rl(N);
      std::vector<double> res(g.size());
      int k = sides[axis];
      for (std::size_t o = 0; o < outer; ++o) {
        std::size_t inner = o % stride;
        std::size_t major = o / stride;
        std::size_t base = major * stride * N + inner;
        for (int j = 0; j < N; ++j) line[j] = tmp[base + j * stride];
        std::deque<int> dq;
        for (int x = 0; x < N; ++x) {
          while (!dq.empty() && line[dq.back()] <= line[x]) dq.pop_back();
          dq.push_back(x);
          if (dq.front() <= x - k) dq.pop_front();
          rl[x] = line[dq.front()];
        }
        for (int j = 0; j < N; ++j) res[base + j * stride] = rl[j];
      }
      tmp.swap(res);
    }
    for (std::size_t i = 0; i < g.size(); ++i)
      out.values[i] = std::max(out.values[i].real(), tmp[i]);
  }
  return out;
}

CharacteristicEstimate ainf_characteristic(const Weight& w, BoxShape shape,
                                           const std::vector<Box>& candidates,
                                           const Grid& grid,
                                           const std::vector<int>& scales) {
  auto boxes = filter_shape(candidates, shape);
  if (boxes.empty())
    throw std::invalid_argument("ainf_characteristic: empty candidate family");
  const int n = grid.dim();
  const double hn = std::pow(grid.spacing(), n);

  std::vector<double> wn(grid.size());
  std::vector<double> x(n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node_coords(i, x.data());
    wn[i] = w.eval_cell_avg(x.data(), n, grid.spacing());
    if (!std::isfinite(wn[i])) wn[i] = 0.0;  // singular-node exclusion
  }

  double best = 0.0;
  for (const auto& A : boxes) {
    SampledFunction u(grid, 1);
    double wA = 0.0;
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid.node_coords(i, x.data());
      bool in = true;
      for (int a = 0; a < n; ++a)
        if (x[a] < A.lo[a] || x[a] >= A.hi[a]) in = false;  // half-open
      if (in) {
        u.values[i] = wn[i];
        wA += wn[i] * hn;
        inside.push_back(i);
      }
    }
    if (wA <= 0.0)
      throw std::invalid_argument("ainf_characteristic: w(A) = 0 on " +
                                  A.describe());
    auto M = maximal_function(u, shape, scales);
    double num = 0.0;
    for (std::size_t i : inside) num += M.values[i].real() * hn;
    best = std::max(best, num / wA);
  }
  CharacteristicEstimate e;
  e.value = best;
  e.family =
      std::to_string(boxes.size()) + " candidate boxes (discrete A_inf)";
  e.is_lower_bound = true;
  return e;
}

std::vector<Box> interval_family(double w_min, double w_max,
                                 int widths_per_decade, int straddle_steps,
                                 int offset_steps) {
  std::vector<Box> out;
  int decades = std::max(1, (int)std::ceil(std::log10(w_max / w_min)));
  int nw = decades * widths_per_decade + 1;
  for (int i = 0; i <= nw; ++i) {
    double w = w_min * std::pow(w_max / w_min, double(i) / nw);
    for (int k = 0; k <= straddle_steps; ++k) {
      double u = double(k) / straddle_steps;
      double tau = 0.5 * std::pow(u, 3.0);  // cluster near the edge
      out.push_back(Box::interval(-tau * w, (1.0 - tau) * w));
      if (tau > 0.0) out.push_back(Box::interval(-(1.0 - tau) * w, tau * w));
    }
    out.push_back(Box::interval(-w / 2, w / 2));
    for (int k = 0; k <= offset_steps; ++k) {
      double u = w * std::pow(2.0, k - offset_steps / 2);
      out.push_back(Box::interval(u, u + w));
      out.push_back(Box::interval(-u - w, -u));
    }
  }
  return out;
}

std::vector<Box> cube_family(int n, double w_min, double w_max,
                             int widths_per_decade, int offset_steps) {
  if (n == 1) return interval_family(w_min, w_max, widths_per_decade, 24, 8);
  std::vector<Box> out;
  int decades = std::max(1, (int)std::ceil(std::log10(w_max / w_min)));
  int nw = decades * widths_per_decade + 1;
  for (int i = 0; i <= nw; ++i) {
    double w = w_min * std::pow(w_max / w_min, double(i) / nw);
    for (int k = 0; k <= offset_steps; ++k) {
      double tau = 0.5 * std::pow(double(k) / offset_steps, 3.0);
      out.emplace_back(std::vector<double>(n, -tau * w),
                       std::vector<double>(n, (1.0 - tau) * w));
      if (tau > 0.0)
        out.emplace_back(std::vector<double>(n, -(1.0 - tau) * w),
                         std::vector<double>(n, tau * w));
      double u = w * std::pow(2.0, k - offset_steps / 2);
      out.emplace_back(std::vector<double>(n, u),
                       std::vector<double>(n, u + w));
    }
    out.emplace_back(std::vector<double>(n, -w / 2),
                     std::vector<double>(n, w / 2));
  }
  return out;
}

std::vector<Box> rect_family(int n, double w_min, double w_max,
                             int widths_per_decade, int straddle_steps,
                             int offset_steps) {
  if (n == 1)
    return interval_family(w_min, w_max, widths_per_decade, straddle_steps,
                           offset_steps);
  auto axis = interval_family(w_min, w_max, widths_per_decade, straddle_steps,
                              offset_steps);
  std::vector<Box> out;
  if (n == 2) {
    for (const auto& A : axis)
      for (const auto& B : axis)
        out.push_back(Box({A.lo[0], B.lo[0]}, {A.hi[0], B.hi[0]}));
  } else {
    for (const auto& A : axis)
      for (const auto& B : axis)
        for (const auto& C : axis)
          out.push_back(
              Box({A.lo[0], B.lo[0], C.lo[0]}, {A.hi[0], B.hi[0], C.hi[0]}));
  }
  return out;
}

}  // namespace wmlab
