#include "wmlab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wmlab/opnorm.hpp"

namespace wmlab {

std::string DyadicCube::describe() const {
  std::ostringstream os;
  os << "cube(side=" << side << ", lo=[";
  for (std::size_t a = 0; a < lo.size(); ++a)
    os << (a ? "," : "") << lo[a];
  os << "])";
  return os.str();
}

std::vector<double> DyadicGridSpec::shift_for_scale(int j) const {
  std::vector<double> s(n, 0.0);
  for (const auto& [jp, bits] : shifts) {
    if (jp <= j || jp > j_max) continue;  // only 2^{-j'} < side contribute
    for (int a = 0; a < n; ++a)
      if (a < (int)bits.size() && bits[a]) s[a] += std::ldexp(1.0, -jp);
  }
  return s;
}

double DyadicGridSpec::truncation_defect() const {
  for (const auto& [jp, bits] : shifts)
    for (int b : bits)
      if (b) return std::ldexp(1.0, -j_max);
  return 0.0;
}

DyadicGridSpec DyadicGridSpec::zero(int n, int j_min, int j_max) {
  DyadicGridSpec s;
  s.n = n;
  s.j_min = j_min;
  s.j_max = j_max;
  for (int j = j_min; j <= j_max; ++j) s.shifts[j] = std::vector<int>(n, 0);
  return s;
}

DyadicGridSpec DyadicGridSpec::all_ones(int n, int j_min, int j_max) {
  DyadicGridSpec s = zero(n, j_min, j_max);
  for (int j = j_min; j <= j_max; ++j) s.shifts[j] = std::vector<int>(n, 1);
  return s;
}

DyadicGridSpec DyadicGridSpec::alternating(int n, int j_min, int j_max,
                                           int phase) {
  DyadicGridSpec s = zero(n, j_min, j_max);
  for (int j = j_min; j <= j_max; ++j)
    s.shifts[j] = std::vector<int>(n, ((j & 1) == (phase & 1)) ? 1 : 0);
  return s;
}

namespace {

std::vector<DyadicCube> cubes_for_scale(int n, int j,
                                        const std::vector<double>& shift,
                                        const Box& box) {
  double side = std::ldexp(1.0, -j);
  std::vector<DyadicCube> out;
  // whole cubes [m 2^{-j} + shift, (m+1) 2^{-j} + shift) inside the box
  std::vector<long long> m_lo(n), m_hi(n);
  for (int a = 0; a < n; ++a) {
    m_lo[a] = (long long)std::ceil((box.lo[a] - shift[a]) / side - 1e-12);
    m_hi[a] = (long long)std::floor((box.hi[a] - shift[a]) / side + 1e-12) - 1;
    if (m_hi[a] < m_lo[a]) return out;
  }
  std::vector<long long> m(m_lo);
  for (;;) {
    DyadicCube c;
    c.side = side;
    c.scale_j = j;
    c.lo.resize(n);
    for (int a = 0; a < n; ++a) c.lo[a] = m[a] * side + shift[a];
    out.push_back(c);
    int a = 0;
    while (a < n && ++m[a] > m_hi[a]) {
      m[a] = m_lo[a];
      ++a;
    }
    if (a == n) break;
  }
  return out;
}

}  // namespace

std::vector<DyadicCube> standard_dyadic_cubes(int n, int j_min, int j_max,
                                              const Box& box) {
  if (j_min > j_max)
    throw std::invalid_argument("standard_dyadic_cubes: empty scale range");
  std::vector<DyadicCube> out;
  std::vector<double> zero(n, 0.0);
  for (int j = j_min; j <= j_max; ++j) {
    auto layer = cubes_for_scale(n, j, zero, box);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  if (out.empty())
    throw std::runtime_error(
        "standard_dyadic_cubes: no whole cube fits the box");
  return out;
}

std::vector<DyadicCube> shifted_dyadic_cubes(const DyadicGridSpec& spec,
                                             const Box& box) {
  for (int j = spec.j_min; j <= spec.j_max; ++j)
    if (!spec.shifts.count(j))
      throw std::invalid_argument(
          "shifted_dyadic_cubes: missing shift entry for scale " +
          std::to_string(j));
  std::vector<DyadicCube> out;
  for (int j = spec.j_min; j <= spec.j_max; ++j) {
    auto layer = cubes_for_scale(spec.n, j, spec.shift_for_scale(j), box);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  if (out.empty())
    throw std::runtime_error("shifted_dyadic_cubes: no whole cube fits");
  return out;
}

namespace {

// node indices inside a cube, half-open per axis
std::vector<std::uint32_t> cube_nodes(const Grid& g, const DyadicCube& c) {
  const int n = g.dim();
  std::vector<int> lo(n), count(n);
  for (int a = 0; a < n; ++a) {
    // nodes x = -L/2 + s h with x in [c.lo, c.lo + side)
    double start = (c.lo[a] + g.box_length() / 2) / g.spacing();
    int s0 = (int)std::ceil(start - 1e-9);
    double end = (c.lo[a] + c.side + g.box_length() / 2) / g.spacing();
    int s1 = (int)std::ceil(end - 1e-9);  // exclusive
    s0 = std::max(s0, 0);
    s1 = std::min(s1, g.axis_points());
    lo[a] = s0;
    count[a] = std::max(0, s1 - s0);
  }
  std::vector<std::uint32_t> out;
  std::vector<int> idx(n, 0);
  if (std::any_of(count.begin(), count.end(), [](int c) { return c == 0; }))
    return out;
  for (;;) {
    std::vector<int> s(n);
    for (int a = 0; a < n; ++a) s[a] = lo[a] + idx[a];
    out.push_back((std::uint32_t)g.flatten(s.data()));
    int a = 0;
    while (a < n && ++idx[a] == count[a]) idx[a++] = 0;
    if (a == n) break;
  }
  return out;
}

}  // namespace

nlohmann::json SparseFamily::to_json() const {
  nlohmann::json mem = nlohmann::json::array();
  for (const auto& m : members) {
    mem.push_back({{"lo", m.cube.lo},
                   {"side", m.cube.side},
                   {"e_nodes", m.e_nodes},
                   {"cube_nodes", m.cube_node_count}});
  }
  return {{"eta", eta_declared}, {"members", mem}};
}

double check_sparseness(const SparseFamily& S) {
  std::vector<std::int32_t> owner(S.grid.size(), -1);
  double eta = 1.0;
  for (std::size_t mi = 0; mi < S.members.size(); ++mi) {
    const auto& m = S.members[mi];
    if (m.cube_node_count == 0)
      throw std::invalid_argument("check_sparseness: member without nodes");
    for (std::uint32_t node : m.e_nodes) {
      if (owner[node] >= 0)
        throw std::invalid_argument(
            "check_sparseness: E_Q sets overlap between " +
            S.members[owner[node]].cube.describe() + " and " +
            m.cube.describe());
      owner[node] = (std::int32_t)mi;
    }
    eta = std::min(eta, (double)m.e_nodes.size() / (double)m.cube_node_count);
  }
  return eta;
}

SampledFunction sparse_operator(const SparseFamily& S, double r,
                                const SampledFunction& f) {
  if (r < 1.0) throw std::invalid_argument("sparse_operator: r >= 1 required");
  if (f.fiber_dim != 1)
    throw std::invalid_argument("sparse_operator: scalar f required");
  for (auto& v : f.values)
    if (v.real() < -1e-12 || std::fabs(v.imag()) > 1e-12)
      throw std::invalid_argument("sparse_operator: f must be nonnegative");
  SampledFunction out(f.grid, 1);
  for (const auto& m : S.members) {
    auto nodes = cube_nodes(f.grid, m.cube);
    if (nodes.empty()) continue;
    double acc = 0.0;
    for (auto node : nodes) acc += std::pow(f.values[node].real(), r);
    double avg = std::pow(acc / nodes.size(), 1.0 / r);
    for (auto node : nodes) out.values[node] += avg;
  }
  return out;
}

double weak_lp_norm(const SampledFunction& f, double p) {
  if (p < 1.0) throw std::invalid_argument("weak_lp_norm: p >= 1 required");
  const double hn = std::pow(f.grid.spacing(), f.grid.dim());
  std::vector<double> mags(f.grid.size());
  for (std::size_t i = 0; i < f.grid.size(); ++i) mags[i] = f.fiber_norm(i);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double best = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    if (mags[k] == 0.0) break;
    // lambda just below mags[k]: |{ ||f|| > lambda }| >= (k+1) h^n
    best = std::max(best, mags[k] * std::pow((k + 1) * hn, 1.0 / p));
  }
  return best;
}

namespace {

DyadicCube dilate(const DyadicCube& c, int k) {
  DyadicCube d = c;
  d.side = (2 * k + 1) * c.side;
  for (std::size_t a = 0; a < c.lo.size(); ++a)
    d.lo[a] = c.lo[a] - k * c.side;
  return d;
}

// f restricted to the complement (or interior) of a cube
SampledFunction restrict_complement(const SampledFunction& f,
                                    const DyadicCube& c, bool complement) {
  SampledFunction out = complement ? f : SampledFunction(f.grid, f.fiber_dim);
  auto nodes = cube_nodes(f.grid, c);
  for (auto node : nodes)
    for (int d = 0; d < f.fiber_dim; ++d)
      if (complement)
        out.at(node, d) = 0.0;
      else
        out.at(node, d) = f.at(node, d);
  return out;
}

}  // namespace

SampledFunction grand_maximal_truncation(const MatrixSymbol& T,
                                         const SampledFunction& f,
                                         TruncationParams& params) {
  if (params.j_min > params.j_max)
    throw std::invalid_argument("grand_maximal_truncation: empty scale range");
  const Grid& g = f.grid;
  Box box(std::vector<double>(g.dim(), -g.box_length() / 2),
          std::vector<double>(g.dim(), g.box_length() / 2));
  auto cubes = standard_dyadic_cubes(g.dim(), params.j_min, params.j_max, box);
  SampledFunction out(g, 1);
  params.clipped = false;
  for (const auto& Q : cubes) {
    DyadicCube dil = dilate(Q, params.k);
    for (int a = 0; a < g.dim(); ++a)
      if (dil.lo[a] < box.lo[a] || dil.lo[a] + dil.side > box.hi[a])
        params.clipped = true;  // node realization clips to the box
    auto fc = restrict_complement(f, dil, true);
    auto Tf = apply_multiplier(T, fc);
    auto qnodes = cube_nodes(g, Q);
    double s = 0.0;
    for (auto node : qnodes) s = std::max(s, Tf.fiber_norm(node));
    for (auto node : qnodes)
      out.values[node] = std::max(out.values[node].real(), s);
  }
  return out;
}

namespace {

struct PrefixSums {
  const Grid* g;
  std::vector<double> pref;  // |f|^r prefix sums

  PrefixSums(const Grid& grid, const SampledFunction& f, double r) : g(&grid) {
    const int n = grid.dim();
    const int N = grid.axis_points();
    pref.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      pref[i] = std::pow(f.fiber_norm(i), r);
    for (int axis = 0; axis < n; ++axis) {
      std::size_t stride = 1;
      for (int a = axis + 1; a < n; ++a) stride *= N;
      std::size_t outer = grid.size() / N;
      for (std::size_t o = 0; o < outer; ++o) {
        std::size_t inner = o % stride;
        std::size_t major = o / stride;
        std::size_t base = major * stride * N + inner;
        for (int j = 1; j < N; ++j)
          pref[base + j * stride] += pref[base + (j - 1) * stride];
      }
    }
  }

  // mean of |f|^r over the nodes of a cube clipped to the grid box
  double clipped_mean(const DyadicCube& c) const {
    const int n = g->dim();
    int lo[3], hi[3];
    long long cnt = 1;
    for (int a = 0; a < n; ++a) {
      double start = (c.lo[a] + g->box_length() / 2) / g->spacing();
      double end = (c.lo[a] + c.side + g->box_length() / 2) / g->spacing();
      lo[a] = std::max(0, (int)std::ceil(start - 1e-9));
      hi[a] = std::min(g->axis_points(), (int)std::ceil(end - 1e-9)) - 1;
      if (hi[a] < lo[a]) return 0.0;
      cnt *= (hi[a] - lo[a] + 1);
    }
    // inclusion-exclusion
    double acc = 0.0;
    int corners = 1 << n;
    int idx[3];
    for (int cmask = 0; cmask < corners; ++cmask) {
      int sign = 1;
      bool skip = false;
      for (int a = 0; a < n; ++a) {
        if (cmask & (1 << a)) {
          idx[a] = lo[a] - 1;
          sign = -sign;
          if (idx[a] < 0) {
            skip = true;
            break;
          }
        } else {
          idx[a] = hi[a];
        }
      }
      if (skip) continue;
      acc += sign * pref[g->flatten(idx)];
    }
    return acc / cnt;
  }
};

}  // namespace

DominationResult sparse_dominate(const MatrixSymbol& T,
                                 const SampledFunction& f, double r,
                                 const std::vector<DyadicGridSpec>& grids,
                                 const DominationConfig& cfg) {
  if (r < 1.0) throw std::invalid_argument("sparse_dominate: r >= 1 required");
  const Grid& g = f.grid;
  const int n = g.dim();
  Box box(std::vector<double>(n, -g.box_length() / 2),
          std::vector<double>(n, g.box_length() / 2));

  // support of f; must sit inside the box with a margin
  double fmax = f.max_abs();
  std::vector<double> x(n);
  std::vector<bool> supp(g.size(), false);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (f.fiber_norm(i) > 1e-13 * fmax) {
      g.node_coords(i, x.data());
      for (int a = 0; a < n; ++a)
        if (std::fabs(x[a]) > 0.45 * g.box_length())
          throw std::invalid_argument(
              "sparse_dominate: f must be compactly supported inside the "
              "working box");
      supp[i] = true;
    }
  }

  PrefixSums fr(g, f, r);
  DominationResult result;
  double beta_used = cfg.beta;

  for (const auto& spec : grids) {
    auto cubes = shifted_dyadic_cubes(spec, box);
    // root: the smallest grid cube containing supp f; when none contains it
    // entirely, fall back to the coarsest-scale cubes meeting supp f
    std::vector<double> supp_lo(n, 1e300), supp_hi(n, -1e300);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!supp[i]) continue;
      g.node_coords(i, x.data());
      for (int a = 0; a < n; ++a) {
        supp_lo[a] = std::min(supp_lo[a], x[a]);
        supp_hi[a] = std::max(supp_hi[a], x[a]);
      }
    }
    std::vector<DyadicCube> roots;
    {
      const DyadicCube* best = nullptr;
      for (const auto& c : cubes) {
        if (best && c.side >= best->side) continue;
        bool contains_all = true;
        for (int a = 0; a < n; ++a)
          if (c.lo[a] > supp_lo[a] || supp_hi[a] >= c.lo[a] + c.side)
            contains_all = false;
        if (contains_all) best = &c;
      }
      if (best) roots.push_back(*best);
    }
    if (roots.empty()) {
      for (const auto& c : cubes) {
        if (c.scale_j != spec.j_min) continue;
        for (auto node : cube_nodes(g, c))
          if (supp[node]) {
            roots.push_back(c);
            break;
          }
      }
    }
    if (roots.empty())
      throw std::runtime_error(
          "sparse_dominate: no grid cube meets supp f");

    SparseFamily fam;
    fam.grid = g;
    fam.eta_declared = 0.5;

    // recursion with explicit stack
    std::vector<DyadicCube> stack(roots);
    while (!stack.empty()) {
      DyadicCube Q = stack.back();
      stack.pop_back();
      auto qnodes = cube_nodes(g, Q);
      if (qnodes.empty()) continue;

      // local field ||T(f 1_{(2k+1)Q})|| and its Q-average
      auto floc = restrict_complement(f, dilate(Q, cfg.k), false);
      auto Tloc = apply_multiplier(T, floc);
      double avgB = 0.0;
      for (auto node : qnodes) avgB += Tloc.fiber_norm(node);
      avgB /= qnodes.size();
      double aQ = std::pow(fr.clipped_mean(dilate(Q, cfg.k)), 1.0 / r);

      double beta = cfg.beta;
      std::vector<DyadicCube> children;
      for (int attempt = 0;; ++attempt) {
        children.clear();
        std::size_t child_nodes = 0;
        // DFS over proper dyadic descendants; select maximal qualifying ones
        std::vector<DyadicCube> dfs;
        auto push_halves = [&](const DyadicCube& parent) {
          if (parent.scale_j + 1 > spec.j_max) return;
          double hside = parent.side / 2;
          int combos = 1 << n;
          for (int c = 0; c < combos; ++c) {
            DyadicCube child;
            child.side = hside;
            child.scale_j = parent.scale_j + 1;
            child.lo = parent.lo;
            for (int a = 0; a < n; ++a)
              if (c & (1 << a)) child.lo[a] += hside;
            dfs.push_back(child);
          }
        };
        push_halves(Q);
        while (!dfs.empty()) {
          DyadicCube P = dfs.back();
          dfs.pop_back();
          auto pnodes = cube_nodes(g, P);
          if (pnodes.empty()) continue;
          double aP = std::pow(fr.clipped_mean(dilate(P, cfg.k)), 1.0 / r);
          bool condA = aP > beta * aQ && aQ > 0.0;
          bool condB = false;
          if (!condA) {
            double mx = 0.0;
            for (auto node : pnodes)
              mx = std::max(mx, Tloc.fiber_norm(node));
            condB = mx > beta * avgB && avgB > 0.0;
          }
          if (condA || condB) {
            children.push_back(P);
            child_nodes += pnodes.size();
          } else {
            push_halves(P);
          }
        }
        if (child_nodes * 2 <= qnodes.size()) break;
        beta *= 2.0;
        beta_used = std::max(beta_used, beta);
        if (attempt >= cfg.max_beta_doublings)
          throw std::runtime_error(
              "sparse_dominate: stopping recursion exceeded the beta budget "
              "at " +
              Q.describe());
      }

      SparseFamily::Member mem;
      mem.cube = Q;
      mem.cube_node_count = qnodes.size();
      std::vector<bool> excluded(g.size(), false);
      for (const auto& c : children)
        for (auto node : cube_nodes(g, c)) excluded[node] = true;
      for (auto node : qnodes)
        if (!excluded[node]) mem.e_nodes.push_back(node);
      fam.members.push_back(std::move(mem));
      for (const auto& c : children) stack.push_back(c);
    }
    check_sparseness(fam);  // throws if the construction broke disjointness
    result.families.push_back(std::move(fam));
  }
  result.beta_used = beta_used;

  // measured constant: lhs <= C rhs at >= 99.5% of nodes with rhs > 0
  auto Tf = apply_multiplier(T, f);
  SampledFunction absf(g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) absf.values[i] = f.fiber_norm(i);
  SampledFunction rhs(g, 1);
  for (const auto& fam : result.families) {
    auto part = sparse_operator(fam, r, absf);
    for (std::size_t i = 0; i < g.size(); ++i)
      rhs.values[i] += part.values[i];
  }
  std::vector<double> ratios;
  std::vector<std::uint32_t> positive_nodes;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double dn = rhs.values[i].real();
    if (dn > 0.0) {
      ratios.push_back(Tf.fiber_norm(i) / dn);
      positive_nodes.push_back((std::uint32_t)i);
    } else if (Tf.fiber_norm(i) > 1e-12 * fmax) {
      result.uncovered_nodes.push_back((std::uint32_t)i);
    }
  }
  if (!ratios.empty()) {
    std::vector<double> sorted(ratios);
    std::sort(sorted.begin(), sorted.end());
    // smallest C covering at least 99.5% of the positive-rhs nodes
    std::size_t need = (std::size_t)std::ceil(0.995 * sorted.size());
    std::size_t idx = std::min(sorted.size() - 1, std::max<std::size_t>(need, 1) - 1);
    result.constant = sorted[idx];
    // independent re-verification pass over all positive-rhs nodes
    for (std::size_t t = 0; t < ratios.size(); ++t)
      if (ratios[t] > result.constant * (1.0 + 1e-12))
        result.exceptional_nodes.push_back(positive_nodes[t]);
    result.exceptional_fraction =
        (double)result.exceptional_nodes.size() / (double)ratios.size();
  }
  return result;
}

std::string DominationResult::to_csv(const SampledFunction& lhs,
                                     const SampledFunction& rhs) const {
  std::ostringstream os;
  os << "node,lhs,rhs,ratio\n";
  for (std::size_t i = 0; i < lhs.grid.size(); ++i) {
    double l = lhs.fiber_norm(i), rr = rhs.values[i].real();
    os << i << "," << l << "," << rr << ","
       << (rr > 0 ? l / rr : std::numeric_limits<double>::infinity()) << "\n";
  }
  return os.str();
}

SparseBoundCheck sparse_weighted_bound_check(const SparseFamily& S, double r,
                                             double p, const Weight& w,
                                             const Weight& sigma,
                                             const SampledFunction& f,
                                             const WeightCharParams& chars) {
  if (!(p > r))
    throw std::invalid_argument("sparse_weighted_bound_check: needs p > r");
  const Grid& g = f.grid;
  // f sigma, pointwise
  SampledFunction fs(g, 1);
  std::vector<double> x(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.node_coords(i, x.data());
    fs.values[i] = f.values[i].real() *
                   sigma.eval_cell_avg(x.data(), g.dim(), g.spacing());
  }
  SparseBoundCheck out;
  auto Afs = sparse_operator(S, r, fs);
  out.lhs = weighted_lp_norm(Afs, p, w);

  out.apr = apr_characteristic(w, sigma, p, r, chars.cube_candidates,
                               chars.quadrature)
                .value;
  out.ainf_w = ainf_characteristic(w, BoxShape::Cubes, chars.cube_candidates,
                                   g, chars.maximal_scales)
                   .value;
  out.ainf_sr = ainf_characteristic(sigma.pow(r), BoxShape::Cubes,
                                    chars.cube_candidates, g,
                                    chars.maximal_scales)
                    .value;
  double pprime = p / (p - 1.0);
  out.rhs = out.apr *
            (std::pow(out.ainf_w, 1.0 / pprime) +
             std::pow(out.ainf_sr, 1.0 / p)) *
            weighted_lp_norm(f, p, sigma.pow(r));
  out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0.0;
  return out;
}

}  // namespace wmlab
