#include "wmlab/lp_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wmlab/multiplier.hpp"
#include "wmlab/opnorm.hpp"

namespace wmlab {

std::vector<DyadicInterval> dyadic_intervals(int k_min, int k_max) {
  if (k_min > k_max)
    throw std::invalid_argument("dyadic_intervals: empty scale range");
  std::vector<DyadicInterval> out;
  for (int k = k_min; k <= k_max; ++k)
    for (int eta : {1, -1}) out.push_back(DyadicInterval{k, eta});
  return out;
}

double aniso_distance(const std::vector<double>& x,
                      const std::vector<double>& avec) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    s += std::pow(std::fabs(x[j]), 2.0 / avec[j]);
  return std::sqrt(s);
}

double FreqRect::lo_mag(int axis, const std::vector<double>& avec,
                        std::optional<int> trunc_scale) const {
  if (!lo_zero[axis]) return std::exp2(avec[axis] * lo_scale[axis]);
  if (trunc_scale) return std::exp2(avec[axis] * (*trunc_scale));
  return 0.0;
}

double FreqRect::hi_mag(int axis, const std::vector<double>& avec) const {
  return std::exp2(avec[axis] * hi_scale[axis]);
}

bool FreqRect::contains(const std::vector<double>& xi,
                        const std::vector<double>& avec,
                        std::optional<int> trunc_scale) const {
  for (std::size_t a = 0; a < eta.size(); ++a) {
    double lo = lo_mag(static_cast<int>(a), avec, trunc_scale);
    double hi = hi_mag(static_cast<int>(a), avec);
    // realized half-open in standard coordinates
    double slo = eta[a] > 0 ? lo : -hi;
    double shi = eta[a] > 0 ? hi : -lo;
    if (xi[a] < slo || xi[a] >= shi) return false;
  }
  return true;
}

Box FreqRect::to_box(const std::vector<double>& avec,
                     std::optional<int> trunc_scale) const {
  std::vector<double> lo(eta.size()), hi(eta.size());
  for (std::size_t a = 0; a < eta.size(); ++a) {
    double l = lo_mag(static_cast<int>(a), avec, trunc_scale);
    double h = hi_mag(static_cast<int>(a), avec);
    lo[a] = eta[a] > 0 ? l : -h;
    hi[a] = eta[a] > 0 ? h : -l;
    if (hi[a] <= lo[a]) hi[a] = lo[a] + 1e-300;  // degenerate untruncated 0
  }
  return Box(lo, hi);
}

std::string FreqRectFamily::describe() const {
  std::ostringstream os;
  os << (kind == Kind::Product
             ? "product"
             : kind == Kind::Blocking ? "blocking" : "aniso-blocking")
     << " family, n=" << n << ", scales [" << l_min << "," << l_max << "], "
     << members.size() << " members";
  return os.str();
}

std::string FreqRectFamily::to_csv() const {
  std::ostringstream os;
  os << "k,eta,corners\n";
  for (const auto& mreq : members) {
    os << mreq.block_k << ",\"";
    for (std::size_t a = 0; a < mreq.eta.size(); ++a)
      os << (a ? " " : "") << (mreq.eta[a] > 0 ? "+" : "-");
    os << "\",\"";
    Box b = mreq.to_box(avec, trunc_scale());
    os << b.describe() << "\"\n";
  }
  return os.str();
}

namespace {
int floordiv(int a, int b) {
  int q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
}  // namespace

std::vector<std::vector<int>> blocking_index_set(int k, int n, int l_cutoff) {
  if (n < 1) throw std::invalid_argument("blocking_index_set: n >= 1");
  int l = floordiv(k, n);
  int r = k - l * n;
  // J_{ln+r} = (-inf, l+1]^r x {l+1} x (-inf, l]^{n-r-1}, clipped at l_cutoff
  std::vector<std::vector<int>> ranges(n);
  for (int j = 0; j < r; ++j)
    for (int i = l_cutoff; i <= l + 1; ++i) ranges[j].push_back(i);
  ranges[r].push_back(l + 1);
  for (int j = r + 1; j < n; ++j)
    for (int i = l_cutoff; i <= l; ++i) ranges[j].push_back(i);

  std::vector<std::vector<int>> out;
  for (int j = 0; j < n; ++j)
    if (ranges[j].empty()) return out;  // cutoff above the range
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    std::vector<int> tuple(n);
    for (int j = 0; j < n; ++j) tuple[j] = ranges[j][idx[j]];
    out.push_back(tuple);
    int j = 0;
    while (j < n && ++idx[j] == ranges[j].size()) idx[j++] = 0;
    if (j == n) break;
  }
  return out;
}

namespace {

// Member rectangle with index k = l*n + r: the union of product rectangles
// over J_k. Per axis: prefix axes (j <= r-1) span (0, 2^{l+2}), the pivot
// axis r spans [2^{l+1}, 2^{l+2}), suffix axes span (0, 2^{l+1}).
FreqRect blocking_member(int n, int l, int r, const std::vector<int>& eta) {
  FreqRect m;
  m.eta = eta;
  m.lo_zero.assign(n, false);
  m.lo_scale.assign(n, 0);
  m.hi_scale.assign(n, 0);
  m.block_k = l * n + r;
  for (int j = 0; j < n; ++j) {
    if (j < r) {
      m.lo_zero[j] = true;
      m.hi_scale[j] = l + 2;
    } else if (j == r) {
      m.lo_scale[j] = l + 1;
      m.hi_scale[j] = l + 2;
    } else {
      m.lo_zero[j] = true;
      m.hi_scale[j] = l + 1;
    }
  }
  return m;
}

std::vector<std::vector<int>> all_signs(int n) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> eta(n);
    for (int j = 0; j < n; ++j) eta[j] = (mask & (1 << j)) ? -1 : 1;
    out.push_back(eta);
  }
  return out;
}

}  // namespace

FreqRectFamily blocking_rects(int n, int l_min, int l_max) {
  if (n < 1 || n > 3)
    throw std::invalid_argument("blocking_rects: n in {1,2,3}");
  if (l_min > l_max)
    throw std::invalid_argument("blocking_rects: empty scale range");
  FreqRectFamily fam;
  fam.kind = FreqRectFamily::Kind::Blocking;
  fam.n = n;
  fam.l_min = l_min;
  fam.l_max = l_max;
  fam.avec.assign(n, 1.0);
  for (int l = l_min; l <= l_max; ++l)
    for (int r = 0; r < n; ++r)
      for (const auto& eta : all_signs(n))
        fam.members.push_back(blocking_member(n, l, r, eta));
  return fam;
}

FreqRectFamily product_rects(int n, int k_min, int k_max) {
  if (n < 1 || n > 3)
    throw std::invalid_argument("product_rects: n in {1,2,3}");
  if (k_min > k_max)
    throw std::invalid_argument("product_rects: empty scale range");
  FreqRectFamily fam;
  fam.kind = FreqRectFamily::Kind::Product;
  fam.n = n;
  fam.l_min = k_min;
  fam.l_max = k_max;
  fam.avec.assign(n, 1.0);
  std::vector<int> kv(n, 0);
  std::function<void(int)> rec = [&](int axis) {
    if (axis == n) {
      for (const auto& eta : all_signs(n)) {
        FreqRect m;
        m.eta = eta;
        m.lo_zero.assign(n, false);
        m.lo_scale.resize(n);
        m.hi_scale.resize(n);
        m.product_k = kv;
        for (int j = 0; j < n; ++j) {
          m.lo_scale[j] = kv[j];
          m.hi_scale[j] = kv[j] + 1;
        }
        fam.members.push_back(m);
      }
      return;
    }
    for (int k = k_min; k <= k_max; ++k) {
      kv[axis] = k;
      rec(axis + 1);
    }
  };
  rec(0);
  return fam;
}

FreqRectFamily aniso_blocking_rects(const std::vector<double>& avec, int l_min,
                                    int l_max) {
  for (double a : avec)
    if (!(a > 0.0))
      throw std::invalid_argument("aniso_blocking_rects: a_j must be > 0");
  int n = static_cast<int>(avec.size());
  FreqRectFamily fam = blocking_rects(n, l_min, l_max);
  fam.kind = FreqRectFamily::Kind::AnisoBlocking;
  fam.avec = avec;
  return fam;
}

std::vector<bool> family_union_mask(const FreqRectFamily& family,
                                    const Grid& g) {
  std::vector<bool> mask(g.size(), false);
  std::vector<double> xi(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.freq_coords(i, xi.data());
    for (const auto& m : family.members)
      if (m.contains(xi, family.avec, family.trunc_scale())) {
        mask[i] = true;
        break;
      }
  }
  return mask;
}

SampledFunction reconstruct(const SampledFunction& f,
                            const FreqRectFamily& family) {
  const Grid& g = f.grid;
  if (g.dim() != family.n)
    throw std::invalid_argument("reconstruct: dimension mismatch");
  auto mask = family_union_mask(family, g);
  auto F = forward_dft(f);
  double total = 0.0, leaked = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double mass = 0.0;
    for (int c = 0; c < f.fiber_dim; ++c) mass += std::norm(F.at(i, c));
    total += mass;
    if (!mask[i]) leaked += mass;
  }
  if (total > 0.0 && leaked > 1e-24 * total) throw LeakError(leaked / total);

  SampledFunction out(g, f.fiber_dim);
  for (const auto& member : family.members) {
    auto piece =
        frequency_cutoff(member.to_box(family.avec, family.trunc_scale()), f);
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] += piece.values[i];
  }
  return out;
}

std::vector<SampledFunction> family_test_functions(const FreqRectFamily& family,
                                                   const Grid& g, int count,
                                                   std::uint64_t seed,
                                                   bool adversarial) {
  auto mask = family_union_mask(family, g);
  Rng rng(seed);
  std::vector<SampledFunction> out;

  // adversarial concentrations: single member, two members
  auto member_fn = [&](std::size_t mi, std::size_t mj) {
    SampledSpectrum F(g, 1);
    std::vector<double> xi(g.dim());
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.freq_coords(i, xi.data());
      bool in = family.members[mi].contains(xi, family.avec,
                                            family.trunc_scale()) ||
                (mj != mi && family.members[mj].contains(
                                 xi, family.avec, family.trunc_scale()));
      if (in) F.at(i, 0) = rng.cnormal();
    }
    return inverse_dft(F);
  };
  if (adversarial && !family.members.empty()) {
    out.push_back(member_fn(0, 0));
    if (family.members.size() > 1)
      out.push_back(member_fn(0, family.members.size() / 2));
  }
  while ((int)out.size() < count) {
    SampledSpectrum F(g, 1);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (mask[i]) F.at(i, 0) = rng.cnormal();
    out.push_back(inverse_dft(F));
  }
  out.resize(count);
  return out;
}

nlohmann::json UnconditionalityReport::to_json() const {
  return {{"c_plus", c_plus},
          {"c_minus", c_minus},
          {"sampling", sampling},
          {"test_set", test_set},
          {"lower_bound", true}};
}

UnconditionalityReport unconditionality_constants(
    const FreqRectFamily& family, double p, const Weight& w,
    const std::vector<SampledFunction>& test_fns, const SignSampling& signs) {
  if (test_fns.empty())
    throw std::invalid_argument("unconditionality_constants: no test functions");
  if (signs.mode == SignSampling::Mode::MonteCarlo && signs.samples < 100)
    throw std::invalid_argument(
        "unconditionality_constants: Monte Carlo needs >= 100 samples");

  const Grid& g = test_fns[0].grid;
  UnconditionalityReport rep;
  rep.c_plus = 0.0;
  rep.c_minus = 0.0;
  std::size_t M = family.members.size();
  Rng rng(signs.seed);

  for (const auto& f : test_fns) {
    // member pieces Delta_E f (spatial)
    std::vector<SampledFunction> pieces;
    std::vector<std::size_t> active;
    double fmass = 0.0;
    for (auto& v : f.values) fmass += std::norm(v);
    for (std::size_t mi = 0; mi < M; ++mi) {
      auto piece = frequency_cutoff(
          family.members[mi].to_box(family.avec, family.trunc_scale()), f);
      double mass = 0.0;
      for (auto& v : piece.values) mass += std::norm(v);
      if (mass > 1e-26 * fmass) {
        active.push_back(mi);
        pieces.push_back(std::move(piece));
      }
    }
    double fnorm = weighted_lp_norm(f, p, w);
    if (fnorm == 0.0) continue;

    std::size_t n_active = pieces.size();
    std::vector<std::uint64_t> patterns;
    bool exhaustive = signs.mode == SignSampling::Mode::Exhaustive;
    if (exhaustive) {
      if (n_active > 12)
        throw std::invalid_argument(
            "unconditionality_constants: exhaustive needs <= 12 active "
            "members (got " +
            std::to_string(n_active) + ")");
      for (std::uint64_t pat = 0; pat < (1ull << n_active); ++pat)
        patterns.push_back(pat);
    } else {
      for (int t = 0; t < signs.samples; ++t)
        patterns.push_back(rng.next_u64() & ((1ull << n_active) - 1));
    }

    double mean_sq = 0.0;
    SampledFunction acc(g, f.fiber_dim);
    for (std::uint64_t pat : patterns) {
      std::fill(acc.values.begin(), acc.values.end(), cplx(0.0));
      for (std::size_t mi = 0; mi < n_active; ++mi) {
        double sign = (pat >> mi) & 1 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < acc.values.size(); ++i)
          acc.values[i] += sign * pieces[mi].values[i];
      }
      double nm = weighted_lp_norm(acc, p, w);
      mean_sq += nm * nm;
    }
    mean_sq /= patterns.size();
    double rand_avg = std::sqrt(mean_sq);
    rep.c_plus = std::max(rep.c_plus, rand_avg / fnorm);
    rep.c_minus = std::max(rep.c_minus, fnorm / rand_avg);
  }

  std::ostringstream os;
  if (signs.mode == SignSampling::Mode::Exhaustive)
    os << "exhaustive sign patterns over active members";
  else
    os << "Monte Carlo, " << signs.samples << " patterns, seed " << signs.seed;
  rep.sampling = os.str();
  rep.test_set = std::to_string(test_fns.size()) + " band-limited test functions";
  return rep;
}

}  // namespace wmlab
