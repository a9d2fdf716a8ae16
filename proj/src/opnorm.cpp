#include "wmlab/opnorm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace wmlab {

namespace {

std::vector<double> weight_samples(const Weight& w, const Grid& g) {
  const int n = g.dim();
  std::vector<double> out(g.size());
  std::vector<double> x(n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.node_coords(i, x.data());
    out[i] = w.eval_cell_avg(x.data(), n, g.spacing());
    if (!std::isfinite(out[i]))
      throw std::invalid_argument(
          "weight not finite at a grid node (tabulated kinds must be finite)");
  }
  return out;
}

double plain_l2(const SampledFunction& f) {
  double s = 0.0;
  for (auto& v : f.values) s += std::norm(v);
  return std::sqrt(s * std::pow(f.grid.spacing(), f.grid.dim()));
}

}  // namespace

double weighted_lp_norm(const SampledFunction& f, double p, const Weight& w) {
  if (p < 1.0) throw std::invalid_argument("weighted_lp_norm: p >= 1 required");
  auto ws = weight_samples(w, f.grid);
  const double hn = std::pow(f.grid.spacing(), f.grid.dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    acc += std::pow(f.fiber_norm(i), p) * ws[i];
  return std::pow(acc * hn, 1.0 / p);
}

double mixed_norm(const SampledFunction& f, const MixedNormSpec& spec) {
  const Grid& g = f.grid;
  const int n = g.dim();
  int total = 0;
  for (int b : spec.split) total += b;
  if (total != n || spec.split.size() != spec.pvec.size() ||
      spec.split.size() != spec.wvec.size())
    throw std::invalid_argument("mixed_norm: split incompatible with grid");
  for (double p : spec.pvec)
    if (p < 1.0) throw std::invalid_argument("mixed_norm: p >= 1 required");

  const int N = g.axis_points();
  const int l = static_cast<int>(spec.split.size());
  const double h = g.spacing();

  // current[idx over remaining axes] after integrating inner blocks.
  // Axis order: axis 0 is slowest (block 1 = leading axes are *innermost* in
  // the norm display, so integrate blocks in order, starting with block 1 =
  // axes [0, n_1), over which the norm display integrates first).
  //
  // To integrate the leading axes first while keeping a flat layout, walk
  // indices explicitly.
  std::vector<double> cur(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) cur[i] = f.fiber_norm(i);

  int axes_done = 0;
  std::size_t outer_size = g.size();
  for (int b = 0; b < l; ++b) {
    const int nb = spec.split[b];
    const double p = spec.pvec[b];
    // weight samples on the block's sub-grid
    Grid sub(nb, N, g.box_length());
    std::vector<double> ws(sub.size());
    std::vector<double> xs(nb);
    for (std::size_t i = 0; i < sub.size(); ++i) {
      sub.node_coords(i, xs.data());
      ws[i] = spec.wvec[b].eval_cell_avg(xs.data(), nb, h);
      if (!std::isfinite(ws[i]))
        throw std::invalid_argument("mixed_norm: weight not finite at a node");
    }
    const double hb = std::pow(h, nb);
    // cur is an array over axes [axes_done, n); block axes are the leading
    // axes_done..axes_done+nb of the REMAINING index space. Remaining axes
    // after this block: rest = outer_size / sub.size().
    std::size_t rest = outer_size / sub.size();
    std::vector<double> next(rest, 0.0);
    for (std::size_t ib = 0; ib < sub.size(); ++ib)
      for (std::size_t ir = 0; ir < rest; ++ir)
        next[ir] += std::pow(cur[ib * rest + ir], p) * ws[ib];
    for (auto& v : next) v = std::pow(v * hb, 1.0 / p);
    cur.swap(next);
    outer_size = rest;
    axes_done += nb;
  }
  return cur[0];
}

nlohmann::json NormEstimate::to_json(const std::string& witness_path) const {
  nlohmann::json j{{"value", value},
                   {"strategy", strategy},
                   {"iterations", iterations},
                   {"certified_lower_bound", certified_lower_bound},
                   {"budget_exhausted", budget_exhausted}};
  if (residual >= 0.0) j["residual"] = residual;
  if (!witness_path.empty()) j["witness_spectrum_file"] = witness_path;
  return j;
}

void save_norm_estimate(const NormEstimate& est, const std::string& json_path,
                        const std::string& witness_path) {
  auto F = forward_dft(est.witness);
  nlohmann::json wit{{"grid",
                      {{"n", F.grid.dim()},
                       {"N", F.grid.axis_points()},
                       {"L", F.grid.box_length()}}},
                     {"fiber_dim", F.fiber_dim}};
  std::vector<std::vector<double>> vals;
  vals.reserve(F.values.size());
  for (const auto& v : F.values)
    vals.push_back({v.real(), v.imag()});
  wit["values"] = vals;
  std::ofstream wout(witness_path);
  if (!wout)
    throw std::runtime_error("save_norm_estimate: unwritable path: " +
                             witness_path);
  wout << wit.dump() << "\n";
  std::ofstream jout(json_path);
  if (!jout)
    throw std::runtime_error("save_norm_estimate: unwritable path: " +
                             json_path);
  jout << est.to_json(witness_path).dump(2) << "\n";
}

namespace {

// pointwise multiply by a scalar field
void scale_by(SampledFunction& f, const std::vector<double>& field) {
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    for (int c = 0; c < f.fiber_dim; ++c) f.at(i, c) *= field[i];
}

MatrixSymbol hermitian_symbol(const MatrixSymbol& m) {
  MatrixSymbol out(m.grid, m.d_out, m.d_in);
  for (std::size_t i = 0; i < m.grid.size(); ++i)
    out.set_node_matrix(i, m.node_matrix(i).adjoint());
  return out;
}

double rayleigh_quotient(const MatrixSymbol& m, const SampledFunction& f,
                         double p, const Weight& sigma, const Weight& omega) {
  auto g = apply_multiplier(m, f);
  double num = weighted_lp_norm(g, p, omega);
  double den = weighted_lp_norm(f, p, sigma);
  return den > 0 ? num / den : 0.0;
}

}  // namespace

NormEstimate operator_norm_estimate(const MatrixSymbol& m, double p,
                                    const Weight& sigma, const Weight& omega,
                                    const AscentBudget& budget) {
  const Grid& g = m.grid;
  NormEstimate est;

  if (p == 2.0) {
    // conjugated operator S g = omega^{1/2} T_m (sigma^{-1/2} g);
    // power iteration on A = S^H S
    auto wsq = weight_samples(omega, g);
    auto ssq = weight_samples(sigma, g);
    std::vector<double> w_half(wsq), s_invhalf(ssq);
    for (auto& v : w_half) v = std::sqrt(v);
    for (auto& v : s_invhalf) v = 1.0 / std::sqrt(v);
    auto mh = hermitian_symbol(m);

    auto applyS = [&](const SampledFunction& v) {
      SampledFunction t = v;
      scale_by(t, s_invhalf);
      auto out = apply_multiplier(m, t);
      scale_by(out, w_half);
      return out;
    };
    auto applySH = [&](const SampledFunction& v) {
      SampledFunction t = v;
      scale_by(t, w_half);
      auto out = apply_multiplier(mh, t);
      scale_by(out, s_invhalf);
      return out;
    };

    auto v = sample(
        FunctionSpec::random_bandlimited(g.axis_points() / (4.0 * g.box_length()),
                                         budget.seed),
        g, m.d_in);
    double lambda = 0.0;
    int it = 0;
    for (; it < budget.max_iterations; ++it) {
      auto av = applySH(applyS(v));
      double nv = plain_l2(av);
      if (nv == 0.0) break;
      double newlambda = 0.0;
      // lambda = <Av, v> / <v, v>
      {
        cplx ip(0.0);
        double vv = 0.0;
        for (std::size_t i = 0; i < av.values.size(); ++i) {
          ip += av.values[i] * std::conj(v.values[i]);
          vv += std::norm(v.values[i]);
        }
        newlambda = ip.real() / vv;
      }
      for (std::size_t i = 0; i < av.values.size(); ++i)
        av.values[i] /= nv;
      v = av;
      if (it > 2 && std::fabs(newlambda - lambda) <=
                        budget.tol * std::max(1.0, newlambda)) {
        lambda = newlambda;
        ++it;
        break;
      }
      lambda = newlambda;
    }
    // residual of the eigen equation at the final iterate
    {
      auto av = applySH(applyS(v));
      double vv = 0.0;
      cplx ip(0.0);
      for (std::size_t i = 0; i < av.values.size(); ++i) {
        ip += av.values[i] * std::conj(v.values[i]);
        vv += std::norm(v.values[i]);
      }
      lambda = ip.real() / vv;
      double r = 0.0;
      for (std::size_t i = 0; i < av.values.size(); ++i)
        r += std::norm(av.values[i] - lambda * v.values[i]);
      est.residual = std::sqrt(r / vv) / std::max(lambda, 1e-300);
    }
    // witness in the original space: f = sigma^{-1/2} v
    SampledFunction witness = v;
    scale_by(witness, s_invhalf);
    est.witness = witness;
    est.value = rayleigh_quotient(m, witness, 2.0, sigma, omega);
    est.strategy = "power-iteration";
    est.iterations = it;
    est.budget_exhausted = (it >= budget.max_iterations);
    return est;
  }

  // p != 2: multi-start normalized gradient ascent on the Rayleigh quotient
  Rng rng(budget.seed);
  double bandlim = g.axis_points() / (4.0 * g.box_length());
  auto wsamp = weight_samples(omega, g);
  auto ssamp = weight_samples(sigma, g);
  auto mh = hermitian_symbol(m);
  SampledFunction best_f(g, m.d_in);
  double best = 0.0;
  int iters_total = 0;
  bool progressed = false;

  for (int rs = 0; rs < budget.restarts; ++rs) {
    auto f = sample(FunctionSpec::random_bandlimited(bandlim, rng.next_u64()),
                    g, m.d_in);
    double q = rayleigh_quotient(m, f, p, sigma, omega);
    double step = 0.5;
    for (int it = 0; it < budget.max_iterations && step > 1e-12; ++it) {
      ++iters_total;
      auto Tf = apply_multiplier(m, f);
      double num = weighted_lp_norm(Tf, p, omega);
      double den = weighted_lp_norm(f, p, sigma);
      if (num == 0.0 || den == 0.0) break;
      // gradient of log num^p: T^H ( omega ||Tf||^{p-2} Tf ) / num^p
      SampledFunction gnum = Tf;
      for (std::size_t i = 0; i < g.size(); ++i) {
        double fn = Tf.fiber_norm(i);
        double fac = wsamp[i] * (fn > 0 ? std::pow(fn, p - 2.0) : 0.0);
        for (int c = 0; c < gnum.fiber_dim; ++c) gnum.at(i, c) *= fac;
      }
      auto grad_num = apply_multiplier(mh, gnum);
      SampledFunction grad_den = f;
      for (std::size_t i = 0; i < g.size(); ++i) {
        double fn = f.fiber_norm(i);
        double fac = ssamp[i] * (fn > 0 ? std::pow(fn, p - 2.0) : 0.0);
        for (int c = 0; c < grad_den.fiber_dim; ++c) grad_den.at(i, c) *= fac;
      }
      // ascent direction of log(num/den)
      SampledFunction dir(g, m.d_in);
      double npow = std::pow(num, p), dpow = std::pow(den, p);
      for (std::size_t i = 0; i < dir.values.size(); ++i)
        dir.values[i] =
            grad_num.values[i] / npow - grad_den.values[i] / dpow;
      double dn = plain_l2(dir);
      if (dn == 0.0) break;
      double fn = plain_l2(f);
      bool improved = false;
      for (int bt = 0; bt < 8; ++bt) {
        SampledFunction trial = f;
        for (std::size_t i = 0; i < trial.values.size(); ++i)
          trial.values[i] += step * fn / dn * dir.values[i];
        double tq = rayleigh_quotient(m, trial, p, sigma, omega);
        if (tq > q * (1.0 + 1e-12)) {
          f = trial;
          q = tq;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    if (q > best) {
      best = q;
      best_f = f;
      progressed = true;
    }
  }
  est.value = best;
  est.witness = best_f;
  est.strategy = "random-ascent";
  est.iterations = iters_total;
  est.budget_exhausted = !progressed;
  return est;
}

std::string DivergenceProbeResult::describe() const {
  std::ostringstream os;
  os << "values:";
  for (double v : values) os << " " << v;
  os << " ratios:";
  for (double r : ratios) os << " " << r;
  os << " verdict: "
     << (verdict == ProbeVerdict::Bounded
             ? "BOUNDED"
             : verdict == ProbeVerdict::Diverging ? "DIVERGING"
                                                  : "INDETERMINATE");
  return os.str();
}

DivergenceProbeResult divergence_probe(
    const std::function<MatrixSymbol(const Grid&)>& symbol_factory, double p,
    const Weight& omega, const std::vector<Grid>& ladder,
    const AscentBudget& budget) {
  if (ladder.size() < 2)
    throw std::invalid_argument("divergence_probe: need at least two grids");
  DivergenceProbeResult res;
  for (const auto& g : ladder) {
    auto m = symbol_factory(g);
    res.values.push_back(
        operator_norm_estimate(m, p, omega, omega, budget).value);
  }
  for (std::size_t i = 1; i < res.values.size(); ++i)
    res.ratios.push_back(res.values[i] / res.values[i - 1]);
  bool all_le = true, all_ge = true;
  for (double r : res.ratios) {
    if (r > 1.1) all_le = false;
    if (r < 1.2) all_ge = false;
  }
  res.verdict = all_le ? ProbeVerdict::Bounded
                       : (all_ge ? ProbeVerdict::Diverging
                                 : ProbeVerdict::Indeterminate);
  return res;
}

}  // namespace wmlab
