// Weighted and mixed-norm evaluation, empirical operator-norm estimation
// between weighted L^p spaces, and refinement-ladder divergence probes.
//
// p = 2 is the precision path: the norm of T between L^2_sigma and L^2_omega
// equals the plain L^2 norm of g -> omega^{1/2} T(sigma^{-1/2} g), estimated
// by power iteration with a residual certificate. p != 2 uses multi-start
// gradient ascent on the Rayleigh quotient. Every estimate is a certified
// lower bound: the reported value is the quotient evaluated at the witness.
#pragma once

#include "wmlab/multiplier.hpp"
#include "wmlab/weights.hpp"

namespace wmlab {

// (h^n sum ||f(x)||^p w(x))^{1/p}; power-kind weights use the exact cell
// average at the singular node.
double weighted_lp_norm(const SampledFunction& f, double p, const Weight& w);

struct MixedNormSpec {
  std::vector<int> split;      // n = n_1 + ... + n_l, outermost last
  std::vector<double> pvec;    // innermost first, matching the display
  std::vector<Weight> wvec;
};

double mixed_norm(const SampledFunction& f, const MixedNormSpec& spec);

struct NormEstimate {
  double value = 0.0;
  std::string strategy;
  int iterations = 0;
  bool certified_lower_bound = true;
  double residual = -1.0;  // power iteration only: ||(T*T)v - lambda v||/lambda
  bool budget_exhausted = false;
  SampledFunction witness;
  nlohmann::json to_json(const std::string& witness_path = "") const;
};

// Writes the estimate as JSON at json_path, with the witness stored as a
// spectrum file (grid spec + frequency-node values) at witness_path and
// referenced from the JSON.
void save_norm_estimate(const NormEstimate& est, const std::string& json_path,
                        const std::string& witness_path);

struct AscentBudget {
  int max_iterations = 300;
  int restarts = 4;
  double tol = 1e-10;
  std::uint64_t seed = 7;
};

NormEstimate operator_norm_estimate(const MatrixSymbol& m, double p,
                                    const Weight& sigma, const Weight& omega,
                                    const AscentBudget& budget = {});

enum class ProbeVerdict { Bounded, Diverging, Indeterminate };

struct DivergenceProbeResult {
  std::vector<double> values;
  std::vector<double> ratios;
  ProbeVerdict verdict = ProbeVerdict::Indeterminate;
  std::string describe() const;
};

// Rebuilds the symbol on each ladder grid and classifies the growth of the
// norm estimates: all ratios <= 1.1 -> BOUNDED, all >= 1.2 -> DIVERGING,
// anything else INDETERMINATE (never silently classified).
DivergenceProbeResult divergence_probe(
    const std::function<MatrixSymbol(const Grid&)>& symbol_factory, double p,
    const Weight& omega, const std::vector<Grid>& ladder,
    const AscentBudget& budget = {});

}  // namespace wmlab
