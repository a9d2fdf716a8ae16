// Shifted dyadic grids, sparse families with their disjoint major subsets
// E_Q, sparse operators A_{r,S}, weak-L^p norms, the grand maximal truncated
// operator M_{T,k}, a constructive stopping-time sparse domination of
// multiplier operators, and the two-weight sparse bound check.
//
// Cubes are realized as node sets under the half-open convention [lo, lo +
// side) per axis; side lengths and shifts are dyadic, so corner coordinates
// are exact in binary floating point. Measure = node count times h^n.
#pragma once

#include <map>

#include "wmlab/multiplier.hpp"
#include "wmlab/weights.hpp"

namespace wmlab {

struct DyadicCube {
  std::vector<double> lo;  // corner, after shift
  double side = 1.0;
  int scale_j = 0;  // side = 2^{-j}
  std::string describe() const;
};

struct DyadicGridSpec {
  int n = 1;
  int j_min = 0;  // coarsest scale (largest cubes, side 2^{-j_min})
  int j_max = 0;  // finest scale
  // shift bits per scale j in [j_min, j_max], one entry in {0,1}^n per j.
  // A cube of side 2^{-j} is shifted by sum_{j' > j, j' <= j_max}
  // omega_{j'} 2^{-j'} (the tail below the finest scale is truncated; the
  // defect is at most the grid spacing and is reported).
  std::map<int, std::vector<int>> shifts;

  std::vector<double> shift_for_scale(int j) const;
  double truncation_defect() const;  // 2^{-j_max} when any shift is set
  static DyadicGridSpec zero(int n, int j_min, int j_max);
  static DyadicGridSpec all_ones(int n, int j_min, int j_max);
  // alternating bits realize the +side/3 and +2 side/3 lattice phases (the
  // two phases swap roles between even and odd scales)
  static DyadicGridSpec alternating(int n, int j_min, int j_max,
                                    int phase = 1);
};

std::vector<DyadicCube> standard_dyadic_cubes(int n, int j_min, int j_max,
                                              const Box& box);
std::vector<DyadicCube> shifted_dyadic_cubes(const DyadicGridSpec& spec,
                                             const Box& box);

struct SparseFamily {
  Grid grid;
  struct Member {
    DyadicCube cube;
    std::vector<std::uint32_t> e_nodes;  // node indices of E_Q
    std::size_t cube_node_count = 0;
  };
  std::vector<Member> members;
  double eta_declared = 0.0;
  nlohmann::json to_json() const;
};

// verifies pairwise disjointness of the E_Q and returns min |E_Q|/|Q|
// (node-count measure); throws naming the offending pair on overlap.
double check_sparseness(const SparseFamily& S);

// A_{r,S} f = sum_Q <f^r>_Q^{1/r} 1_Q for nonnegative scalar f.
SampledFunction sparse_operator(const SparseFamily& S, double r,
                                const SampledFunction& f);

double weak_lp_norm(const SampledFunction& f, double p);

struct TruncationParams {
  int k = 1;       // dilation (2k+1)Q
  int j_min = 0;   // cube scale range for the candidate cubes
  int j_max = 4;
  bool clipped = false;  // set when some (2k+1)Q exits the working box
};

// M_{T,k} f(x) = sup_{Q ni x} max_{y in Q} ||T(f 1_{((2k+1)Q)^c})(y)||,
// over standard dyadic cubes of the stated scales.
SampledFunction grand_maximal_truncation(const MatrixSymbol& T,
                                         const SampledFunction& f,
                                         TruncationParams& params);

struct DominationResult {
  std::vector<SparseFamily> families;  // one per grid spec
  double constant = 0.0;               // 99.5th percentile of lhs/rhs
  // nodes with rhs > 0 exceeding the constant (< 0.5% of that base by
  // construction, re-verified by an independent pass)
  std::vector<std::uint32_t> exceptional_nodes;
  double exceptional_fraction = 0.0;   // over the rhs > 0 base
  // nodes outside every member cube where ||Tf|| is still nonnegligible;
  // always reported, never silently dropped
  std::vector<std::uint32_t> uncovered_nodes;
  double beta_used = 0.0;
  std::string to_csv(const SampledFunction& lhs,
                     const SampledFunction& rhs) const;
};

struct DominationConfig {
  double beta = 16.0;  // stopping threshold; doubled when children overflow
  int k = 1;           // dilation parameter
  int max_beta_doublings = 40;
};

// Stopping-time construction: children of Q are the maximal dyadic subcubes
// P with <|f|^r>_{(2k+1)P}^{1/r} > beta <|f|^r>_{(2k+1)Q}^{1/r} or with
// max_P ||T(f 1_{(2k+1)Q})|| > beta avg_Q ||T(f 1_{(2k+1)Q})||; the level is
// retried with doubled beta until the children occupy at most |Q|/2, so
// E_Q = Q \ union(children) gives eta >= 1/2. The returned constant is
// re-verified by an independent pass over all nodes.
DominationResult sparse_dominate(const MatrixSymbol& T,
                                 const SampledFunction& f, double r,
                                 const std::vector<DyadicGridSpec>& grids,
                                 const DominationConfig& cfg = {});

struct SparseBoundCheck {
  double lhs = 0.0;    // ||A_{r,S}(f sigma)||_{L^p_w}
  double rhs = 0.0;    // [w,s]_{A_p^r} ([w]_Ainf^{1/p'} + [s^r]_Ainf^{1/p}) ||f||_{L^p_{s^r}}
  double ratio = 0.0;
  double apr = 0.0, ainf_w = 0.0, ainf_sr = 0.0;
};

struct WeightCharParams {
  std::vector<Box> cube_candidates;
  std::vector<int> maximal_scales;
  Quadrature quadrature;
};

SparseBoundCheck sparse_weighted_bound_check(const SparseFamily& S, double r,
                                             double p, const Weight& w,
                                             const Weight& sigma,
                                             const SampledFunction& f,
                                             const WeightCharParams& chars);

}  // namespace wmlab
