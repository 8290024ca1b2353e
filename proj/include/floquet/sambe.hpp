#pragma once

#include "floquet/model.hpp"
#include "floquet/opalg.hpp"

#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace floquet {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Truncated extended space spanned by |k,p>> with p in [-p_max, p_max].
/// Index order is p-major: index(k, p) = (p + p_max) * levels + k.
struct SambeSpace {
  int levels = 0;
  int p_max = 0;
  double reference_energy = 0.0;

  int dimension() const { return levels * (2 * p_max + 1); }
  int index(int k, int p) const { return (p + p_max) * levels + k; }
  int level_of(int i) const { return i % levels; }
  int sector_of(int i) const { return i / levels - p_max; }
  bool contains_sector(int p) const { return p >= -p_max && p <= p_max; }
};

/// p_max = r_max * P_h + max_k |n_k| + 1 (+ extra_margin): no string with at
/// most r_max factors of V leaves the truncated space.
SambeSpace build_space(const ResonantDecomposition& decomp, int max_harmonic, int r_max,
                       int extra_margin = 0);

struct NearResonance {
  int level = 0;
  int sector = 0;
  double denominator = 0.0;
};

struct SambeOptions {
  /// Resolvent denominators below guard * w_d are reported.
  double guard = 1e-6;
  bool allow_near_resonance = false;
  int extra_margin = 0;
};

/// H0, V, P and the diagonal of R on one truncated space.
struct SambeOperators {
  SambeSpace space;
  SparseMatrix h0;
  SparseMatrix v;
  /// v = v_static + v_drive: the p = 0 block (V_0) and the p != 0 blocks.
  SparseMatrix v_static;
  SparseMatrix v_drive;
  SparseMatrix p;
  /// Diagonal of R: 1/(E~_0 + p w_d - E~_l) off the P support, 0 on it.
  Eigen::VectorXcd resolvent;
  /// Indices (k, n_k) of the P support, ordered like the degenerate set.
  std::vector<int> p_support;
  std::vector<NearResonance> near_resonances;

  /// R^m as a sparse diagonal matrix; m = 0 yields P.
  SparseMatrix resolvent_power(int m) const;
  /// Applies R^m (P for m = 0) to the rows of a column block.
  void apply_diagonal(int m, Eigen::MatrixXcd& block) const;
  /// The unit columns |k, n_k>>, k in D.
  Eigen::MatrixXcd projector_columns() const;
};

/// Throws NearResonanceError on a near-resonant denominator unless
/// options.allow_near_resonance is set (then it is only recorded).
SambeOperators build_operators(const DrivenSystem& system, const ResonantDecomposition& decomp,
                               const SambeSpace& space, const SambeOptions& options = {});

/// Sum over a coefficient table of the operator strings applied to the P
/// columns. Heff tables give the d x d block P V R^{m_{r-1}} ... V P; W
/// tables give the dim x d block R^{m_r} V ... R^{m_1} V P.
Eigen::MatrixXcd evaluate_string(const opalg::CoefficientTable& table, const SambeOperators& ops);

std::string describe(const NearResonance& nr);

}  // namespace floquet
