#include "floquet/pert.hpp"

#include "floquet/error.hpp"

#include <algorithm>

namespace floquet {

CMatrix EffectiveHamiltonian::cumulative(int upto) const {
  const int n = upto < 0 ? max_order() : std::min(upto, max_order());
  CMatrix h = CMatrix::Zero(dimension(), dimension());
  for (int r = 0; r < n; ++r) h += orders[static_cast<std::size_t>(r)];
  return h;
}

double EffectiveHamiltonian::delta(int k, int upto) const { return cumulative(upto)(k, k).real(); }

cplx EffectiveHamiltonian::omega(int l, int k, int upto) const { return cumulative(upto)(l, k); }

Eigen::MatrixXcd WOperator::cumulative(int upto) const {
  const int n = upto < 0 ? max_order() : std::min(upto, max_order());
  Eigen::MatrixXcd w = orders.front();
  for (int r = 1; r <= n; ++r) w += orders[static_cast<std::size_t>(r)];
  return w;
}

Expansion expand(const DrivenSystem& system, const ResonantDecomposition& decomp, int r_h,
                 int r_w, const SambeOptions& options) {
  if (r_h < 1) throw ValidationError("effective Hamiltonian order must be >= 1");
  if (r_w < 0) throw ValidationError("W order must be >= 0");
  const SambeSpace space =
      build_space(decomp, system.max_harmonic(), std::max(r_h, r_w), options.extra_margin);
  const SambeOperators ops = build_operators(system, decomp, space, options);

  Expansion e;
  e.heff.basis = decomp.degenerate_set;
  e.heff.p_max = space.p_max;
  e.heff.sambe_dimension = space.dimension();
  e.heff.near_resonances = ops.near_resonances;
  for (int r = 1; r <= r_h; ++r) e.heff.orders.push_back(evaluate_string(opalg::heff_table(r), ops));

  e.w.space = space;
  e.w.orders.push_back(ops.projector_columns());
  for (int r = 1; r <= r_w; ++r) e.w.orders.push_back(evaluate_string(opalg::w_table(r), ops));
  return e;
}

EffectiveHamiltonian effective_hamiltonian(const DrivenSystem& system,
                                           const ResonantDecomposition& decomp, int r_h,
                                           const SambeOptions& options) {
  return expand(system, decomp, r_h, 0, options).heff;
}

WOperator w_operator(const DrivenSystem& system, const ResonantDecomposition& decomp, int r_w,
                     const SambeOptions& options) {
  return expand(system, decomp, 1, r_w, options).w;
}

}  // namespace floquet
