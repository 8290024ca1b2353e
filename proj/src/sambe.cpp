#include "floquet/sambe.hpp"

#include "floquet/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace floquet {

SambeSpace build_space(const ResonantDecomposition& decomp, int max_harmonic, int r_max,
                       int extra_margin) {
  if (r_max < 1) throw ValidationError("Sambe space needs r_max >= 1");
  if (extra_margin < 0) throw ValidationError("Sambe margin must be non-negative");
  SambeSpace s;
  s.levels = decomp.levels();
  s.p_max = r_max * max_harmonic + decomp.max_abs_photon_number() + 1 + extra_margin;
  s.reference_energy = decomp.reference_energy;
  return s;
}

std::string describe(const NearResonance& nr) {
  std::ostringstream os;
  os << "level " << nr.level << " in photon sector " << nr.sector
     << " is near-resonant with the degenerate subspace (denominator " << nr.denominator
     << "); enlarge the degenerate set or pass --allow-near-resonance";
  return os.str();
}

SambeOperators build_operators(const DrivenSystem& system, const ResonantDecomposition& decomp,
                               const SambeSpace& space, const SambeOptions& options) {
  if (space.levels != system.dimension() || decomp.levels() != system.dimension()) {
    throw ValidationError("Sambe space, decomposition and system disagree on the level count");
  }
  const int n = space.levels;
  const int dim = space.dimension();
  const double w = decomp.drive_frequency;
  SambeOperators ops;
  ops.space = space;

  std::vector<Eigen::Triplet<cplx>> h0, vs, vd, pt;
  for (int p = -space.p_max; p <= space.p_max; ++p) {
    for (int k = 0; k < n; ++k) {
      h0.emplace_back(space.index(k, p), space.index(k, p),
                      decomp.shifted_energies[static_cast<std::size_t>(k)] - p * w);
    }
  }

  std::map<int, CMatrix> blocks = system.harmonics();
  blocks[0] = decomp.static_perturbation;
  for (const auto& [q, block] : blocks) {
    for (int p2 = -space.p_max; p2 <= space.p_max; ++p2) {
      const int p1 = p2 + q;
      if (!space.contains_sector(p1)) continue;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const cplx x = block(a, b);
          if (x == cplx(0.0)) continue;
          (q == 0 ? vs : vd).emplace_back(space.index(a, p1), space.index(b, p2), x);
        }
      }
    }
  }

  for (int k : decomp.degenerate_set) {
    const int p = decomp.photon_numbers[static_cast<std::size_t>(k)];
    if (!space.contains_sector(p)) throw ValidationError("Sambe space misses a degenerate sector");
    ops.p_support.push_back(space.index(k, p));
    pt.emplace_back(space.index(k, p), space.index(k, p), 1.0);
  }

  ops.h0.resize(dim, dim);
  ops.h0.setFromTriplets(h0.begin(), h0.end());
  ops.v_static.resize(dim, dim);
  ops.v_static.setFromTriplets(vs.begin(), vs.end());
  ops.v_drive.resize(dim, dim);
  ops.v_drive.setFromTriplets(vd.begin(), vd.end());
  ops.v = ops.v_static + ops.v_drive;
  ops.p.resize(dim, dim);
  ops.p.setFromTriplets(pt.begin(), pt.end());

  ops.resolvent = Eigen::VectorXcd::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    if (std::find(ops.p_support.begin(), ops.p_support.end(), i) != ops.p_support.end()) continue;
    const int l = space.level_of(i), p = space.sector_of(i);
    const double den = decomp.reference_energy + p * w -
                       decomp.shifted_energies[static_cast<std::size_t>(l)];
    if (std::abs(den) < options.guard * w) {
      NearResonance nr{l, p, den};
      if (!options.allow_near_resonance) throw NearResonanceError(describe(nr));
      ops.near_resonances.push_back(nr);
    }
    ops.resolvent(i) = 1.0 / den;
  }
  return ops;
}

SparseMatrix SambeOperators::resolvent_power(int m) const {
  const int dim = space.dimension();
  SparseMatrix out(dim, dim);
  if (m == 0) return p;
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < dim; ++i) {
    if (resolvent(i) != cplx(0.0)) t.emplace_back(i, i, std::pow(resolvent(i), m));
  }
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

void SambeOperators::apply_diagonal(int m, Eigen::MatrixXcd& block) const {
  if (m == 0) {
    Eigen::MatrixXcd kept = Eigen::MatrixXcd::Zero(block.rows(), block.cols());
    for (int i : p_support) kept.row(i) = block.row(i);
    block.swap(kept);
    return;
  }
  Eigen::VectorXcd d = resolvent;
  for (int j = 1; j < m; ++j) d.array() *= resolvent.array();
  block = d.asDiagonal() * block;
}

Eigen::MatrixXcd SambeOperators::projector_columns() const {
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(space.dimension(),
                                              static_cast<Eigen::Index>(p_support.size()));
  for (std::size_t j = 0; j < p_support.size(); ++j) {
    c(p_support[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return c;
}

namespace {

// Right-to-left evaluation over a trie of reversed exponent tuples: the
// block for a shared suffix R^{m_j} V ... R^{m_1} V P is computed once.
class StringEvaluator {
public:
  StringEvaluator(const opalg::CoefficientTable& table, const SambeOperators& ops)
      : ops_(ops), heff_(table.kind == opalg::TableKind::Heff) {
    for (const auto& [e, c] : table.entries) {
      entries_.emplace_back(opalg::Exponents(e.rbegin(), e.rend()), c.convert_to<double>());
    }
    std::sort(entries_.begin(), entries_.end());
  }

  Eigen::MatrixXcd run() {
    const Eigen::MatrixXcd start = ops_.projector_columns();
    acc_ = Eigen::MatrixXcd::Zero(start.rows(), start.cols());
    if (!entries_.empty()) descend(start, 0, 0, entries_.size());
    if (!heff_) return acc_;
    Eigen::MatrixXcd out(ops_.p_support.size(), start.cols());
    for (std::size_t i = 0; i < ops_.p_support.size(); ++i) {
      out.row(static_cast<Eigen::Index>(i)) = acc_.row(ops_.p_support[i]);
    }
    return out;
  }

private:
  // Entries [lo, hi) share their first `depth` reversed exponents; `block`
  // is the corresponding suffix applied to the P columns.
  void descend(const Eigen::MatrixXcd& block, std::size_t depth, std::size_t lo, std::size_t hi) {
    const Eigen::MatrixXcd vb = ops_.v * block;
    std::size_t i = lo;
    while (i < hi && entries_[i].first.size() == depth) {
      // Heff leaf: P V (suffix) P, the final P is applied in run().
      if (heff_) acc_ += entries_[i].second * vb;
      ++i;
    }
    while (i < hi) {
      const int m = entries_[i].first[depth];
      std::size_t j = i;
      while (j < hi && entries_[j].first[depth] == m) ++j;
      Eigen::MatrixXcd next = vb;
      ops_.apply_diagonal(m, next);
      if (!heff_) {
        for (std::size_t e = i; e < j; ++e) {
          if (entries_[e].first.size() == depth + 1) acc_ += entries_[e].second * next;
        }
        std::size_t first_longer = i;
        while (first_longer < j && entries_[first_longer].first.size() == depth + 1) ++first_longer;
        if (first_longer < j) descend(next, depth + 1, first_longer, j);
      } else {
        descend(next, depth + 1, i, j);
      }
      i = j;
    }
  }

  const SambeOperators& ops_;
  bool heff_;
  std::vector<std::pair<opalg::Exponents, double>> entries_;
  Eigen::MatrixXcd acc_;
};

}  // namespace

Eigen::MatrixXcd evaluate_string(const opalg::CoefficientTable& table, const SambeOperators& ops) {
  return StringEvaluator(table, ops).run();
}

}  // namespace floquet
