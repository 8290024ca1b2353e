#include "floquet/error.hpp"
#include "floquet/pert.hpp"

#include <cmath>

namespace floquet {

namespace {

struct Step {
  int photons;
  int level;
  cplx element;
};

class Enumerator {
public:
  Enumerator(const DrivenSystem& system, const ResonantDecomposition& decomp, int l, int k, int r,
             std::size_t cap)
      : decomp_(decomp), l_(l), k_(k), r_(r), cap_(cap), table_(opalg::heff_table(r)) {
    blocks_ = system.harmonics();
    blocks_[0] = decomp.static_perturbation;
    for (const auto& [q, b] : blocks_) reach_ = std::max(reach_, std::abs(q));
    for (const auto& [e, c] : table_.entries) {
      // table tuples run m_{r-1}..m_1; store them in step order
      entries_.emplace_back(opalg::Exponents(e.rbegin(), e.rend()), c);
    }
  }

  std::vector<ProcessTerm> run() {
    walk(k_, n(k_), 1);
    return std::move(out_);
  }

private:
  int n(int level) const { return decomp_.photon_numbers[static_cast<std::size_t>(level)]; }

  void walk(int level, int sector, int j) {
    for (const auto& [q, block] : blocks_) {
      const int next_sector = sector + q;
      if (std::abs(n(l_) - next_sector) > (r_ - j) * reach_) continue;
      for (int b = 0; b < block.rows(); ++b) {
        const cplx x = block(b, level);
        if (x == cplx(0.0)) continue;
        if (j == r_ && (b != l_ || next_sector != n(l_))) continue;
        path_.push_back({q, b, x});
        if (j == r_) {
          emit();
        } else {
          walk(b, next_sector, j + 1);
        }
        path_.pop_back();
      }
    }
  }

  void emit() {
    const double w = decomp_.drive_frequency;
    std::vector<double> den;
    std::vector<bool> res;
    cplx vprod = 1.0;
    int sector = n(k_);
    for (int j = 0; j < r_; ++j) {
      vprod *= path_[static_cast<std::size_t>(j)].element;
      sector += path_[static_cast<std::size_t>(j)].photons;
      if (j == r_ - 1) break;
      const int a = path_[static_cast<std::size_t>(j)].level;
      // exact integer test: (a, sector) is on the P support
      res.push_back(decomp_.in_degenerate_set(a) && sector == n(a));
      den.push_back(decomp_.reference_energy + sector * w -
                    decomp_.shifted_energies[static_cast<std::size_t>(a)]);
    }
    for (const auto& [m, c] : entries_) {
      bool ok = true;
      cplx amp = vprod;
      for (std::size_t j = 0; j < m.size() && ok; ++j) {
        ok = (m[j] == 0) == static_cast<bool>(res[j]);
        if (ok && m[j] > 0) amp /= std::pow(den[j], m[j]);
      }
      if (!ok) continue;
      if (out_.size() >= cap_) {
        throw NumericalError("process enumeration exceeded " + std::to_string(cap_) +
                             " terms; use the matrix path only");
      }
      ProcessTerm t;
      t.order = r_;
      for (std::size_t j = 0; j < path_.size(); ++j) {
        t.photons.push_back(path_[j].photons);
        if (j + 1 < path_.size()) t.levels.push_back(path_[j].level);
      }
      t.exponents = m;
      t.denominators = den;
      t.resonant = res;
      t.coefficient = c;
      t.amplitude = c.convert_to<double>() * amp;
      out_.push_back(std::move(t));
    }
  }

  const ResonantDecomposition& decomp_;
  int l_, k_, r_;
  std::size_t cap_;
  const opalg::CoefficientTable& table_;
  std::map<int, CMatrix> blocks_;
  int reach_ = 0;
  std::vector<std::pair<opalg::Exponents, opalg::Rational>> entries_;
  std::vector<Step> path_;
  std::vector<ProcessTerm> out_;
};

}  // namespace

std::vector<ProcessTerm> enumerate_processes(const DrivenSystem& system,
                                             const ResonantDecomposition& decomp, int l, int k,
                                             int r, std::size_t cap) {
  if (r < 1) throw ValidationError("process order must be >= 1");
  if (!decomp.in_degenerate_set(l) || !decomp.in_degenerate_set(k)) {
    throw ValidationError("processes are enumerated between members of the degenerate set");
  }
  return Enumerator(system, decomp, l, k, r, cap).run();
}

}  // namespace floquet
