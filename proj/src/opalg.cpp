#include "floquet/opalg.hpp"

#include "floquet/error.hpp"

#include <mutex>
#include <sstream>

namespace floquet::opalg {

StringSum StringSum::single(Exponents exponents) {
  StringSum s;
  s.add(exponents, Rational(1));
  return s;
}

Rational StringSum::coefficient(const Exponents& exponents) const {
  auto it = terms_.find(exponents);
  return it == terms_.end() ? Rational(0) : it->second;
}

void StringSum::add(const Exponents& exponents, const Rational& coefficient) {
  if (exponents.empty()) throw ValidationError("operator string needs at least one slot");
  for (int m : exponents) {
    if (m < 0) throw ValidationError("negative exponent in operator string");
  }
  const int order = static_cast<int>(exponents.size()) - 1;
  if (order_ >= 0 && order != order_) {
    throw ValidationError("operator strings of different order cannot be summed");
  }
  if (coefficient == 0) return;
  order_ = order;
  auto [it, inserted] = terms_.try_emplace(exponents, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0) terms_.erase(it);
  }
}

StringSum& StringSum::operator+=(const StringSum& other) {
  for (const auto& [e, c] : other.terms_) add(e, c);
  if (order_ < 0) order_ = other.order_;
  return *this;
}

StringSum& StringSum::operator-=(const StringSum& other) {
  for (const auto& [e, c] : other.terms_) add(e, -c);
  if (order_ < 0) order_ = other.order_;
  return *this;
}

StringSum& StringSum::operator*=(const Rational& factor) {
  if (factor == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= factor;
  return *this;
}

StringSum compose(const StringSum& a, const StringSum& b) {
  StringSum out;
  for (const auto& [ea, ca] : a.terms()) {
    const int left = ea.back();
    for (const auto& [eb, cb] : b.terms()) {
      const int right = eb.front();
      // P R = R P = 0
      if ((left == 0) != (right == 0)) continue;
      Exponents e;
      e.reserve(ea.size() + eb.size() - 1);
      e.insert(e.end(), ea.begin(), ea.end() - 1);
      e.push_back(left + right);
      e.insert(e.end(), eb.begin() + 1, eb.end());
      out.add(e, ca * cb);
    }
  }
  return out;
}

StringSum join_through_v(const StringSum& a, const StringSum& b) {
  StringSum out;
  for (const auto& [ea, ca] : a.terms()) {
    for (const auto& [eb, cb] : b.terms()) {
      Exponents e(ea);
      e.insert(e.end(), eb.begin(), eb.end());
      out.add(e, ca * cb);
    }
  }
  return out;
}

StringSum adjoint(const StringSum& s) {
  StringSum out;
  for (const auto& [e, c] : s.terms()) {
    // Rational coefficients: conjugation is the identity.
    out.add(Exponents(e.rbegin(), e.rend()), c);
  }
  return out;
}

namespace {

// Order-by-order solution of the wave-operator recurrences, grown on demand.
class Series {
public:
  static Series& instance() {
    static Series s;
    return s;
  }

  StringSum L(int r) {
    std::lock_guard lock(mutex_);
    extend(r);
    return L_[r];
  }
  NPowers N(int r) {
    std::lock_guard lock(mutex_);
    extend(r);
    return {N_[r], sqrt_[r], inv_sqrt_[r]};
  }
  StringSum W(int r) {
    std::lock_guard lock(mutex_);
    extend(r);
    StringSum w;
    for (int k = 0; k <= r; ++k) w += compose(L_[k], inv_sqrt_[r - k]);
    return w;
  }
  StringSum heff(int r) {
    std::lock_guard lock(mutex_);
    extend(r);
    StringSum h;
    for (int k = 0; k <= r - 1; ++k) {
      for (int l = 0; l <= r - 1 - k; ++l) {
        h += compose(join_through_v(sqrt_[k], L_[l]), inv_sqrt_[r - k - l - 1]);
      }
    }
    return h;
  }

private:
  void extend(int r) {
    if (r < 0) throw ValidationError("perturbation order must be non-negative");
    const StringSum P = StringSum::projector();
    const StringSum R = StringSum::resolvent();
    while (static_cast<int>(L_.size()) <= r) {
      const int n = static_cast<int>(L_.size());
      if (n == 0) {
        L_.push_back(P);
        N_.push_back(P);
        sqrt_.push_back(P);
        inv_sqrt_.push_back(P);
        continue;
      }
      StringSum l = join_through_v(R, L_[n - 1]);
      for (int k = 1; k <= n - 1; ++k) {
        l -= join_through_v(compose(R, L_[k]), L_[n - k - 1]);
      }
      L_.push_back(l);

      StringSum nn;
      for (int k = 0; k <= n; ++k) nn += compose(adjoint(L_[k]), L_[n - k]);
      N_.push_back(nn);

      StringSum sq = Rational(1, 2) * nn;
      for (int k = 1; k <= n - 1; ++k) {
        sq -= Rational(1, 2) * compose(sqrt_[k], sqrt_[n - k]);
      }
      sqrt_.push_back(sq);

      StringSum inv;
      for (int k = 0; k <= n - 1; ++k) inv -= compose(inv_sqrt_[k], sqrt_[n - k]);
      inv_sqrt_.push_back(inv);
    }
  }

  std::mutex mutex_;
  std::vector<StringSum> L_, N_, sqrt_, inv_sqrt_;
};

}  // namespace

StringSum build_L(int r) { return Series::instance().L(r); }
NPowers build_N_powers(int r) { return Series::instance().N(r); }
StringSum build_W(int r) { return Series::instance().W(r); }
StringSum build_heff(int r) {
  if (r < 1) throw ValidationError("effective Hamiltonian order must be >= 1");
  return Series::instance().heff(r);
}

std::string to_string(TableKind kind) { return kind == TableKind::Heff ? "heff" : "w"; }

TableKind table_kind_from_string(const std::string& s) {
  if (s == "heff") return TableKind::Heff;
  if (s == "w" || s == "W") return TableKind::W;
  throw ValidationError("unknown coefficient table kind '" + s + "' (expected heff|w)");
}

Rational CoefficientTable::coefficient(const Exponents& exponents) const {
  auto it = entries.find(exponents);
  return it == entries.end() ? Rational(0) : it->second;
}

CoefficientTable compute_heff_table(int r) {
  CoefficientTable t{TableKind::Heff, r, {}};
  const StringSum h = build_heff(r);
  for (const auto& [e, c] : h.terms()) {
    if (e.front() != 0 || e.back() != 0) {
      throw NumericalError("effective Hamiltonian string does not start and end with P");
    }
    t.entries.emplace(Exponents(e.begin() + 1, e.end() - 1), c);
  }
  return t;
}

CoefficientTable compute_w_table(int r) {
  if (r < 1) throw ValidationError("W table order must be >= 1");
  CoefficientTable t{TableKind::W, r, {}};
  const StringSum w = build_W(r);
  for (const auto& [e, c] : w.terms()) {
    if (e.back() != 0) throw NumericalError("W string does not end with P");
    t.entries.emplace(Exponents(e.begin(), e.end() - 1), c);
  }
  return t;
}

namespace {
constexpr const char* kMagic = "floquet-dpt coefficient table v1";
}

std::string serialize(const CoefficientTable& table) {
  std::ostringstream os;
  os << "# " << kMagic << '\n';
  os << "kind " << to_string(table.kind) << '\n';
  os << "order " << table.order << '\n';
  os << "entries " << table.entries.size() << '\n';
  for (const auto& [e, c] : table.entries) {
    for (int m : e) os << m << ' ';
    os << numerator(c) << '/' << denominator(c) << '\n';
  }
  return os.str();
}

CoefficientTable deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != std::string("# ") + kMagic) {
    throw ValidationError("not a v1 coefficient table");
  }
  CoefficientTable t;
  std::string key, value;
  std::size_t count = 0;
  is >> key >> value;
  if (key != "kind") throw ValidationError("coefficient table: missing kind");
  t.kind = table_kind_from_string(value);
  is >> key >> t.order;
  if (key != "order") throw ValidationError("coefficient table: missing order");
  is >> key >> count;
  if (key != "entries") throw ValidationError("coefficient table: missing entries");
  const int len = t.tuple_length();
  for (std::size_t i = 0; i < count; ++i) {
    Exponents e(static_cast<std::size_t>(len));
    for (int& m : e) is >> m;
    std::string frac;
    is >> frac;
    const auto slash = frac.find('/');
    if (!is || slash == std::string::npos) throw ValidationError("coefficient table: bad entry");
    using boost::multiprecision::cpp_int;
    t.entries.emplace(e, Rational(cpp_int(frac.substr(0, slash)), cpp_int(frac.substr(slash + 1))));
  }
  return t;
}

}  // namespace floquet::opalg
