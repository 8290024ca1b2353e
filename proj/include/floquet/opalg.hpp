#pragma once

// Exact algebra of operator strings  R^{m_n} V ... R^{m_1} V R^{m_0}.
//
// A string with n factors of V is stored as the exponent tuple
// (m_n, ..., m_0), written left to right in the same order as the operators
// appear in the product. Exponent 0 stands for the projector P onto the
// degenerate subspace, exponent m >= 1 for the m-th power of the resolvent R.
// The only products that survive are P P = P and R^a R^b = R^{a+b}; P R and
// R P vanish.

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <string>
#include <vector>

namespace floquet::opalg {

using Rational = boost::multiprecision::cpp_rational;
using Exponents = std::vector<int>;

/// Linear combination of operator strings that all carry the same number of V
/// factors. Zero coefficients are never stored.
class StringSum {
public:
  StringSum() = default;

  /// A single string with unit coefficient.
  static StringSum single(Exponents exponents);
  static StringSum projector() { return single({0}); }
  static StringSum resolvent(int power = 1) { return single({power}); }

  /// Number of V factors, or -1 for the empty sum.
  int order() const { return order_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<Exponents, Rational>& terms() const { return terms_; }

  /// Coefficient of a string, zero if absent.
  Rational coefficient(const Exponents& exponents) const;

  void add(const Exponents& exponents, const Rational& coefficient);

  StringSum& operator+=(const StringSum& other);
  StringSum& operator-=(const StringSum& other);
  StringSum& operator*=(const Rational& factor);

  friend StringSum operator+(StringSum a, const StringSum& b) { return a += b; }
  friend StringSum operator-(StringSum a, const StringSum& b) { return a -= b; }
  friend StringSum operator*(const Rational& f, StringSum a) { return a *= f; }

  bool operator==(const StringSum& other) const = default;

private:
  std::map<Exponents, Rational> terms_;
  int order_ = -1;
};

/// Formal product a*b with the boundary exponents merged.
StringSum compose(const StringSum& a, const StringSum& b);

/// Formal product a*V*b: the tuples are concatenated.
StringSum join_through_v(const StringSum& a, const StringSum& b);

/// Hermitian adjoint: tuple reversal. Coefficients are rational and
/// therefore self-conjugate.
StringSum adjoint(const StringSum& s);

/// Wave operator at order r, L_0 = P, L_1 = R V P.
StringSum build_L(int r);

struct NPowers {
  StringSum n;
  StringSum sqrt;
  StringSum inv_sqrt;
};

/// N_r, (N^{1/2})_r and (N^{-1/2})_r.
NPowers build_N_powers(int r);

/// Order-r term of the normalized transformation W = L N^{-1/2} P.
StringSum build_W(int r);

/// Order-r term of the effective Hamiltonian.
StringSum build_heff(int r);

enum class TableKind { Heff, W };

std::string to_string(TableKind kind);
TableKind table_kind_from_string(const std::string& s);

/// Multiplicity coefficients at one order. Heff tuples are the interior
/// exponents (m_{r-1}, ..., m_1); W tuples are (m_r, ..., m_1).
struct CoefficientTable {
  TableKind kind = TableKind::Heff;
  int order = 1;
  std::map<Exponents, Rational> entries;

  Rational coefficient(const Exponents& exponents) const;
  /// Length of every tuple in the table.
  int tuple_length() const { return kind == TableKind::Heff ? order - 1 : order; }
  /// Sum of the exponents of every tuple.
  int tuple_sum() const { return kind == TableKind::Heff ? order - 1 : order; }
};

/// Strips the boundary projectors off build_heff(r) / build_W(r). These are
/// computed from scratch; use coefficient_table() for the memoized variant.
CoefficientTable compute_heff_table(int r);
CoefficientTable compute_w_table(int r);

/// Memoized (and, if a cache directory is configured, disk-backed) tables.
const CoefficientTable& heff_table(int r);
const CoefficientTable& w_table(int r);
const CoefficientTable& coefficient_table(TableKind kind, int r);

/// Versioned text serialization used by the disk cache.
std::string serialize(const CoefficientTable& table);
CoefficientTable deserialize(const std::string& text);

/// Directory for the on-disk table cache: FLOQUET_DPT_CACHE_DIR if set,
/// otherwise no disk cache (empty string).
std::string cache_directory();

}  // namespace floquet::opalg
