#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aediag/error.hpp"

namespace aediag {

enum class ObjectKind { Unit, Carrier, Dot };

inline const char* to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::Unit: return "unit";
    case ObjectKind::Carrier: return "carrier";
    case ObjectKind::Dot: return "dot";
  }
  return "?";
}

inline std::optional<ObjectKind> object_kind_from_string(const std::string& s) {
  if (s == "unit") return ObjectKind::Unit;
  if (s == "carrier") return ObjectKind::Carrier;
  if (s == "dot") return ObjectKind::Dot;
  return std::nullopt;
}

/// Square matrix over Z_n, row-major.
struct Matrix {
  std::size_t dim = 0;
  std::vector<std::uint64_t> entries;

  static Matrix identity(std::size_t dim) {
    Matrix m{dim, std::vector<std::uint64_t>(dim * dim, 0)};
    for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1;
    return m;
  }

  std::uint64_t& at(std::size_t r, std::size_t c) { return entries[r * dim + c]; }
  std::uint64_t at(std::size_t r, std::size_t c) const { return entries[r * dim + c]; }

  bool operator==(const Matrix&) const = default;
};

// Arrow variants. Select: unit -> carrier, Pow: carrier -> carrier,
// Elem: dot -> dot.
struct Select {
  std::uint64_t value = 0;
  bool operator==(const Select&) const = default;
};
struct Pow {
  std::uint64_t exp = 1;
  bool operator==(const Pow&) const = default;
};
struct Elem {
  std::string name;  // empty for unnamed composites
  Matrix matrix;
  bool operator==(const Elem&) const = default;
};

class Arrow {
 public:
  using Variant = std::variant<Select, Pow, Elem>;

  Arrow(Select s) : v_(std::move(s)) {}
  Arrow(Pow p) : v_(std::move(p)) {}
  Arrow(Elem e) : v_(std::move(e)) {}

  const Variant& variant() const { return v_; }
  bool is_select() const { return std::holds_alternative<Select>(v_); }
  bool is_pow() const { return std::holds_alternative<Pow>(v_); }
  bool is_elem() const { return std::holds_alternative<Elem>(v_); }
  const Select& select() const { return std::get<Select>(v_); }
  const Pow& pow() const { return std::get<Pow>(v_); }
  const Elem& elem() const { return std::get<Elem>(v_); }

  ObjectKind source() const {
    if (is_select()) return ObjectKind::Unit;
    if (is_pow()) return ObjectKind::Carrier;
    return ObjectKind::Dot;
  }
  ObjectKind target() const { return is_elem() ? ObjectKind::Dot : ObjectKind::Carrier; }

  /// Short label: select(8), pow(3), alpha1, or the matrix rows for an
  /// unnamed monoid element.
  std::string str() const {
    if (is_select()) return "select(" + std::to_string(select().value) + ")";
    if (is_pow()) return "pow(" + std::to_string(pow().exp) + ")";
    const auto& e = elem();
    if (!e.name.empty()) return e.name;
    std::string s = "[";
    for (std::size_t r = 0; r < e.matrix.dim; ++r) {
      if (r) s += ";";
      for (std::size_t c = 0; c < e.matrix.dim; ++c) {
        if (c) s += ",";
        s += std::to_string(e.matrix.at(r, c));
      }
    }
    return s + "]";
  }

  // Structural equality (names included). Use arrows_equal for the
  // algebraic notion.
  bool operator==(const Arrow&) const = default;

 private:
  Variant v_;
};

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace detail

/// Exponentiation modulo a prime p: objects {*} and Z_p, selection arrows
/// [x] and exponentiation arrows (_)^e.
///
/// Exponents are kept in 1..p-1. x -> x^e on Z_p depends only on e mod p-1
/// once e >= 1 (0 is fixed, Z_p^* is cyclic of order p-1), so the zero class
/// is represented by p-1 and exponent 0 itself is rejected.
class ModExpTheory {
 public:
  static constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 31;
  static constexpr std::uint64_t kDefaultOracleBound = 10007;

  explicit ModExpTheory(std::uint64_t p) : p_(p) {
    if (p < 3 || p > kMaxModulus) throw Error(ErrorCode::BadParams, "modulus must lie in 3..2^31");
    if (!detail::is_prime(p)) throw Error(ErrorCode::BadParams, std::to_string(p) + " is not prime");
  }

  std::uint64_t p() const { return p_; }

  Arrow select(std::uint64_t x) const { return Select{x % p_}; }

  Arrow pow(std::uint64_t e) const {
    if (e == 0) throw Error(ErrorCode::BadParams, "exponent 0 is not an exponentiation arrow");
    return Pow{normalize_exponent(e)};
  }

  std::uint64_t normalize_exponent(std::uint64_t e) const {
    std::uint64_t r = e % (p_ - 1);
    return r == 0 ? p_ - 1 : r;
  }

  bool operator==(const ModExpTheory&) const = default;

 private:
  std::uint64_t p_;
};

/// A finite monoid of d x d matrices over Z_n, with named elements and
/// optional named key pools.
class MatrixMonoidTheory {
 public:
  MatrixMonoidTheory(std::uint64_t modulus, std::size_t dim,
                     std::map<std::string, Matrix> elements = {},
                     std::map<std::string, std::vector<std::string>> pools = {})
      : modulus_(modulus), dim_(dim), pools_(std::move(pools)) {
    if (modulus_ < 2) throw Error(ErrorCode::BadParams, "matrix modulus must be >= 2");
    if (dim_ < 1) throw Error(ErrorCode::BadParams, "matrix dimension must be >= 1");
    for (auto& [name, m] : elements) declare(name, std::move(m));
    for (const auto& [pool, names] : pools_)
      for (const auto& n : names)
        if (!elements_.count(n)) throw Error(ErrorCode::Name, "pool '" + pool + "' references undeclared '" + n + "'");
  }

  std::uint64_t modulus() const { return modulus_; }
  std::size_t dim() const { return dim_; }
  const std::map<std::string, Matrix>& elements() const { return elements_; }
  const std::map<std::string, std::vector<std::string>>& pools() const { return pools_; }

  const Matrix& matrix(const std::string& name) const {
    auto it = elements_.find(name);
    if (it == elements_.end()) throw Error(ErrorCode::Name, "undeclared monoid element '" + name + "'");
    return it->second;
  }

  Arrow elem(const std::string& name) const { return Elem{name, matrix(name)}; }

  /// Unnamed element from an explicit matrix; entries are reduced.
  Arrow elem(Matrix m) const { return Elem{"", reduce(std::move(m))}; }

  Matrix multiply(const Matrix& lhs, const Matrix& rhs) const {
    Matrix out{dim_, std::vector<std::uint64_t>(dim_ * dim_, 0)};
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t k = 0; k < dim_; ++k) {
        std::uint64_t a = lhs.at(i, k);
        if (!a) continue;
        for (std::size_t j = 0; j < dim_; ++j)
          out.at(i, j) = (out.at(i, j) + detail::mulmod(a, rhs.at(k, j), modulus_)) % modulus_;
      }
    return out;
  }

  Matrix reduce(Matrix m) const {
    if (m.dim != dim_ || m.entries.size() != dim_ * dim_)
      throw Error(ErrorCode::BadParams, "matrix has wrong dimension");
    for (auto& x : m.entries) x %= modulus_;
    return m;
  }

  bool operator==(const MatrixMonoidTheory&) const = default;

 private:
  void declare(const std::string& name, Matrix m) {
    if (name.empty()) throw Error(ErrorCode::BadParams, "empty element name");
    elements_[name] = reduce(std::move(m));
  }

  std::uint64_t modulus_;
  std::size_t dim_;
  std::map<std::string, Matrix> elements_;
  std::map<std::string, std::vector<std::string>> pools_;
};

/// The algebraic half of a diagram: one of the two supported backends.
class AlgebraTheory {
 public:
  using Variant = std::variant<ModExpTheory, MatrixMonoidTheory>;

  AlgebraTheory(ModExpTheory t) : v_(std::move(t)) {}
  AlgebraTheory(MatrixMonoidTheory t) : v_(std::move(t)) {}

  const Variant& variant() const { return v_; }
  bool is_modexp() const { return std::holds_alternative<ModExpTheory>(v_); }
  bool is_monoid() const { return std::holds_alternative<MatrixMonoidTheory>(v_); }
  const ModExpTheory& modexp() const { return std::get<ModExpTheory>(v_); }
  const MatrixMonoidTheory& monoid() const { return std::get<MatrixMonoidTheory>(v_); }

  bool has_object(ObjectKind k) const {
    if (k == ObjectKind::Unit) return true;
    return is_modexp() ? k == ObjectKind::Carrier : k == ObjectKind::Dot;
  }

  /// True when the arrow belongs to this theory and is in normal form.
  bool admits(const Arrow& a) const {
    if (is_modexp()) {
      const auto p = modexp().p();
      if (a.is_select()) return a.select().value < p;
      if (a.is_pow()) return a.pow().exp >= 1 && a.pow().exp <= p - 1;
      return false;
    }
    if (!a.is_elem()) return false;
    const auto& m = a.elem().matrix;
    if (m.dim != monoid().dim() || m.entries.size() != m.dim * m.dim) return false;
    for (auto x : m.entries)
      if (x >= monoid().modulus()) return false;
    return true;
  }

  bool operator==(const AlgebraTheory&) const = default;

 private:
  Variant v_;
};

/// g after f (f is applied first).
inline Arrow compose(const AlgebraTheory& theory, const Arrow& f, const Arrow& g) {
  if (f.target() != g.source())
    throw Error(ErrorCode::Composition,
                "cannot compose " + g.str() + " after " + f.str() + ": " + to_string(f.target()) +
                    " != " + to_string(g.source()));
  if (theory.is_modexp()) {
    if (!g.is_pow()) throw Error(ErrorCode::Composition, "modular theory cannot compose " + g.str());
    const auto& t = theory.modexp();
    const auto& e2 = g.pow().exp;
    if (f.is_pow()) {
      return Pow{t.normalize_exponent(detail::mulmod(f.pow().exp, e2, t.p() - 1))};
    }
    return Select{detail::powmod(f.select().value, e2, t.p())};
  }
  if (!f.is_elem() || !g.is_elem())
    throw Error(ErrorCode::Composition, "monoid theory only composes elements");
  const auto& m = theory.monoid();
  return Elem{"", m.multiply(g.elem().matrix, f.elem().matrix)};
}

inline bool arrows_equal(const AlgebraTheory& theory, const Arrow& f, const Arrow& g) {
  if (f.source() != g.source() || f.target() != g.target())
    throw Error(ErrorCode::Composition, "arrows " + f.str() + " and " + g.str() + " are not parallel");
  if (theory.is_modexp() != !f.is_elem())
    throw Error(ErrorCode::Composition, f.str() + " does not belong to this theory");
  if (theory.is_modexp()) {
    if (f.is_select()) return f.select().value == g.select().value;
    const auto& t = theory.modexp();
    return t.normalize_exponent(f.pow().exp) == t.normalize_exponent(g.pow().exp);
  }
  return f.elem().matrix == g.elem().matrix;
}

/// The point * of the unit object.
struct UnitPoint {};
using Point = std::variant<UnitPoint, std::uint64_t>;

inline std::uint64_t eval_point(const ModExpTheory& theory, const Arrow& f, const Point& x) {
  if (f.is_select()) {
    if (!std::holds_alternative<UnitPoint>(x))
      throw Error(ErrorCode::Eval, "selection arrows are evaluated at *");
    return f.select().value;
  }
  if (f.is_pow()) {
    if (!std::holds_alternative<std::uint64_t>(x))
      throw Error(ErrorCode::Eval, "exponentiation arrows are evaluated at a residue");
    auto v = std::get<std::uint64_t>(x);
    if (v >= theory.p()) throw Error(ErrorCode::Eval, "residue out of range");
    return detail::powmod(v, f.pow().exp, theory.p());
  }
  throw Error(ErrorCode::Eval, "monoid elements have no pointwise evaluation here");
}

/// Pointwise comparison of two exponentiation arrows over all of Z_p.
/// Limited to p <= bound because it is exhaustive.
inline bool extensionally_equal(const ModExpTheory& theory, const Arrow& f, const Arrow& g,
                                std::uint64_t bound = ModExpTheory::kDefaultOracleBound) {
  if (theory.p() > bound) throw Error(ErrorCode::Eval, "modulus above the extensional oracle bound");
  if (f.is_select() && g.is_select()) return eval_point(theory, f, UnitPoint{}) == eval_point(theory, g, UnitPoint{});
  if (!f.is_pow() || !g.is_pow()) throw Error(ErrorCode::Composition, "arrows are not parallel");
  for (std::uint64_t x = 0; x < theory.p(); ++x)
    if (eval_point(theory, f, x) != eval_point(theory, g, x)) return false;
  return true;
}

struct CommutationWitness {
  std::string a;
  std::string b;
};

/// First (a, b) with a*b != b*a, scanning poolA x poolB in order.
inline std::optional<CommutationWitness> find_noncommuting_pair(const MatrixMonoidTheory& theory,
                                                                const std::vector<std::string>& pool_a,
                                                                const std::vector<std::string>& pool_b) {
  for (const auto& a : pool_a) {
    const auto& ma = theory.matrix(a);
    for (const auto& b : pool_b) {
      const auto& mb = theory.matrix(b);
      if (theory.multiply(ma, mb) != theory.multiply(mb, ma)) return CommutationWitness{a, b};
    }
  }
  return std::nullopt;
}

inline bool check_pointwise_commuting(const MatrixMonoidTheory& theory, const std::vector<std::string>& pool_a,
                                      const std::vector<std::string>& pool_b) {
  return !find_noncommuting_pair(theory, pool_a, pool_b).has_value();
}

}  // namespace aediag
