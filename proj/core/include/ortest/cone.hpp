#pragma once

#include <string>
#include <variant>

#include "ortest/metric.hpp"
#include "ortest/subspace.hpp"

namespace ortest {

enum class OrderKind { simple, tree, umbrella };

struct Polyhedral {
  Matrix restriction;  ///< p x m, cone = {theta : R theta >= 0}
};

struct Orthant {
  Index dim = 0;
};

struct NamedOrder {
  OrderKind kind = OrderKind::simple;
  Index dim = 0;
  Index peak = 0;  ///< umbrella only; zero-based position of the peak
};

/// A closed convex polyhedral cone {theta : R theta >= 0}.
///
/// Every variant compiles to a restriction matrix R with full row rank p <= m:
///   simple    rows theta_{i+1} - theta_i,           i = 1..K-1
///   tree      rows theta_i - theta_1,               i = 2..K
///   umbrella  increasing rows up to the peak, decreasing rows after it
///   orthant   R = I_p
class ConeSpec {
 public:
  using Variant = std::variant<Polyhedral, Orthant, NamedOrder>;

  static ConeSpec polyhedral(Matrix restriction);
  static ConeSpec orthant(Index dim);
  static ConeSpec simple_order(Index dim);
  static ConeSpec tree_order(Index dim);
  static ConeSpec umbrella_order(Index dim, Index peak);

  const Variant& variant() const noexcept { return variant_; }
  const Matrix& restriction() const noexcept { return restriction_; }
  Index ambient_dim() const noexcept { return restriction_.cols(); }
  Index constraint_count() const noexcept { return restriction_.rows(); }

  /// The same cone in Polyhedral form.
  ConeSpec as_polyhedral() const;
  /// The largest subspace inside the cone, {theta : R theta = 0}.
  LinearSubspace lineality() const;
  /// R x >= -tol * (1 + |x|_inf) componentwise.
  bool contains(const Vector& x, double tol = 1e-10) const;
  std::string describe() const;

 private:
  ConeSpec(Variant v, Matrix r) : variant_(std::move(v)), restriction_(std::move(r)) {}

  Variant variant_;
  Matrix restriction_;
};

/// H0: theta in L versus H1: theta in C \ L, with L a subspace of C.
struct TypeA {
  LinearSubspace sub;
  ConeSpec cone;
};

/// H0: theta in C versus H1: theta not in C.
struct TypeB {
  ConeSpec cone;
};

using Problem = std::variant<TypeA, TypeB>;

/// Throws ContractError unless L is contained in C (equivalently R B = 0 for
/// a basis B of L).
void check_nested(const LinearSubspace& sub, const ConeSpec& cone);

}  // namespace ortest
