#include "ortest/cone.hpp"

#include <sstream>

#include "ortest/error.hpp"

namespace ortest {
namespace {

Matrix validated(Matrix r) {
  require(r.rows() > 0 && r.cols() > 0, "restriction matrix must be non-empty");
  require(r.allFinite(), "restriction matrix has non-finite entries");
  require(r.rows() <= r.cols(), "restriction matrix has more rows than columns");
  const Index rank = numerical_rank(r);
  if (rank != r.rows()) {
    throw ContractError("restriction matrix must have full row rank (rank " +
                        std::to_string(rank) + " < " + std::to_string(r.rows()) + ")");
  }
  return r;
}

Matrix simple_rows(Index k) {
  Matrix r = Matrix::Zero(k - 1, k);
  for (Index i = 0; i + 1 < k; ++i) {
    r(i, i) = -1.0;
    r(i, i + 1) = 1.0;
  }
  return r;
}

}  // namespace

ConeSpec ConeSpec::polyhedral(Matrix restriction) {
  Matrix r = validated(std::move(restriction));
  return ConeSpec(Polyhedral{r}, r);
}

ConeSpec ConeSpec::orthant(Index dim) {
  require(dim > 0, "orthant dimension must be positive");
  return ConeSpec(Orthant{dim}, Matrix::Identity(dim, dim));
}

ConeSpec ConeSpec::simple_order(Index dim) {
  require(dim >= 2, "simple order needs at least two means");
  return ConeSpec(NamedOrder{OrderKind::simple, dim, 0}, simple_rows(dim));
}

ConeSpec ConeSpec::tree_order(Index dim) {
  require(dim >= 2, "tree order needs at least two means");
  Matrix r = Matrix::Zero(dim - 1, dim);
  for (Index i = 1; i < dim; ++i) {
    r(i - 1, 0) = -1.0;
    r(i - 1, i) = 1.0;
  }
  return ConeSpec(NamedOrder{OrderKind::tree, dim, 0}, r);
}

ConeSpec ConeSpec::umbrella_order(Index dim, Index peak) {
  require(dim >= 2, "umbrella order needs at least two means");
  require(peak >= 0 && peak < dim, "umbrella peak out of range");
  Matrix r = Matrix::Zero(dim - 1, dim);
  for (Index i = 0; i + 1 < dim; ++i) {
    // Rising towards the peak, falling after it.
    const double sign = i < peak ? 1.0 : -1.0;
    r(i, i) = -sign;
    r(i, i + 1) = sign;
  }
  return ConeSpec(NamedOrder{OrderKind::umbrella, dim, peak}, r);
}

ConeSpec ConeSpec::as_polyhedral() const { return ConeSpec(Polyhedral{restriction_}, restriction_); }

LinearSubspace ConeSpec::lineality() const { return LinearSubspace::from_constraint(restriction_); }

bool ConeSpec::contains(const Vector& x, double tol) const {
  require(x.size() == ambient_dim(), "dimension mismatch in ConeSpec::contains");
  const double slack = tol * (1.0 + x.cwiseAbs().maxCoeff());
  return ((restriction_ * x).array() >= -slack).all();
}

std::string ConeSpec::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Polyhedral>) {
          os << "polyhedral(" << restriction_.rows() << "x" << restriction_.cols() << ")";
        } else if constexpr (std::is_same_v<T, Orthant>) {
          os << "orthant(" << v.dim << ")";
        } else {
          switch (v.kind) {
            case OrderKind::simple: os << "simple(" << v.dim << ")"; break;
            case OrderKind::tree: os << "tree(" << v.dim << ")"; break;
            case OrderKind::umbrella: os << "umbrella(" << v.dim << ", peak " << v.peak + 1 << ")"; break;
          }
        }
      },
      variant_);
  return os.str();
}

void check_nested(const LinearSubspace& sub, const ConeSpec& cone) {
  require(sub.ambient_dim() == cone.ambient_dim(), "subspace and cone dimensions differ");
  if (sub.dim() == 0) return;
  const Matrix rb = cone.restriction() * sub.basis();
  if (rb.cwiseAbs().maxCoeff() > 1e-8 * (1.0 + cone.restriction().cwiseAbs().maxCoeff())) {
    throw ContractError("null subspace is not contained in the cone (R B != 0)");
  }
}

}  // namespace ortest
