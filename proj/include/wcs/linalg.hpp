#ifndef WCS_LINALG_HPP
#define WCS_LINALG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wcs/core.hpp"

namespace wcs {

enum class MatrixSource { Identity, DftRows, DctRows, UnitaryRows, Gaussian, ExplicitFile, Counterexample, Derived };

std::string_view to_string(MatrixSource source);
MatrixSource parse_source(std::string_view text);

struct Provenance {
  MatrixSource source = MatrixSource::Derived;
  std::vector<Index> rows;  ///< sampled base rows, in output order
  std::optional<std::uint64_t> seed;
  std::string note;
};

/// Dense complex m x N sensing matrix plus where it came from.
struct SenseMatrix {
  CMatrix values;
  Provenance provenance;

  SenseMatrix() = default;
  explicit SenseMatrix(CMatrix a, Provenance p = {});

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

/// True when every imaginary part is at most tol in modulus.
bool is_real(const CMatrix& a, double tol = 0.0);

/// Columns of A indexed by S.
CMatrix columns(const CMatrix& a, const Support& s);

/// Singular values in descending order.
RVector singular_values(const CMatrix& a);

/// Numerical rank: singular values above tol * sigma_max (default tolerance
/// scales with the matrix size).
Index numerical_rank(const RVector& sv, Index rows, Index cols, double tol = -1.0);

/// Orthonormal basis (N x d) of ker(A) from the trailing right singular
/// vectors; d = 0 for injective A.
CMatrix null_space_basis(const CMatrix& a, double tol = -1.0);

/// Real variant for real data.
RMatrix null_space_basis_real(const RMatrix& a, double tol = -1.0);

/// Orthonormal basis of the orthogonal complement of span(cols(v)) in C^n.
CMatrix orthogonal_complement(const CMatrix& v, double tol = -1.0);

}  // namespace wcs

#endif  // WCS_LINALG_HPP
