#include "wcs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wcs/error.hpp"

namespace wcs {

std::string_view to_string(MatrixSource source) {
  switch (source) {
    case MatrixSource::Identity: return "identity";
    case MatrixSource::DftRows: return "dft";
    case MatrixSource::DctRows: return "dct";
    case MatrixSource::UnitaryRows: return "unitary";
    case MatrixSource::Gaussian: return "gaussian";
    case MatrixSource::ExplicitFile: return "file";
    case MatrixSource::Counterexample: return "counterexample";
    case MatrixSource::Derived: return "derived";
  }
  return "derived";
}

MatrixSource parse_source(std::string_view text) {
  for (auto s : {MatrixSource::Identity, MatrixSource::DftRows, MatrixSource::DctRows,
                 MatrixSource::UnitaryRows, MatrixSource::Gaussian, MatrixSource::ExplicitFile,
                 MatrixSource::Counterexample, MatrixSource::Derived}) {
    if (to_string(s) == text) return s;
  }
  fail(ErrorCode::Parse, "unknown matrix source '" + std::string(text) + "'");
}

SenseMatrix::SenseMatrix(CMatrix a, Provenance p) : values(std::move(a)), provenance(std::move(p)) {
  require(values.allFinite(), ErrorCode::InvalidArgument, "sensing matrix has non-finite entries");
  if (!provenance.rows.empty()) {
    require(static_cast<Index>(provenance.rows.size()) == values.rows(), ErrorCode::InvalidArgument,
            "provenance row list does not match the row count");
  }
}

bool is_real(const CMatrix& a, double tol) {
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (std::abs(a(i, j).imag()) > tol) return false;
  return true;
}

CMatrix columns(const CMatrix& a, const Support& s) {
  require(s.dim() == a.cols(), ErrorCode::DimensionMismatch, "support dimension differs from column count");
  CMatrix out(a.rows(), s.size());
  Index k = 0;
  for (Index j : s) out.col(k++) = a.col(j);
  return out;
}

RVector singular_values(const CMatrix& a) {
  if (a.size() == 0) return RVector();
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues();
}

Index numerical_rank(const RVector& sv, Index rows, Index cols, double tol) {
  if (sv.size() == 0) return 0;
  const double smax = sv(0);
  if (smax == 0.0) return 0;
  const double t = tol >= 0.0 ? tol
                              : static_cast<double>(std::max(rows, cols)) *
                                    std::numeric_limits<double>::epsilon() * 16.0;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > t * smax) ++r;
  return r;
}

CMatrix null_space_basis(const CMatrix& a, double tol) {
  const Index n = a.cols();
  if (a.rows() == 0) return CMatrix::Identity(n, n);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const Index r = numerical_rank(svd.singularValues(), a.rows(), n, tol);
  return svd.matrixV().rightCols(n - r);
}

RMatrix null_space_basis_real(const RMatrix& a, double tol) {
  const Index n = a.cols();
  if (a.rows() == 0) return RMatrix::Identity(n, n);
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
  const Index r = numerical_rank(svd.singularValues(), a.rows(), n, tol);
  return svd.matrixV().rightCols(n - r);
}

CMatrix orthogonal_complement(const CMatrix& v, double tol) {
  if (v.cols() == 0) return CMatrix::Identity(v.rows(), v.rows());
  return null_space_basis(v.adjoint(), tol);
}

}  // namespace wcs
