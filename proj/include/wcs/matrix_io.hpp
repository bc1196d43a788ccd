#ifndef WCS_MATRIX_IO_HPP
#define WCS_MATRIX_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "wcs/linalg.hpp"

namespace wcs {

// Text format:
//   WCSMAT 1 <real|complex> <m> <N>
//   m lines of N entries ("re" or "re+imj", 17 significant digits)
//   optional trailer lines: "# source <name>", "# seed <u64>",
//   "# rows <i> ...", "# note <text>"; other '#' lines are comments.

void write_matrix(std::ostream& os, const SenseMatrix& a);
void write_matrix(const std::filesystem::path& path, const SenseMatrix& a);
std::string format_matrix(const SenseMatrix& a);

/// Parse errors name the offending line of `origin`.
SenseMatrix read_matrix(std::istream& is, const std::string& origin = "<stream>");
SenseMatrix read_matrix(const std::filesystem::path& path);

/// Vectors are stored as N x 1 matrices; 1 x N is accepted on read.
void write_vector(const std::filesystem::path& path, const CVector& v, const std::string& note = {});
CVector read_vector(const std::filesystem::path& path);

/// "re" or "re+imj" with %.17g parts.
std::string format_entry(std::complex<double> z, bool real);
/// Inverse of format_entry; false on malformed text.
bool parse_entry(const std::string& token, bool complex_allowed, std::complex<double>& out);

}  // namespace wcs

#endif  // WCS_MATRIX_IO_HPP
