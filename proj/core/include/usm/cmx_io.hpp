#ifndef USM_CMX_IO_HPP
#define USM_CMX_IO_HPP

#include <iosfwd>
#include <string>

#include "usm/types.hpp"

namespace usm {

// Text format for complex matrices (.cmx):
//   optional '#' comment lines
//   <rows> <cols>
//   rows lines of cols tokens "RE,IM", 17 significant digits.
// The round trip is bit-exact for finite doubles.

CMatrix read_cmatrix(std::istream& in);
CMatrix read_cmatrix(const std::string& path);
void write_cmatrix(std::ostream& out, const CMatrix& a);
void write_cmatrix(const std::string& path, const CMatrix& a);

}  // namespace usm

#endif
