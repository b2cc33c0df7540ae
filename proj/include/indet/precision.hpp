#pragma once

// Extended-precision scalar types used when Precision::extended is selected.
// Only translation units that run the extended kernel include this header.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <complex>

#include "indet/common.hpp"

namespace indet {

using ext_real = boost::multiprecision::cpp_bin_float_50;
using ext_cplx = boost::multiprecision::cpp_complex_50;

template <class Real>
struct complex_of {
  using type = std::complex<Real>;
};

template <>
struct complex_of<ext_real> {
  using type = ext_cplx;
};

template <class Real>
using complex_t = typename complex_of<Real>::type;

template <class Real>
inline complex_t<Real> lift(cplx z) {
  return complex_t<Real>(Real(z.real()), Real(z.imag()));
}

inline cplx lower(const std::complex<double>& z) { return z; }
inline cplx lower(const ext_cplx& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}
inline double lower(double x) { return x; }
inline double lower(const ext_real& x) { return static_cast<double>(x); }

}  // namespace indet
