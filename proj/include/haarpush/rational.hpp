#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace haarpush {

/// Arbitrary-precision rational scalar for the exact finite backend.
using Rat = boost::multiprecision::cpp_rational;

/// Complex number with rational real and imaginary parts. Only the ring
/// operations are needed: measures are pushed forward and paired by sums and
/// products, and normalizations divide by integers.
struct CRat {
  Rat re{0};
  Rat im{0};

  CRat() = default;
  CRat(Rat r) : re(std::move(r)) {}
  CRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
  CRat(long r, long i = 0) : re(r), im(i) {}

  bool is_zero() const { return re == 0 && im == 0; }

  friend CRat operator+(const CRat& a, const CRat& b) { return {a.re + b.re, a.im + b.im}; }
  friend CRat operator-(const CRat& a, const CRat& b) { return {a.re - b.re, a.im - b.im}; }
  friend CRat operator*(const CRat& a, const CRat& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend CRat operator*(const Rat& s, const CRat& a) { return {s * a.re, s * a.im}; }
  friend bool operator==(const CRat& a, const CRat& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const CRat& a, const CRat& b) { return !(a == b); }
  CRat& operator+=(const CRat& b) {
    re += b.re;
    im += b.im;
    return *this;
  }

  std::string str() const {
    std::string s = re.str();
    if (im != 0) s += (im > 0 ? "+" : "") + im.str() + "i";
    return s;
  }

  double real_double() const { return static_cast<double>(re); }
  double imag_double() const { return static_cast<double>(im); }
};

}  // namespace haarpush
