#pragma once

#include "haarpush/group.hpp"

namespace haarpush {

/// Built-in charted groups. Each is constructed once, validated (group axioms,
/// dual-vs-FD Jacobians, matrix-model homomorphism) and then shared.
///
///   r<n>    : (R^n, +)                              coordinates (x_1..x_n)
///   aff1    : {x -> a x + b, a > 0}                 coordinates (a, b)
///   heis3   : 3x3 unitriangular matrices            coordinates (x, y, z)
///   borel3  : 3x3 upper triangular, positive diag   coordinates (a, b, c, d, e, f)
///             for the matrix [[a, b, c], [0, d, e], [0, 0, f]]
ChartPtr find_group(const std::string& name);

std::vector<std::string> catalog_group_names();

ChartPtr make_rn(int n);
ChartPtr make_aff1();
ChartPtr make_heis3();
ChartPtr make_borel3();

/// Direct product on concatenated coordinates; the matrix model is the block
/// diagonal of the factors' models when both exist.
ChartPtr make_product(ChartPtr A, ChartPtr B);

}  // namespace haarpush
