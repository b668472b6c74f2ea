#pragma once
#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace gsep {

using cplx = std::complex<double>;
using CArray = Eigen::Array<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Eigen::Vector2i;

// Toroidal index rectangle in frequency storage coordinates:
// rows r0..r0+nr-1 (mod n) along xi1, cols c0..c0+nc-1 (mod n) along xi2.
struct Box {
    int r0 = 0, nr = 0, c0 = 0, nc = 0;
    bool full(int n) const { return nr == n && nc == n; }
};

}  // namespace gsep
