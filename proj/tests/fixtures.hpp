#pragma once

#include <string>

#include "floquet/floquet.hpp"
#include "floquet/io.hpp"

#ifndef FLOQUET_DATA_DIR
#define FLOQUET_DATA_DIR "data"
#endif

namespace fx {

using namespace floquet;

inline std::string data_path(const std::string& name) { return std::string(FLOQUET_DATA_DIR) + "/operators/" + name + ".json"; }

inline PeriodicGraphOperator bundled(const std::string& name) { return io::load_operator(data_path(name)); }

inline RVector k1(double a) { return RVector::Constant(1, a); }
inline RVector k2(double a, double b) {
  RVector k(2);
  k << a, b;
  return k;
}

inline PeriodicGraphOperator z1_laplacian(double shift = 0.0) {
  return PeriodicGraphOperator(1, {"a"}, {{0, 0, DeckIndex{0}, 2.0}, {0, 0, DeckIndex{1}, -1.0}, {0, 0, DeckIndex{-1}, -1.0}}, shift);
}

inline PeriodicGraphOperator z2_laplacian(double shift = 0.0) {
  return PeriodicGraphOperator(2, {"a"},
                               {{0, 0, DeckIndex{0, 0}, 4.0},
                                {0, 0, DeckIndex{1, 0}, -1.0},
                                {0, 0, DeckIndex{-1, 0}, -1.0},
                                {0, 0, DeckIndex{0, 1}, -1.0},
                                {0, 0, DeckIndex{0, -1}, -1.0}},
                               shift);
}

inline PeriodicGraphOperator cos_band() {
  return PeriodicGraphOperator(1, {"a"}, {{0, 0, DeckIndex{1}, 0.5}, {0, 0, DeckIndex{-1}, 0.5}});
}

inline PeriodicGraphOperator biharmonic() {
  return PeriodicGraphOperator(1, {"a"},
                               {{0, 0, DeckIndex{0}, 6.0},
                                {0, 0, DeckIndex{1}, -4.0},
                                {0, 0, DeckIndex{-1}, -4.0},
                                {0, 0, DeckIndex{2}, 1.0},
                                {0, 0, DeckIndex{-2}, 1.0}});
}

/// Hoppings t1 inside the cell, t2 across cells.
inline PeriodicGraphOperator ssh(double t1 = 1.0, double t2 = 1.0, double shift = 0.0) {
  return PeriodicGraphOperator(1, {"a", "b"},
                               {{0, 1, DeckIndex{0}, t1}, {1, 0, DeckIndex{0}, t1}, {0, 1, DeckIndex{-1}, t2}, {1, 0, DeckIndex{1}, t2}},
                               shift);
}

inline PeriodicGraphOperator drifted_walk(double p = 0.25, double q = 0.75) {
  return PeriodicGraphOperator(1, {"a"}, {{0, 0, DeckIndex{1}, -p}, {0, 0, DeckIndex{-1}, -q}, {0, 0, DeckIndex{0}, 1.0}});
}

/// P(k) = [[a, 1], [0, a]] with a = 2 - 2cos k: at k = 0 the kernel is one
/// dimensional while 0 is a double eigenvalue.
inline PeriodicGraphOperator jordan() {
  return PeriodicGraphOperator(1, {"a", "b"},
                               {{0, 0, DeckIndex{0}, 2.0},
                                {0, 0, DeckIndex{1}, -1.0},
                                {0, 0, DeckIndex{-1}, -1.0},
                                {1, 1, DeckIndex{0}, 2.0},
                                {1, 1, DeckIndex{1}, -1.0},
                                {1, 1, DeckIndex{-1}, -1.0},
                                {0, 1, DeckIndex{0}, 1.0}});
}

/// P(k) = e^{i(k - 0.7)} - 1: single, non-symmetric Fermi point k = 0.7.
inline PeriodicGraphOperator chiral_phase() {
  return PeriodicGraphOperator(1, {"a"}, {{0, 0, DeckIndex{1}, std::exp(cplx(0.0, -0.7))}, {0, 0, DeckIndex{0}, -1.0}});
}

/// Rank-2 cell with a staggered complex hopping; Fermi set away from the symmetric points.
inline PeriodicGraphOperator twisted_pair() {
  const cplx w = std::exp(cplx(0.0, 0.4));
  return PeriodicGraphOperator(1, {"a", "b"},
                               {{0, 1, DeckIndex{0}, 1.0}, {0, 1, DeckIndex{1}, w}, {1, 0, DeckIndex{0}, 1.0}});
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace fx
