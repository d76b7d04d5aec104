#pragma once

#include <array>
#include <cmath>
#include <string>

namespace upblab {

constexpr int kAtomCount = 19;

// Fixed atom order; the short names are the column labels of the constraint tables.
inline const std::array<std::string, kAtomCount>& atom_names() {
  static const std::array<std::string, kAtomCount> names = {"p",  "q",  "r",  "s",   "pp",  "qq",  "rr",
                                                            "ss", "pq", "rs", "pr",  "ps",  "rq",  "qs",
                                                            "qrp", "qrs", "psq", "rps", "qrps"};
  return names;
}

inline const std::array<std::string, kAtomCount>& atom_labels() {
  static const std::array<std::string, kAtomCount> labels = {
      "p",   "q",   "r",   "s",   "p-1",  "q-1",  "r-1",  "s-1",  "p-q",  "r-s",
      "p-r", "p-s", "r-q", "q-s", "qr-p", "qr-s", "ps-q", "r-ps", "qr-ps"};
  return labels;
}

using AtomVector = std::array<double, kAtomCount>;

inline AtomVector atoms(double p, double q, double r, double s) {
  return {p,         q,         r,         s,         p - 1,     q - 1,     r - 1,
          s - 1,     p - q,     r - s,     p - r,     p - s,     r - q,     q - s,
          q * r - p, q * r - s, p * s - q, r - p * s, q * r - p * s};
}

inline bool all_atoms_nonzero(double p, double q, double r, double s, double eps = 1e-12) {
  for (double a : atoms(p, q, r, s))
    if (std::abs(a) <= eps) return false;
  return true;
}

}  // namespace upblab
