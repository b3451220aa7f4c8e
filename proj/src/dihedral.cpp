#include "kcq/dihedral.hpp"

#include <numbers>

#include "kcq/errors.hpp"

namespace kcq {

namespace {

void check(const DihedralElement& g) {
  if (g.k < 0 || g.k > 7 || (g.b != 0 && g.b != 1)) throw InvalidArgument("dihedral element out of range");
}

int mod8(int k) { return ((k % 8) + 8) % 8; }

}  // namespace

DihedralElement dihedral_compose(const DihedralElement& g1, const DihedralElement& g2) {
  check(g1);
  check(g2);
  return {mod8(g1.k + (g1.b ? -g2.k : g2.k)), g1.b ^ g2.b};
}

DihedralElement dihedral_inverse(const DihedralElement& g) {
  check(g);
  // (Z(k) X)^-1 = X Z(-k) = Z(k) X, so reflections are involutions.
  return g.b ? g : DihedralElement{mod8(-g.k), 0};
}

Ptm element_ptm(const DihedralElement& g) {
  check(g);
  Ptm r = rotation_ptm('z', g.k * std::numbers::pi / 4.0);
  if (g.b) r = r * pauli_ptms()[1];
  return r;
}

std::array<DihedralElement, 16> dihedral_elements() {
  std::array<DihedralElement, 16> out;
  for (int b = 0; b < 2; ++b)
    for (int k = 0; k < 8; ++k) out[8 * b + k] = {k, b};
  return out;
}

std::string to_string(const DihedralElement& g) { return std::to_string(g.k) + "," + std::to_string(g.b); }

}  // namespace kcq
