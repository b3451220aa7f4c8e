#pragma once

// The dihedral group D8 generated by X(pi) and Z(pi/4). An element (k, b)
// is the operator Z(k pi/4) X^b: X(pi) first when b = 1, then the Z
// rotation.

#include <array>
#include <string>

#include "kcq/channel.hpp"

namespace kcq {

struct DihedralElement {
  int k = 0;  // 0..7
  int b = 0;  // 0 or 1
  friend bool operator==(const DihedralElement&, const DihedralElement&) = default;
};

/// Operator product g1 g2 (g2 acts first), using X Z(theta) = Z(-theta) X.
DihedralElement dihedral_compose(const DihedralElement& g1, const DihedralElement& g2);
DihedralElement dihedral_inverse(const DihedralElement& g);
Ptm element_ptm(const DihedralElement& g);

/// All 16 elements, index = 8 b + k.
std::array<DihedralElement, 16> dihedral_elements();
inline int dihedral_index(const DihedralElement& g) { return 8 * g.b + g.k; }

/// "k,b".
std::string to_string(const DihedralElement& g);

}  // namespace kcq
