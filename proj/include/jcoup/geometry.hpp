#pragma once

#include <jcoup/tensor.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jcoup {

/// Nearest-neighbour C-C distance in diamond, Angstrom.
inline constexpr double kDiamondBondLength = 1.545;
inline constexpr double kDefaultMaxBond = 1.70;
inline constexpr double kDefaultParallelTolDeg = 15.0;
inline constexpr double kDefaultTetraTolDeg = 15.0;

/// Error raised while reading a text format; carries the 1-based line number
/// (0 when the problem is not tied to a single line).
class ParseError : public std::runtime_error {
public:
  ParseError(int line, const std::string &message);
  int line() const { return m_line; }

private:
  int m_line;
};

struct Atom {
  int index{0}; // 1-based
  std::string element;
  Vec3 position{Vec3::Zero()}; // Angstrom
};

/// Atoms plus an (optional) bond graph and the reference axis that bond
/// directions are classified against.
class Cluster {
public:
  Cluster() = default;
  explicit Cluster(std::vector<Atom> atoms, Vec3 axis = Vec3::UnitZ());

  const std::vector<Atom> &atoms() const { return m_atoms; }
  std::size_t size() const { return m_atoms.size(); }
  const Vec3 &axis() const { return m_axis; }
  void set_axis(const Vec3 &axis);

  bool has_atom(int index) const;
  /// Throws std::out_of_range for an unknown 1-based index.
  const Atom &atom(int index) const;

  bool bonds_built() const { return m_bonds_built; }
  /// Neighbour list of a 1-based atom index, as 1-based indices.
  const std::vector<int> &neighbours(int index) const;
  bool bonded(int a, int b) const;
  std::size_t bond_count() const;

  /// Breadth-first bond counts from `source` to every atom (0-based
  /// position in atoms()); nullopt where unreachable.
  std::vector<std::optional<int>> bond_orders_from(int source) const;

private:
  friend Cluster build_bond_graph(const Cluster &, double);
  std::vector<Atom> m_atoms;
  std::vector<std::vector<int>> m_adjacency;
  Vec3 m_axis{Vec3::UnitZ()};
  bool m_bonds_built{false};
};

enum class BondClass { NearParallel, Tetrahedral, Other };

std::string to_string(BondClass c);
BondClass bond_class_from_string(std::string_view s);

struct ClassifyOptions {
  double parallel_tol_deg{kDefaultParallelTolDeg};
  double tetra_tol_deg{kDefaultTetraTolDeg};
};

struct Pair {
  int a{0};
  int b{0};
  double distance{0.0};    // Angstrom
  std::optional<int> n;    // bond-path order; nullopt when disconnected
  double angle_to_axis{0}; // degrees, folded into [0, 90]
  BondClass bond_class{BondClass::Other};
};

/// Angle between two diamond bonds, degrees (arccos(-1/3)).
double tetrahedral_angle_deg();

/// Acute angle in degrees between direction u and axis z. Both must be unit
/// vectors within 1e-9; throws std::invalid_argument otherwise.
double folded_angle_deg(const Vec3 &u, const Vec3 &z);

BondClass classify_bond(const Vec3 &u, const Vec3 &z,
                        const ClassifyOptions &opts = {});

Cluster parse_xyz(std::string_view text);
std::string write_xyz(const Cluster &c, std::string_view comment = "");

/// Bonds every pair with distance <= max_bond. Coincident atoms throw.
Cluster build_bond_graph(const Cluster &c, double max_bond = kDefaultMaxBond);

/// Geometry record for one pair of atoms. Bond order comes from the bond
/// graph, so the cluster must have bonds built.
Pair describe_pair(const Cluster &c, int a, int b,
                   const ClassifyOptions &opts = {});

std::vector<Pair> enumerate_pairs(const Cluster &c,
                                  std::string_view element = "C",
                                  const ClassifyOptions &opts = {});

enum class LatticeOrientation { Dir001, Dir111 };

struct LatticeSpec {
  double lattice_constant{4.0 * kDiamondBondLength / 1.7320508075688772};
  double radius{0.0};
  LatticeOrientation orientation{LatticeOrientation::Dir111};
};

/// Every diamond site within `radius` of a lattice site placed at the origin,
/// rotated so the requested crystal direction lies along +Z. Atoms are
/// ordered lexicographically by rotated coordinates.
Cluster generate_diamond_cluster(const LatticeSpec &spec);

/// Ideal adamantane carbon cage (10 atoms) for the given C-C bond length,
/// centred on the cage centre: four CH bridgeheads first, then six CH2.
Cluster make_adamantane(double bond_length = kDiamondBondLength);

/// Rotation taking the a->b direction onto +Z (see bond_frame_rotation).
Rotation bond_frame_for_pair(const Cluster &c, int a, int b);

} // namespace jcoup
