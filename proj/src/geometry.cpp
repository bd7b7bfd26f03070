#include <jcoup/geometry.hpp>

#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace jcoup {

using detail::parse_double;
using detail::split_lines;
using detail::tokens;
using detail::trim;

namespace {

constexpr double kUnitTolerance = 1e-9;

double to_degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

// 0-based slot of a 1-based index within atoms(); atoms are kept sorted by
// index so lookups are a binary search.
std::ptrdiff_t slot_of(const std::vector<Atom> &atoms, int index) {
  const auto it = std::lower_bound(
      atoms.begin(), atoms.end(), index,
      [](const Atom &a, int i) { return a.index < i; });
  if (it == atoms.end() || it->index != index) {
    return -1;
  }
  return it - atoms.begin();
}

double clean_zero(double x) {
  // keeps "-0.000000" out of written files
  return std::abs(x) < 5e-7 ? 0.0 : x;
}

} // namespace

ParseError::ParseError(int line, const std::string &message)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, message)
                                  : message),
      m_line(line) {}

Cluster::Cluster(std::vector<Atom> atoms, Vec3 axis) : m_atoms(std::move(atoms)) {
  std::sort(m_atoms.begin(), m_atoms.end(),
            [](const Atom &x, const Atom &y) { return x.index < y.index; });
  for (std::size_t i = 0; i < m_atoms.size(); ++i) {
    if (m_atoms[i].index < 1) {
      throw std::invalid_argument(
          fmt::format("atom index {} is not positive", m_atoms[i].index));
    }
    if (i > 0 && m_atoms[i].index == m_atoms[i - 1].index) {
      throw std::invalid_argument(
          fmt::format("duplicate atom index {}", m_atoms[i].index));
    }
    if (!m_atoms[i].position.allFinite()) {
      throw std::invalid_argument(
          fmt::format("atom {} has non-finite coordinates", m_atoms[i].index));
    }
  }
  set_axis(axis);
}

void Cluster::set_axis(const Vec3 &axis) {
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("cluster axis has zero length");
  }
  m_axis = axis / n;
}

bool Cluster::has_atom(int index) const { return slot_of(m_atoms, index) >= 0; }

const Atom &Cluster::atom(int index) const {
  const auto s = slot_of(m_atoms, index);
  if (s < 0) {
    throw std::out_of_range(fmt::format("no atom with index {}", index));
  }
  return m_atoms[static_cast<std::size_t>(s)];
}

const std::vector<int> &Cluster::neighbours(int index) const {
  if (!m_bonds_built) {
    throw std::logic_error("bond graph has not been built");
  }
  const auto s = slot_of(m_atoms, index);
  if (s < 0) {
    throw std::out_of_range(fmt::format("no atom with index {}", index));
  }
  return m_adjacency[static_cast<std::size_t>(s)];
}

bool Cluster::bonded(int a, int b) const {
  const auto &nb = neighbours(a);
  return std::find(nb.begin(), nb.end(), b) != nb.end();
}

std::size_t Cluster::bond_count() const {
  std::size_t n = 0;
  for (const auto &nb : m_adjacency) {
    n += nb.size();
  }
  return n / 2;
}

std::vector<std::optional<int>> Cluster::bond_orders_from(int source) const {
  if (!m_bonds_built) {
    throw std::logic_error("bond graph has not been built");
  }
  const auto s = slot_of(m_atoms, source);
  if (s < 0) {
    throw std::out_of_range(fmt::format("no atom with index {}", source));
  }
  std::vector<std::optional<int>> dist(m_atoms.size());
  std::deque<std::size_t> queue{static_cast<std::size_t>(s)};
  dist[static_cast<std::size_t>(s)] = 0;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    for (int nb : m_adjacency[cur]) {
      const auto ns = static_cast<std::size_t>(slot_of(m_atoms, nb));
      if (!dist[ns]) {
        dist[ns] = *dist[cur] + 1;
        queue.push_back(ns);
      }
    }
  }
  return dist;
}

std::string to_string(BondClass c) {
  switch (c) {
  case BondClass::NearParallel:
    return "NearParallel";
  case BondClass::Tetrahedral:
    return "Tetrahedral";
  case BondClass::Other:
    return "Other";
  }
  return "Other";
}

BondClass bond_class_from_string(std::string_view s) {
  if (s == "NearParallel") {
    return BondClass::NearParallel;
  }
  if (s == "Tetrahedral") {
    return BondClass::Tetrahedral;
  }
  if (s == "Other") {
    return BondClass::Other;
  }
  throw std::invalid_argument(fmt::format("unknown bond class '{}'", s));
}

double tetrahedral_angle_deg() { return to_degrees(std::acos(-1.0 / 3.0)); }

double folded_angle_deg(const Vec3 &u, const Vec3 &z) {
  if (std::abs(u.norm() - 1.0) > kUnitTolerance ||
      std::abs(z.norm() - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("bond classification needs unit vectors");
  }
  const double c = std::min(1.0, std::abs(u.dot(z)));
  return to_degrees(std::acos(c));
}

BondClass classify_bond(const Vec3 &u, const Vec3 &z, const ClassifyOptions &opts) {
  const double theta = folded_angle_deg(u, z);
  if (theta <= opts.parallel_tol_deg) {
    return BondClass::NearParallel;
  }
  // folded image of the tetrahedral angle: 180 - 109.47 = 70.53
  if (std::abs(theta - (180.0 - tetrahedral_angle_deg())) <= opts.tetra_tol_deg) {
    return BondClass::Tetrahedral;
  }
  return BondClass::Other;
}

Cluster parse_xyz(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]).empty()) {
    throw ParseError(1, "missing atom count");
  }
  const std::string_view count_text = trim(lines[0]);
  long count = -1;
  const auto [ptr, ec] =
      std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
  if (ec != std::errc() || ptr != count_text.data() + count_text.size() || count < 0) {
    throw ParseError(1, fmt::format("malformed atom count '{}'", count_text));
  }

  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const std::size_t li = static_cast<std::size_t>(i) + 2;
    const int line_no = static_cast<int>(li) + 1;
    if (li >= lines.size()) {
      throw ParseError(line_no, fmt::format("expected {} atom lines, found {}",
                                            count, i));
    }
    const auto tok = tokens(lines[li]);
    if (tok.size() < 4) {
      throw ParseError(line_no, "expected '<element> <x> <y> <z>'");
    }
    Atom atom;
    atom.index = static_cast<int>(i) + 1;
    atom.element = std::string(tok[0]);
    for (int k = 0; k < 3; ++k) {
      const auto v = parse_double(tok[static_cast<std::size_t>(k) + 1]);
      if (!v) {
        throw ParseError(line_no, fmt::format("non-numeric coordinate '{}'",
                                              tok[static_cast<std::size_t>(k) + 1]));
      }
      atom.position[k] = *v;
    }
    atoms.push_back(std::move(atom));
  }
  for (std::size_t li = static_cast<std::size_t>(count) + 2; li < lines.size(); ++li) {
    if (!trim(lines[li]).empty()) {
      throw ParseError(static_cast<int>(li) + 1,
                       fmt::format("atom count {} does not match the number of "
                                   "atom lines",
                                   count));
    }
  }
  return Cluster(std::move(atoms));
}

std::string write_xyz(const Cluster &c, std::string_view comment) {
  std::string out = fmt::format("{}\n{}\n", c.size(), comment);
  for (const Atom &a : c.atoms()) {
    out += fmt::format("{} {:.6f} {:.6f} {:.6f}\n", a.element,
                       clean_zero(a.position.x()), clean_zero(a.position.y()),
                       clean_zero(a.position.z()));
  }
  return out;
}

Cluster build_bond_graph(const Cluster &c, double max_bond) {
  Cluster out = c;
  const auto &atoms = out.m_atoms;
  out.m_adjacency.assign(atoms.size(), {});
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      const double d = (atoms[i].position - atoms[j].position).norm();
      if (d == 0.0) {
        throw std::invalid_argument(
            fmt::format("atoms {} and {} coincide (duplicate atoms)",
                        atoms[i].index, atoms[j].index));
      }
      if (d <= max_bond) {
        out.m_adjacency[i].push_back(atoms[j].index);
        out.m_adjacency[j].push_back(atoms[i].index);
      }
    }
  }
  out.m_bonds_built = true;
  return out;
}

namespace {

Pair make_pair_record(const Cluster &c, const Atom &x, const Atom &y,
                      std::optional<int> n, const ClassifyOptions &opts) {
  const Atom &lo = x.index < y.index ? x : y;
  const Atom &hi = x.index < y.index ? y : x;
  const Vec3 d = hi.position - lo.position;
  const double dist = d.norm();
  if (!(dist > 0.0)) {
    throw std::invalid_argument(
        fmt::format("atoms {} and {} coincide", lo.index, hi.index));
  }
  Pair p;
  p.a = lo.index;
  p.b = hi.index;
  p.distance = dist;
  p.n = n;
  const Vec3 u = d / dist;
  p.angle_to_axis = folded_angle_deg(u, c.axis());
  p.bond_class = classify_bond(u, c.axis(), opts);
  return p;
}

} // namespace

Pair describe_pair(const Cluster &c, int a, int b, const ClassifyOptions &opts) {
  if (a == b) {
    throw std::invalid_argument(fmt::format("pair ({}, {}) repeats an atom", a, b));
  }
  const Atom &x = c.atom(a);
  const Atom &y = c.atom(b);
  const auto orders = c.bond_orders_from(a);
  const auto slot = static_cast<std::size_t>(slot_of(c.atoms(), b));
  return make_pair_record(c, x, y, orders[slot], opts);
}

std::vector<Pair> enumerate_pairs(const Cluster &c, std::string_view element,
                                  const ClassifyOptions &opts) {
  const auto &atoms = c.atoms();
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].element != element) {
      continue;
    }
    const auto orders = c.bond_orders_from(atoms[i].index);
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      if (atoms[j].element != element) {
        continue;
      }
      pairs.push_back(make_pair_record(c, atoms[i], atoms[j], orders[j], opts));
    }
  }
  // atoms() is index-sorted, so pairs already come out ordered by (a, b)
  return pairs;
}

Cluster generate_diamond_cluster(const LatticeSpec &spec) {
  if (!(spec.radius > 0.0) || !std::isfinite(spec.radius)) {
    throw std::invalid_argument("lattice radius must be positive");
  }
  if (!(spec.lattice_constant > 0.0) || !std::isfinite(spec.lattice_constant)) {
    throw std::invalid_argument("lattice constant must be positive");
  }
  const double a = spec.lattice_constant;
  static const Vec3 basis[8] = {
      {0.0, 0.0, 0.0},    {0.0, 0.5, 0.5},    {0.5, 0.0, 0.5},
      {0.5, 0.5, 0.0},    {0.25, 0.25, 0.25}, {0.25, 0.75, 0.75},
      {0.75, 0.25, 0.75}, {0.75, 0.75, 0.25}};
  const Rotation orient = spec.orientation == LatticeOrientation::Dir111
                              ? bond_frame_rotation(Vec3(1.0, 1.0, 1.0))
                              : Rotation::identity();

  const int cells = static_cast<int>(std::ceil(spec.radius / a)) + 1;
  std::vector<Vec3> sites;
  for (int i = -cells; i <= cells; ++i) {
    for (int j = -cells; j <= cells; ++j) {
      for (int k = -cells; k <= cells; ++k) {
        for (const Vec3 &b : basis) {
          const Vec3 r = a * (Vec3(i, j, k) + b);
          if (r.norm() <= spec.radius + 1e-9) {
            sites.push_back(orient.apply(r));
          }
        }
      }
    }
  }
  // Quantized keys so that rounding noise in the rotation cannot reorder
  // symmetry-equivalent sites between platforms.
  const auto key = [](const Vec3 &v) {
    return std::make_tuple(std::llround(v.x() * 1e8), std::llround(v.y() * 1e8),
                           std::llround(v.z() * 1e8));
  };
  std::sort(sites.begin(), sites.end(),
            [&](const Vec3 &p, const Vec3 &q) { return key(p) < key(q); });

  std::vector<Atom> atoms;
  atoms.reserve(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    atoms.push_back(Atom{static_cast<int>(i) + 1, "C", sites[i]});
  }
  return Cluster(std::move(atoms));
}

Cluster make_adamantane(double bond_length) {
  // Cage sites in units of a/4 of the diamond lattice: bridgeheads on a
  // tetrahedron, methylenes on the octahedron around the cage centre.
  const double s = bond_length / std::sqrt(3.0);
  const Vec3 sites[10] = {{1, 1, 1},  {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1},
                          {2, 0, 0},  {-2, 0, 0},  {0, 2, 0},   {0, -2, 0},
                          {0, 0, 2},  {0, 0, -2}};
  std::vector<Atom> atoms;
  for (int i = 0; i < 10; ++i) {
    atoms.push_back(Atom{i + 1, "C", s * sites[i]});
  }
  return Cluster(std::move(atoms));
}

Rotation bond_frame_for_pair(const Cluster &c, int a, int b) {
  const Vec3 d = c.atom(b).position - c.atom(a).position;
  if (!(d.norm() > 0.0)) {
    throw std::invalid_argument(fmt::format("atoms {} and {} coincide", a, b));
  }
  return bond_frame_rotation(d);
}

} // namespace jcoup
