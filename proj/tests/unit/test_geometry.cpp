#include <doctest.h>

#include <jcoup/geometry.hpp>

#include "../support/oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace jcoup;

namespace {

Cluster two_carbons(double d) {
  return Cluster({{1, "C", Vec3::Zero()}, {2, "C", Vec3(0, 0, d)}});
}

Cluster carbon_line(int count) {
  std::vector<Atom> atoms;
  for (int i = 0; i < count; ++i) {
    atoms.push_back({i + 1, "C", Vec3(2.0 * i, 0, 0)});
  }
  return Cluster(atoms);
}

std::vector<Vec3> positions(const Cluster &c) {
  std::vector<Vec3> p;
  for (const auto &a : c.atoms()) {
    p.push_back(a.position);
  }
  return p;
}

} // namespace

TEST_CASE("parse_xyz accepts the plain format") {
  const auto c = parse_xyz("3\ntwo carbons and a nitrogen\nC 0 0 0\nC 0.0 0.0 1.545\nN +1 -2 3e-1\n");
  REQUIRE(c.size() == 3);
  CHECK(c.atom(2).position.z() == 1.545);
  CHECK(c.atom(3).element == "N");
  CHECK(c.atom(3).position.z() == doctest::Approx(0.3));
  CHECK_FALSE(c.bonds_built());
}

TEST_CASE("parse_xyz errors carry line numbers") {
  auto line_of = [](const char *text) {
    try {
      parse_xyz(text);
    } catch (const ParseError &e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("") >= 0);
  CHECK(line_of("two\n\nC 0 0 0\n") == 1);
  CHECK(line_of("2\n\nC 0 0 0\n") >= 0);
  CHECK(line_of("2\n\nC 0 0 0\nC 0 x 0\n") == 4);
  CHECK(line_of("1\n\nC 0 0 0\nC 1 1 1\n") >= 0);
  CHECK_THROWS_WITH_AS(parse_xyz("2\n\nC 0 0 0\nC 0 x 0\n"),
                       doctest::Contains("line 4"), ParseError);
}

TEST_CASE("write_xyz and parse_xyz round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  std::vector<Atom> atoms;
  for (int i = 1; i <= 20; ++i) {
    atoms.push_back({i, i % 3 ? "C" : "N", Vec3(u(rng), u(rng), u(rng))});
  }
  const Cluster c(atoms);
  const auto text = write_xyz(c, "round trip");
  const auto back = parse_xyz(text);
  REQUIRE(back.size() == c.size());
  for (int i = 1; i <= 20; ++i) {
    CHECK(back.atom(i).element == c.atom(i).element);
    CHECK((back.atom(i).position - c.atom(i).position).cwiseAbs().maxCoeff() <= 5e-7);
  }
  CHECK(write_xyz(back, "round trip") == text);
}

TEST_CASE("bond graph uses the distance cutoff") {
  CHECK(build_bond_graph(two_carbons(1.54)).bonded(1, 2));
  CHECK_FALSE(build_bond_graph(two_carbons(2.52)).bonded(1, 2));
  CHECK(build_bond_graph(two_carbons(1.70)).bonded(1, 2));
  CHECK_THROWS(build_bond_graph(two_carbons(0.0)));
}

TEST_CASE("describe_pair bond orders") {
  const auto g = build_bond_graph(make_adamantane());
  // bridgehead 1 and methylene 5 share a bond; two bridgeheads are two apart
  CHECK(describe_pair(g, 1, 2).n == 2);
  const auto line = build_bond_graph(carbon_line(3), 2.1);
  CHECK(describe_pair(line, 1, 3).n == 2);
  const auto apart = build_bond_graph(carbon_line(3), 1.0);
  CHECK_FALSE(describe_pair(apart, 1, 3).n);
}

TEST_CASE("enumerate_pairs counts") {
  SUBCASE("35 carbons give 595 pairs") {
    const auto c = build_bond_graph(generate_diamond_cluster({.radius = 3.6}));
    REQUIRE(c.size() == 35);
    CHECK(enumerate_pairs(c).size() == 595);
  }
  SUBCASE("33 carbons give 528 pairs") {
    auto atoms = generate_diamond_cluster({.radius = 3.6}).atoms();
    atoms.erase(atoms.begin() + 3, atoms.begin() + 5);
    const auto c = build_bond_graph(Cluster(atoms));
    CHECK(enumerate_pairs(c).size() == 528);
  }
  SUBCASE("adamantane has twelve one-bond pairs") {
    const auto c = build_bond_graph(make_adamantane());
    int n1 = 0;
    for (const auto &p : enumerate_pairs(c)) {
      n1 += p.n == 1;
    }
    CHECK(c.size() == 10);
    CHECK(n1 == 12);
    CHECK(c.bond_count() == 12);
  }
  SUBCASE("element filter") {
    std::vector<Atom> atoms = make_adamantane().atoms();
    atoms.push_back({11, "N", Vec3(10, 10, 10)});
    const auto c = build_bond_graph(Cluster(atoms));
    CHECK(enumerate_pairs(c, "C").size() == 45);
    CHECK(enumerate_pairs(c, "N").empty());
  }
}

TEST_CASE("bond orders agree with an all-pairs oracle") {
  const auto c = build_bond_graph(generate_diamond_cluster({.radius = 4.5}));
  const auto oracle_n = oracle::all_pairs_bond_counts(positions(c), kDefaultMaxBond);
  for (const auto &p : enumerate_pairs(c)) {
    const int want = oracle_n[p.a - 1][p.b - 1];
    if (want < 0) {
      CHECK_FALSE(p.n);
    } else {
      CHECK(p.n == want);
    }
  }
}

TEST_CASE("bond_orders_from on the 35-atom stand-in") {
  const auto c = build_bond_graph(generate_diamond_cluster({.radius = 3.6}));
  // the ideal 35-site cut (shells 1+4+12+12+6) closes 52 C-C bonds
  CHECK(c.bond_count() == 52);
  std::size_t reached = 0;
  for (const auto &n : c.bond_orders_from(1)) {
    reached += n.has_value();
  }
  CHECK(reached == c.size());
}

TEST_CASE("generated diamond geometry") {
  const auto c = build_bond_graph(generate_diamond_cluster({.radius = 5.0}));
  const double tet = tetrahedral_angle_deg();
  CHECK(tet == doctest::Approx(109.4712206));
  for (const auto &atom : c.atoms()) {
    const auto &nb = c.neighbours(atom.index);
    for (int j : nb) {
      CHECK(std::abs((c.atom(j).position - atom.position).norm() - kDiamondBondLength) < 1e-9);
    }
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t k = i + 1; k < nb.size(); ++k) {
        const Vec3 u = (c.atom(nb[i]).position - atom.position).normalized();
        const Vec3 v = (c.atom(nb[k]).position - atom.position).normalized();
        CHECK(std::abs(std::acos(u.dot(v)) * 180 / std::numbers::pi - tet) < 1e-6);
      }
    }
  }
}

TEST_CASE("generate_diamond_cluster radius handling") {
  CHECK(generate_diamond_cluster({.radius = 1.6}).size() == 5);
  CHECK(generate_diamond_cluster({.radius = 1.6, .orientation = LatticeOrientation::Dir001})
            .size() == 5);
  CHECK_THROWS_AS(generate_diamond_cluster({.radius = 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(generate_diamond_cluster({.radius = -1.0}), std::invalid_argument);
  CHECK(write_xyz(generate_diamond_cluster({.radius = 4.0})) ==
        write_xyz(generate_diamond_cluster({.radius = 4.0})));
}

TEST_CASE("classification of <111> cluster bonds") {
  const auto c = build_bond_graph(generate_diamond_cluster({.radius = 6.0}));
  int parallel = 0, tetra = 0;
  for (const auto &p : enumerate_pairs(c)) {
    if (p.n != 1) {
      continue;
    }
    const Vec3 u = (c.atom(p.b).position - c.atom(p.a).position).normalized();
    CHECK((bond_frame_for_pair(c, p.a, p.b).apply(u) - Vec3::UnitZ()).norm() < 1e-10);
    CHECK(p.bond_class != BondClass::Other);
    parallel += p.bond_class == BondClass::NearParallel;
    tetra += p.bond_class == BondClass::Tetrahedral;
  }
  CHECK(parallel > 0);
  CHECK(tetra == 3 * parallel);
}

TEST_CASE("<001> bonds are all Other at the default tolerances") {
  const auto c = build_bond_graph(
      generate_diamond_cluster({.radius = 4.0, .orientation = LatticeOrientation::Dir001}));
  for (const auto &p : enumerate_pairs(c)) {
    if (p.n == 1) {
      CHECK(p.angle_to_axis == doctest::Approx(54.7356103));
      CHECK(p.bond_class == BondClass::Other);
    }
  }
}

TEST_CASE("folded angle and classify_bond") {
  const Vec3 z = Vec3::UnitZ();
  CHECK(folded_angle_deg(z, z) == 0.0);
  CHECK(folded_angle_deg(-z, z) == doctest::Approx(0.0));
  CHECK(folded_angle_deg(Vec3::UnitX(), z) == doctest::Approx(90.0));
  CHECK_THROWS_AS(folded_angle_deg(Vec3(2, 0, 0), z), std::invalid_argument);

  auto tilted = [](double deg) {
    const double t = deg * std::numbers::pi / 180;
    return Vec3(std::sin(t), 0, std::cos(t));
  };
  CHECK(classify_bond(tilted(14.9), z) == BondClass::NearParallel);
  CHECK(classify_bond(tilted(15.1), z) == BondClass::Other);
  CHECK(classify_bond(tilted(180 - 109.47), z) == BondClass::Tetrahedral);
  CHECK(classify_bond(tilted(109.47), z) == BondClass::Tetrahedral);
  CHECK(classify_bond(tilted(40.0), z, {.tetra_tol_deg = 5.0}) == BondClass::Other);

  for (auto c : {BondClass::NearParallel, BondClass::Tetrahedral, BondClass::Other}) {
    CHECK(bond_class_from_string(to_string(c)) == c);
  }
}

TEST_CASE("Cluster invariants") {
  CHECK_THROWS(Cluster({{1, "C", Vec3::Zero()}, {1, "C", Vec3::UnitX()}}));
  CHECK_THROWS(Cluster({{0, "C", Vec3::Zero()}}));
  const auto c = make_adamantane();
  CHECK_THROWS_AS(c.atom(42), std::out_of_range);
  CHECK_FALSE(c.has_atom(11));
  std::set<int> idx;
  for (const auto &a : c.atoms()) {
    idx.insert(a.index);
  }
  CHECK(idx.size() == 10);
}
