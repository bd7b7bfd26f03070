#include <doctest.h>

#include <jcoup/report.hpp>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

#include <random>

using namespace jcoup;

namespace {

// Expresses a bond-frame tensor in the lab frame of a bond along `u`.
Mat3 to_lab(const Mat3 &bond, const Vec3 &u) {
  const Mat3 r = bond_frame_rotation(u).matrix();
  return r.transpose() * bond * r;
}

MechanismSet with_total(const Mat3 &total) {
  MechanismSet m;
  m.fc = CouplingTensor(total, "lab");
  m.dso = m.pso = m.sd = m.sdfc = CouplingTensor::zero("lab");
  m.total = m.fc;
  return m;
}

// C1 at the origin and C2 along +X; the tensors are the C1-C2 blocks
// re-expressed in that lab frame.
std::pair<CouplingDocument, Cluster> c1c2_along_x() {
  const Vec3 u = Vec3::UnitX();
  auto m = fixtures::c1c2_mechanisms("lab");
  for (CouplingTensor *t : {&m.dso, &m.pso, &m.fc, &m.sd, &m.sdfc}) {
    *t = CouplingTensor(to_lab(t->values(), u), "lab");
  }
  m.total = CouplingTensor(to_lab(fixtures::kC1C2Total, u), "lab");
  CouplingDocument doc;
  doc.couplings.push_back({1, 2, m, ""});
  Cluster c({{1, "C", Vec3::Zero()}, {2, "C", kDiamondBondLength * u}});
  return {doc, build_bond_graph(c)};
}

// Every one-bond pair of a generated <111> cluster with a vacancy at the
// origin site. Pairs touching the vacancy's neighbours get `near`, the rest
// `far`, both isotropic with a fixed axial part.
struct NvFixture {
  CouplingDocument doc;
  Cluster cluster;
  Vec3 vacancy{Vec3::Zero()};
};

NvFixture nv_like(double near, double far) {
  const auto full = generate_diamond_cluster({.radius = 4.6});
  std::vector<Atom> kept;
  for (const auto &a : full.atoms()) {
    if (a.position.norm() > 1e-9) {
      kept.push_back(a);
    }
  }
  NvFixture f;
  f.cluster = build_bond_graph(Cluster(kept));
  for (const auto &p : enumerate_pairs(f.cluster)) {
    if (p.n != 1) {
      continue;
    }
    const Vec3 pa = f.cluster.atom(p.a).position, pb = f.cluster.atom(p.b).position;
    const bool close = std::min(pa.norm(), pb.norm()) <= kNearVacancyDistance;
    const double j = close ? near : far;
    const Mat3 bond = Vec3(j + 4, j + 4, j - 8).asDiagonal();
    f.doc.couplings.push_back({p.a, p.b, with_total(to_lab(bond, (pb - pa).normalized())), ""});
  }
  return f;
}

} // namespace

TEST_CASE("table1_report on the C1-C2 pair") {
  const auto [doc, cluster] = c1c2_along_x();
  const auto rows = table1_report(doc, cluster);
  REQUIRE(rows.size() == 1);
  const auto &r = rows[0];
  CHECK(std::abs(r.j_xx - 33.8736) <= 5e-4);
  CHECK(std::abs(r.j_yy - 33.5480) <= 5e-4);
  CHECK(std::abs(r.j_zz - 21.9747) <= 5e-4);
  CHECK(std::abs(r.j_iso - 29.80) <= 0.005);
  CHECK(std::abs(r.delta_j - (-11.74)) <= 0.01);
  CHECK(r.n == 1);
  CHECK(r.distance == doctest::Approx(kDiamondBondLength));
  CHECK(r.bond_class == BondClass::Other); // along X, axis Z

  const auto csv = report_csv(rows, false);
  CHECK(csv == "a,b,n,class,j_xx_hz,j_yy_hz,j_zz_hz,j_iso_hz,delta_j_hz,distance_angstrom\n"
               "1,2,1,Other,33.87,33.55,21.97,29.80,-11.74,1.5450\n");
}

TEST_CASE("tabulated one-bond rows survive the bond-frame round trip") {
  const auto rows = fixtures::table1_rows();
  REQUIRE(rows.size() == 25);
  std::mt19937_64 rng(25);
  for (const auto &t : rows) {
    CAPTURE(t.pair);
    const Vec3 u = oracle::random_unit(rng);
    CouplingDocument doc;
    doc.couplings.push_back(
        {1, 2, with_total(to_lab(Vec3(t.j_xx, t.j_yy, t.j_zz).asDiagonal(), u)), ""});
    const auto cluster = build_bond_graph(
        Cluster({{1, "C", Vec3::Zero()}, {2, "C", kDiamondBondLength * u}}));
    const auto r = table1_report(doc, cluster).at(0);
    CHECK(std::abs(r.j_xx - t.j_xx) <= 1e-9);
    CHECK(std::abs(r.j_yy - t.j_yy) <= 1e-9);
    CHECK(std::abs(r.j_zz - t.j_zz) <= 1e-9);
    CHECK(std::abs(r.j_iso - t.j_iso) <= 0.02);
  }
}

TEST_CASE("table1_report filters and index mismatches") {
  auto [doc, cluster] = c1c2_along_x();
  CHECK(table1_report(doc, cluster, {.filter = select_pairs(2)}).empty());
  CHECK(table1_report(doc, cluster, {.filter = select_pairs(1, BondClass::Other)}).size() == 1);
  CHECK(table1_report(doc, cluster, {.filter = select_pairs(1, BondClass::NearParallel)})
            .empty());
  doc.couplings.push_back({1, 9, doc.couplings[0].mechanisms, ""});
  CHECK_THROWS_WITH_AS(table1_report(doc, cluster), doctest::Contains("C1-C9"), IndexMismatch);
}

TEST_CASE("vacancy proximity") {
  const auto f = nv_like(37.1, 31.8);
  const auto rows = vacancy_proximity_report(f.doc, f.cluster, f.vacancy);
  REQUIRE_FALSE(rows.empty());
  double min_flagged = 1e9, max_other = -1e9;
  int flagged = 0;
  for (const auto &r : rows) {
    REQUIRE(r.vacancy_distance);
    CHECK(r.near_vacancy == (*r.vacancy_distance <= kNearVacancyDistance));
    if (r.near_vacancy) {
      ++flagged;
      min_flagged = std::min(min_flagged, r.j_iso);
    } else {
      max_other = std::max(max_other, r.j_iso);
    }
  }
  // each of the four vacancy neighbours keeps three bonds
  CHECK(flagged == 12);
  CHECK(min_flagged > max_other);

  const auto csv = report_csv(rows, true);
  CHECK(csv.rfind("a,b,n,class,j_xx_hz,j_yy_hz,j_zz_hz,j_iso_hz,delta_j_hz,distance_angstrom,"
                  "vacancy_distance_angstrom,near_vacancy\n",
                  0) == 0);

  SUBCASE("distance threshold is inclusive") {
    CouplingDocument doc;
    doc.couplings.push_back({1, 2, with_total(Mat3::Identity()), ""});
    const auto c = build_bond_graph(
        Cluster({{1, "C", Vec3(0, 0, 1.7)}, {2, "C", Vec3(0, 0, 1.7 + 1.545)}}));
    CHECK(vacancy_proximity_report(doc, c, Vec3::Zero()).at(0).near_vacancy);
    CHECK_FALSE(vacancy_proximity_report(doc, c, Vec3(0, 0, -1e-6)).at(0).near_vacancy);
  }
}

TEST_CASE("report is unchanged by a common rotation of geometry and tensors") {
  const auto f = nv_like(37.1, 31.8);
  std::mt19937_64 rng(31);
  const Mat3 q = oracle::random_rotation(rng);

  std::vector<Atom> moved = f.cluster.atoms();
  for (auto &a : moved) {
    a.position = q * a.position;
  }
  Cluster rotated(moved, q * f.cluster.axis());
  rotated = build_bond_graph(rotated);
  CouplingDocument doc = f.doc;
  for (auto &e : doc.couplings) {
    e.mechanisms.total = CouplingTensor(q * e.mechanisms.total->values() * q.transpose(), "lab");
    e.mechanisms.fc = *e.mechanisms.total;
  }

  const auto before = vacancy_proximity_report(f.doc, f.cluster, f.vacancy);
  const auto after = vacancy_proximity_report(doc, rotated, q * f.vacancy);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(std::abs(before[i].j_zz - after[i].j_zz) < 1e-9);
    CHECK(std::abs((before[i].j_xx + before[i].j_yy) - (after[i].j_xx + after[i].j_yy)) < 1e-9);
    CHECK(std::abs(before[i].j_iso - after[i].j_iso) < 1e-9);
    CHECK(std::abs(before[i].delta_j - after[i].delta_j) < 1e-9);
    CHECK(std::abs(before[i].distance - after[i].distance) < 1e-9);
    CHECK(before[i].n == after[i].n);
    CHECK(before[i].bond_class == after[i].bond_class);
    CHECK(before[i].near_vacancy == after[i].near_vacancy);
  }
}

TEST_CASE("bar_data") {
  const auto f = nv_like(37.1, 31.8);
  const auto bars = bar_data(f.doc, f.cluster, BarQuantity::JIso);
  CHECK(bars.size() == f.doc.couplings.size());
  for (const auto &b : bars) {
    CHECK(b.label.rfind("C", 0) == 0);
    CHECK(b.group == 1);
    const bool known = std::abs(b.value - 37.1) < 1e-9 || std::abs(b.value - 31.8) < 1e-9;
    CHECK(known);
  }
  const auto csv = bars_csv(bars);
  CHECK(csv.rfind("label,group_n,value_hz\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(bars.size() + 1));

  SUBCASE("near-parallel bonds along the cluster axis report their bond-frame diagonal") {
    const auto par = bar_data(f.doc, f.cluster, BarQuantity::JZZ,
                              {.filter = select_pairs(1, BondClass::NearParallel)});
    REQUIRE_FALSE(par.empty());
    for (const auto &b : par) {
      const bool known = std::abs(b.value - 29.1) < 1e-9 || std::abs(b.value - 23.8) < 1e-9;
      CHECK(known);
    }
  }
  SUBCASE("disconnected pairs sort last") {
    CouplingDocument doc;
    doc.couplings.push_back({1, 3, with_total(Mat3::Identity()), ""});
    doc.couplings.push_back({1, 2, with_total(2 * Mat3::Identity()), ""});
    const auto c = build_bond_graph(Cluster(
        {{1, "C", Vec3::Zero()}, {2, "C", Vec3(0, 0, 1.5)}, {3, "C", Vec3(9, 9, 9)}}));
    const auto b = bar_data(doc, c, BarQuantity::JIso);
    REQUIRE(b.size() == 2);
    CHECK(b[0].label == "C1-C2");
    CHECK_FALSE(b[1].group);
    CHECK(bars_csv(b) == "label,group_n,value_hz\nC1-C2,1,2.00\nC1-C3,inf,1.00\n");
  }
  CHECK_THROWS(bar_quantity_from_string("j_q"));
}

TEST_CASE("baseline_ratios") {
  std::vector<PairReportRow> rows(3);
  rows[0].j_iso = 37.14;
  rows[0].near_vacancy = true;
  rows[1].j_iso = 31.80;
  rows[2].j_iso = 31.80;
  const auto ratios =
      baseline_ratios(rows, [](const PairReportRow &r) { return !r.near_vacancy; });
  CHECK(ratios[0] == doctest::Approx(37.14 / 31.80));
  CHECK(ratios[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(baseline_ratios(rows, [](const PairReportRow &) { return false; }),
                  std::invalid_argument);
}

TEST_CASE("CSV suppresses negative zero and JSON keeps full precision") {
  PairReportRow r;
  r.a = 3;
  r.b = 4;
  r.n = std::nullopt;
  r.j_xx = -0.001;
  r.j_iso = 29.798766666;
  const auto csv = report_csv({r}, false);
  CHECK(csv.find("-0.00") == std::string::npos);
  CHECK(csv.find("3,4,inf,Other,0.00") != std::string::npos);
  CHECK(report_json({r}).find("29.798766666") != std::string::npos);
}
