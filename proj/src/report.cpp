#include <jcoup/report.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace jcoup {

namespace {

Pair geometry_of(const Cluster &cluster, const CouplingEntry &e,
                 const ClassifyOptions &opts) {
  if (!cluster.has_atom(e.a) || !cluster.has_atom(e.b)) {
    throw IndexMismatch(e.a, e.b);
  }
  return describe_pair(cluster, e.a, e.b, opts);
}

std::string order_text(const std::optional<int> &n) {
  return n ? std::to_string(*n) : std::string("inf");
}

} // namespace

IndexMismatch::IndexMismatch(int a, int b)
    : std::runtime_error(
          fmt::format("pair {} has no matching atoms in the geometry", pair_name(a, b))) {}

std::string pair_name(int a, int b) { return fmt::format("C{}-C{}", a, b); }

BarQuantity bar_quantity_from_string(std::string_view s) {
  if (s == "j_iso") {
    return BarQuantity::JIso;
  }
  if (s == "j_xx") {
    return BarQuantity::JXX;
  }
  if (s == "j_yy") {
    return BarQuantity::JYY;
  }
  if (s == "j_zz") {
    return BarQuantity::JZZ;
  }
  throw std::invalid_argument(fmt::format("unknown quantity '{}'", s));
}

PairPredicate select_pairs(std::optional<int> order, std::optional<BondClass> bond_class) {
  return [order, bond_class](const Pair &p) {
    if (order && p.n != order) {
      return false;
    }
    return !bond_class || p.bond_class == *bond_class;
  };
}

std::vector<PairReportRow> table1_report(const CouplingDocument &doc, const Cluster &cluster,
                                         const ReportOptions &opts) {
  std::vector<PairReportRow> rows;
  for (const CouplingEntry &e : doc.couplings) {
    const Pair geo = geometry_of(cluster, e, opts.classify);
    if (opts.filter && !opts.filter(geo)) {
      continue;
    }
    const Rotation r = bond_frame_for_pair(cluster, e.a, e.b);
    const CouplingTensor bond = rotate(total_of(e), r, "bond:" + pair_name(e.a, e.b));
    PairReportRow row;
    row.a = e.a;
    row.b = e.b;
    row.n = geo.n;
    row.bond_class = geo.bond_class;
    row.j_xx = bond(0, 0);
    row.j_yy = bond(1, 1);
    row.j_zz = bond(2, 2);
    row.j_iso = (row.j_xx + row.j_yy + row.j_zz) / 3.0;
    row.delta_j = axial_anisotropy(bond);
    row.distance = geo.distance;
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const PairReportRow &x, const PairReportRow &y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return rows;
}

std::vector<BarSeries> bar_data(const CouplingDocument &doc, const Cluster &cluster,
                                BarQuantity quantity, const ReportOptions &opts) {
  const Rotation to_cluster = bond_frame_rotation(cluster.axis());
  struct Keyed {
    BarSeries bar;
    int a;
    int b;
  };
  std::vector<Keyed> keyed;
  for (const CouplingEntry &e : doc.couplings) {
    const Pair geo = geometry_of(cluster, e, opts.classify);
    if (opts.filter && !opts.filter(geo)) {
      continue;
    }
    const CouplingTensor t = rotate(total_of(e), to_cluster, "cluster");
    double value = 0.0;
    switch (quantity) {
    case BarQuantity::JIso:
      value = isotropic(t);
      break;
    case BarQuantity::JXX:
      value = t(0, 0);
      break;
    case BarQuantity::JYY:
      value = t(1, 1);
      break;
    case BarQuantity::JZZ:
      value = t(2, 2);
      break;
    }
    keyed.push_back({BarSeries{pair_name(e.a, e.b), value, geo.n}, e.a, e.b});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed &x, const Keyed &y) {
    const int gx = x.bar.group.value_or(std::numeric_limits<int>::max());
    const int gy = y.bar.group.value_or(std::numeric_limits<int>::max());
    return std::tie(gx, x.a, x.b) < std::tie(gy, y.a, y.b);
  });
  std::vector<BarSeries> out;
  out.reserve(keyed.size());
  for (auto &k : keyed) {
    out.push_back(std::move(k.bar));
  }
  return out;
}

std::vector<PairReportRow> vacancy_proximity_report(const CouplingDocument &doc,
                                                    const Cluster &cluster,
                                                    const Vec3 &vacancy,
                                                    const ReportOptions &opts) {
  auto rows = table1_report(doc, cluster, opts);
  for (auto &row : rows) {
    const double da = (cluster.atom(row.a).position - vacancy).norm();
    const double db = (cluster.atom(row.b).position - vacancy).norm();
    row.vacancy_distance = std::min(da, db);
    row.near_vacancy = *row.vacancy_distance <= kNearVacancyDistance;
  }
  return rows;
}

std::vector<double> baseline_ratios(const std::vector<PairReportRow> &rows,
                                    const std::function<bool(const PairReportRow &)> &baseline) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto &r : rows) {
    if (baseline(r)) {
      sum += r.j_iso;
      ++count;
    }
  }
  if (count == 0) {
    throw std::invalid_argument("baseline selection is empty");
  }
  const double mean = sum / static_cast<double>(count);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto &r : rows) {
    out.push_back(r.j_iso / mean);
  }
  return out;
}

std::string report_csv(const std::vector<PairReportRow> &rows, bool with_vacancy) {
  std::string out = "a,b,n,class,j_xx_hz,j_yy_hz,j_zz_hz,j_iso_hz,delta_j_hz,distance_angstrom";
  if (with_vacancy) {
    out += ",vacancy_distance_angstrom,near_vacancy";
  }
  out += '\n';
  // 0.0 added so values that round to zero print without a minus sign
  const auto hz = [](double v) { return fmt::format("{:.2f}", std::round(v * 100.0) / 100.0 + 0.0); };
  for (const auto &r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{:.4f}", r.a, r.b, order_text(r.n),
                       to_string(r.bond_class), hz(r.j_xx), hz(r.j_yy), hz(r.j_zz),
                       hz(r.j_iso), hz(r.delta_j), r.distance);
    if (with_vacancy) {
      out += r.vacancy_distance ? fmt::format(",{:.4f}", *r.vacancy_distance) : ",";
      out += r.near_vacancy ? ",1" : ",0";
    }
    out += '\n';
  }
  return out;
}

std::string report_json(const std::vector<PairReportRow> &rows) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto &r : rows) {
    nlohmann::ordered_json item;
    item["a"] = r.a;
    item["b"] = r.b;
    item["n"] = r.n ? nlohmann::ordered_json(*r.n) : nlohmann::ordered_json(nullptr);
    item["class"] = to_string(r.bond_class);
    item["j_xx_hz"] = r.j_xx;
    item["j_yy_hz"] = r.j_yy;
    item["j_zz_hz"] = r.j_zz;
    item["j_iso_hz"] = r.j_iso;
    item["delta_j_hz"] = r.delta_j;
    item["distance_angstrom"] = r.distance;
    if (r.vacancy_distance) {
      item["vacancy_distance_angstrom"] = *r.vacancy_distance;
      item["near_vacancy"] = r.near_vacancy;
    }
    list.push_back(std::move(item));
  }
  return list.dump(2) + "\n";
}

std::string bars_csv(const std::vector<BarSeries> &bars) {
  std::string out = "label,group_n,value_hz\n";
  for (const auto &b : bars) {
    out += fmt::format("{},{},{:.2f}\n", b.label, order_text(b.group),
                       std::round(b.value * 100.0) / 100.0 + 0.0);
  }
  return out;
}

} // namespace jcoup
