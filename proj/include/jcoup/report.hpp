#pragma once

#include <jcoup/geometry.hpp>
#include <jcoup/orca.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace jcoup {

struct PairReportRow {
  int a{0};
  int b{0};
  std::optional<int> n;
  BondClass bond_class{BondClass::Other};
  double j_xx{0.0}; // bond frame, Hz
  double j_yy{0.0};
  double j_zz{0.0};
  double j_iso{0.0};
  double delta_j{0.0};
  double distance{0.0}; // Angstrom
  std::optional<double> vacancy_distance;
  bool near_vacancy{false};
};

struct BarSeries {
  std::string label; // "Ci-Cj"
  double value{0.0}; // Hz
  std::optional<int> group;
};

enum class BarQuantity { JIso, JXX, JYY, JZZ };
BarQuantity bar_quantity_from_string(std::string_view s);

using PairPredicate = std::function<bool(const Pair &)>;

/// Keeps pairs of the given bond order (and class, when set).
PairPredicate select_pairs(std::optional<int> order,
                           std::optional<BondClass> bond_class = std::nullopt);

struct ReportOptions {
  ClassifyOptions classify;
  PairPredicate filter; // empty: keep every pair
};

/// Error naming a coupling pair that has no geometry in the cluster.
class IndexMismatch : public std::runtime_error {
public:
  IndexMismatch(int a, int b);
};

/// One row per document pair passing the filter: the total tensor rotated
/// into the pair's bond frame (Z along a->b), its diagonal, J_iso and
/// Delta J. Rows are ordered by (a, b). The cluster must have bonds built.
std::vector<PairReportRow> table1_report(const CouplingDocument &doc, const Cluster &cluster,
                                         const ReportOptions &opts = {});

/// One bar per document pair. j_iso is frame free; the diagonal quantities
/// are taken in the cluster frame (Z along the cluster axis). Ordered by
/// (group, a, b) with disconnected pairs last.
std::vector<BarSeries> bar_data(const CouplingDocument &doc, const Cluster &cluster,
                                BarQuantity quantity, const ReportOptions &opts = {});

inline constexpr double kNearVacancyDistance = 1.7; // Angstrom, inclusive

/// table1_report rows annotated with the nearer atom's distance to the
/// vacancy; flagged when that distance is <= 1.7 Angstrom.
std::vector<PairReportRow> vacancy_proximity_report(const CouplingDocument &doc,
                                                    const Cluster &cluster,
                                                    const Vec3 &vacancy,
                                                    const ReportOptions &opts = {});

/// j_iso of each row divided by the mean j_iso of the rows selected as
/// baseline. Throws when the baseline selection is empty.
std::vector<double> baseline_ratios(const std::vector<PairReportRow> &rows,
                                    const std::function<bool(const PairReportRow &)> &baseline);

std::string pair_name(int a, int b);

/// CSV with header a,b,n,class,j_xx_hz,...,distance_angstrom and, when
/// `with_vacancy`, vacancy_distance_angstrom,near_vacancy. Hz to 2 decimals.
std::string report_csv(const std::vector<PairReportRow> &rows, bool with_vacancy);
/// Same rows as JSON at full precision.
std::string report_json(const std::vector<PairReportRow> &rows);
std::string bars_csv(const std::vector<BarSeries> &bars);

} // namespace jcoup
