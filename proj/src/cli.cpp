#include <jcoup/cli.hpp>

#include <jcoup/geometry.hpp>
#include <jcoup/orca.hpp>
#include <jcoup/report.hpp>
#include <jcoup/spin.hpp>

#include "text_util.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <unistd.h>

namespace jcoup::cli {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot read '{}'", path));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vec3 to_vec3(const std::vector<double> &v, const char *what) {
  if (v.size() != 3) {
    throw std::runtime_error(fmt::format("{} needs three comma-separated numbers", what));
  }
  return Vec3(v[0], v[1], v[2]);
}

struct GeometryOptions {
  double max_bond{kDefaultMaxBond};
  std::vector<double> axis{0.0, 0.0, 1.0};
  double parallel_tol{kDefaultParallelTolDeg};
  double tetra_tol{kDefaultTetraTolDeg};

  void attach(CLI::App *cmd) {
    cmd->add_option("--max-bond", max_bond, "Bond cutoff in Angstrom")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--axis", axis, "Reference axis x,y,z")
        ->delimiter(',')
        ->expected(3);
    cmd->add_option("--parallel-tol", parallel_tol, "Near-parallel tolerance, degrees")
        ->capture_default_str();
    cmd->add_option("--tetra-tol", tetra_tol, "Tetrahedral tolerance, degrees")
        ->capture_default_str();
  }

  Cluster load(const std::string &path) const {
    Cluster c = parse_xyz(read_file(path));
    c.set_axis(to_vec3(axis, "--axis"));
    return build_bond_graph(c, max_bond);
  }

  ClassifyOptions classify() const { return {parallel_tol, tetra_tol}; }
};

CouplingDocument load_tensors(const std::string &path, std::ostream &err) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return read_canonical(text);
  }
  auto parsed = parse_producer_output(text);
  for (const auto &w : parsed.report.warnings) {
    err << "warning: " << (w.line > 0 ? fmt::format("line {}: ", w.line) : "") << w.message
        << '\n';
  }
  return std::move(parsed.document);
}

std::string pairs_csv(const std::vector<Pair> &pairs) {
  std::string out = "a,b,n,class,distance_angstrom,angle_to_axis_deg\n";
  for (const Pair &p : pairs) {
    out += fmt::format("{},{},{},{},{:.6f},{:.4f}\n", p.a, p.b,
                       p.n ? std::to_string(*p.n) : std::string("inf"),
                       to_string(p.bond_class), p.distance, p.angle_to_axis);
  }
  return out;
}

Vec3 sweep_axis(std::string_view text) {
  if (text == "x") {
    return Vec3::UnitX();
  }
  if (text == "y") {
    return Vec3::UnitY();
  }
  if (text == "z") {
    return Vec3::UnitZ();
  }
  std::vector<double> v;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto part = detail::trim(
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                           : comma - start));
    const auto value = detail::parse_double(part);
    if (!value) {
      throw std::runtime_error(fmt::format("bad sweep axis '{}'", text));
    }
    v.push_back(*value);
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return to_vec3(v, "--sweep axis");
}

} // namespace

std::vector<std::string> merge_config(std::vector<std::string> args,
                                      const std::string &config_text) {
  std::vector<std::string> extra;
  int line_no = 0;
  for (auto line : detail::split_lines(config_text)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::runtime_error(fmt::format("config line {}: expected key=value", line_no));
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw std::runtime_error(fmt::format("config line {}: empty key", line_no));
    }
    const std::string flag = key.rfind("--", 0) == 0 ? key : "--" + key;
    bool given = false;
    for (const auto &a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) {
        given = true;
        break;
      }
    }
    if (!given) {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

void write_atomically(const std::string &path, const std::string &content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp =
      target.parent_path() / fmt::format(".{}.tmp{}", target.filename().string(), ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error(fmt::format("cannot write '{}'", path));
    }
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error(fmt::format("failed writing '{}'", path));
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error(fmt::format("cannot move output into '{}'", path));
  }
}

int run(std::vector<std::string> args, std::ostream &err) {
  // --config is resolved before CLI11 sees the arguments so that flags given
  // on the command line win.
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::optional<std::string> path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    }
    if (path) {
      try {
        args = merge_config(std::move(args), read_file(*path));
      } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
      }
      break;
    }
  }

  CLI::App app{"J-coupling tensor toolkit: parse, analyze and simulate 13C-13C couplings",
               "jcoup"};
  app.require_subcommand(1);
  app.allow_extras(false);

  std::string input, output, format = "producer";
  auto *parse = app.add_subcommand("parse", "Convert coupling output to the canonical format");
  parse->add_option("--input", input, "Producer output or canonical JSON")->required();
  parse->add_option("--format", format, "Input format")
      ->check(CLI::IsMember({"producer", "canonical"}))
      ->capture_default_str();
  parse->add_option("--output", output, "Canonical JSON file")->required();

  GeometryOptions geo;
  std::string geometry;
  std::optional<int> order;
  std::string element = "C";
  auto *pairs = app.add_subcommand("pairs", "Tabulate atom pairs of one element");
  pairs->add_option("--geometry", geometry, "XYZ file")->required();
  geo.attach(pairs);
  pairs->add_option("--order", order, "Keep only pairs of this bond order");
  pairs->add_option("--element", element, "Element to pair")->capture_default_str();
  pairs->add_option("--output", output, "CSV file")->required();

  std::string tensors, style = "table1", quantity = "j_iso", bond_class;
  std::vector<double> vacancy;
  auto *report = app.add_subcommand("report", "Bond-frame tables and bar data");
  report->add_option("--tensors", tensors, "Canonical JSON or producer output")->required();
  report->add_option("--geometry", geometry, "XYZ file")->required();
  report->add_option("--style", style)
      ->check(CLI::IsMember({"table1", "bars"}))
      ->capture_default_str();
  report->add_option("--quantity", quantity)
      ->check(CLI::IsMember({"j_iso", "j_xx", "j_yy", "j_zz"}))
      ->capture_default_str();
  report->add_option("--vacancy", vacancy, "Vacancy position x,y,z (Angstrom)")
      ->delimiter(',')
      ->expected(3);
  report->add_option("--order", order,
                     "Bond order filter (table1 defaults to 1, bars to all pairs)");
  report->add_option("--class", bond_class, "Bond class filter")
      ->check(CLI::IsMember({"NearParallel", "Tetrahedral", "Other"}));
  geo.attach(report);
  report->add_option("--output", output, "CSV (or .json) file")->required();

  std::string system, sweep;
  double field_mt = 0.0;
  std::vector<double> euler{0.0, 0.0, 0.0};
  auto *spectrum = app.add_subcommand("spectrum", "Two-spin stick spectrum");
  spectrum->add_option("--system", system, "Spin-system JSON")->required();
  spectrum->add_option("--field-mT", field_mt, "Magnetic field in mT")->required();
  spectrum->add_option("--euler", euler, "Crystal orientation, z-y-z Euler angles in degrees")
      ->delimiter(',')
      ->expected(3);
  spectrum->add_option("--sweep", sweep, "Orientation sweep axis:steps (axis x|y|z or x,y,z)");
  spectrum->add_option("--output", output, "CSV file")->required();

  double radius = 0.0;
  std::string orient = "111";
  double lattice_constant = LatticeSpec{}.lattice_constant;
  auto *lattice = app.add_subcommand("lattice", "Generate an ideal diamond cluster");
  lattice->add_option("--radius", radius, "Cluster radius in Angstrom")->required();
  lattice->add_option("--orient", orient, "Crystal direction along Z")
      ->check(CLI::IsMember({"001", "111"}))
      ->capture_default_str();
  lattice->add_option("--lattice-constant", lattice_constant, "Angstrom");
  lattice->add_option("--output", output, "XYZ file")->required();

  try {
    // CLI11 consumes the vector from the back
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    err << app.help();
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (parse->parsed()) {
      const std::string text = read_file(input);
      CouplingDocument doc;
      if (format == "canonical") {
        doc = read_canonical(text);
      } else {
        auto parsed = parse_producer_output(text);
        for (const auto &w : parsed.report.warnings) {
          err << "warning: " << (w.line > 0 ? fmt::format("line {}: ", w.line) : "")
              << w.message << '\n';
        }
        err << fmt::format("parsed {} pair(s); {} total(s) recomputed; {} warning(s)\n",
                           parsed.report.pairs_found, parsed.report.totals_recomputed,
                           parsed.report.warnings.size());
        doc = std::move(parsed.document);
      }
      write_atomically(output, write_canonical(doc));
    } else if (pairs->parsed()) {
      const Cluster c = geo.load(geometry);
      auto list = enumerate_pairs(c, element, geo.classify());
      if (order) {
        std::erase_if(list, [&](const Pair &p) { return p.n != order; });
      }
      write_atomically(output, pairs_csv(list));
      err << fmt::format("{} pair(s)\n", list.size());
    } else if (report->parsed()) {
      const Cluster c = geo.load(geometry);
      const CouplingDocument doc = load_tensors(tensors, err);
      ReportOptions opts;
      opts.classify = geo.classify();
      std::optional<BondClass> cls;
      if (!bond_class.empty()) {
        cls = bond_class_from_string(bond_class);
      }
      const std::optional<int> effective_order =
          order ? order : (style == "table1" ? std::optional<int>(1) : std::nullopt);
      if (effective_order || cls) {
        opts.filter = select_pairs(effective_order, cls);
      }
      const bool as_json = std::filesystem::path(output).extension() == ".json";
      if (style == "bars") {
        write_atomically(output,
                         bars_csv(bar_data(doc, c, bar_quantity_from_string(quantity), opts)));
      } else if (!vacancy.empty()) {
        const auto rows =
            vacancy_proximity_report(doc, c, to_vec3(vacancy, "--vacancy"), opts);
        write_atomically(output, as_json ? report_json(rows) : report_csv(rows, true));
      } else {
        const auto rows = table1_report(doc, c, opts);
        write_atomically(output, as_json ? report_json(rows) : report_csv(rows, false));
      }
    } else if (spectrum->parsed()) {
      const spin::SpinSystem sys = spin::read_system(read_file(system));
      const double field = field_mt * 1e-3;
      const Rotation base = Rotation::from_euler_zyz(
          euler[0] * kDegToRad, euler[1] * kDegToRad, euler[2] * kDegToRad);
      if (sweep.empty()) {
        write_atomically(output, spin::spectrum_csv(spin::spectrum(sys, field, base)));
      } else {
        const auto colon = sweep.rfind(':');
        if (colon == std::string::npos) {
          throw std::runtime_error("--sweep expects axis:steps");
        }
        const Vec3 axis = sweep_axis(std::string_view(sweep).substr(0, colon));
        int steps = 0;
        try {
          std::size_t used = 0;
          steps = std::stoi(sweep.substr(colon + 1), &used);
          if (used != sweep.size() - colon - 1) {
            throw std::invalid_argument("trailing characters");
          }
        } catch (const std::exception &) {
          throw std::runtime_error(fmt::format("bad sweep step count in '{}'", sweep));
        }
        std::string out;
        for (const auto &pt : spin::orientation_sweep(sys, field, axis, steps, base)) {
          out += fmt::format("# angle={}\n", pt.angle_deg);
          out += spin::spectrum_csv(pt.spectrum);
        }
        write_atomically(output, out);
      }
    } else if (lattice->parsed()) {
      LatticeSpec spec;
      spec.radius = radius;
      spec.lattice_constant = lattice_constant;
      spec.orientation =
          orient == "001" ? LatticeOrientation::Dir001 : LatticeOrientation::Dir111;
      const Cluster c = generate_diamond_cluster(spec);
      write_atomically(output, write_xyz(c, fmt::format("diamond cluster radius={} orient={} "
                                                        "a={}",
                                                        radius, orient, lattice_constant)));
    }
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

} // namespace jcoup::cli
