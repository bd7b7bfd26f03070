#include <jcoup/orca.hpp>

#include "text_util.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <regex>
#include <set>

namespace jcoup {

using detail::parse_double;
using detail::split_lines;
using detail::tokens;
using detail::trim;

namespace {

constexpr const char *kLabFrame = "lab";

enum class Mechanism { Dso, Pso, Fc, Sd, SdFc, Total };

constexpr std::array<const char *, 6> kMechanismNames = {
    "dso", "pso", "fc", "sd", "sdfc", "total"};

const char *name_of(Mechanism m) {
  return kMechanismNames[static_cast<std::size_t>(m)];
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// A mechanism block header names a mechanism and reads as a block title
// ("... contribution", "... tensor"), which keeps summary lines such as
// "Total isotropic coupling = 29.8" out.
std::optional<Mechanism> block_header(std::string_view line) {
  const std::string l = lower(line);
  if (l.find("contribution") == std::string::npos &&
      l.find("tensor") == std::string::npos) {
    return std::nullopt;
  }
  if (l.find("sd/fc") != std::string::npos || l.find("cross") != std::string::npos) {
    return Mechanism::SdFc;
  }
  if (l.find("diamagnetic") != std::string::npos) {
    return Mechanism::Dso;
  }
  if (l.find("paramagnetic") != std::string::npos) {
    return Mechanism::Pso;
  }
  if (l.find("fermi") != std::string::npos) {
    return Mechanism::Fc;
  }
  if (l.find("spin-dipolar") != std::string::npos ||
      l.find("spin dipolar") != std::string::npos) {
    return Mechanism::Sd;
  }
  if (l.find("total") != std::string::npos) {
    return Mechanism::Total;
  }
  return std::nullopt;
}

// Unit declared in the first parenthesised group of a header, if any.
std::optional<std::string> declared_unit(std::string_view line) {
  const auto open = line.find('(');
  if (open == std::string_view::npos) {
    return std::nullopt;
  }
  const auto close = line.find(')', open);
  if (close == std::string_view::npos) {
    return std::nullopt;
  }
  return std::string(trim(line.substr(open + 1, close - open - 1)));
}

std::optional<std::vector<double>> numeric_row(std::string_view line) {
  const auto tok = tokens(line);
  if (tok.empty()) {
    return std::nullopt;
  }
  std::vector<double> values;
  for (auto t : tok) {
    const auto v = parse_double(t);
    if (!v) {
      return std::nullopt;
    }
    values.push_back(*v);
  }
  return values;
}

struct RawPair {
  int a{0};
  int b{0};
  int line{0};
  std::map<Mechanism, Mat3> blocks;
};

const std::regex &pair_header_regex() {
  static const std::regex re(
      R"(NUCLEUS\s+A\s*=\s*([A-Za-z]+)\s*(\d+)\s+NUCLEUS\s+B\s*=\s*([A-Za-z]+)\s*(\d+))",
      std::regex::icase);
  return re;
}

std::string pair_label(const RawPair &p) { return fmt::format("({}, {})", p.a, p.b); }

} // namespace

SchemaError::SchemaError(std::string path, const std::string &message)
    : std::runtime_error(path + ": " + message), m_path(std::move(path)) {}

const CouplingEntry *CouplingDocument::find(int a, int b) const {
  if (a > b) {
    std::swap(a, b);
  }
  for (const auto &c : couplings) {
    if (c.a == a && c.b == b) {
      return &c;
    }
  }
  return nullptr;
}

CouplingTensor total_of(const CouplingEntry &e) {
  if (e.mechanisms.total) {
    return *e.mechanisms.total;
  }
  return assemble_total(e.mechanisms).total;
}

ProducerParse parse_producer_output(std::string_view text) {
  const auto lines = split_lines(text);
  ProducerParse out;
  auto &report = out.report;

  std::vector<Atom> atoms;
  std::optional<int> atoms_line;
  std::vector<RawPair> pairs;
  bool in_section = false;

  std::size_t i = 0;
  const auto line_no = [](std::size_t idx) { return static_cast<int>(idx) + 1; };

  while (i < lines.size()) {
    const std::string_view line = lines[i];
    const std::string l = lower(line);

    if (l.find("cartesian coordinates (angstroem)") != std::string::npos ||
        l.find("cartesian coordinates (angstrom)") != std::string::npos) {
      atoms.clear();
      atoms_line = line_no(i);
      std::size_t j = i + 1;
      // skip the underline
      while (j < lines.size() && trim(lines[j]).find_first_not_of('-') == std::string_view::npos &&
             !trim(lines[j]).empty()) {
        ++j;
      }
      for (; j < lines.size(); ++j) {
        const auto tok = tokens(lines[j]);
        if (tok.size() != 4) {
          break;
        }
        Atom atom;
        atom.index = static_cast<int>(atoms.size()) + 1;
        atom.element = std::string(tok[0]);
        bool ok = std::isalpha(static_cast<unsigned char>(tok[0][0])) != 0;
        for (int k = 0; k < 3 && ok; ++k) {
          const auto v = parse_double(tok[static_cast<std::size_t>(k) + 1]);
          ok = v.has_value();
          if (ok) {
            atom.position[k] = *v;
          }
        }
        if (!ok) {
          throw ParseError(line_no(j), "malformed coordinate line");
        }
        atoms.push_back(std::move(atom));
      }
      i = j;
      continue;
    }

    if (l.find("spin-spin coupling") != std::string::npos) {
      in_section = true;
    }

    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_search(line.begin(), line.end(), m, pair_header_regex())) {
      in_section = true;
      RawPair p;
      p.a = std::stoi(m[2].str());
      p.b = std::stoi(m[4].str());
      p.line = line_no(i);
      if (p.a == p.b) {
        throw ParseError(p.line, fmt::format("pair couples nucleus {} to itself", p.a));
      }
      pairs.push_back(std::move(p));
      ++i;
      continue;
    }

    if (in_section && !pairs.empty()) {
      if (const auto mech = block_header(line)) {
        RawPair &p = pairs.back();
        const int header_line = line_no(i);
        if (const auto unit = declared_unit(line); unit && *unit != "Hz") {
          throw ParseError(header_line,
                           fmt::format("block declares units '{}', only Hz is accepted",
                                       *unit));
        }
        if (p.blocks.count(*mech) != 0) {
          throw ParseError(header_line,
                           fmt::format("pair {} has a second {} block",
                                       pair_label(p), name_of(*mech)));
        }
        std::vector<double> numbers;
        std::size_t j = i + 1;
        for (; j < lines.size() && numbers.size() < 9; ++j) {
          if (trim(lines[j]).empty()) {
            continue;
          }
          const auto row = numeric_row(lines[j]);
          if (!row) {
            break;
          }
          numbers.insert(numbers.end(), row->begin(), row->end());
        }
        // a further numeric row right after nine numbers means an oversized block
        std::size_t k = j;
        while (k < lines.size() && trim(lines[k]).empty()) {
          ++k;
        }
        const bool oversized = numbers.size() > 9 ||
                               (k < lines.size() && numeric_row(lines[k]).has_value());
        if (numbers.size() != 9 || oversized) {
          throw ParseError(header_line,
                           fmt::format("{} block of pair {} has {} numbers, expected 9",
                                       name_of(*mech), pair_label(p),
                                       oversized ? std::string("more than 9")
                                                 : std::to_string(numbers.size())));
        }
        Mat3 mat;
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) {
            mat(r, c) = numbers[static_cast<std::size_t>(3 * r + c)];
          }
        }
        p.blocks.emplace(*mech, mat);
        i = j;
        continue;
      }
    }
    ++i;
  }

  if (!in_section || pairs.empty()) {
    throw ParseError(0, "no coupling section found");
  }

  // Index origin: 0-based unless an atoms section shows the indices run 1..N.
  int shift = 1;
  if (atoms_line) {
    const int n = static_cast<int>(atoms.size());
    int lo = pairs.front().a;
    int hi = lo;
    for (const auto &p : pairs) {
      lo = std::min({lo, p.a, p.b});
      hi = std::max({hi, p.a, p.b});
    }
    if (lo < 0 || hi > n || (lo == 0 && hi == n)) {
      throw ParseError(*atoms_line,
                       fmt::format("nucleus indices {}..{} do not fit {} listed atoms",
                                   lo, hi, n));
    }
    if (hi == n) {
      shift = 0;
      report.warnings.push_back({*atoms_line, "nucleus indices detected as 1-based"});
    } else if (lo == 0) {
      report.warnings.push_back(
          {*atoms_line, "nucleus indices detected as 0-based; converted to 1-based"});
    } else {
      report.warnings.push_back(
          {*atoms_line,
           "nucleus index origin ambiguous; assuming 0-based and converting to 1-based"});
    }
    out.document.atoms = atoms;
  } else {
    report.warnings.push_back(
        {0, "no atoms section; nucleus indices assumed 0-based and converted to 1-based"});
  }

  std::set<std::pair<int, int>> seen;
  for (const auto &p : pairs) {
    for (Mechanism need : {Mechanism::Dso, Mechanism::Pso, Mechanism::Fc, Mechanism::Sd,
                           Mechanism::SdFc}) {
      if (p.blocks.count(need) == 0) {
        throw ParseError(p.line, fmt::format("pair {} is missing its {} block",
                                             pair_label(p), name_of(need)));
      }
    }
    CouplingEntry e;
    e.a = std::min(p.a, p.b) + shift;
    e.b = std::max(p.a, p.b) + shift;
    if (!seen.insert({e.a, e.b}).second) {
      throw ParseError(p.line, fmt::format("duplicate entry for pair {}", pair_label(p)));
    }
    const auto tensor = [&](Mechanism m) {
      return CouplingTensor(p.blocks.at(m), kLabFrame);
    };
    e.mechanisms = MechanismSet{tensor(Mechanism::Dso), tensor(Mechanism::Pso),
                                tensor(Mechanism::Fc), tensor(Mechanism::Sd),
                                tensor(Mechanism::SdFc), std::nullopt};
    if (p.blocks.count(Mechanism::Total) != 0) {
      e.mechanisms.total = tensor(Mechanism::Total);
      const auto assembled = assemble_total(e.mechanisms);
      if (*assembled.max_discrepancy > kMechanismSumTolerance) {
        report.warnings.push_back(
            {p.line, fmt::format("pair {}: declared total differs from the mechanism "
                                 "sum by {:.3g} Hz",
                                 pair_label(p), *assembled.max_discrepancy)});
      }
    } else {
      e.mechanisms.total = assemble_total(e.mechanisms).total;
      ++report.totals_recomputed;
      report.warnings.push_back(
          {p.line, fmt::format("pair {} has no total block; synthesized by summation",
                               pair_label(p))});
    }
    e.provenance = fmt::format("producer output, line {}", p.line);
    out.document.couplings.push_back(std::move(e));
  }
  std::sort(out.document.couplings.begin(), out.document.couplings.end(),
            [](const CouplingEntry &x, const CouplingEntry &y) {
              return std::tie(x.a, x.b) < std::tie(y.a, y.b);
            });
  report.pairs_found = out.document.couplings.size();
  return out;
}

namespace {

using json = nlohmann::ordered_json;

std::string at(const std::string &base, std::size_t idx) {
  return fmt::format("{}[{}]", base, idx);
}

const json &require(const json &obj, const std::string &path, const char *key) {
  if (!obj.contains(key)) {
    throw SchemaError(path, fmt::format("missing field '{}'", key));
  }
  return obj.at(key);
}

Mat3 read_matrix(const json &j, const std::string &path) {
  if (!j.is_array() || j.size() != 3) {
    throw SchemaError(path, "expected 3 rows");
  }
  Mat3 m;
  for (std::size_t r = 0; r < 3; ++r) {
    const json &row = j[r];
    if (!row.is_array() || row.size() != 3) {
      throw SchemaError(at(path, r), "expected 3 columns");
    }
    for (std::size_t c = 0; c < 3; ++c) {
      if (!row[c].is_number()) {
        throw SchemaError(at(at(path, r), c), "expected a number");
      }
      m(static_cast<int>(r), static_cast<int>(c)) = row[c].get<double>();
    }
  }
  if (!m.allFinite()) {
    throw SchemaError(path, "non-finite value");
  }
  return m;
}

int read_index(const json &obj, const std::string &path, const char *key) {
  const json &v = require(obj, path, key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw SchemaError(path + "." + key, "expected a positive integer");
  }
  return v.get<int>();
}

json matrix_json(const Mat3 &m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  }
  return rows;
}

} // namespace

CouplingDocument read_canonical(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    throw SchemaError("$", fmt::format("invalid JSON: {}", e.what()));
  }
  if (!root.is_object()) {
    throw SchemaError("$", "expected an object");
  }
  const json &units = require(root, "$", "units");
  if (!units.is_string() || units.get<std::string>() != CouplingDocument::units) {
    throw SchemaError("$.units", "units must be \"Hz\"");
  }

  CouplingDocument doc;
  if (root.contains("atoms")) {
    const json &atoms = root.at("atoms");
    if (!atoms.is_array()) {
      throw SchemaError("$.atoms", "expected an array");
    }
    std::vector<Atom> list;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string path = at("$.atoms", i);
      const json &a = atoms[i];
      if (!a.is_object()) {
        throw SchemaError(path, "expected an object");
      }
      Atom atom;
      atom.index = read_index(a, path, "index");
      const json &el = require(a, path, "element");
      if (!el.is_string() || el.get<std::string>().empty()) {
        throw SchemaError(path + ".element", "expected a non-empty string");
      }
      atom.element = el.get<std::string>();
      const json &xyz = require(a, path, "xyz");
      if (!xyz.is_array() || xyz.size() != 3) {
        throw SchemaError(path + ".xyz", "expected 3 coordinates");
      }
      for (std::size_t k = 0; k < 3; ++k) {
        if (!xyz[k].is_number()) {
          throw SchemaError(at(path + ".xyz", k), "expected a number");
        }
        atom.position[static_cast<int>(k)] = xyz[k].get<double>();
      }
      if (!atom.position.allFinite()) {
        throw SchemaError(path + ".xyz", "non-finite coordinate");
      }
      for (const Atom &prev : list) {
        if (prev.index == atom.index) {
          throw SchemaError(path + ".index",
                            fmt::format("duplicate atom index {}", atom.index));
        }
      }
      list.push_back(std::move(atom));
    }
    doc.atoms = std::move(list);
  }

  const json &couplings = require(root, "$", "couplings");
  if (!couplings.is_array()) {
    throw SchemaError("$.couplings", "expected an array");
  }
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    const std::string path = at("$.couplings", i);
    const json &c = couplings[i];
    if (!c.is_object()) {
      throw SchemaError(path, "expected an object");
    }
    CouplingEntry e;
    e.a = read_index(c, path, "a");
    e.b = read_index(c, path, "b");
    if (e.a >= e.b) {
      throw SchemaError(path, fmt::format("requires a < b, got a={} b={}", e.a, e.b));
    }
    if (!seen.insert({e.a, e.b}).second) {
      throw SchemaError(path, fmt::format("duplicate pair ({}, {})", e.a, e.b));
    }
    const std::string mpath = path + ".mechanisms";
    const json &mech = require(c, path, "mechanisms");
    if (!mech.is_object()) {
      throw SchemaError(mpath, "expected an object");
    }
    const auto block = [&](const char *key) {
      return CouplingTensor(read_matrix(require(mech, mpath, key), mpath + "." + key),
                            kLabFrame);
    };
    e.mechanisms =
        MechanismSet{block("dso"), block("pso"), block("fc"), block("sd"), block("sdfc"),
                     std::nullopt};
    if (c.contains("total")) {
      e.mechanisms.total =
          CouplingTensor(read_matrix(c.at("total"), path + ".total"), kLabFrame);
      const double err = *assemble_total(e.mechanisms).max_discrepancy;
      if (err > kMechanismSumTolerance) {
        throw SchemaError(path + ".total",
                          fmt::format("differs from the mechanism sum by {:.3g} Hz", err));
      }
    }
    if (c.contains("provenance")) {
      if (!c.at("provenance").is_string()) {
        throw SchemaError(path + ".provenance", "expected a string");
      }
      e.provenance = c.at("provenance").get<std::string>();
    }
    doc.couplings.push_back(std::move(e));
  }
  return doc;
}

std::string write_canonical(const CouplingDocument &doc) {
  json root;
  root["units"] = CouplingDocument::units;
  if (doc.atoms) {
    std::vector<Atom> atoms = *doc.atoms;
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom &x, const Atom &y) { return x.index < y.index; });
    json list = json::array();
    for (const Atom &a : atoms) {
      json item;
      item["index"] = a.index;
      item["element"] = a.element;
      item["xyz"] = json::array({a.position.x(), a.position.y(), a.position.z()});
      list.push_back(std::move(item));
    }
    root["atoms"] = std::move(list);
  }
  std::vector<const CouplingEntry *> order;
  for (const auto &c : doc.couplings) {
    order.push_back(&c);
  }
  std::sort(order.begin(), order.end(), [](const CouplingEntry *x, const CouplingEntry *y) {
    return std::tie(x->a, x->b) < std::tie(y->a, y->b);
  });
  json list = json::array();
  for (const CouplingEntry *c : order) {
    json item;
    item["a"] = c->a;
    item["b"] = c->b;
    json mech;
    mech["dso"] = matrix_json(c->mechanisms.dso.values());
    mech["pso"] = matrix_json(c->mechanisms.pso.values());
    mech["fc"] = matrix_json(c->mechanisms.fc.values());
    mech["sd"] = matrix_json(c->mechanisms.sd.values());
    mech["sdfc"] = matrix_json(c->mechanisms.sdfc.values());
    item["mechanisms"] = std::move(mech);
    if (c->mechanisms.total) {
      item["total"] = matrix_json(c->mechanisms.total->values());
    }
    if (!c->provenance.empty()) {
      item["provenance"] = c->provenance;
    }
    list.push_back(std::move(item));
  }
  root["couplings"] = std::move(list);
  return root.dump(2) + "\n";
}

} // namespace jcoup
