#pragma once

#include <jcoup/geometry.hpp>
#include <jcoup/tensor.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jcoup {

/// One nuclear pair's tensors. Index order a < b; blocks keep the row/column
/// orientation the producer printed them in.
struct CouplingEntry {
  int a{0};
  int b{0};
  MechanismSet mechanisms;
  std::string provenance;
};

/// Serialized form of per-pair mechanism sets. Units are always Hz.
struct CouplingDocument {
  std::optional<std::vector<Atom>> atoms;
  std::vector<CouplingEntry> couplings;

  static constexpr const char *units = "Hz";

  const CouplingEntry *find(int a, int b) const;
};

/// The declared total if present, otherwise the mechanism sum.
CouplingTensor total_of(const CouplingEntry &e);

struct ParseWarning {
  int line{0};
  std::string message;
};

struct ParseReport {
  std::size_t pairs_found{0};
  std::vector<ParseWarning> warnings;
  std::size_t totals_recomputed{0};
};

/// Raised by read_canonical; `path()` locates the offending element in
/// JSONPath-like notation, e.g. "$.couplings[0].mechanisms.fc[2]".
class SchemaError : public std::runtime_error {
public:
  SchemaError(std::string path, const std::string &message);
  const std::string &path() const { return m_path; }

private:
  std::string m_path;
};

/// Scans quantum-chemistry spin-spin coupling output for per-pair mechanism
/// blocks. The grammar is keyword anchored:
///
///   NUCLEUS A = C    0 NUCLEUS B = C    1      starts a pair
///   Diamagnetic contribution (Hz)              followed by 9 numbers
///   Paramagnetic / Fermi-contact / Spin-dipolar /
///   Spin-dipolar/Fermi contact cross term contribution (Hz)
///   Total spin-spin coupling tensor (Hz)       optional
///
/// An optional "CARTESIAN COORDINATES (ANGSTROEM)" section supplies atoms and
/// lets the index origin be detected; otherwise indices are taken as 0-based.
/// Fatal problems throw ParseError with the line number.
struct ProducerParse {
  CouplingDocument document;
  ParseReport report;
};
ProducerParse parse_producer_output(std::string_view text);

CouplingDocument read_canonical(std::string_view text);
std::string write_canonical(const CouplingDocument &doc);

} // namespace jcoup
