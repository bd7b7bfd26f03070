#pragma once

// Reference data shared by the unit and acceptance suites.

#include <jcoup/tensor.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixtures {

inline std::string data_path(const std::string &name) {
  return std::string(JCOUP_TEST_DATA) + "/" + name;
}

inline std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline jcoup::Mat3 mat(std::initializer_list<double> v) {
  jcoup::Mat3 m;
  auto it = v.begin();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      m(r, c) = *it++;
    }
  }
  return m;
}

// C1-C2 adamantane pair, bond frame (Z along C1-C2), Hz.
inline const jcoup::Mat3 kC1C2Dso = mat({-0.8030, 0, 0.0003, 0, -0.8469, 0.0777, 0.0003, -0.0576, 2.5263});
inline const jcoup::Mat3 kC1C2Pso = mat({0.2127, 0, 0.0002, 0, -0.0837, -0.0258, 0.0002, 0.0413, -1.8121});
inline const jcoup::Mat3 kC1C2Fc = mat({28.9120, 0, 0, 0, 28.9120, 0, 0, 0, 28.9120});
inline const jcoup::Mat3 kC1C2Sd = mat({0.5443, 0, 0.0002, 0, 0.5868, -0.0706, 0.0002, 0.0832, 2.3375});
inline const jcoup::Mat3 kC1C2SdFc = mat({5.0077, 0, -0.0015, 0, 4.9798, -0.0605, -0.0015, -0.0605, -9.9890});
inline const jcoup::Mat3 kC1C2Total = mat({33.8736, 0, -0.0008, 0, 33.5480, -0.0793, -0.0008, 0.0064, 21.9747});

inline jcoup::MechanismSet c1c2_mechanisms(const std::string &frame = "bond:C1-C2") {
  using jcoup::CouplingTensor;
  return jcoup::MechanismSet{CouplingTensor(kC1C2Dso, frame),  CouplingTensor(kC1C2Pso, frame),
                             CouplingTensor(kC1C2Fc, frame),   CouplingTensor(kC1C2Sd, frame),
                             CouplingTensor(kC1C2SdFc, frame), CouplingTensor(kC1C2Total, frame)};
}

struct Table1Row {
  std::string panel; // "c35" or "nv"
  std::string pair;
  double j_xx, j_yy, j_zz, j_iso;
};

inline std::vector<Table1Row> table1_rows() {
  std::istringstream in(read_text(data_path("table1.csv")));
  std::vector<Table1Row> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ls(line);
    Table1Row r;
    std::string cell;
    std::getline(ls, r.panel, ',');
    std::getline(ls, r.pair, ',');
    double *fields[] = {&r.j_xx, &r.j_yy, &r.j_zz, &r.j_iso};
    for (double *f : fields) {
      std::getline(ls, cell, ',');
      *f = std::stod(cell);
    }
    rows.push_back(r);
  }
  return rows;
}

} // namespace fixtures
