#pragma once

#include <complex>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

struct MlfOracleRow {
  double a, b, q;
  std::complex<double> z, value;
};

inline std::vector<MlfOracleRow> load_mlf_oracle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing oracle file " + path);
  std::string line;
  std::getline(in, line);
  std::vector<MlfOracleRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    double v[7];
    std::string cell;
    for (double& x : v) {
      std::getline(ss, cell, ',');
      x = std::stod(cell);
    }
    rows.push_back({v[0], v[1], v[2], {v[3], v[4]}, {v[5], v[6]}});
  }
  return rows;
}
