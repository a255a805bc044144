#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace testcsv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Table read(const std::string& path) {
  Table t;
  std::ifstream f(path);
  std::string line;
  if (std::getline(f, line)) t.header = split(line);
  while (std::getline(f, line))
    if (!line.empty() && line[0] != '#') t.rows.push_back(split(line));
  return t;
}

inline std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace testcsv
