#include "csv.hpp"

#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace pmorph {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string at_line(const std::string& path, int line) { return path + ":" + std::to_string(line) + ": "; }

std::vector<std::size_t> resolve(const LabelTable& t, std::size_t column, const probmorph::FiniteSpace& space,
                                 const std::string& path, std::vector<std::string>& problems) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& label = t.rows[r][column];
    if (const auto i = space.find(label)) {
      out.push_back(*i);
    } else {
      problems.push_back(at_line(path, t.line_numbers[r]) + "unknown " + t.header[column] + " label '" + label + "'");
      out.push_back(0);
    }
  }
  return out;
}

[[noreturn]] void report(const std::vector<std::string>& problems) {
  std::string msg;
  const std::size_t shown = std::min<std::size_t>(problems.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) msg += (i ? "\n" : "") + problems[i];
  if (problems.size() > shown) msg += "\n... and " + std::to_string(problems.size() - shown) + " more";
  throw DataError(msg);
}

}  // namespace

LabelTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  LabelTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw DataError(at_line(path, lineno) + "expected " + std::to_string(t.header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    }
    for (const auto& c : cells) {
      if (c.empty()) throw DataError(at_line(path, lineno) + "empty field");
    }
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(lineno);
  }
  if (t.header.empty()) throw DataError(path + ": missing header row");
  if (t.rows.empty()) throw DataError(path + ": no data rows");
  return t;
}

probmorph::Dataset read_dataset(const std::string& path, const probmorph::FiniteSpace& product_space) {
  const auto t = read_csv(path);
  if (t.header != std::vector<std::string>{"x", "y"}) throw DataError(path + ":1: expected header 'x,y'");
  std::vector<std::string> problems;
  const auto xs = resolve(t, 0, product_space.left(), path, problems);
  const auto ys = resolve(t, 1, product_space.right(), path, problems);
  if (!problems.empty()) report(problems);
  std::vector<probmorph::Sample> samples;
  for (std::size_t i = 0; i < xs.size(); ++i) samples.push_back({xs[i], ys[i]});
  return {product_space, std::move(samples)};
}

EmpiricalSample read_empirical(const std::string& path, const std::optional<probmorph::FiniteSpace>& x,
                                      const probmorph::FiniteSpace& y) {
  const auto t = read_csv(path);
  std::vector<std::string> problems;
  if (t.header == std::vector<std::string>{"y"}) {
    const auto ys = resolve(t, 0, y, path, problems);
    if (!problems.empty()) report(problems);
    return {probmorph::empirical(y, std::span<const std::size_t>(ys)), ys.size()};
  }
  if (t.header == std::vector<std::string>{"x", "y"}) {
    if (!x) throw DataError(path + ":1: an 'x,y' file needs x_labels or x_coords in the config");
    const auto xy = probmorph::FiniteSpace::product(*x, y);
    const auto xs = resolve(t, 0, *x, path, problems);
    const auto ys = resolve(t, 1, y, path, problems);
    if (!problems.empty()) report(problems);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < xs.size(); ++i) idx.push_back(xy.pair_index(xs[i], ys[i]));
    return {probmorph::empirical(xy, std::span<const std::size_t>(idx)), idx.size()};
  }
  throw DataError(path + ":1: expected header 'y' or 'x,y'");
}

}  // namespace pmorph
