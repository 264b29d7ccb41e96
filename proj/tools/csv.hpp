#pragma once

#include <optional>
#include <string>
#include <vector>

#include "probmorph/spaces.hpp"

namespace pmorph {

/// Label columns read from a CSV file with a header row.
struct LabelTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
};

LabelTable read_csv(const std::string& path);

/// Dataset from a file with header `x,y`. Unknown labels are reported with
/// their line numbers.
probmorph::Dataset read_dataset(const std::string& path, const probmorph::FiniteSpace& product_space);

struct EmpiricalSample {
  probmorph::ProbMeasure measure;
  std::size_t n = 0;
};

/// Empirical measure of a file with header `y` (points of `y`) or `x,y`
/// (points of x by y; `x` must then be given).
EmpiricalSample read_empirical(const std::string& path, const std::optional<probmorph::FiniteSpace>& x,
                                      const probmorph::FiniteSpace& y);

}  // namespace pmorph
