#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "probmorph/kernels.hpp"
#include "probmorph/morphisms.hpp"
#include "probmorph/spaces.hpp"

namespace probmorph {

struct RiskReport {
  double value = 0.0;
  /// Instantaneous losses in sample order, present for empirical risks.
  std::optional<std::vector<double>> per_sample;
};

/// L^K_h(x, y) = |M_K(h(x)) - K_y|_H^2, expanded through the Gram matrix.
double instantaneous_loss(const MarkovKernel& h, std::size_t x, std::size_t y, const GramMatrix& g_y);
double instantaneous_loss(const MarkovKernel& h, std::string_view x, std::string_view y, const GramMatrix& g_y);

/// Exact sum of the instantaneous loss against a joint measure on X x Y.
RiskReport expected_risk(const MarkovKernel& h, const ProbMeasure& mu, const GramMatrix& g_y);

/// Mean instantaneous loss over a dataset.
RiskReport empirical_risk(const MarkovKernel& h, const Dataset& data, const GramMatrix& g_y);

/// sum_x mu_X(x) * mmd^2(h(x), mu_{Y|X}(x)); the part of the risk above its
/// minimum over all Markov kernels.
double excess_risk(const MarkovKernel& h, const ProbMeasure& mu, const GramMatrix& g_y,
                   ZeroRowPolicy policy = ZeroRowPolicy::Uniform);

/// |(Gamma_h)_* mu_X - mu|_TV ^ k.
double tv_correct_loss(const MarkovKernel& h, const ProbMeasure& mu, int k = 1);

/// |(Gamma_h)_* mu_X - mu| in the embedding of the Gram matrix on X x Y.
double mmd_correct_loss(const MarkovKernel& h, const ProbMeasure& mu, const GramMatrix& g_xy);

struct BretagnolleHuber {
  double l1 = 0.0;
  double kl = 0.0;     // natural log, +inf when supp p is not inside supp f
  double bound = 0.0;  // 2 sqrt(1 - exp(-kl))
  bool holds = false;
};

BretagnolleHuber kl_and_bh_check(const ProbMeasure& p, const ProbMeasure& f);

}  // namespace probmorph
