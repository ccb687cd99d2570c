#pragma once

#include "loclim/config.hpp"
#include "loclim/limits.hpp"
#include "loclim/records.hpp"

namespace loclim {

RegimeReport experiment_regime(const ExperimentConfig& cfg);

// mean |L_eps - f^(0) L_proxy| over the eps grid, log-log slope with a
// bootstrap SE, and in the LP regime the ratio of eps^{-N/2}(L_eps - L_proxy)
// to the predicted sum over |alpha| = N of coefficient * L_proxy^(k+alpha).
// Metrics:
//   slope, slope_se (also on the record), regime_is_lp
//   lp_ratio_derivative / lp_ratio_stated at each eps (series)
//   lp_corr at each eps (series): per-path correlation with the prediction
ExperimentRecord run_rate_experiment(const ExperimentConfig& cfg);

// F_eps(T) = l(eps) (L_eps - f^(0) L_proxy) per replicate and eps. Metrics at
// the smallest eps:
//   var_ratio        Var(F) / (D mean L_proxy)
//   var_ratio_expected  same with E L from expected_estimate at eps_ref
//   kurtosis, kurtosis_se of F / sqrt(D L_proxy) per path
//   corr_xt, corr_xt_se  Corr(F, X_T)
//   sd_slope, sd_slope_se  log-log slope of sd(L_eps - L_proxy) vs eps
//   tightness_exponent, tightness_exponent_se, tightness_threshold
ExperimentRecord run_clt_experiment(const ExperimentConfig& cfg);

// Writes to cfg.records_path / cfg.csv_path when set.
void persist(const ExperimentConfig& cfg, const ExperimentRecord& rec);

}  // namespace loclim
