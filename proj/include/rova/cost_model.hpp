#pragma once

#include <vector>

#include <json.hpp>

namespace rova {

/// Training-cost constants, in units of one forward pass (C_fwd).
struct CostProfile {
  double batch_size = 1;        // N
  double group_total = 12;      // G_total
  double c_bwd_factor = 0.5;    // C_bwd / C_fwd
  double c_judge = 0.4;
  double c_api = 0.9;
  double c_pert = 0.05;
  bool include_pert = false;    // add c_pert to the naive per-sample cost
  double rho = 0.869;
  double buffer_size = 293;     // |M|
  double reeval_period = 50;    // T_re
  double max_seq_len = 0;       // informational only
  double seconds_per_fwd = 0;   // wall-clock conversion; 0 = unset

  /// Throws kValidation on negative factors, rho outside [0,1], G_total < 1
  /// or a non-positive re-evaluation period.
  void validate() const;
};

/// N * G_total * (1 + c_bwd_factor).
double cost_grpo(const CostProfile& p);

/// 2 G + 2 c_api + 1.5 G (+ c_pert when include_pert).
double cost_naive_per_sample(const CostProfile& p);

/// 2 G + c_judge + 2 rho c_api + 1.5 rho G.
double cost_rova_per_sample(const CostProfile& p);

struct CostRatio {
  double rova = 0;
  double naive = 0;
  double ratio = 0;
  double margin = 0;       // (1 - rho)(2 c_api + 1.5 G) - c_judge
  bool saves = false;      // margin > 0
  double breakeven_rho = 0;  // rho at which margin = 0
};

CostRatio cost_ratio(const CostProfile& p);

/// 4 / (2.4 + 2 rho).
double approx_speedup(double rho);

struct AmortizedReeval {
  double per_step = 0;  // |M| c_judge / T_re
  double share = 0;     // per_step / (N * cost_rova_per_sample)
};

AmortizedReeval amortized_reeval_cost(const CostProfile& p);

struct CostRow {
  double rho = 0;
  CostRatio ratio;
  double approx_speedup = 0;
  double per_sample_speedup = 0;  // naive / rova
};

/// Rows for rho = from, from + step, ..., to (inclusive within 1e-9).
std::vector<CostRow> sweep_rho(const CostProfile& base, double from, double to, double step);

nlohmann::json to_json(const CostProfile& p);
nlohmann::json to_json(const CostRow& row);

}  // namespace rova
