#include "rova/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rova/error.hpp"

namespace rova {

void CostProfile::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0) fail(ErrorKind::kValidation, std::string("cost.") + name + " must be >= 0");
  };
  nonneg(batch_size, "batch_size");
  nonneg(c_bwd_factor, "c_bwd_factor");
  nonneg(c_judge, "c_judge");
  nonneg(c_api, "c_api");
  nonneg(c_pert, "c_pert");
  nonneg(buffer_size, "buffer_size");
  nonneg(max_seq_len, "max_seq_len");
  nonneg(seconds_per_fwd, "seconds_per_fwd");
  if (!(group_total >= 1)) fail(ErrorKind::kValidation, "cost.group_total must be >= 1");
  if (!(rho >= 0 && rho <= 1)) fail(ErrorKind::kValidation, "cost.rho must lie in [0,1], got " + std::to_string(rho));
  if (!(reeval_period > 0)) fail(ErrorKind::kValidation, "cost.reeval_period must be > 0");
}

double cost_grpo(const CostProfile& p) { return p.batch_size * p.group_total * (1.0 + p.c_bwd_factor); }

double cost_naive_per_sample(const CostProfile& p) {
  double c = 2.0 * p.group_total + 2.0 * p.c_api + 1.5 * p.group_total;
  return p.include_pert ? c + p.c_pert : c;
}

double cost_rova_per_sample(const CostProfile& p) {
  return 2.0 * p.group_total + p.c_judge + 2.0 * p.rho * p.c_api + 1.5 * p.rho * p.group_total;
}

CostRatio cost_ratio(const CostProfile& p) {
  CostRatio r;
  r.rova = cost_rova_per_sample(p);
  r.naive = cost_naive_per_sample(p);
  if (r.naive == 0) fail(ErrorKind::kDomain, "naive per-sample cost is zero");
  r.ratio = r.rova / r.naive;
  double trainable = 2.0 * p.c_api + 1.5 * p.group_total;
  r.margin = (1.0 - p.rho) * trainable - p.c_judge;
  r.saves = r.margin > 0;
  r.breakeven_rho = 1.0 - p.c_judge / trainable;
  return r;
}

double approx_speedup(double rho) {
  if (!(rho >= 0 && rho <= 1)) fail(ErrorKind::kValidation, "rho must lie in [0,1]");
  return 4.0 / (2.4 + 2.0 * rho);
}

AmortizedReeval amortized_reeval_cost(const CostProfile& p) {
  if (!(p.reeval_period > 0)) fail(ErrorKind::kValidation, "reeval_period must be > 0");
  AmortizedReeval a;
  a.per_step = p.buffer_size * p.c_judge / p.reeval_period;
  double step_total = p.batch_size * cost_rova_per_sample(p);
  a.share = step_total > 0 ? a.per_step / step_total : 0.0;
  return a;
}

std::vector<CostRow> sweep_rho(const CostProfile& base, double from, double to, double step) {
  if (!(step > 0)) fail(ErrorKind::kValidation, "sweep step must be > 0");
  std::vector<CostRow> rows;
  // Index-based to avoid accumulating float error in the grid.
  for (long i = 0;; ++i) {
    double rho = from + static_cast<double>(i) * step;
    if (rho > to + 1e-9) break;
    rho = std::min(rho, to);
    CostProfile p = base;
    p.rho = rho;
    p.validate();
    CostRow row;
    row.rho = rho;
    row.ratio = cost_ratio(p);
    row.approx_speedup = approx_speedup(rho);
    row.per_sample_speedup = row.ratio.naive / row.ratio.rova;
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json to_json(const CostProfile& p) {
  return {{"batch_size", p.batch_size},     {"group_total", p.group_total}, {"c_bwd_factor", p.c_bwd_factor},
          {"c_judge", p.c_judge},           {"c_api", p.c_api},             {"c_pert", p.c_pert},
          {"include_pert", p.include_pert}, {"rho", p.rho},                 {"buffer_size", p.buffer_size},
          {"reeval_period", p.reeval_period}, {"max_seq_len", p.max_seq_len}, {"seconds_per_fwd", p.seconds_per_fwd}};
}

nlohmann::json to_json(const CostRow& r) {
  return {{"rho", r.rho},
          {"cost_rova", r.ratio.rova},
          {"cost_naive", r.ratio.naive},
          {"ratio", r.ratio.ratio},
          {"margin", r.ratio.margin},
          {"saves", r.ratio.saves},
          {"speedup_approx", r.approx_speedup},
          {"speedup_per_sample", r.per_sample_speedup}};
}

}  // namespace rova
