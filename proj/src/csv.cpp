#include "drlab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "drlab/policy_names.hpp"

namespace drlab {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_trace_csv(const EpisodeTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "t,c,p,p_star,D,a_hat,b_hat,q_hat,lmin,Jt,Lt,clamped\n";
  for (std::size_t k = 0; k < trace.cost.size(); ++k) {
    out << (k + 1) << ',' << format_double(trace.cost[k]) << ','
        << format_double(trace.price[k]) << ','
        << format_double(trace.price_star[k]) << ','
        << format_double(trace.demand[k]) << ','
        << format_double(trace.a_hat[k]) << ','
        << format_double(trace.b_hat[k]) << ','
        << format_double(trace.q_hat[k]) << ','
        << format_double(trace.info_lmin[k]) << ','
        << format_double(trace.dispersion[k]) << ','
        << format_double(trace.lower_bound[k]) << ','
        << int(trace.clamped[k]) << '\n';
  }
}

void write_summary_csv(const PolicySummary& summary, const std::string& path) {
  auto out = open_out(path);
  out << "t,delta_mean,delta_ci95,price_mse,theta_mse,q_mse,a_abs_err,"
         "b_abs_err,q_abs_err\n";
  for (std::size_t k = 0; k < summary.delta_mean.size(); ++k) {
    out << (k + 1) << ',' << format_double(summary.delta_mean[k]) << ','
        << format_double(summary.delta_ci95[k]) << ','
        << format_double(summary.price_mse[k]) << ','
        << format_double(summary.theta_mse[k]) << ','
        << format_double(summary.q_mse[k]) << ','
        << format_double(summary.a_abs_err[k]) << ','
        << format_double(summary.b_abs_err[k]) << ','
        << format_double(summary.q_abs_err[k]) << '\n';
  }
}

void write_regret_csv(const MonteCarloSummary& summary,
                      const std::string& path) {
  auto out = open_out(path);
  out << 't';
  for (const auto& ps : summary.policies)
    out << ",delta_" << policy_name(ps.kind);
  out << '\n';
  if (summary.policies.empty()) return;
  const auto horizon = summary.policies.front().delta_mean.size();
  for (std::size_t k = 0; k < horizon; ++k) {
    out << (k + 1);
    for (const auto& ps : summary.policies)
      out << ',' << format_double(ps.delta_mean[k]);
    out << '\n';
  }
}

void write_bounds_report_csv(const std::vector<BoundCheck>& checks,
                             const std::vector<ConcentrationCell>& cells,
                             const std::string& path) {
  auto out = open_out(path);
  out << "check,t,gamma,periods,violations,max_slack,empirical,bound\n";
  for (const auto& c : checks) {
    out << c.name << ",,," << c.periods << ',' << c.violations << ','
        << format_double(c.max_slack) << ",,\n";
  }
  for (const auto& cell : cells) {
    out << "quantile_concentration," << cell.t << ','
        << format_double(cell.gamma) << ',' << cell.reps << ','
        << (cell.pass ? 0 : 1) << ','
        << format_double(cell.empirical - (cell.bound + cell.ci3)) << ','
        << format_double(cell.empirical) << ',' << format_double(cell.bound)
        << '\n';
  }
}

}  // namespace drlab
