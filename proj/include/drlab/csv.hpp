#pragma once

#include <string>
#include <vector>

#include "drlab/harness.hpp"

namespace drlab {

// Shortest representation that round-trips the exact double ("nan" for NaN),
// so identical runs serialize byte-identically.
std::string format_double(double x);

// Fixed column set `t,c,p,p_star,D,a_hat,b_hat,q_hat,lmin,Jt,Lt,clamped`.
void write_trace_csv(const EpisodeTrace& trace, const std::string& path);

void write_summary_csv(const PolicySummary& summary, const std::string& path);

// One t column plus one cumulative-regret column per policy.
void write_regret_csv(const MonteCarloSummary& summary,
                      const std::string& path);

// Exact-inequality sweeps and concentration cells in one report. Sweep rows
// leave the t/gamma/empirical/bound fields empty.
void write_bounds_report_csv(const std::vector<BoundCheck>& checks,
                             const std::vector<ConcentrationCell>& cells,
                             const std::string& path);

}  // namespace drlab
