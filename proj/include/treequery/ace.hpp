#pragma once

#include <vector>

#include "treequery/backend.hpp"
#include "treequery/run_log.hpp"

namespace treequery {

struct AceParams {
    int m = 5;        // panel seats per run
    int runs = 5;     // N independent panel runs
    int personas = 3; // first n of {Contrarian, Deceiver, Hater}, 0..3
    std::vector<double> weights; // per persona; empty means uniform 1/n
    LogDetail detail = LogDetail::Stats;
    const std::vector<ExpertProfile>* pool = nullptr; // null means the built-in seven
};

struct AceOutput {
    int y_hat = 0;
    double confidence = 0.0;
    AceLog log;
};

/// Counts and majority label of the N run conclusions; ties fall to No.
ConsensusStats baseline_consensus(const std::vector<Conclusion>& conclusions);

/// Fraction of perturbed conclusions that still agree with y_star.
double persona_consistency(const std::vector<Conclusion>& perturbed, Conclusion y_star);

/// c = p0 * (1 - sum_j w_j * |p_j - p0_raw| / p0_raw). Rejects negative
/// weights and weight sums off 1 by more than 1e-9; an empty persona set
/// leaves c = p0.
double confidence_score(const ConsensusStats& stats, const std::vector<double>& p_js,
                        const std::vector<double>& weights);

/// Full pipeline for one query: route, select seats, run N baseline panels,
/// re-run each under every persona's counter-argument, and aggregate into
/// (y_hat, confidence, log).
AceOutput mes_ace(const QuerySpec& q, const AceParams& params, ExpertBackend& backend);

} // namespace treequery
