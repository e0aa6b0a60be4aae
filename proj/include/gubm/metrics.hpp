#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gubm/grid.hpp"
#include "gubm/params.hpp"
#include "gubm/path.hpp"

namespace gubm {

// Editorial judgment for one query-image pair: topical on a 3-point scale,
// quality on a 5-point scale.
struct AnnotationRecord {
  std::string query_id;
  std::string image_id;
  int topical = 0;   // 0..2
  int quality = 0;   // 0..4
};

// Single 5-level score: topical 0 or 1 stands alone, topical 2 defers to
// quality. Out-of-range input is rejected.
int merge_relevance(int topical, int quality);

// Predicted interaction probability per left-to-right rank of one session.
// The returned vector covers every position of the session's layout.
using InteractionPredictor =
    std::function<std::vector<double>(const Session&)>;

struct PerplexityReport {
  std::vector<double> per_rank;            // each >= 1
  std::vector<std::size_t> sessions_per_rank;
  double overall = 0.0;                    // arithmetic mean of per_rank
};

// Per-rank perplexity of the binary interaction label under the predictor.
// Ranks are always left-to-right positions, whatever direction the model
// was trained with; the predictor closure carries its own policy.
PerplexityReport perplexity(const std::vector<Session>& sessions,
                            const InteractionPredictor& predict);

// Fraction of the baseline's distance to the perfect score that the model
// recovers: (baseline - model) / (baseline - 1).
double perplexity_improvement(double model, double baseline);

// Interaction probability per left-to-right rank conditioned on the observed
// adjacent-signal pairs: covered ranks combine their path factors alpha*gamma
// by noisy-or, uncovered ranks sit at the 1e-6 floor.
std::vector<double> gubm_predict_q(const Session& session,
                                   const ParameterStore& params,
                                   const DirectionPolicy& policy);

InteractionPredictor make_gubm_predictor(const ParameterStore& params,
                                         const DirectionPolicy& policy);
InteractionPredictor make_constant_predictor(double q);

// 1 where the session interacted with the position at that left-to-right
// rank, else 0.
std::vector<std::uint8_t> interaction_labels(const Session& session);

// Graded-gain metrics, positions 1-based: DCG = sum score_i / log2(i + 1).
double dcg(const std::vector<double>& scores, int depth);

struct NdcgResult {
  double value = 0.0;
  bool all_zero = false;  // every score zero; value pinned to 0
};

NdcgResult ndcg(const std::vector<double>& scores, int depth);

// Candidates sorted by relevance descending; ties keep the incoming order,
// images the store never saw rank at the default value.
std::vector<std::string> rerank(const std::string& query_id,
                                const std::vector<std::string>& candidates,
                                const ParameterStore& params);

}  // namespace gubm
