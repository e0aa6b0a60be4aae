#include "gubm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gubm/errors.hpp"
#include "gubm/inference.hpp"

namespace gubm {

namespace {

constexpr double kProbFloor = 1e-6;
constexpr double kProbCeil = 1.0 - 1e-6;

double clamp_probability(double q) {
  if (q < kProbFloor) return kProbFloor;
  if (q > kProbCeil) return kProbCeil;
  return q;
}

int ltor_rank(const GridLayout& layout, GridPosition p) {
  return linearize(layout, p, DirectionPolicy{InRowDirection::LtoR});
}

}  // namespace

int merge_relevance(int topical, int quality) {
  if (topical < 0 || topical > 2) {
    throw DataError("topical relevance must be 0, 1 or 2");
  }
  if (quality < 0 || quality > 4) {
    throw DataError("image quality must lie in 0..4");
  }
  return topical < 2 ? topical : quality;
}

std::vector<std::uint8_t> interaction_labels(const Session& session) {
  std::vector<std::uint8_t> labels(session.layout.total(), 0);
  for (const InteractionEvent& event : session.events) {
    labels[ltor_rank(session.layout, event.position)] = 1;
  }
  return labels;
}

PerplexityReport perplexity(const std::vector<Session>& sessions,
                            const InteractionPredictor& predict) {
  if (sessions.empty()) {
    throw DataError("perplexity needs at least one session");
  }
  std::size_t max_ranks = 0;
  for (const Session& s : sessions) {
    max_ranks = std::max(max_ranks, static_cast<std::size_t>(s.layout.total()));
  }
  std::vector<double> log_sum(max_ranks, 0.0);
  std::vector<std::size_t> count(max_ranks, 0);
  for (const Session& session : sessions) {
    const std::vector<double> q = predict(session);
    if (q.size() != static_cast<std::size_t>(session.layout.total())) {
      throw NumericalError("predictor returned wrong number of ranks");
    }
    const std::vector<std::uint8_t> labels = interaction_labels(session);
    for (std::size_t r = 0; r < q.size(); ++r) {
      const double qc = clamp_probability(q[r]);
      log_sum[r] += labels[r] ? std::log2(qc) : std::log2(1.0 - qc);
      ++count[r];
    }
  }
  PerplexityReport report;
  report.per_rank.resize(max_ranks);
  report.sessions_per_rank = count;
  double total = 0.0;
  for (std::size_t r = 0; r < max_ranks; ++r) {
    report.per_rank[r] =
        std::exp2(-log_sum[r] / static_cast<double>(count[r]));
    total += report.per_rank[r];
  }
  report.overall = total / static_cast<double>(max_ranks);
  return report;
}

double perplexity_improvement(double model, double baseline) {
  if (!(baseline > 1.0)) {
    throw DataError("improvement undefined for baseline perplexity <= 1");
  }
  return (baseline - model) / (baseline - 1.0);
}

std::vector<double> gubm_predict_q(const Session& session,
                                   const ParameterStore& params,
                                   const DirectionPolicy& policy) {
  std::vector<double> miss(session.layout.total(), 1.0);
  detail::walk_session_factors(
      session, policy, [&](const detail::PathFactor& f) {
        const double q =
            params.alpha_or_default(session.query_id,
                                    session.image_at(f.position)) *
            params.gamma_or_default(f.i, f.m, f.n);
        miss[ltor_rank(session.layout, f.position)] *= 1.0 - q;
      });
  std::vector<double> q(miss.size());
  for (std::size_t r = 0; r < miss.size(); ++r) {
    q[r] = clamp_probability(1.0 - miss[r]);
  }
  return q;
}

InteractionPredictor make_gubm_predictor(const ParameterStore& params,
                                         const DirectionPolicy& policy) {
  return [params, policy](const Session& session) {
    return gubm_predict_q(session, params, policy);
  };
}

InteractionPredictor make_constant_predictor(double q) {
  return [q](const Session& session) {
    return std::vector<double>(session.layout.total(), q);
  };
}

double dcg(const std::vector<double>& scores, int depth) {
  if (depth < 1) throw DataError("DCG depth must be at least 1");
  const std::size_t limit =
      std::min(scores.size(), static_cast<std::size_t>(depth));
  double total = 0.0;
  for (std::size_t i = 0; i < limit; ++i) {
    total += scores[i] / std::log2(static_cast<double>(i) + 2.0);
  }
  return total;
}

NdcgResult ndcg(const std::vector<double>& scores, int depth) {
  std::vector<double> ideal(scores);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double best = dcg(ideal, depth);
  NdcgResult result;
  if (best == 0.0) {
    result.all_zero = true;
    return result;
  }
  result.value = dcg(scores, depth) / best;
  return result;
}

std::vector<std::string> rerank(const std::string& query_id,
                                const std::vector<std::string>& candidates,
                                const ParameterStore& params) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return params.alpha_or_default(query_id, candidates[a]) >
                            params.alpha_or_default(query_id, candidates[b]);
                   });
  std::vector<std::string> out;
  out.reserve(candidates.size());
  for (std::size_t idx : order) out.push_back(candidates[idx]);
  return out;
}

}  // namespace gubm
