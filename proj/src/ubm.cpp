#include "gubm/ubm.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "em_core.hpp"

namespace gubm {

namespace {

const DirectionPolicy kZshape{InRowDirection::Zshape};

std::uint64_t pack_rank_dist(int rank, int dist) {
  return (static_cast<std::uint64_t>(rank) << 21) |
         static_cast<std::uint64_t>(dist);
}

struct CompiledScan {
  detail::EmProblem problem;
  std::vector<QueryImageKey> alpha_keys;
  std::vector<std::pair<int, int>> gamma_keys;
};

CompiledScan compile(const std::vector<Session>& sessions) {
  CompiledScan data;
  std::unordered_map<std::string, std::int32_t> alpha_index;
  std::unordered_map<std::uint64_t, std::int32_t> gamma_index;
  for (const Session& session : sessions) {
    detail::walk_ubm_observations(
        session, [&](const detail::UbmObservation& obs) {
          std::string alpha_key =
              session.query_id + '\t' + session.image_at(obs.position);
          auto [ait, fresh_a] = alpha_index.try_emplace(
              std::move(alpha_key),
              static_cast<std::int32_t>(data.alpha_keys.size()));
          if (fresh_a) {
            data.alpha_keys.emplace_back(session.query_id,
                                         session.image_at(obs.position));
          }
          auto [git, fresh_g] = gamma_index.try_emplace(
              pack_rank_dist(obs.rank, obs.dist),
              static_cast<std::int32_t>(data.gamma_keys.size()));
          if (fresh_g) {
            data.gamma_keys.emplace_back(obs.rank, obs.dist);
          }
          data.problem.add(ait->second, git->second, obs.interacted);
        });
  }
  data.problem.alpha_count = data.alpha_keys.size();
  data.problem.gamma_count = data.gamma_keys.size();
  return data;
}

}  // namespace

namespace detail {

void walk_ubm_observations(
    const Session& session,
    const std::function<void(const UbmObservation&)>& fn) {
  const std::size_t total = session.layout.total();
  std::vector<std::uint8_t> hit(total, 0);
  for (const InteractionEvent& event : session.events) {
    hit[linearize(session.layout, event.position, kZshape)] = 1;
  }
  int r_last = -1;
  for (std::size_t r = 0; r < total; ++r) {
    const int rank = static_cast<int>(r);
    fn(UbmObservation{rank, rank - r_last,
                      delinearize(session.layout, rank, kZshape),
                      hit[r] != 0});
    if (hit[r]) r_last = rank;
  }
}

}  // namespace detail

UbmFitResult ubm_fit(const std::vector<Session>& sessions,
                     const EmConfig& config) {
  const CompiledScan data = compile(sessions);
  if (data.problem.size() == 0) {
    throw DataError("no training evidence: sessions yield zero ranks");
  }
  const detail::EmSolution sol =
      detail::run_em(data.problem, config.iterations, config.init_value,
                     config.init_gamma, config.convergence_epsilon,
                     config.workers);

  UbmFitResult result;
  result.observation_count = data.problem.size();
  result.initial_log_likelihood = sol.initial_log_likelihood;
  result.log_likelihood_per_iteration = sol.log_likelihood_per_iteration;
  result.iterations_run = sol.iterations_run;
  result.params.default_value = config.init_value;
  for (std::size_t p = 0; p < sol.alpha.size(); ++p) {
    result.params.set_alpha(data.alpha_keys[p].first, data.alpha_keys[p].second,
                            sol.alpha[p]);
  }
  for (std::size_t p = 0; p < sol.gamma.size(); ++p) {
    result.params.set_gamma(data.gamma_keys[p].first, data.gamma_keys[p].second,
                            sol.gamma[p]);
  }
  return result;
}

std::vector<double> ubm_predict_q(const Session& session,
                                  const UbmParameters& params) {
  const DirectionPolicy ltor{InRowDirection::LtoR};
  std::vector<double> q(session.layout.total(), 0.0);
  detail::walk_ubm_observations(
      session, [&](const detail::UbmObservation& obs) {
        const double value =
            params.alpha_or_default(session.query_id,
                                    session.image_at(obs.position)) *
            params.gamma_or_default(obs.rank, obs.dist);
        q[linearize(session.layout, obs.position, ltor)] =
            detail::clamp_unit_probability(value);
      });
  return q;
}

InteractionPredictor make_ubm_predictor(const UbmParameters& params) {
  return [params](const Session& session) {
    return ubm_predict_q(session, params);
  };
}

double ubm_log_likelihood(const std::vector<Session>& sessions,
                          const UbmParameters& params) {
  double total = 0.0;
  for (const Session& session : sessions) {
    detail::walk_ubm_observations(
        session, [&](const detail::UbmObservation& obs) {
          const double q =
              params.alpha_or_default(session.query_id,
                                      session.image_at(obs.position)) *
              params.gamma_or_default(obs.rank, obs.dist);
          total += obs.interacted ? std::log(q) : std::log1p(-q);
        });
  }
  return total;
}

}  // namespace gubm
