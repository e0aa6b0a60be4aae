#include "gubm/inference.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "em_core.hpp"

namespace gubm {

namespace {

std::uint64_t pack_gamma(int i, int m, int n) {
  return (static_cast<std::uint64_t>(i) << 42) |
         (static_cast<std::uint64_t>(m) << 21) | static_cast<std::uint64_t>(n);
}

struct CompiledPaths {
  detail::EmProblem problem;
  std::vector<QueryImageKey> alpha_keys;
  std::vector<GammaKey> gamma_keys;
};

CompiledPaths compile(const std::vector<Session>& sessions,
                      const DirectionPolicy& policy) {
  CompiledPaths data;
  std::unordered_map<std::string, std::int32_t> alpha_index;
  std::unordered_map<std::uint64_t, std::int32_t> gamma_index;
  for (const Session& session : sessions) {
    detail::walk_session_factors(
        session, policy, [&](const detail::PathFactor& f) {
          std::string alpha_key =
              session.query_id + '\t' + session.image_at(f.position);
          auto [ait, fresh_a] = alpha_index.try_emplace(
              std::move(alpha_key),
              static_cast<std::int32_t>(data.alpha_keys.size()));
          if (fresh_a) {
            data.alpha_keys.emplace_back(session.query_id,
                                         session.image_at(f.position));
          }
          auto [git, fresh_g] = gamma_index.try_emplace(
              pack_gamma(f.i, f.m, f.n),
              static_cast<std::int32_t>(data.gamma_keys.size()));
          if (fresh_g) {
            data.gamma_keys.emplace_back(f.i, f.m, f.n);
          }
          data.problem.add(ait->second, git->second, f.is_endpoint);
        });
  }
  data.problem.alpha_count = data.alpha_keys.size();
  data.problem.gamma_count = data.gamma_keys.size();
  return data;
}

}  // namespace

namespace detail {

void walk_session_factors(const Session& session, const DirectionPolicy& policy,
                          const std::function<void(const PathFactor&)>& fn) {
  const InteractionSequence seq = build_sequence(session);
  const std::size_t pairs = seq.signals.size() - 1;
  // The sequence stores the session end as the bottom-right cell; the scan
  // actually stops at the highest linearized index, which is a different cell
  // when the policy walks the last row right to left.
  const GridPosition scan_end =
      delinearize(session.layout, session.layout.total() - 1, policy);
  for (std::size_t t = 0; t < pairs; ++t) {
    const bool virtual_end = (t + 1 == pairs);
    const GridPosition target = virtual_end ? scan_end : seq.signals[t + 1];
    const ImagePath path =
        build_path(session.layout, seq.signals[t], target, policy);
    const int step = path.direction == PathDirection::Down ? 1 : -1;
    const std::size_t len = path.positions.size();
    for (std::size_t idx = 1; idx < len; ++idx) {
      const bool at_end = (idx + 1 == len);
      if (at_end && virtual_end) break;
      fn(PathFactor{path.positions[idx],
                    path.start_lin + step * static_cast<int>(idx),
                    path.start_lin, path.end_lin, at_end});
    }
    // Single-position pair: the interacted image is the whole path.
    if (len == 1 && !virtual_end) {
      fn(PathFactor{path.positions[0], path.end_lin, path.start_lin,
                    path.end_lin, true});
    }
  }
}

}  // namespace detail

std::vector<Occurrence> extract_occurrences(
    const std::vector<Session>& sessions, const DirectionPolicy& policy) {
  std::vector<Occurrence> out;
  for (const Session& session : sessions) {
    detail::walk_session_factors(
        session, policy, [&](const detail::PathFactor& f) {
          out.push_back(Occurrence{session.query_id,
                                   session.image_at(f.position), f.i, f.m, f.n,
                                   f.is_endpoint});
        });
  }
  return out;
}

FitResult em_fit(const std::vector<Session>& sessions, const EmConfig& config,
                 const DirectionPolicy& policy) {
  const CompiledPaths data = compile(sessions, policy);
  if (data.problem.size() == 0) {
    throw DataError("no training evidence: sessions yield zero occurrences");
  }
  const detail::EmSolution sol =
      detail::run_em(data.problem, config.iterations, config.init_value,
                     config.init_gamma, config.convergence_epsilon,
                     config.workers);

  FitResult result;
  result.occurrence_count = data.problem.size();
  result.initial_log_likelihood = sol.initial_log_likelihood;
  result.log_likelihood_per_iteration = sol.log_likelihood_per_iteration;
  result.iterations_run = sol.iterations_run;
  result.params.default_value = config.init_value;
  for (std::size_t p = 0; p < sol.alpha.size(); ++p) {
    result.params.set_alpha(data.alpha_keys[p].first, data.alpha_keys[p].second,
                            sol.alpha[p]);
  }
  for (std::size_t p = 0; p < sol.gamma.size(); ++p) {
    const auto& [i, m, n] = data.gamma_keys[p];
    result.params.set_gamma(i, m, n, sol.gamma[p]);
  }
  return result;
}

double pair_likelihood(const Session& session, const ImagePath& path,
                       const ParameterStore& params, bool ends_at_virtual_end) {
  const int step = path.direction == PathDirection::Down ? 1 : -1;
  const std::size_t len = path.positions.size();
  if (len == 1) {
    if (ends_at_virtual_end) return 1.0;
    const double a = params.alpha_or_default(
        session.query_id, session.image_at(path.positions[0]));
    return a * params.gamma_or_default(path.end_lin, path.start_lin,
                                       path.end_lin);
  }
  double prob = 1.0;
  for (std::size_t idx = 1; idx < len; ++idx) {
    const bool at_end = (idx + 1 == len);
    if (at_end && ends_at_virtual_end) break;
    const int i = path.start_lin + step * static_cast<int>(idx);
    const double a = params.alpha_or_default(
        session.query_id, session.image_at(path.positions[idx]));
    const double g = params.gamma_or_default(i, path.start_lin, path.end_lin);
    prob *= at_end ? a * g : 1.0 - a * g;
  }
  return prob;
}

double log_likelihood(const std::vector<Session>& sessions,
                      const ParameterStore& params,
                      const DirectionPolicy& policy) {
  double total = 0.0;
  for (const Session& session : sessions) {
    detail::walk_session_factors(
        session, policy, [&](const detail::PathFactor& f) {
          const double q =
              params.alpha_or_default(session.query_id,
                                      session.image_at(f.position)) *
              params.gamma_or_default(f.i, f.m, f.n);
          total += f.is_endpoint ? std::log(q) : std::log1p(-q);
        });
  }
  return total;
}

}  // namespace gubm
