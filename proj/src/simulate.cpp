#include "gubm/simulate.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "gubm/errors.hpp"

namespace gubm {

namespace {

void check_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DataError(std::string(what) + " must lie in [0,1]");
  }
}

void validate_config(const SimConfig& config) {
  check_probability(config.p_down, "p_down");
  check_probability(config.click_given_interaction, "click_given_interaction");
  check_probability(config.gamma_family.scale_down, "gamma scale_down");
  check_probability(config.gamma_family.decay_down, "gamma decay_down");
  check_probability(config.gamma_family.scale_up, "gamma scale_up");
  check_probability(config.gamma_family.decay_up, "gamma decay_up");
  if (config.max_signals < 1) {
    throw DataError("max_signals must be at least 1");
  }
  if (config.sessions_per_query < 1) {
    throw DataError("sessions_per_query must be at least 1");
  }
  if (config.true_alpha.empty()) {
    throw DataError("simulation needs at least one query with relevance values");
  }
  for (const auto& [key, value] : config.true_alpha) {
    check_probability(value, "true_alpha");
  }
}

DirectionPolicy resolve_policy(WalkPolicy walk, int session_index) {
  switch (walk) {
    case WalkPolicy::LtoR:
      return DirectionPolicy{InRowDirection::LtoR};
    case WalkPolicy::RtoL:
      return DirectionPolicy{InRowDirection::RtoL};
    case WalkPolicy::Zshape:
      return DirectionPolicy{InRowDirection::Zshape};
    case WalkPolicy::Mixed:
      break;
  }
  switch (session_index % 3) {
    case 0:
      return DirectionPolicy{InRowDirection::LtoR};
    case 1:
      return DirectionPolicy{InRowDirection::RtoL};
    default:
      return DirectionPolicy{InRowDirection::Zshape};
  }
}

}  // namespace

double GammaFamily::operator()(int offset, PathDirection direction) const {
  const bool down = direction == PathDirection::Down;
  const double scale = down ? scale_down : scale_up;
  const double decay = down ? decay_down : decay_up;
  return scale * std::pow(decay, offset - 1);
}

WalkPolicy walk_policy_from_string(const std::string& text) {
  if (text == "ltor") return WalkPolicy::LtoR;
  if (text == "rtol") return WalkPolicy::RtoL;
  if (text == "zshape") return WalkPolicy::Zshape;
  if (text == "mixed") return WalkPolicy::Mixed;
  throw DataError("unknown walk policy: " + text);
}

std::string walk_policy_to_string(WalkPolicy policy) {
  switch (policy) {
    case WalkPolicy::LtoR:
      return "ltor";
    case WalkPolicy::RtoL:
      return "rtol";
    case WalkPolicy::Zshape:
      return "zshape";
    case WalkPolicy::Mixed:
      return "mixed";
  }
  throw DataError("unknown walk policy value");
}

GridLayout SimConfig::default_sim_layout(std::uint64_t seed) {
  SplitMix64 rng{seed};
  std::vector<int> rows(10);
  for (int& width : rows) {
    width = 4 + static_cast<int>(rng.below(3));
  }
  return GridLayout(rows);
}

void add_query(SimConfig& config, const std::string& query_id,
               const std::vector<double>& alpha_values) {
  if (alpha_values.empty()) {
    throw DataError("add_query needs at least one relevance value");
  }
  const std::size_t total = config.layout.total();
  for (std::size_t k = 0; k < total; ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "_i%04d", static_cast<int>(k));
    config.true_alpha[{query_id, query_id + name}] =
        alpha_values[k % alpha_values.size()];
  }
}

Session simulate_session(const SimConfig& config, const std::string& query_id,
                         const std::string& session_id,
                         const std::vector<std::string>& images,
                         const DirectionPolicy& policy, SplitMix64& rng) {
  Session session;
  session.session_id = session_id;
  session.query_id = query_id;
  session.layout = config.layout;
  session.images = images;
  const int total = static_cast<int>(config.layout.total());

  int current = 0;  // scan position of the latest signal; starts virtual
  bool at_virtual_start = true;
  for (int signals = 0; signals < config.max_signals; ++signals) {
    const PathDirection direction =
        at_virtual_start || rng.uniform01() < config.p_down
            ? PathDirection::Down
            : PathDirection::Up;
    const int step = direction == PathDirection::Down ? 1 : -1;
    int found = -1;
    for (int i = current + step; i >= 0 && i < total; i += step) {
      const int offset = std::abs(i - current);
      if (rng.uniform01() >= config.gamma_family(offset, direction)) {
        continue;  // not examined
      }
      const GridPosition pos = delinearize(config.layout, i, policy);
      const auto alpha_it =
          config.true_alpha.find({query_id, session.image_at(pos)});
      if (alpha_it == config.true_alpha.end()) {
        throw DataError("no ground-truth relevance for query " + query_id +
                        " image " + session.image_at(pos));
      }
      if (rng.uniform01() < alpha_it->second) {
        found = i;
        break;
      }
    }
    if (found < 0) break;  // walked off the grid without interacting
    const GridPosition pos = delinearize(config.layout, found, policy);
    const EventKind kind = rng.uniform01() < config.click_given_interaction
                               ? EventKind::Click
                               : EventKind::Hover;
    session.events.push_back(InteractionEvent{
        100 * static_cast<std::int64_t>(session.events.size() + 1), kind, pos});
    current = found;
    at_virtual_start = false;
  }
  return session;
}

SimResult simulate_log(const SimConfig& config) {
  validate_config(config);
  SimResult out;
  out.truth.default_value = 0.5;
  for (const auto& [key, value] : config.true_alpha) {
    out.truth.set_alpha(key.first, key.second, value);
  }

  // Group images per query; map order makes the grouping deterministic.
  std::vector<std::pair<std::string, std::vector<std::string>>> queries;
  for (const auto& [key, value] : config.true_alpha) {
    if (queries.empty() || queries.back().first != key.first) {
      queries.emplace_back(key.first, std::vector<std::string>{});
    }
    queries.back().second.push_back(key.second);
  }
  for (const auto& [query_id, images] : queries) {
    if (images.size() != static_cast<std::size_t>(config.layout.total())) {
      throw DataError("query " + query_id + " maps " +
                      std::to_string(images.size()) + " images, layout holds " +
                      std::to_string(config.layout.total()));
    }
  }

  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto& [query_id, images] = queries[q];
    for (int s = 0; s < config.sessions_per_query; ++s) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_s%05d", s);
      SplitMix64 rng = derive_stream(config.seed, q, static_cast<std::uint64_t>(s));
      out.sessions.push_back(simulate_session(
          config, query_id, query_id + suffix, images,
          resolve_policy(config.walk_policy, s), rng));
    }
  }
  return out;
}

SimConfig parse_sim_config(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("config root must be a JSON object");

  static const char* known_keys[] = {
      "layout",      "seed",      "p_down",
      "walk_policy", "sessions_per_query", "max_signals",
      "click_given_interaction", "gamma", "queries", "generate"};
  for (const auto& [key, value] : doc.items()) {
    bool recognized = false;
    for (const char* k : known_keys) recognized = recognized || key == k;
    if (!recognized) throw DataError("unknown config key: " + key);
  }

  SimConfig config;
  try {
    // Layout first: query generation sizes pages from it.
    if (doc.contains("layout")) {
      config.layout = GridLayout(doc["layout"].get<std::vector<int>>());
    }
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("p_down")) config.p_down = doc["p_down"].get<double>();
    if (doc.contains("walk_policy")) {
      config.walk_policy =
          walk_policy_from_string(doc["walk_policy"].get<std::string>());
    }
    if (doc.contains("sessions_per_query")) {
      config.sessions_per_query = doc["sessions_per_query"].get<int>();
    }
    if (doc.contains("max_signals")) {
      config.max_signals = doc["max_signals"].get<int>();
    }
    if (doc.contains("click_given_interaction")) {
      config.click_given_interaction =
          doc["click_given_interaction"].get<double>();
    }
    if (doc.contains("gamma")) {
      for (const auto& [gk, gv] : doc["gamma"].items()) {
        if (gk == "scale_down") config.gamma_family.scale_down = gv.get<double>();
        else if (gk == "decay_down") config.gamma_family.decay_down = gv.get<double>();
        else if (gk == "scale_up") config.gamma_family.scale_up = gv.get<double>();
        else if (gk == "decay_up") config.gamma_family.decay_up = gv.get<double>();
        else throw DataError("unknown gamma key: " + gk);
      }
    }
    if (doc.contains("queries")) {
      for (const auto& [query_id, images] : doc["queries"].items()) {
        for (const auto& [image_id, alpha] : images.items()) {
          config.true_alpha[{query_id, image_id}] = alpha.get<double>();
        }
      }
    }
    if (doc.contains("generate")) {
      int num_queries = 0;
      std::vector<double> alpha_values;
      for (const auto& [gk, gv] : doc["generate"].items()) {
        if (gk == "num_queries") num_queries = gv.get<int>();
        else if (gk == "alpha_values") alpha_values = gv.get<std::vector<double>>();
        else throw DataError("unknown generate key: " + gk);
      }
      if (num_queries < 1 || alpha_values.empty()) {
        throw DataError(
            "generate needs num_queries >= 1 and non-empty alpha_values");
      }
      for (int q = 0; q < num_queries; ++q) {
        char name[32];
        std::snprintf(name, sizeof(name), "q%03d", q);
        // Rotate so every page carries the full value range but no two
        // queries assign it identically.
        std::vector<double> rotated(alpha_values.size());
        for (std::size_t k = 0; k < alpha_values.size(); ++k) {
          rotated[k] = alpha_values[(k + q) % alpha_values.size()];
        }
        add_query(config, name, rotated);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config field has the wrong type: ") + e.what());
  }
  return config;
}

}  // namespace gubm
