#include "gubm/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "gubm/analysis.hpp"
#include "gubm/errors.hpp"
#include "gubm/inference.hpp"
#include "gubm/logio.hpp"
#include "gubm/metrics.hpp"
#include "gubm/params.hpp"
#include "gubm/simulate.hpp"
#include "gubm/ubm.hpp"
#include "textio.hpp"

namespace gubm {

namespace {

struct FilterFlags {
  int truncation = 100;
  int min_sessions = 10;
  int max_sessions = 1000;
  bool clicks_only = false;
  std::int64_t min_dwell_ms = 0;
};

void add_filter_flags(CLI::App* cmd, FilterFlags& flags) {
  cmd->add_option("--k", flags.truncation,
                  "Keep only the first K page positions (0 disables)")
      ->capture_default_str();
  cmd->add_option("--min-sessions", flags.min_sessions,
                  "Drop queries with fewer retained sessions")
      ->capture_default_str();
  cmd->add_option("--max-sessions", flags.max_sessions,
                  "Cap retained sessions per query, first by file order "
                  "(0 disables)")
      ->capture_default_str();
  cmd->add_flag("--clicks-only", flags.clicks_only,
                "Drop hover events on ingest");
  cmd->add_option("--min-dwell", flags.min_dwell_ms,
                  "Drop hovers shorter than this many milliseconds")
      ->capture_default_str();
}

LoadFilters to_filters(const FilterFlags& flags) {
  LoadFilters f;
  f.truncation = flags.truncation;
  f.min_sessions_per_query = flags.min_sessions;
  f.max_sessions_per_query = flags.max_sessions;
  f.clicks_only = flags.clicks_only;
  f.min_hover_dwell_ms = flags.min_dwell_ms;
  return f;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Reports go to --out when given, stdout otherwise.
void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open '" + out_path + "' for writing");
  }
  out << text;
  if (!out) {
    throw DataError("failed writing '" + out_path + "'");
  }
}

std::vector<Session> load_with_fold(const std::string& log_path,
                                    const LoadFilters& filters,
                                    const std::string& manifest_path,
                                    const std::string& fold_name) {
  std::vector<Session> sessions = load_sessions(log_path, filters);
  if (!manifest_path.empty()) {
    sessions = apply_fold(sessions, load_split(manifest_path),
                          fold_from_string(fold_name));
  }
  if (sessions.empty()) {
    throw DataError("no sessions left after filters and fold selection");
  }
  return sessions;
}

// The baseline stores relevance in its own table; reranking and NDCG read
// through a ParameterStore either way.
ParameterStore relevance_of(const SavedParams& params) {
  if (params.model != "ubm") return params.store;
  ParameterStore store;
  store.default_value = params.ubm.default_value;
  for (const auto& [key, value] : params.ubm.alpha()) {
    store.set_alpha(key.first, key.second, value);
  }
  return store;
}

// 5-level relevance bucket of a ground-truth alpha, encoded in the two
// annotation facets so that merging recovers the bucket.
AnnotationRecord annotation_for(const std::string& query_id,
                                const std::string& image_id, double alpha) {
  const int merged = std::min(4, static_cast<int>(alpha * 5.0));
  AnnotationRecord record{query_id, image_id, 2, merged};
  if (merged == 0) {
    record.topical = 0;
    record.quality = 0;
  } else if (merged == 1) {
    record.topical = 1;
    record.quality = 0;
  }
  return record;
}

struct SimulateOpts {
  std::string config, out, truth, annotations_out;
};

void run_simulate(const SimulateOpts& opts) {
  const SimConfig config = parse_sim_config(read_file(opts.config));
  const SimResult result = simulate_log(config);
  save_sessions(result.sessions, opts.out);

  std::size_t events = 0;
  for (const Session& session : result.sessions) events += session.events.size();
  std::cout << "wrote " << opts.out << ": " << result.sessions.size()
            << " sessions, " << result.truth.alpha().size() / config.layout.total()
            << " queries, " << events << " events\n";

  if (!opts.truth.empty()) {
    SavedParams truth;
    truth.model = "truth";
    truth.policy = DirectionPolicy{InRowDirection::Zshape};
    truth.truncation = 0;
    truth.store = result.truth;
    save_params(truth, opts.truth);
    std::cout << "wrote " << opts.truth << ": " << result.truth.alpha().size()
              << " relevance values\n";
  }
  if (!opts.annotations_out.empty()) {
    std::vector<AnnotationRecord> records;
    for (const auto& [key, alpha] : result.truth.alpha()) {
      records.push_back(annotation_for(key.first, key.second, alpha));
    }
    save_annotations(records, opts.annotations_out);
    std::cout << "wrote " << opts.annotations_out << ": " << records.size()
              << " annotations\n";
  }
}

struct SplitOpts {
  std::string log, ratio = "7:3", out;
  std::uint64_t seed = 42;
  FilterFlags filters;
};

void run_split(const SplitOpts& opts) {
  const std::vector<std::string> parts = detail::split(opts.ratio, ':');
  if (parts.size() != 2) {
    throw CLI::ValidationError("--ratio", "expected the form A:B");
  }
  const int a = detail::parse_int(parts[0], 0);
  const int b = detail::parse_int(parts[1], 0);
  const std::vector<Session> sessions =
      load_sessions(opts.log, to_filters(opts.filters));
  const SplitManifest manifest = make_split(sessions, a, b, opts.seed);
  save_split(manifest, opts.out);
  std::cout << "wrote " << opts.out << ": " << manifest.train_ids.size()
            << " train, " << manifest.test_ids.size() << " test sessions\n";
}

struct TrainOpts {
  std::string log, manifest, fold = "train", model = "gubm",
              direction = "zshape", out;
  int iters = 40;
  double init = 0.5;
  std::optional<double> init_gamma;
  std::optional<double> epsilon;
  int workers = 0;
  FilterFlags filters;
};

void run_train(const TrainOpts& opts) {
  if (opts.model == "ubm" && opts.direction != "zshape") {
    throw CLI::ValidationError(
        "--direction", "the ubm baseline is defined over zshape order only");
  }
  LoadFilters filters = to_filters(opts.filters);
  if (opts.model == "gubm-c") {
    filters.clicks_only = true;
  }
  const std::vector<Session> sessions =
      load_with_fold(opts.log, filters, opts.manifest, opts.fold);

  EmConfig config;
  config.iterations = opts.iters;
  config.init_value = opts.init;
  config.init_gamma = opts.init_gamma;
  config.truncation = filters.truncation;
  config.convergence_epsilon = opts.epsilon;
  config.workers = opts.workers;

  SavedParams out;
  out.model = opts.model;
  out.truncation = filters.truncation;
  std::size_t observations = 0;
  int iterations_run = 0;
  double ll_first = 0.0, ll_last = 0.0;
  if (opts.model == "ubm") {
    out.policy = DirectionPolicy{InRowDirection::Zshape};
    const UbmFitResult fit = ubm_fit(sessions, config);
    out.ubm = fit.params;
    observations = fit.observation_count;
    iterations_run = fit.iterations_run;
    ll_first = fit.initial_log_likelihood;
    ll_last = fit.log_likelihood_per_iteration.back();
  } else {
    out.policy = policy_from_string(opts.direction);
    const FitResult fit = em_fit(sessions, config, out.policy);
    out.store = fit.params;
    observations = fit.occurrence_count;
    iterations_run = fit.iterations_run;
    ll_first = fit.initial_log_likelihood;
    ll_last = fit.log_likelihood_per_iteration.back();
  }
  save_params(out, opts.out);
  std::cout << "model\t" << opts.model << "\nsessions\t" << sessions.size()
            << "\nobservations\t" << observations << "\niterations\t"
            << iterations_run << "\nlog_likelihood_start\t"
            << format_value(ll_first) << "\nlog_likelihood_end\t"
            << format_value(ll_last) << "\nwrote\t" << opts.out << "\n";
}

struct EvaluateOpts {
  std::string log, manifest, fold = "test", params, metric = "perplexity",
              annotations, depths = "5,10,15,20", out, json_out;
  std::optional<double> constant;
  FilterFlags filters;
};

void evaluate_perplexity(const EvaluateOpts& opts) {
  if (opts.constant && !opts.params.empty()) {
    throw CLI::ValidationError("--constant",
                               "give either --params or --constant, not both");
  }
  if (!opts.constant && opts.params.empty()) {
    throw CLI::ValidationError("--params",
                               "perplexity needs --params or --constant");
  }
  LoadFilters filters = to_filters(opts.filters);
  InteractionPredictor predictor;
  if (opts.constant) {
    predictor = make_constant_predictor(*opts.constant);
  } else {
    const SavedParams params = load_params(opts.params);
    if (params.model == "gubm-c") {
      // A click-trained model predicts the click signal, so evaluation
      // labels must drop hovers too.
      filters.clicks_only = true;
    }
    predictor = params.model == "ubm"
                    ? make_ubm_predictor(params.ubm)
                    : make_gubm_predictor(params.store, params.policy);
  }
  const std::vector<Session> sessions =
      load_with_fold(opts.log, filters, opts.manifest, opts.fold);
  const PerplexityReport report = perplexity(sessions, predictor);

  std::ostringstream text;
  text << "rank\tperplexity\tsessions\n";
  for (std::size_t r = 0; r < report.per_rank.size(); ++r) {
    text << (r + 1) << '\t' << format_value(report.per_rank[r]) << '\t'
         << report.sessions_per_rank[r] << "\n";
  }
  text << "overall\t" << format_value(report.overall) << '\t' << sessions.size()
       << "\n";
  write_text(text.str(), opts.out);

  if (!opts.json_out.empty()) {
    nlohmann::json doc;
    doc["metric"] = "perplexity";
    doc["overall"] = report.overall;
    doc["per_rank"] = report.per_rank;
    doc["sessions"] = sessions.size();
    write_text(doc.dump(2) + "\n", opts.json_out);
  }
}

void evaluate_ndcg(const EvaluateOpts& opts) {
  if (opts.params.empty()) {
    throw CLI::ValidationError("--params", "ndcg needs a fitted --params file");
  }
  if (opts.constant) {
    throw CLI::ValidationError("--constant", "ndcg has no constant baseline");
  }
  if (opts.annotations.empty()) {
    throw CLI::ValidationError("--annotations", "ndcg needs relevance labels");
  }
  std::vector<int> depths;
  for (const std::string& part : detail::split(opts.depths, ',')) {
    const int d = detail::parse_int(part, 0);
    if (d < 1) {
      throw CLI::ValidationError("--depths", "depths must be positive");
    }
    depths.push_back(d);
  }

  const ParameterStore scores = relevance_of(load_params(opts.params));
  std::map<std::pair<std::string, std::string>, int> merged;
  for (const AnnotationRecord& record : load_annotations(opts.annotations)) {
    merged[{record.query_id, record.image_id}] =
        merge_relevance(record.topical, record.quality);
  }
  const std::vector<Session> sessions =
      load_with_fold(opts.log, to_filters(opts.filters), opts.manifest,
                     opts.fold);

  // Original ranking per query: the page of its first retained session.
  std::vector<std::pair<std::string, const Session*>> queries;
  std::unordered_map<std::string, bool> seen;
  for (const Session& session : sessions) {
    if (!seen[session.query_id]) {
      seen[session.query_id] = true;
      queries.emplace_back(session.query_id, &session);
    }
  }

  std::ostringstream text;
  text << "query\tdepth\tndcg\tall_zero\n";
  std::map<int, double> mean_sum;
  std::map<int, std::size_t> mean_count;
  std::size_t all_zero_queries = 0;
  nlohmann::json per_query = nlohmann::json::object();
  for (const auto& [query_id, session] : queries) {
    const std::vector<std::string> ranked =
        rerank(query_id, session->images, scores);
    std::vector<double> gains;
    gains.reserve(ranked.size());
    for (const std::string& image : ranked) {
      auto it = merged.find({query_id, image});
      gains.push_back(it == merged.end() ? 0.0 : it->second);
    }
    bool counted_zero = false;
    for (int d : depths) {
      const NdcgResult result = ndcg(gains, d);
      text << query_id << '\t' << d << '\t' << format_value(result.value)
           << '\t' << (result.all_zero ? 1 : 0) << "\n";
      if (result.all_zero) {
        counted_zero = true;
      } else {
        mean_sum[d] += result.value;
        mean_count[d] += 1;
      }
      per_query[query_id][std::to_string(d)] = result.value;
    }
    all_zero_queries += counted_zero;
  }
  // Unmeasurable queries (no positive gain) stay out of the means.
  nlohmann::json means = nlohmann::json::object();
  for (int d : depths) {
    const double mean =
        mean_count[d] ? mean_sum[d] / static_cast<double>(mean_count[d]) : 0.0;
    text << "mean\t" << d << '\t' << format_value(mean) << '\t'
         << all_zero_queries << "\n";
    means[std::to_string(d)] = mean;
  }
  write_text(text.str(), opts.out);

  if (!opts.json_out.empty()) {
    nlohmann::json doc;
    doc["metric"] = "ndcg";
    doc["depths"] = depths;
    doc["mean"] = means;
    doc["queries"] = queries.size();
    doc["all_zero_queries"] = all_zero_queries;
    doc["per_query"] = per_query;
    write_text(doc.dump(2) + "\n", opts.json_out);
  }
}

void run_evaluate(const EvaluateOpts& opts) {
  if (opts.metric == "perplexity") {
    evaluate_perplexity(opts);
  } else {
    evaluate_ndcg(opts);
  }
}

struct RerankOpts {
  std::string params, query, candidates;
};

void run_rerank(const RerankOpts& opts) {
  const ParameterStore scores = relevance_of(load_params(opts.params));
  std::vector<std::string> candidates;
  std::istringstream in(read_file(opts.candidates));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) candidates.push_back(line);
  }
  if (candidates.empty()) {
    throw DataError("candidate file '" + opts.candidates + "' lists no images");
  }
  for (const std::string& image : rerank(opts.query, candidates, scores)) {
    std::cout << image << "\n";
  }
}

struct AnalyzeOpts {
  std::string log, stat = "directions", out;
  FilterFlags filters;
};

void run_analyze(const AnalyzeOpts& opts) {
  const std::vector<Session> sessions =
      load_sessions(opts.log, to_filters(opts.filters));
  std::ostringstream text;
  if (opts.stat == "directions") {
    const DirectionStats stats = direction_stats(sessions);
    text << "#directions\tover=interaction-signal-pairs\n";
    text << "down_pairs\t" << stats.down_pairs << "\n";
    text << "up_pairs\t" << stats.up_pairs << "\n";
    text << "same_row_pairs\t" << stats.same_row_pairs << "\n";
    text << "empty\t" << (stats.empty ? 1 : 0) << "\n";
    text << "down_fraction\t" << format_value(stats.down_fraction) << "\n";
    text << "up_fraction\t" << format_value(stats.up_fraction) << "\n";
  } else if (opts.stat == "distances") {
    text << "#distances\tover=interaction-signal-pairs\n";
    for (const auto& [distance, fraction] :
         transition_distance_histogram(sessions)) {
      text << distance << '\t' << format_value(fraction) << "\n";
    }
  } else {
    const InteractionCounts counts = interaction_counts(sessions);
    text << "#counts\n";
    text << "sessions\t" << counts.sessions << "\n";
    text << "click_sessions\t" << counts.click_sessions << "\n";
    text << "hover_sessions\t" << counts.hover_sessions << "\n";
    text << "clicks\t" << counts.clicks << "\n";
    text << "hovers\t" << counts.hovers << "\n";
    text << "click_session_fraction\t"
         << format_value(counts.click_session_fraction) << "\n";
    text << "hover_click_ratio\t" << format_value(counts.hover_click_ratio)
         << "\n";
  }
  write_text(text.str(), opts.out);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Grid-based user browsing model toolkit"};
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Generate a synthetic interaction log");
  sim_cmd->add_option("--config", sim.config, "JSON simulation config")
      ->required()
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", sim.out, "Session log to write")->required();
  sim_cmd->add_option("--truth", sim.truth,
                      "Also write the ground-truth relevance table here");
  sim_cmd->add_option("--annotations-out", sim.annotations_out,
                      "Also write bucketed ground-truth annotations here");
  sim_cmd->callback([&] { run_simulate(sim); });

  SplitOpts split_opts;
  CLI::App* split_cmd =
      app.add_subcommand("split", "Partition sessions per query");
  split_cmd->add_option("--log", split_opts.log, "Session log")
      ->required()
      ->check(CLI::ExistingFile);
  split_cmd->add_option("--ratio", split_opts.ratio, "Train:test ratio")
      ->capture_default_str();
  split_cmd->add_option("--seed", split_opts.seed, "Shuffle seed")
      ->capture_default_str();
  split_cmd->add_option("--out", split_opts.out, "Manifest to write")
      ->required();
  add_filter_flags(split_cmd, split_opts.filters);
  split_cmd->callback([&] { run_split(split_opts); });

  TrainOpts train;
  CLI::App* train_cmd = app.add_subcommand("train", "Fit model parameters");
  train_cmd->add_option("--log", train.log, "Session log")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--split", train.manifest, "Split manifest")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--fold", train.fold, "Fold to train on")
      ->check(CLI::IsMember({"train", "test"}))
      ->capture_default_str();
  train_cmd->add_option("--model", train.model, "Model family")
      ->check(CLI::IsMember({"gubm", "gubm-c", "ubm"}))
      ->capture_default_str();
  train_cmd->add_option("--direction", train.direction, "In-row scan order")
      ->check(CLI::IsMember({"ltor", "rtol", "zshape", "zshape-r"}))
      ->capture_default_str();
  train_cmd->add_option("--iters", train.iters, "Update rounds")
      ->capture_default_str();
  train_cmd->add_option("--init", train.init, "Initial parameter value")
      ->capture_default_str();
  train_cmd->add_option("--init-gamma", train.init_gamma,
                        "Separate start value for examination entries");
  train_cmd->add_option("--epsilon", train.epsilon,
                        "Stop early when the mean parameter change drops "
                        "below this");
  train_cmd->add_option("--workers", train.workers,
                        "Worker threads (0 = all cores)")
      ->capture_default_str();
  train_cmd->add_option("--out", train.out, "Parameter file to write")
      ->required();
  add_filter_flags(train_cmd, train.filters);
  train_cmd->callback([&] { run_train(train); });

  EvaluateOpts eval;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Score a fitted model");
  eval_cmd->add_option("--log", eval.log, "Session log")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--split", eval.manifest, "Split manifest")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--fold", eval.fold, "Fold to evaluate on")
      ->check(CLI::IsMember({"train", "test"}))
      ->capture_default_str();
  eval_cmd->add_option("--params", eval.params, "Fitted parameter file")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--metric", eval.metric, "What to compute")
      ->check(CLI::IsMember({"perplexity", "ndcg"}))
      ->capture_default_str();
  eval_cmd->add_option("--constant", eval.constant,
                       "Score a constant predictor instead of --params");
  eval_cmd->add_option("--annotations", eval.annotations,
                       "Relevance annotations (ndcg)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--depths", eval.depths, "NDCG depths, comma separated")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "Report file (stdout when absent)");
  eval_cmd->add_option("--json", eval.json_out, "Machine-readable summary");
  add_filter_flags(eval_cmd, eval.filters);
  eval_cmd->callback([&] { run_evaluate(eval); });

  RerankOpts rerank_opts;
  CLI::App* rerank_cmd =
      app.add_subcommand("rerank", "Order candidates by fitted relevance");
  rerank_cmd->add_option("--params", rerank_opts.params, "Parameter file")
      ->required()
      ->check(CLI::ExistingFile);
  rerank_cmd->add_option("--query", rerank_opts.query, "Query id")->required();
  rerank_cmd
      ->add_option("--candidates", rerank_opts.candidates,
                   "File with one image id per line")
      ->required()
      ->check(CLI::ExistingFile);
  rerank_cmd->callback([&] { run_rerank(rerank_opts); });

  AnalyzeOpts analyze;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "Log statistics");
  analyze_cmd->add_option("--log", analyze.log, "Session log")
      ->required()
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--stat", analyze.stat, "Statistic to report")
      ->check(CLI::IsMember({"directions", "distances", "counts"}))
      ->capture_default_str();
  analyze_cmd->add_option("--out", analyze.out,
                          "Report file (stdout when absent)");
  add_filter_flags(analyze_cmd, analyze.filters);
  analyze_cmd->callback([&] { run_analyze(analyze); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace gubm
