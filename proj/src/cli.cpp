// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include "fracsample/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "fracsample/analysis.hpp"
#include "fracsample/config.hpp"
#include "fracsample/error.hpp"
#include "fracsample/metrics.hpp"
#include "fracsample/orchestrator.hpp"
#include "fracsample/store.hpp"
#include "fracsample/synthetic.hpp"

namespace fracsample {
namespace {

using nlohmann::json;

struct Globals {
  std::string config;
  std::string run_id;
  std::string out;
};

struct Env {
  std::ostream& out;
  std::ostream& err;
  Globals g;
};

std::optional<RunConfig> maybe_config(const Globals& g) {
  if (g.config.empty()) return std::nullopt;
  return load_run_config(g.config);
}

std::string resolve_run_id(const Globals& g, const std::optional<RunConfig>& cfg) {
  if (!g.run_id.empty()) return g.run_id;
  if (cfg && !cfg->run_id.empty()) return cfg->run_id;
  throw ConfigError("no run id: pass --run-id or set \"run_id\" in the config");
}

std::filesystem::path resolve_out(const Globals& g, const std::optional<RunConfig>& cfg) {
  if (!g.out.empty()) return g.out;
  if (cfg) return cfg->out_dir;
  return "runs";
}

TraceStore open_existing(const Globals& g) {
  const auto cfg = maybe_config(g);
  const auto run_id = resolve_run_id(g, cfg);
  const auto root = resolve_out(g, cfg);
  if (!TraceStore::exists(root, run_id)) {
    throw ConfigError("run '" + run_id + "' not found under " + root.string());
  }
  return TraceStore(root, run_id);
}

SamplingPlan stored_plan(const TraceStore& store) {
  const auto summary = store.read_summary();
  if (!summary.contains("plan")) {
    throw ConfigError("run '" + store.run_id() + "' has no plan in " + store.summary_path().string());
  }
  return summary.at("plan").get<SamplingPlan>();
}

void print(Env& env, const json& j) { env.out << j.dump(2) << '\n'; }

std::filesystem::path analysis_dir(const TraceStore& store) {
  auto dir = store.dir() / "analysis";
  std::filesystem::create_directories(dir);
  return dir;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw StoreError("cannot write " + path.string());
  f.precision(17);
  return f;
}

// run ------------------------------------------------------------------------

struct RunArgs {
  bool dry_run = false;
  int max_inflight = 0;
};

int cmd_run(Env& env, const RunArgs& a) {
  if (env.g.config.empty()) throw ConfigError("run needs --config");
  auto cfg = load_run_config(env.g.config);
  const auto run_id = resolve_run_id(env.g, cfg);
  const auto root = resolve_out(env.g, cfg);
  const auto questions = load_corpus(cfg.corpus);

  if (a.dry_run) {
    const auto cost = projected_costs(cfg, questions);
    const auto& p = cfg.plan;
    const double per_q = compute_budget(p.n, p.m, p.depth_count(), cost.thinking_tokens,
                                        cost.solution_tokens);
    const auto q = static_cast<long long>(questions.size());
    print(env, {{"dry_run", true},
                {"run_id", run_id},
                {"questions", q},
                {"requests", q * p.requests_per_question()},
                {"thinking_requests", q * p.n},
                {"solution_requests", q * p.n * p.depth_count() * p.m},
                {"c_thinking", cost.thinking_tokens},
                {"c_solution", cost.solution_tokens},
                {"budget_per_question", per_q},
                {"projected_budget", per_q * static_cast<double>(q)}});
    return kExitOk;
  }

  if (TraceStore::exists(root, run_id)) {
    throw ConfigError("run '" + run_id + "' already exists under " + root.string());
  }
  auto backend = make_backend(cfg);
  TraceStore store(root, run_id);
  RunOptions options;
  options.max_inflight = a.max_inflight > 0 ? a.max_inflight : cfg.max_inflight;
  options.answer_cue = cfg.answer_cue;
  const auto summary = run_plan(cfg.plan, questions, *backend, store, options);

  if (const auto* s = std::get_if<SyntheticConfig>(&cfg.backend); s && s->scorer) {
    for (const auto& score : synthetic_scores(store.load(), *s->scorer)) store.append_score(score);
  }
  auto j = summary_to_json(summary);
  store.write_summary(j);
  print(env, j);
  if (summary.failures > 0) {
    env.err << "fracsample: " << summary.failures << " of "
            << summary.records << " requests failed; see failure records in "
            << store.records_path().string() << '\n';
    return kExitPartial;
  }
  return kExitOk;
}

// simulate -------------------------------------------------------------------

struct SimulateArgs {
  long long draws = 100000;
  int m = 1;
  std::uint64_t seed = 0;
  std::string table;
};

int cmd_simulate(Env& env, const SimulateArgs& a) {
  if (!a.table.empty()) {
    std::ifstream in(a.table);
    if (!in) throw ConfigError("cannot open table file " + a.table);
    const auto table = JointTable::from_json(json::parse(in));
    const auto terms = expansion_terms(table);
    print(env, {{"K", table.K()},
                {"all_fail", terms.all_fail},
                {"p_seg", 1.0 - terms.all_fail},
                {"product", terms.product_of_marginals},
                {"pairwise_covariance", terms.pairwise_covariance_sum},
                {"remainder", terms.higher_order_remainder},
                {"independent_p_seg", 1.0 - terms.product_of_marginals}});
    return kExitOk;
  }
  const auto cfg = maybe_config(env.g);
  if (!cfg || !cfg->synthetic()) {
    throw ConfigError("simulate needs --table or a config with a synthetic backend");
  }
  if (a.draws < 1 || a.m < 1) throw ConfigError("simulate: --draws and --m must be positive");
  const auto& model = std::get<SyntheticConfig>(cfg->backend).model;
  const LatentFailureSampler sampler(model);
  const auto H = static_cast<std::size_t>(model.H);

  std::vector<long long> fail(H, 0);
  long long all_fail = 0;
  for (long long d = 0; d < a.draws; ++d) {
    const auto seed = derive_seed(a.seed, SampleKey{"simulate", 1, 0, static_cast<int>(d % 1000000007)},
                                  SeedKind::solution) ^ static_cast<std::uint64_t>(d);
    bool all = true;
    for (int j = 1; j <= a.m; ++j) {
      const auto f = sampler.failures(seed, j);
      for (std::size_t t = 0; t < H; ++t) {
        if (j == 1) fail[t] += f[t] ? 1 : 0;
        all = all && f[t];
      }
    }
    all_fail += all ? 1 : 0;
  }
  double independent_all_fail = 1.0;
  json marginals = json::array();
  for (std::size_t t = 0; t < H; ++t) {
    const double q = model.failure_probability(static_cast<int>(t + 1));
    independent_all_fail *= std::pow(q, a.m);
    marginals.push_back({{"t", t + 1},
                         {"failure", q},
                         {"empirical", static_cast<double>(fail[t]) / static_cast<double>(a.draws)}});
  }
  const double p_hat = 1.0 - static_cast<double>(all_fail) / static_cast<double>(a.draws);
  print(env, {{"H", model.H},
              {"m", a.m},
              {"draws", a.draws},
              {"seed", a.seed},
              {"marginals", marginals},
              {"p_seg", p_hat},
              {"independent_p_seg", 1.0 - independent_all_fail}});
  return kExitOk;
}

// analyze --------------------------------------------------------------------

struct AnalyzeArgs {
  std::vector<long long> ks{1, 2, 4, 8, 16};
  std::vector<long long> caps;
};

std::vector<PassPoint> feasible_curve(const std::vector<SamplePool>& pools, Axis axis, int H,
                                      const std::vector<long long>& ks, json& skipped) {
  const auto sel = axis_selection(axis, H);
  std::vector<PassPoint> curve;
  for (long long k : ks) {
    try {
      curve.push_back(pool_pass_at_k(pools, k, sel.filter, sel.grouping));
    } catch (const DomainError& e) {
      skipped.push_back({{"axis", std::string(to_string(axis))}, {"k", k}, {"reason", e.what()}});
    }
  }
  return curve;
}

json curve_json(std::span<const PassPoint> curve) {
  json arr = json::array();
  for (const auto& p : curve) arr.push_back({{"k", p.k}, {"budget", p.budget}, {"value", p.value}});
  return arr;
}

int cmd_analyze(Env& env, const AnalyzeArgs& a) {
  const auto store = open_existing(env.g);
  const auto plan = stored_plan(store);
  const auto records = store.load();
  const auto pools = build_pools(records);
  const auto dir = analysis_dir(store);

  json result = {{"run_id", store.run_id()},
                 {"H", plan.H},
                 {"metadata",
                  {{"budget", "tokens per question, summed over the samples of a question and "
                              "averaged over questions"},
                   {"grouping", {{"n", "pooled"}, {"m", "per_prefix"}, {"H", "per_trajectory"}}}}}};
  json skipped = json::array();
  auto curves_csv = open_output(dir / "curves.csv");
  write_curve_csv_header(curves_csv);
  for (Axis axis : {Axis::n, Axis::m, Axis::H}) {
    const auto curve = feasible_curve(pools, axis, plan.H, a.ks, skipped);
    write_curve_csv(curves_csv, to_string(axis), curve);
    result["curves"][std::string(to_string(axis))] = curve_json(curve);
  }
  result["skipped"] = skipped;

  if (plan.depth_count() == plan.H) {
    const auto acc = accuracy_by_depth(pools, plan.H);
    auto csv = open_output(dir / "accuracy_by_depth.csv");
    csv << "t,accuracy\n";
    for (std::size_t t = 0; t < acc.size(); ++t) csv << t + 1 << ',' << acc[t] << '\n';
    result["accuracy_by_depth"] = acc;
  }

  std::vector<long long> caps = a.caps;
  if (caps.empty()) {
    std::set<long long> distinct;
    for (const auto& r : records) {
      if (r.kind == RecordKind::solution) {
        distinct.insert(static_cast<long long>(r.cumulative_thinking_tokens) + r.token_count);
      }
    }
    caps.assign(distinct.begin(), distinct.end());
  }
  if (!caps.empty()) {
    const auto curve = accuracy_vs_budget_curve(records, caps);
    auto csv = open_output(dir / "budget_curve.csv");
    csv << "cap,truncated_accuracy,full_cot_accuracy\n";
    json arr = json::array();
    for (const auto& p : curve) {
      csv << p.cap << ',' << p.truncated_accuracy << ',' << p.full_cot_accuracy << '\n';
      arr.push_back({{"cap", p.cap},
                     {"truncated_accuracy", p.truncated_accuracy},
                     {"full_cot_accuracy", p.full_cot_accuracy}});
    }
    result["budget_curve"] = arr;
  }
  print(env, result);
  return kExitOk;
}

// fit ------------------------------------------------------------------------

struct FitArgs {
  std::string axis = "all";
  std::vector<long long> ks{1, 2, 4, 8, 16};
  bool cells = false;
};

int cmd_fit(Env& env, const FitArgs& a) {
  const auto store = open_existing(env.g);
  const auto plan = stored_plan(store);
  const auto pools = build_pools(store.load());
  const auto dir = analysis_dir(store);

  std::vector<Axis> axes;
  if (a.axis == "all") {
    axes = {Axis::n, Axis::m, Axis::H};
  } else {
    axes = {axis_from_string(a.axis)};
  }
  json result = {{"run_id", store.run_id()}, {"log_base", "e"}};
  json skipped = json::array();
  std::map<std::string, ScalingFit> fits;
  auto csv = open_output(dir / "fits.csv");
  csv << "label,slope,intercept,residual_ss,points\n";
  auto emit = [&](const ScalingFit& f) {
    csv << f.label << ',' << f.slope << ',' << f.intercept << ',' << f.residual_ss << ','
        << f.points << '\n';
    result["fits"].push_back(fit_to_json(f));
  };
  for (Axis axis : axes) {
    const auto curve = feasible_curve(pools, axis, plan.H, a.ks, skipped);
    const auto points = to_fit_points(curve);
    auto fit = fit_scaling(points, std::string(to_string(axis)));
    emit(fit);
    fits.emplace(fit.label, std::move(fit));
  }
  if (axes.size() == 3) result["slopes"] = slope_report_to_json(compare_axis_slopes(fits));
  if (a.cells) {
    std::vector<SchemeCell> cells;
    for (const auto& c : default_scheme_cells(plan.H)) {
      if (c.m <= plan.m) {
        cells.push_back(c);
      } else {
        skipped.push_back({{"cell", c.label}, {"reason", "plan has m = " + std::to_string(plan.m)}});
      }
    }
    std::vector<long long> ns;
    for (long long n : default_n_sweep()) {
      if (n <= plan.n) ns.push_back(n);
    }
    for (const auto& f : conditioned_fit(conditioned_points(pools, plan.H, cells, ns))) emit(f);
  }
  result["skipped"] = skipped;
  print(env, result);
  return kExitOk;
}

// corr -----------------------------------------------------------------------

int cmd_corr(Env& env, const std::string& mode) {
  const auto store = open_existing(env.g);
  const auto plan = stored_plan(store);
  const auto unit = observation_unit_from_string(mode);
  const auto tensor = FailureTensor::from_pools(build_pools(store.load()), plan.H);
  const auto m = failure_correlation(tensor, unit);
  auto csv = open_output(analysis_dir(store) / "correlation.csv");
  write_correlation_csv(csv, m);
  print(env, correlation_to_json(m, unit));
  return kExitOk;
}

// bon ------------------------------------------------------------------------

struct BonArgs {
  int window = 0;
  int m = 0;
  std::string scorer;
};

int cmd_bon(Env& env, const BonArgs& a) {
  const auto store = open_existing(env.g);
  if (!store.has_scores()) {
    env.err << "fracsample: no scores for run '" << store.run_id() << "'; expected "
            << store.scores_path().string() << '\n';
    return kExitError;
  }
  const auto plan = stored_plan(store);
  const int window = a.window > 0 ? a.window : plan.H;
  const int m = a.m > 0 ? a.m : plan.m;
  const auto report = best_of_n_accuracy(build_pools(store.load()), store.load_scores(), plan.H,
                                         window, m, a.scorer);
  json sel = json::array();
  for (const auto& s : report.selections) {
    json row = {{"question_id", s.question_id}, {"candidates", s.candidates}, {"correct", s.correct}};
    if (s.candidates > 0) {
      row["selected"] = s.selected;
      row["score"] = s.score;
    }
    sel.push_back(std::move(row));
  }
  print(env, {{"run_id", store.run_id()},
              {"window", window},
              {"m", m},
              {"accuracy", report.accuracy},
              {"questions", report.selections.size()},
              {"selections", sel}});
  return kExitOk;
}

// earlystop ------------------------------------------------------------------

struct EarlyStopArgs {
  bool replay = false;
  int start = 0;
  int interval = 0;
  int threshold = 0;
  int max_tokens = 0;
};

EarlyStopPolicy resolve_policy(const std::optional<RunConfig>& cfg, const EarlyStopArgs& a) {
  EarlyStopPolicy p = cfg && cfg->early_stop ? *cfg->early_stop : EarlyStopPolicy{};
  if (a.start > 0) p.start_tokens = a.start;
  if (a.interval > 0) p.interval_tokens = a.interval;
  if (a.threshold > 0) p.repeat_threshold = a.threshold;
  if (a.max_tokens > 0) p.max_tokens = a.max_tokens;
  p.validate();
  return p;
}

json result_json(const EarlyStopResult& r) {
  json cps = json::array();
  for (const auto& c : r.checkpoints) {
    cps.push_back({{"thinking_tokens", c.thinking_tokens},
                   {"prediction", c.prediction ? json(c.prediction->canonical) : json(nullptr)}});
  }
  return {{"answer", r.answer ? json(r.answer->canonical) : json(nullptr)},
          {"tokens_used", r.tokens_used},
          {"solution_tokens", r.solution_tokens},
          {"stopped_early", r.stopped_early},
          {"checkpoints", cps}};
}

int cmd_earlystop(Env& env, const EarlyStopArgs& a) {
  const auto cfg = maybe_config(env.g);
  const auto policy = resolve_policy(cfg, a);
  json questions = json::array();
  long long used = 0, full = 0, stopped = 0, correct = 0;
  bool have_full = true;

  if (a.replay) {
    const auto store = open_existing(env.g);
    const auto records = store.load();
    json stored_full = json::object();
    if (std::filesystem::exists(store.summary_path())) {
      stored_full = store.read_summary().value("full_tokens", json::object());
    }
    std::set<std::pair<std::string, int>> episodes;
    for (const auto& r : records) {
      if (r.kind == RecordKind::thinking_chunk) episodes.insert({r.key.question_id, r.key.trajectory});
    }
    for (const auto& [qid, traj] : episodes) {
      std::vector<Checkpoint> cps;
      std::vector<std::pair<CanonicalAnswer, bool>> graded;
      for (const auto& r : records) {
        if (r.kind != RecordKind::solution || r.key.question_id != qid || r.key.trajectory != traj) continue;
        std::optional<CanonicalAnswer> pred;
        if (r.answer) pred = CanonicalAnswer::from_raw(*r.answer);
        cps.push_back({r.cumulative_thinking_tokens, pred, r.token_count});
        if (pred) graded.emplace_back(*pred, r.correct.value_or(false));
      }
      const auto res = replay_early_stop(cps, policy);
      bool ok = false;
      if (res.answer) {
        for (const auto& [ans, c] : graded) {
          if (answers_equal(ans, *res.answer)) ok = c;
        }
      }
      auto row = result_json(res);
      row["question_id"] = qid;
      row["trajectory"] = traj;
      row["correct"] = ok;
      if (stored_full.contains(qid)) {
        const long long f = stored_full.at(qid).get<long long>();
        row["full_tokens"] = f;
        row["saved_tokens"] = f - res.tokens_used;
        full += f;
      } else {
        have_full = false;
      }
      used += res.tokens_used;
      stopped += res.stopped_early ? 1 : 0;
      correct += ok ? 1 : 0;
      questions.push_back(std::move(row));
    }
  } else {
    if (!cfg) throw ConfigError("live earlystop needs --config");
    const auto run_id = resolve_run_id(env.g, cfg);
    const auto root = resolve_out(env.g, cfg);
    if (TraceStore::exists(root, run_id)) {
      throw ConfigError("run '" + run_id + "' already exists under " + root.string());
    }
    const auto corpus = load_corpus(cfg->corpus);
    auto backend = make_backend(*cfg);
    TraceStore store(root, run_id);
    EarlyStopContext ctx;
    ctx.root_seed = cfg->plan.root_seed;
    ctx.params = cfg->plan.params;
    ctx.answer_cue = cfg->answer_cue;
    ctx.store = &store;
    json full_tokens = json::object();
    for (const auto& q : corpus) {
      const auto res = early_stop_answer(q, policy, *backend, ctx);
      // Baseline: the same trajectory generated in one shot up to the cap.
      auto params = ctx.params;
      params.max_tokens = policy.max_tokens;
      const auto key = SampleKey::thinking(q.id, ctx.trajectory);
      const auto base = backend->generate_thinking(
          q, key, derive_seed(ctx.root_seed, key, SeedKind::thinking), params, std::nullopt,
          policy.max_tokens);
      const bool ok = res.answer && answers_equal(*res.answer, CanonicalAnswer::from_raw(q.gold_answer));
      auto row = result_json(res);
      row["question_id"] = q.id;
      row["trajectory"] = ctx.trajectory;
      row["correct"] = ok;
      row["full_tokens"] = base.completion_tokens;
      row["saved_tokens"] = base.completion_tokens - res.tokens_used;
      full_tokens[q.id] = base.completion_tokens;
      used += res.tokens_used;
      full += base.completion_tokens;
      stopped += res.stopped_early ? 1 : 0;
      correct += ok ? 1 : 0;
      questions.push_back(std::move(row));
    }
    store.write_summary({{"run_id", run_id},
                         {"plan", cfg->plan},
                         {"early_stop", policy},
                         {"full_tokens", full_tokens}});
  }

  const auto count = static_cast<double>(std::max<std::size_t>(questions.size(), 1));
  json totals = {{"questions", questions.size()},
                 {"stopped_early", stopped},
                 {"accuracy", static_cast<double>(correct) / count},
                 {"tokens_used", used}};
  if (have_full) {
    totals["full_tokens"] = full;
    totals["saved_tokens"] = full - used;
  }
  print(env, {{"policy", policy}, {"replay", a.replay}, {"questions", questions}, {"totals", totals}});
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractured sampling runs and analyses"};
  app.name("fracsample");
  app.require_subcommand(1);
  app.fallthrough();

  Env env{out, err, {}};
  app.add_option("--config", env.g.config, "Run configuration JSON");
  app.add_option("--run-id", env.g.run_id, "Run identifier (directory under --out)");
  app.add_option("--out", env.g.out, "Root directory for runs (default: config \"out\" or runs)");

  std::function<int()> action;

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Execute the configured sampling plan");
  run->add_flag("--dry-run", run_args.dry_run, "Print request count and projected budget only");
  run->add_option("--max-inflight", run_args.max_inflight, "Concurrent request limit")
      ->check(CLI::PositiveNumber);
  run->callback([&] { action = [&] { return cmd_run(env, run_args); }; });

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo of the latent failure model or a joint table");
  sim->add_option("--draws", sim_args.draws, "Number of draws")->capture_default_str();
  sim->add_option("--m", sim_args.m, "Probes per depth")->capture_default_str();
  sim->add_option("--seed", sim_args.seed, "Root seed")->capture_default_str();
  sim->add_option("--table", sim_args.table, "Joint failure table JSON (2^K probabilities)");
  sim->callback([&] { action = [&] { return cmd_simulate(env, sim_args); }; });

  AnalyzeArgs an_args;
  auto* an = app.add_subcommand("analyze", "pass@k curves per axis, accuracy by depth, budget curve");
  an->add_option("--ks", an_args.ks, "k values")->delimiter(',')->capture_default_str();
  an->add_option("--caps", an_args.caps, "Token caps for the budget curve")->delimiter(',');
  an->callback([&] { action = [&] { return cmd_analyze(env, an_args); }; });

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Log-linear fits of pass@k against token budget");
  fit->add_option("--axis", fit_args.axis, "n, m, H or all")
      ->check(CLI::IsMember({"n", "m", "H", "all"}))
      ->capture_default_str();
  fit->add_option("--ks", fit_args.ks, "k values")->delimiter(',')->capture_default_str();
  fit->add_flag("--cells", fit_args.cells, "Also fit the (m, H) scheme cells over n");
  fit->callback([&] { action = [&] { return cmd_fit(env, fit_args); }; });

  std::string corr_mode = "per_sample";
  auto* corr = app.add_subcommand("corr", "Failure correlation between depths");
  corr->add_option("--mode", corr_mode, "per_sample or probe_mean")
      ->check(CLI::IsMember({"per_sample", "probe_mean"}))
      ->capture_default_str();
  corr->callback([&] { action = [&] { return cmd_corr(env, corr_mode); }; });

  BonArgs bon_args;
  auto* bon = app.add_subcommand("bon", "Best-of-N accuracy with a depth window");
  bon->add_option("--window", bon_args.window, "Keep the last w depths (default H)")
      ->check(CLI::PositiveNumber);
  bon->add_option("--m,--m-filter", bon_args.m, "Keep probes j <= m (default plan m)")
      ->check(CLI::PositiveNumber);
  bon->add_option("--scorer", bon_args.scorer, "Scorer id (required if several)");
  bon->callback([&] { action = [&] { return cmd_bon(env, bon_args); }; });

  EarlyStopArgs es_args;
  auto* es = app.add_subcommand("earlystop", "Early stopping on repeated predictions");
  es->add_flag("--replay", es_args.replay, "Replay a persisted checkpoint log instead of generating");
  es->add_option("--start", es_args.start, "First checkpoint (thinking tokens)")
      ->check(CLI::PositiveNumber);
  es->add_option("--interval", es_args.interval, "Tokens between checkpoints")
      ->check(CLI::PositiveNumber);
  es->add_option("--threshold", es_args.threshold, "Occurrences that stop generation")
      ->check(CLI::PositiveNumber);
  es->add_option("--max-tokens", es_args.max_tokens, "Thinking token cap")
      ->check(CLI::PositiveNumber);
  es->callback([&] { action = [&] { return cmd_earlystop(env, es_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    err << "fracsample: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace fracsample
