// earlyrank: command-line front end for the early-adopter popularity ranking library.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <earlyrank/earlyrank.hpp>

namespace {

using namespace earlyrank;
using Json = nlohmann::ordered_json;

// Bad flag values that CLI11 cannot check by itself; reported like a parse error (exit 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

FactorSet parse_factors(const std::string& text, const std::string& variant) {
  FactorSet f;
  if (variant == "original") {
    f.nonrec_variant = NonrecVariant::original_link;
  } else if (variant == "copied") {
    f.nonrec_variant = NonrecVariant::copied_link;
  } else if (variant == "both") {
    f.nonrec_variant = NonrecVariant::both;
  } else {
    throw UsageError("--nonrec-variant must be original, copied or both");
  }
  if (text == "none") return f;
  std::set<char> seen;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.size() != 1 || !seen.insert(item[0]).second) {
      throw UsageError("--factors must be 'none' or a comma-separated set of t, r, s");
    }
    switch (item[0]) {
      case 't': f.use_time = true; break;
      case 'r': f.use_nonrec = true; break;
      case 's': f.use_sim = true; break;
      default: throw UsageError("--factors must be 'none' or a comma-separated set of t, r, s");
    }
  }
  if (seen.empty()) throw UsageError("--factors must not be empty");
  return f;
}

std::string factor_label(const FactorSet& f) {
  std::string s;
  if (f.use_time) s += "t";
  if (f.use_nonrec) s += "r";
  if (f.use_sim) s += "s";
  return s.empty() ? "none" : s;
}

ScoreConfig parse_score(const std::string& name) {
  ScoreConfig c;
  if (name == "f1-sum") {
    c.e_variant = EarlyAdopterVariant::E1;
    c.agg = Aggregation::sum;
  } else if (name == "f1-sum-union") {
    c.e_variant = EarlyAdopterVariant::E1;
    c.agg = Aggregation::sum_union;
  } else if (name == "f1-g") {
    c.e_variant = EarlyAdopterVariant::E1;
    c.agg = Aggregation::g_index;
  } else if (name == "f2-sum") {
    c.e_variant = EarlyAdopterVariant::E2;
    c.agg = Aggregation::sum;
  } else if (name == "f2-g") {
    c.e_variant = EarlyAdopterVariant::E2;
    c.agg = Aggregation::g_index;
  } else {
    throw UsageError("unknown --score '" + name + "'");
  }
  return c;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw DataError("error writing " + path);
}

struct Manifest {
  Json doc;

  explicit Manifest(const std::string& command) {
    doc["command"] = command;
    doc["version"] = kVersion;
    doc["flags"] = Json::object();
    doc["inputs"] = Json::object();
    doc["seeds"] = Json::object();
  }

  void input(const std::string& role, const std::string& path) {
    doc["inputs"][role] = {{"path", path}, {"fnv1a64", file_checksum(path)}};
  }

  void write(const std::string& output_path) const {
    const auto path = output_path + ".manifest.json";
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
    close_out(out, path);
  }
};

std::vector<NodeId> resolve_targets(const FollowGraph& g, const std::string& path) {
  std::vector<NodeId> targets;
  if (path.empty()) {
    targets.resize(g.num_nodes());
    for (NodeId u = 0; u < g.num_nodes(); ++u) targets[u] = u;
    return targets;
  }
  for (const auto id : read_account_list(path)) {
    const auto u = g.find(id);
    if (!u) throw DataError(path + ": account " + std::to_string(id) + " is not in the graph");
    targets.push_back(*u);
  }
  return targets;
}

void write_explain(const std::string& path, const FollowGraph& g, const FactorSet& factors, unsigned workers) {
  auto out = open_out(path);
  out << "# seq\tw\tv\tcandidate\tprobability\n";
  cf_all(g, factors, workers, [&](const FollowEdge& e, std::span<const Candidate> cands) {
    for (const auto& c : cands) {
      out << e.seq << '\t' << g.external_id(e.follower) << '\t' << g.external_id(e.followee) << '\t'
          << g.external_id(c.account) << '\t' << tsv::format_double(c.probability) << '\n';
    }
  });
  close_out(out, path);
}

std::optional<std::uint64_t> gain_of(std::span<const AccountMeta> meta, ExternalId id, const std::string& meta_path) {
  const auto it = std::lower_bound(meta.begin(), meta.end(), id,
                                   [](const AccountMeta& m, ExternalId x) { return m.account < x; });
  if (it == meta.end() || it->account != id) {
    throw DataError(meta_path + ": account " + std::to_string(id) + " is missing");
  }
  return it->fw_nr_horizon;
}

std::uint64_t required_gain(std::span<const AccountMeta> meta, ExternalId id, const std::string& meta_path) {
  const auto gain = gain_of(meta, id, meta_path);
  if (!gain) throw DataError(meta_path + ": account " + std::to_string(id) + " has no fw_nr_horizon");
  return *gain;
}

std::string method_of(const ScoreTable& table, const std::string& path) {
  auto m = comment_value(table, "method");
  return m.empty() ? std::filesystem::path(path).stem().string() : m;
}

// ---- subcommands ----

struct GraphArgs {
  std::string edges;
  std::string meta;
  unsigned workers = 1;
};

void add_graph_args(CLI::App* cmd, GraphArgs& a) {
  cmd->add_option("--edges", a.edges, "Edge TSV: seq, follower_id, followee_id")->required();
  cmd->add_option("--meta", a.meta, "Meta TSV: account_id, created_at, active, fw_nr_horizon")
      ->required();
  cmd->add_option("--workers", a.workers, "Worker threads (results do not depend on it)")
      ->envname("EARLYRANK_WORKERS")
      ->check(CLI::Range(1u, 1024u));
}

struct RankArgs {
  GraphArgs graph;
  std::string score = "f2-sum";
  std::string factors = "none";
  std::string nonrec_variant = "original";
  std::optional<double> gc;
  std::string targets;
  std::string out;
  std::string explain;
};

int run_rank(const RankArgs& a) {
  auto config = parse_score(a.score);
  config.factors = parse_factors(a.factors, a.nonrec_variant);
  config.g_param_c = a.gc;
  if (a.gc && !(*a.gc > 0.0)) throw UsageError("--gc must be > 0");
  if (config.agg == Aggregation::sum_union && config.e_variant != EarlyAdopterVariant::E1) {
    throw UsageError("sum-union is only defined for f1");
  }

  const auto snap = load_snapshot(a.graph.edges, a.graph.meta);
  const auto& g = snap.graph;
  const auto targets = resolve_targets(g, a.targets);
  const auto cf = cf_all(g, config.factors, a.graph.workers).cf;
  const auto ranking = rank_accounts(g, cf, targets, config);
  if (!a.explain.empty()) write_explain(a.explain, g, config.factors, a.graph.workers);

  const std::string method = a.score + "(" + factor_label(config.factors) + ")";
  std::vector<std::string> comments = {"method=" + method, "factors=" + factor_label(config.factors),
                                       "nonrec_variant=" + a.nonrec_variant};
  if (config.agg == Aggregation::g_index) comments.push_back("gc=" + tsv::format_double(resolved_g_param(config)));
  auto out = open_out(a.out);
  write_ranking(out, g, ranking, comments);
  close_out(out, a.out);

  Manifest m("rank");
  m.doc["flags"] = {{"score", a.score},
                    {"factors", factor_label(config.factors)},
                    {"nonrec_variant", a.nonrec_variant},
                    {"gc", config.agg == Aggregation::g_index ? Json(resolved_g_param(config)) : Json(nullptr)},
                    {"targets", a.targets.empty() ? Json(nullptr) : Json(a.targets)},
                    {"out", a.out},
                    {"explain", a.explain.empty() ? Json(nullptr) : Json(a.explain)},
                    {"workers", a.graph.workers}};
  m.input("edges", a.graph.edges);
  m.input("meta", a.graph.meta);
  if (!a.targets.empty()) m.input("targets", a.targets);
  m.write(a.out);
  return 0;
}

struct CfArgs {
  GraphArgs graph;
  std::string factors = "none";
  std::string nonrec_variant = "original";
  std::string out;
  std::string explain;
};

int run_cf(const CfArgs& a) {
  const auto factors = parse_factors(a.factors, a.nonrec_variant);
  const auto snap = load_snapshot(a.graph.edges, a.graph.meta);
  const auto& g = snap.graph;
  const auto table = cf_all(g, factors, a.graph.workers);
  if (!a.explain.empty()) write_explain(a.explain, g, factors, a.graph.workers);

  auto out = open_out(a.out);
  out << "# factors=" << factor_label(factors) << '\n' << "# nonrec_variant=" << a.nonrec_variant << '\n';
  write_cf_table(out, g, table.cf);
  close_out(out, a.out);

  Manifest m("cf");
  m.doc["flags"] = {{"factors", factor_label(factors)},
                    {"nonrec_variant", a.nonrec_variant},
                    {"out", a.out},
                    {"explain", a.explain.empty() ? Json(nullptr) : Json(a.explain)},
                    {"workers", a.graph.workers}};
  m.input("edges", a.graph.edges);
  m.input("meta", a.graph.meta);
  m.write(a.out);
  return 0;
}

struct BaselineArgs {
  GraphArgs graph;
  std::string method;
  std::optional<int> iters;
  double damping = 0.9;
  std::string targets;
  std::string out;
};

int run_baseline(const BaselineArgs& a) {
  BaselineConfig config;
  try {
    config.method = parse_baseline_method(a.method);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.iters) {
    if (*a.iters < 1) throw UsageError("--iters must be >= 1");
    config.hits_iters = *a.iters;
    config.pr_iters = *a.iters;
  }
  if (!(a.damping > 0.0 && a.damping < 1.0)) throw UsageError("--damping must be in (0, 1)");
  config.pr_damping = a.damping;

  const auto snap = load_snapshot(a.graph.edges, a.graph.meta);
  const auto& g = snap.graph;
  const auto targets = resolve_targets(g, a.targets);
  const auto scores = baseline_scores(g, config, targets, a.graph.workers);
  Ranking ranking;
  for (std::size_t i = 0; i < targets.size(); ++i) ranking.push_back({targets[i], scores[i]});
  sort_ranking(g, ranking);

  const bool is_hits = config.method == BaselineMethod::HITS || config.method == BaselineMethod::HITS_nr;
  const bool is_pr = config.method == BaselineMethod::PR || config.method == BaselineMethod::PR_nr;
  std::vector<std::string> comments = {"method=" + std::string(method_name(config.method))};
  if (is_hits) comments.push_back("iters=" + std::to_string(config.hits_iters));
  if (is_pr) {
    comments.push_back("iters=" + std::to_string(config.pr_iters));
    comments.push_back("damping=" + tsv::format_double(config.pr_damping));
  }
  auto out = open_out(a.out);
  write_ranking(out, g, ranking, comments);
  close_out(out, a.out);

  Manifest m("baseline");
  m.doc["flags"] = {{"method", a.method},
                    {"iters", is_hits ? Json(config.hits_iters) : is_pr ? Json(config.pr_iters) : Json(nullptr)},
                    {"damping", is_pr ? Json(config.pr_damping) : Json(nullptr)},
                    {"targets", a.targets.empty() ? Json(nullptr) : Json(a.targets)},
                    {"out", a.out},
                    {"workers", a.graph.workers}};
  m.input("edges", a.graph.edges);
  m.input("meta", a.graph.meta);
  if (!a.targets.empty()) m.input("targets", a.targets);
  m.write(a.out);
  return 0;
}

struct CohortArgs {
  GraphArgs graph;
  int weeks = 0;
  std::size_t min_followers = 0;
  bool active_only = false;
  std::optional<std::int64_t> snapshot_time;
  std::string out;
};

int run_cohort(const CohortArgs& a) {
  if (a.weeks < 0) throw UsageError("--weeks must be >= 0");
  const auto snap = load_snapshot(a.graph.edges, a.graph.meta);
  std::int64_t t = 0;
  if (a.snapshot_time) {
    t = *a.snapshot_time;
  } else if (const auto declared = declared_snapshot_time(a.graph.meta)) {
    t = *declared;
  } else {
    for (const auto& m : snap.meta) t = std::max(t, m.created_at);
  }
  const auto cohort = extract_cohort(snap.graph, snap.meta, t, a.weeks, a.min_followers, a.active_only);

  auto out = open_out(a.out);
  out << "# weeks=" << a.weeks << '\n'
      << "# min_followers=" << a.min_followers << '\n'
      << "# active_only=" << (a.active_only ? 1 : 0) << '\n'
      << "# snapshot_time=" << t << '\n';
  for (const NodeId u : cohort.accounts) out << snap.graph.external_id(u) << '\n';
  close_out(out, a.out);

  Manifest m("cohort");
  m.doc["flags"] = {{"weeks", a.weeks},
                    {"min_followers", a.min_followers},
                    {"active_only", a.active_only},
                    {"snapshot_time", t},
                    {"out", a.out}};
  m.input("edges", a.graph.edges);
  m.input("meta", a.graph.meta);
  m.write(a.out);
  return 0;
}

struct EvalArgs {
  std::string ranking;
  std::string meta;
  std::string metric = "spearman";
  std::size_t k = 100;
  std::string cohort;
  std::string scatter;
  std::string out;
};

int run_eval(const EvalArgs& a) {
  if (a.k < 1) throw UsageError("--k must be >= 1");
  const auto meta = load_meta(a.meta);
  const auto table = read_ranking(a.ranking);

  std::vector<ExternalId> accounts;
  std::vector<double> scores;
  std::vector<double> gains;
  std::string cohort_name = "all";
  if (a.cohort.empty()) {
    accounts = table.accounts;
    scores = table.scores;
  } else {
    cohort_name = std::filesystem::path(a.cohort).stem().string();
    const auto members = read_account_list(a.cohort);
    std::set<ExternalId> wanted(members.begin(), members.end());
    for (std::size_t i = 0; i < table.accounts.size(); ++i) {
      if (wanted.erase(table.accounts[i]) == 1) {
        accounts.push_back(table.accounts[i]);
        scores.push_back(table.scores[i]);
      }
    }
    if (!wanted.empty()) {
      throw DataError(a.ranking + ": cohort account " + std::to_string(*wanted.begin()) + " is not ranked");
    }
  }
  for (const auto id : accounts) gains.push_back(static_cast<double>(required_gain(meta, id, a.meta)));

  std::string value;
  if (a.metric == "spearman") {
    if (accounts.size() < 2) throw DataError(a.ranking + ": spearman needs at least 2 accounts");
    const auto rho = spearman_rho(scores, gains);
    if (rho) {
      value = tsv::format_double(*rho);
    } else {
      std::cerr << "warning: spearman is undefined for a constant score or gain column\n";
      value = "NA";
    }
  } else if (a.metric == "ndcg") {
    if (accounts.empty()) throw DataError(a.ranking + ": no ranked accounts to evaluate");
    value = tsv::format_double(ndcg_at_k(gains, a.k));
  } else {
    throw UsageError("--metric must be spearman or ndcg");
  }

  const std::string metric = a.metric == "ndcg" ? "ndcg@" + std::to_string(a.k) : a.metric;
  const std::string line = metric + '\t' + method_of(table, a.ranking) + '\t' + cohort_name + '\t' + value + '\n';
  std::cout << line;

  if (!a.scatter.empty()) {
    auto out = open_out(a.scatter);
    scatter_export(out, accounts, scores, gains);
    close_out(out, a.scatter);
  }
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    out << line;
    close_out(out, a.out);
    Manifest m("eval");
    m.doc["flags"] = {{"metric", a.metric},
                      {"k", a.metric == "ndcg" ? Json(a.k) : Json(nullptr)},
                      {"cohort", a.cohort.empty() ? Json(nullptr) : Json(a.cohort)},
                      {"scatter", a.scatter.empty() ? Json(nullptr) : Json(a.scatter)},
                      {"out", a.out}};
    m.input("ranking", a.ranking);
    m.input("meta", a.meta);
    if (!a.cohort.empty()) m.input("cohort", a.cohort);
    m.write(a.out);
  }
  return 0;
}

struct CombineArgs {
  std::vector<std::string> rankings;
  std::string meta;
  int folds = 10;
  std::uint64_t seed = 42;
  double label_quantile = 0.5;
  std::string out;
};

int run_combine(const CombineArgs& a) {
  if (a.folds < 2) throw UsageError("--folds must be >= 2");
  if (!(a.label_quantile >= 0.0 && a.label_quantile <= 1.0)) throw UsageError("--label-quantile must be in [0, 1]");
  const auto meta = load_meta(a.meta);
  std::vector<ScoreTable> tables;
  for (const auto& path : a.rankings) tables.push_back(read_ranking(path));

  // Account order of the first table; every other table must score exactly the same accounts.
  const auto& accounts = tables.front().accounts;
  std::vector<std::vector<double>> features;
  std::vector<std::string> names;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    std::map<ExternalId, double> by_id;
    for (std::size_t i = 0; i < tables[t].accounts.size(); ++i) {
      if (!by_id.emplace(tables[t].accounts[i], tables[t].scores[i]).second) {
        throw DataError(a.rankings[t] + ": account " + std::to_string(tables[t].accounts[i]) + " listed twice");
      }
    }
    if (by_id.size() != accounts.size()) {
      throw DataError(a.rankings[t] + ": ranks a different account set than " + a.rankings.front());
    }
    std::vector<double> column;
    for (const auto id : accounts) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw DataError(a.rankings[t] + ": account " + std::to_string(id) + " is not ranked");
      column.push_back(it->second);
    }
    features.push_back(std::move(column));
    names.push_back(method_of(tables[t], a.rankings[t]));
  }
  if (accounts.empty()) throw DataError(a.rankings.front() + ": no ranked accounts");
  std::vector<double> gains;
  for (const auto id : accounts) gains.push_back(static_cast<double>(required_gain(meta, id, a.meta)));
  const auto labels = labels_above_quantile(gains, a.label_quantile);

  const auto fit = logistic_combine(features, labels, a.folds, a.seed);
  for (const auto j : fit.constant_features) {
    std::cerr << "warning: feature " << names[j] << " is constant; its coefficient is fixed at 0\n";
  }
  if (!fit.converged) std::cerr << "warning: logistic fit did not converge; results are partial\n";

  std::vector<std::size_t> order(accounts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (fit.combined[x] != fit.combined[y]) return fit.combined[x] > fit.combined[y];
    return accounts[x] < accounts[y];
  });
  std::vector<ExternalId> ids;
  std::vector<double> scores;
  for (const auto i : order) {
    ids.push_back(accounts[i]);
    scores.push_back(fit.combined[i]);
  }

  std::string joined;
  for (const auto& n : names) joined += (joined.empty() ? "" : ",") + n;
  std::vector<std::string> comments = {"method=combine", "features=" + joined, "folds=" + std::to_string(a.folds),
                                       "seed=" + std::to_string(a.seed),
                                       "label=fw_nr_horizon>quantile(" + tsv::format_double(a.label_quantile) + ")",
                                       "converged=" + std::string(fit.converged ? "1" : "0"),
                                       "coef[intercept]=" + tsv::format_double(fit.coefficients[0])};
  for (std::size_t j = 0; j < names.size(); ++j) {
    comments.push_back("coef[" + names[j] + "]=" + tsv::format_double(fit.coefficients[j + 1]));
  }
  auto out = open_out(a.out);
  write_ranking(out, ids, scores, comments);
  close_out(out, a.out);

  Manifest m("combine");
  m.doc["flags"] = {{"rankings", a.rankings},
                    {"folds", a.folds},
                    {"label_quantile", a.label_quantile},
                    {"out", a.out}};
  m.doc["seeds"] = {{"folds", a.seed}};
  for (std::size_t t = 0; t < a.rankings.size(); ++t) m.input("ranking" + std::to_string(t + 1), a.rankings[t]);
  m.input("meta", a.meta);
  m.write(a.out);
  return 0;
}

struct SynthArgs {
  SynthParams params;
  std::string prefix;
};

int run_synth(const SynthArgs& a) {
  try {
    a.params.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto result = generate(a.params);
  write_synth(result, a.prefix);

  const auto& p = a.params;
  Manifest m("synth");
  m.doc["flags"] = {{"prefix", a.prefix},
                    {"n_accounts", p.n_accounts},
                    {"n_events", p.n_events},
                    {"adopter_fraction", p.adopter_fraction},
                    {"copy_prob_adopter", p.copy_prob_adopter},
                    {"copy_prob_other", p.copy_prob_other},
                    {"horizon_events", p.horizon_events},
                    {"initial_fraction", p.initial_fraction},
                    {"follows_on_join", p.follows_on_join},
                    {"reciprocation_prob", p.reciprocation_prob},
                    {"discover_prob_adopter", p.discover_prob_adopter},
                    {"discover_prob_other", p.discover_prob_other},
                    {"recent_window", p.recent_window},
                    {"quality_spread", p.quality_spread},
                    {"attraction_offset", p.attraction_offset},
                    {"adopter_attraction", p.adopter_attraction},
                    {"adopter_activity", p.adopter_activity},
                    {"copy_recent", p.copy_recent},
                    {"copy_recent_prob", p.copy_recent_prob},
                    {"noise_triangle_prob", p.noise_triangle_prob},
                    {"inactive_fraction", p.inactive_fraction},
                    {"seconds_per_event", p.seconds_per_event}};
  m.doc["seeds"] = {{"synth", p.seed}};
  m.write(a.prefix);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank new accounts of a follow graph by the early adopters among their followers"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Score accounts by future popularity");
  add_graph_args(rank_cmd, rank.graph);
  rank_cmd->add_option("--score", rank.score, "f1-sum, f1-sum-union, f1-g, f2-sum or f2-g")->capture_default_str();
  rank_cmd->add_option("--factors", rank.factors, "'none' or a comma-set of t (time), r (reciprocity), s (similarity)")
      ->capture_default_str();
  rank_cmd->add_option("--nonrec-variant", rank.nonrec_variant, "original, copied or both")->capture_default_str();
  rank_cmd->add_option("--gc", rank.gc, "g-index parameter (default depends on score and factors)");
  rank_cmd->add_option("--targets", rank.targets, "Accounts to rank, one id per line (default: all)");
  rank_cmd->add_option("--out", rank.out, "Ranking TSV")->required();
  rank_cmd->add_option("--explain", rank.explain, "Also write every copy candidate per edge to this file");

  CfArgs cf;
  auto* cf_cmd = app.add_subcommand("cf", "Export the expected imitation count of every account");
  add_graph_args(cf_cmd, cf.graph);
  cf_cmd->add_option("--factors", cf.factors, "'none' or a comma-set of t, r, s")->capture_default_str();
  cf_cmd->add_option("--nonrec-variant", cf.nonrec_variant, "original, copied or both")->capture_default_str();
  cf_cmd->add_option("--out", cf.out, "CF TSV: account_id, cf")->required();
  cf_cmd->add_option("--explain", cf.explain, "Also write every copy candidate per edge to this file");

  BaselineArgs base;
  auto* base_cmd = app.add_subcommand("baseline", "Score accounts with a classical baseline");
  add_graph_args(base_cmd, base.graph);
  base_cmd->add_option("--method", base.method, "fw, fw-nr, fr, fr-nr, hits, hits-nr, pr, pr-nr, ad-sum, ad-mean")
      ->required();
  base_cmd->add_option("--iters", base.iters, "Iterations (default 10 for hits, 100 for pr)");
  base_cmd->add_option("--damping", base.damping, "PageRank damping")->capture_default_str();
  base_cmd->add_option("--targets", base.targets, "Accounts to rank, one id per line (default: all)");
  base_cmd->add_option("--out", base.out, "Ranking TSV")->required();

  CohortArgs cohort;
  auto* cohort_cmd = app.add_subcommand("cohort", "List young accounts with enough followers");
  add_graph_args(cohort_cmd, cohort.graph);
  cohort_cmd->add_option("--weeks", cohort.weeks, "Maximum account age in weeks")->required();
  cohort_cmd->add_option("--min-followers", cohort.min_followers, "Minimum follower count")->capture_default_str();
  cohort_cmd->add_flag("--active-only", cohort.active_only, "Keep only accounts active at the horizon");
  cohort_cmd->add_option("--snapshot-time", cohort.snapshot_time,
                         "Snapshot time in seconds (default: meta header, else newest created_at)");
  cohort_cmd->add_option("--out", cohort.out, "Account list")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Compare a ranking against fw_nr_horizon");
  eval_cmd->add_option("--ranking", eval.ranking, "Ranking TSV")->required();
  eval_cmd->add_option("--meta", eval.meta, "Meta TSV with fw_nr_horizon")->required();
  eval_cmd->add_option("--metric", eval.metric, "spearman or ndcg")->capture_default_str();
  eval_cmd->add_option("--k", eval.k, "Cutoff for ndcg")->capture_default_str();
  eval_cmd->add_option("--cohort", eval.cohort, "Restrict to these accounts");
  eval_cmd->add_option("--scatter", eval.scatter, "Also write account_id, score_rank, gain_rank");
  eval_cmd->add_option("--out", eval.out, "Also write the metric line here, with a manifest");

  CombineArgs combine;
  auto* combine_cmd = app.add_subcommand("combine", "Combine rankings by cross-validated logistic regression");
  combine_cmd->add_option("--ranking", combine.rankings, "Feature ranking TSV (repeat)")
      ->required();
  combine_cmd->add_option("--meta", combine.meta, "Meta TSV with fw_nr_horizon")->required();
  combine_cmd->add_option("--folds", combine.folds, "Cross-validation folds")->capture_default_str();
  combine_cmd->add_option("--seed", combine.seed, "Fold assignment seed")->capture_default_str();
  combine_cmd->add_option("--label-quantile", combine.label_quantile,
                          "Label is 1 when fw_nr_horizon is above this quantile")
      ->capture_default_str();
  combine_cmd->add_option("--out", combine.out, "Combined ranking TSV")->required();

  SynthArgs synth;
  auto& sp = synth.params;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic graph with planted copies");
  synth_cmd->add_option("--prefix", synth.prefix, "Output path prefix")->required();
  synth_cmd->add_option("--seed", sp.seed)->capture_default_str();
  synth_cmd->add_option("--n-accounts", sp.n_accounts)->capture_default_str();
  synth_cmd->add_option("--events", sp.n_events, "Snapshot events")->capture_default_str();
  synth_cmd->add_option("--horizon-events", sp.horizon_events)->capture_default_str();
  synth_cmd->add_option("--adopter-fraction", sp.adopter_fraction)->capture_default_str();
  synth_cmd->add_option("--copy-prob-adopter", sp.copy_prob_adopter)->capture_default_str();
  synth_cmd->add_option("--copy-prob-other", sp.copy_prob_other)->capture_default_str();
  synth_cmd->add_option("--initial-fraction", sp.initial_fraction)->capture_default_str();
  synth_cmd->add_option("--follows-on-join", sp.follows_on_join)->capture_default_str();
  synth_cmd->add_option("--reciprocation-prob", sp.reciprocation_prob)->capture_default_str();
  synth_cmd->add_option("--discover-prob-adopter", sp.discover_prob_adopter)->capture_default_str();
  synth_cmd->add_option("--discover-prob-other", sp.discover_prob_other)->capture_default_str();
  synth_cmd->add_option("--recent-window", sp.recent_window)->capture_default_str();
  synth_cmd->add_option("--quality-spread", sp.quality_spread)->capture_default_str();
  synth_cmd->add_option("--attraction-offset", sp.attraction_offset)->capture_default_str();
  synth_cmd->add_option("--adopter-attraction", sp.adopter_attraction)->capture_default_str();
  synth_cmd->add_option("--adopter-activity", sp.adopter_activity)->capture_default_str();
  synth_cmd->add_option("--copy-recent", sp.copy_recent)->capture_default_str();
  synth_cmd->add_option("--copy-recent-prob", sp.copy_recent_prob)->capture_default_str();
  synth_cmd->add_option("--noise-triangle-prob", sp.noise_triangle_prob)->capture_default_str();
  synth_cmd->add_option("--inactive-fraction", sp.inactive_fraction)->capture_default_str();
  synth_cmd->add_option("--seconds-per-event", sp.seconds_per_event)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (rank_cmd->parsed()) return run_rank(rank);
    if (cf_cmd->parsed()) return run_cf(cf);
    if (base_cmd->parsed()) return run_baseline(base);
    if (cohort_cmd->parsed()) return run_cohort(cohort);
    if (eval_cmd->parsed()) return run_eval(eval);
    if (combine_cmd->parsed()) return run_combine(combine);
    if (synth_cmd->parsed()) return run_synth(synth);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
