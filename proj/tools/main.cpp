#include <unistd.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "manifest.hpp"
#include "stagedtrees/ceg.hpp"
#include "stagedtrees/datasets.hpp"
#include "stagedtrees/errors.hpp"
#include "stagedtrees/estimation.hpp"
#include "stagedtrees/evaluation.hpp"
#include "stagedtrees/format.hpp"
#include "stagedtrees/io.hpp"
#include "stagedtrees/learning.hpp"
#include "stagedtrees/lr_test.hpp"
#include "stagedtrees/predict.hpp"
#include "stagedtrees/query.hpp"
#include "stagedtrees/version.hpp"

namespace st = stagedtrees;
using stagedtrees::cli::InputDigest;
using stagedtrees::cli::RunManifest;

namespace {

struct Options {
  std::string data;
  std::string freq;
  std::string model;
  std::string out;
  std::string manifest;
  std::uint64_t seed = 0;
  std::string order;
  double lambda = 0.0;
  std::string format;
  std::string level_order = "appearance";
  std::string init;
  bool no_join_unobserved = false;
  std::string name_unobserved = st::kDefaultUnobserved;

  std::string alg = "hc";
  std::string score = "bic";
  double thr = 0.1;
  std::size_t k = 2;
  std::string distance = "kl";
  std::string linkage = "complete";
  std::size_t max_iter = 100;
  std::size_t restarts = 10;
  std::string scope;

  std::string event;
  bool log = false;
  std::string path;
  std::string var;
  std::string stage;
  std::size_t n = 0;
  std::string method = "stages";
  std::vector<std::string> positional;
  std::string class_var;
  std::size_t splits = 10;
  double train_fraction = 0.8;
};

bool color_enabled() {
  const char* env = std::getenv("STAGEDTREE_COLOR");
  if (env && std::string(env) == "0") return false;
  return isatty(fileno(stdout)) != 0;
}

std::string bold(const std::string& s) { return color_enabled() ? "\033[1m" + s + "\033[0m" : s; }

std::vector<std::string> comma_list(const std::string& text) {
  if (text.empty()) return {};
  auto parts = st::split(text, ',');
  for (const auto& p : parts) {
    if (p.empty()) throw st::ValidationError("empty entry in list '" + text + "'");
  }
  return parts;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    st::write_file(o.out, text);
  }
}

struct LoadedData {
  st::Dataset data;
  InputDigest digest;
};

LoadedData load_data(const Options& o) {
  if (o.data.empty()) throw st::ValidationError("--data is required");
  std::optional<std::vector<std::string>> order;
  if (!o.order.empty()) order = comma_list(o.order);

  if (o.data.rfind("builtin:", 0) == 0) {
    const auto name = o.data.substr(8);
    std::optional<st::Dataset> ds;
    if (name == "titanic") {
      ds = st::titanic();
    } else if (name == "asym") {
      ds = st::asym();
    } else {
      throw st::ValidationError("unknown builtin dataset '" + name + "' (titanic, asym)");
    }
    if (order) ds = ds->reordered(*order);
    // Builtins are digested through their canonical record CSV.
    const auto records = ds->to_records();
    return {*ds, {o.data, st::cli::sha256_hex(st::records_to_csv(ds->tree(), records))}};
  }

  const auto bytes = st::read_file(o.data);
  st::LoadOptions lo;
  lo.order = order;
  if (o.level_order == "appearance") {
    lo.level_order = st::LevelOrder::first_appearance;
  } else if (o.level_order == "lex") {
    lo.level_order = st::LevelOrder::lexicographic;
  } else {
    throw st::ValidationError("--level-order must be 'appearance' or 'lex'");
  }
  std::string freq = o.freq;
  if (freq.empty()) {
    const auto table = st::parse_csv(bytes);
    if (std::find(table.header.begin(), table.header.end(), "Freq") != table.header.end()) freq = "Freq";
  }
  auto ds = freq.empty() ? st::load_records_csv(bytes, lo) : st::load_counts_csv(bytes, freq, lo);
  return {std::move(ds), {o.data, st::cli::sha256_hex(bytes)}};
}

st::StagedTree load_model_file(const std::string& path) { return st::load_model(st::read_file(path)); }

st::InitOptions init_options(const Options& o) {
  st::InitOptions io;
  io.lambda = o.lambda;
  io.join_unobserved = !o.no_join_unobserved;
  io.name_unobserved = o.name_unobserved;
  return io;
}

st::StagedTree initial_model(const st::Dataset& ds, const Options& o, st::InitKind kind) {
  const auto io = init_options(o);
  return kind == st::InitKind::full ? st::full(ds, io) : st::indep(ds, io);
}

st::SearchConfig search_config(const Options& o) {
  st::SearchConfig cfg;
  cfg.score = st::parse_score(o.score);
  if (!o.scope.empty()) cfg.scope = comma_list(o.scope);
  cfg.seed = o.seed;
  cfg.max_iter = o.max_iter;
  cfg.thr = o.thr;
  cfg.k = o.k;
  cfg.distance = st::parse_divergence(o.distance);
  cfg.linkage = st::parse_linkage(o.linkage);
  cfg.n_restarts = o.restarts;
  return cfg;
}

std::string score_report(const st::StagedTree& m, const std::string& format) {
  const auto s = st::score(m);
  if (format == "json") {
    std::ostringstream os;
    os << "{\"order\": \"" << m.tree().describe() << "\", \"logLik\": " << st::format_fixed(s.loglik, 3)
       << ", \"df\": " << s.df << ", \"AIC\": " << st::format_fixed(s.aic, 3)
       << ", \"BIC\": " << st::format_fixed(s.bic, 3) << "}\n";
    return os.str();
  }
  if (!format.empty() && format != "text") throw st::ValidationError("--format must be 'text' or 'json'");
  return m.tree().describe() + "\n" + bold("logLik") + " " + st::format_fixed(s.loglik, 3) + " " + bold("df") +
         " " + std::to_string(s.df) + " " + bold("AIC") + " " + st::format_fixed(s.aic, 3) + " " + bold("BIC") +
         " " + st::format_fixed(s.bic, 3) + "\n";
}

void write_manifest(const Options& o, RunManifest m) {
  const auto text = m.to_json();
  std::string path = o.manifest;
  if (path.empty() && !o.out.empty()) path = o.out + ".manifest.json";
  if (path.empty()) {
    std::cerr << text;
  } else {
    st::write_file(path, text);
  }
}

std::string model_arg(const Options& o, std::size_t i = 0) {
  if (!o.model.empty() && i == 0) return o.model;
  if (o.positional.size() > i) return o.positional[i];
  throw st::ValidationError("a model file is required");
}

// --- subcommands ---------------------------------------------------------

void cmd_fit(const Options& o) {
  const auto loaded = load_data(o);
  const auto model = initial_model(loaded.data, o, st::parse_init(o.init.empty() ? "full" : o.init));
  if (!o.out.empty()) st::write_file(o.out, st::save_model(model));
  std::cout << score_report(model, o.format);
}

void cmd_learn(const Options& o, const std::vector<std::string>& argv) {
  const auto start = std::chrono::steady_clock::now();
  const auto alg = st::parse_algorithm(o.alg);
  RunManifest manifest;
  manifest.argv = argv;
  manifest.seed = o.seed;
  std::optional<st::StagedTree> init;
  if (!o.model.empty()) {
    const auto bytes = st::read_file(o.model);
    manifest.inputs.push_back({o.model, st::cli::sha256_hex(bytes)});
    init = st::load_model(bytes);
  } else {
    auto loaded = load_data(o);
    manifest.inputs.push_back(loaded.digest);
    const auto kind = o.init.empty() ? st::default_init(alg) : st::parse_init(o.init);
    init = initial_model(loaded.data, o, kind);
  }
  const auto model = st::learn(*init, alg, search_config(o));
  const auto doc = st::save_model(model);
  if (!o.out.empty()) st::write_file(o.out, doc);
  std::cout << score_report(model, o.format);
  manifest.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(o, manifest);
}

std::string florets_csv(const st::StagedTree& m) {
  st::CsvTable t;
  t.header = {"variable", "stage", "level", "prob"};
  for (const auto& s : st::summary(m)) {
    for (const auto& row : s.rows) {
      for (std::size_t j = 0; j < s.levels.size(); ++j) {
        t.rows.push_back({s.variable, row.stage, s.levels[j], row.probs ? st::format_fixed((*row.probs)[j], 7) : "NA"});
      }
    }
  }
  return st::write_csv(t);
}

std::string atoms_csv(const st::StagedTree& m) {
  st::CsvTable t;
  t.header = m.tree().names();
  t.header.push_back("prob");
  for (const auto& a : st::atomic_probs(m)) {
    std::vector<std::string> row;
    for (std::size_t d = 0; d < a.levels.size(); ++d) row.push_back(m.tree().variable(d).levels[a.levels[d]]);
    row.push_back(st::format_fixed(a.prob, 7));
    t.rows.push_back(std::move(row));
  }
  return st::write_csv(t);
}

st::Assignment parse_event(const std::string& text) {
  st::Assignment event;
  for (const auto& item : comma_list(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw st::ValidationError("event entries must look like Var=Level, got '" + item + "'");
    }
    if (!event.emplace(item.substr(0, eq), item.substr(eq + 1)).second) {
      throw st::ValidationError("variable '" + item.substr(0, eq) + "' appears twice in the event");
    }
  }
  return event;
}

void cmd_query(const std::string& what, const Options& o) {
  const auto m = load_model_file(model_arg(o));
  if (what == "prob") {
    const double p = st::prob(m, parse_event(o.event), o.log);
    emit(o, st::format_fixed(p, 7) + "\n");
  } else if (what == "stage") {
    const auto path = comma_list(o.path);
    emit(o, st::get_stage(m, path) + "\n");
  } else if (what == "paths") {
    st::CsvTable t;
    const auto d = m.tree().index_of(o.var);
    const auto names = m.tree().names();
    t.header.assign(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(d));
    for (auto& p : st::get_path(m, o.var, o.stage)) t.rows.push_back(std::move(p));
    emit(o, st::write_csv(t));
  } else if (what == "summary") {
    emit(o, st::format_summary(m));
  } else if (what == "florets") {
    emit(o, florets_csv(m));
  } else if (what == "atoms") {
    emit(o, atoms_csv(m));
  } else if (what == "subtree") {
    const auto sub = st::subtree(m, comma_list(o.path));
    emit(o, st::save_model(sub));
  } else if (what == "stndnaming") {
    emit(o, st::save_model(st::stndnaming(m)));
  }
}

void cmd_sample(const Options& o) {
  const auto m = load_model_file(model_arg(o));
  const auto records = st::sample_from(m, o.n, o.seed);
  emit(o, st::records_to_csv(m.tree(), records));
}

void cmd_compare(const Options& o) {
  if (o.positional.size() != 2) throw st::ValidationError("compare needs two model files");
  const auto a = load_model_file(o.positional[0]);
  const auto b = load_model_file(o.positional[1]);
  const auto result = st::compare_stages(a, b, st::parse_compare_method(o.method));
  std::ostringstream os;
  os << (result.equal ? "equal" : "different") << "\n";
  for (std::size_t d = 0; d < result.diff.vertices.size(); ++d) {
    for (auto v : result.diff.vertices[d]) {
      const auto path = a.tree().decode({d, v});
      os << a.tree().variable(d).name << "\t" << (path.empty() ? "(root)" : st::join(path, ",")) << "\n";
    }
  }
  emit(o, os.str());
}

void cmd_ceg(const Options& o) {
  const auto m = load_model_file(model_arg(o));
  const auto c = st::ceg(m);
  const std::string format = o.format.empty() ? "dot" : o.format;
  if (format == "dot") {
    emit(o, st::ceg_to_dot(c));
  } else if (format == "adjmat-csv") {
    emit(o, st::adjmat_csv(c));
  } else {
    throw st::ValidationError("--format must be 'dot' or 'adjmat-csv'");
  }
}

void cmd_export_dot(const Options& o) { emit(o, st::tree_to_dot(load_model_file(model_arg(o)))); }

void cmd_evaluate(const Options& o, const std::vector<std::string>& argv) {
  const auto start = std::chrono::steady_clock::now();
  auto loaded = load_data(o);
  st::EvalConfig cfg;
  cfg.algorithm = st::parse_algorithm(o.alg);
  if (!o.init.empty()) cfg.init = st::parse_init(o.init);
  cfg.search = search_config(o);
  cfg.splits = o.splits;
  cfg.train_fraction = o.train_fraction;
  cfg.seed = o.seed;
  cfg.lambda = o.lambda;
  cfg.join_unobserved = !o.no_join_unobserved;
  const auto ev = st::evaluate(loaded.data, cfg);
  emit(o, st::evaluation_csv(ev));
  RunManifest manifest;
  manifest.argv = argv;
  manifest.inputs.push_back(loaded.digest);
  manifest.seed = o.seed;
  manifest.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(o, manifest);
}

void cmd_predict(const Options& o) {
  const auto m = load_model_file(model_arg(o));
  if (o.class_var.empty()) throw st::ValidationError("--class is required");
  if (o.data.empty()) throw st::ValidationError("--data is required");
  const auto table = st::parse_csv(st::read_file(o.data));
  const std::vector<std::string> optional{o.class_var};
  const auto rows = st::parse_records(table, m.tree(), optional);
  const auto c = m.tree().index_of(o.class_var);
  const auto predicted = st::predict(m, o.class_var, rows);
  st::CsvTable t;
  t.header = {o.class_var};
  bool labelled = !rows.empty();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.rows.push_back({m.tree().variable(c).levels[predicted[i]]});
    labelled = labelled && rows[i][c] != static_cast<std::size_t>(-1);
  }
  emit(o, st::write_csv(t));
  if (labelled) std::cerr << "accuracy " << st::format_fixed(st::accuracy(predicted, rows, c), 4) << "\n";
}

void cmd_lr_test(const Options& o) {
  if (o.positional.size() != 2) throw st::ValidationError("lr-test needs the nested and the general model files");
  const auto r = st::lr_test(load_model_file(o.positional[0]), load_model_file(o.positional[1]));
  emit(o, "stat " + st::format_fixed(r.stat, 3) + " df " + std::to_string(r.df) + " p " +
              st::format_fixed(r.p_value, 7) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn, query and transform staged event trees and chain event graphs"};
  app.set_version_flag("--version", std::string(st::kVersion));
  app.require_subcommand(1);
  Options o;

  // Flags shared by several subcommands are attached per subcommand.
  auto data_flags = [&](CLI::App* c) {
    c->add_option("--data", o.data, "CSV file (records, or counts with a Freq column) or builtin:titanic|asym");
    c->add_option("--freq", o.freq, "Name of the count column (default: Freq when present)");
    c->add_option("--order", o.order, "Comma-separated variable order");
    c->add_option("--level-order", o.level_order, "Level order for CSV input: appearance or lex")
        ->capture_default_str();
  };
  auto init_flags = [&](CLI::App* c) {
    c->add_option("--init", o.init, "Initial model: full or indep");
    c->add_option("--lambda", o.lambda, "Additive smoothing for stage probabilities")->capture_default_str();
    c->add_flag("--no-join-unobserved", o.no_join_unobserved, "Keep vertices without observations in their own stages");
    c->add_option("--name-unobserved", o.name_unobserved, "Label of the unobserved stage")->capture_default_str();
  };
  auto search_flags = [&](CLI::App* c) {
    c->add_option("--alg", o.alg, "hc, bhc, fbhc, bhcr, bj, hclust or kmeans")->capture_default_str();
    c->add_option("--score", o.score, "bic, aic or loglik")->capture_default_str();
    c->add_option("--thr", o.thr, "Distance threshold for bj")->capture_default_str();
    c->add_option("--k", o.k, "Stages per stratum for hclust and kmeans")->capture_default_str();
    c->add_option("--distance", o.distance, "kl, tv, hl, bh, lp[:p], ry[:alpha] or cd")->capture_default_str();
    c->add_option("--linkage", o.linkage, "complete, single or average")->capture_default_str();
    c->add_option("--max-iter", o.max_iter, "Iterations for bhcr")->capture_default_str();
    c->add_option("--restarts", o.restarts, "Random restarts for kmeans")->capture_default_str();
    c->add_option("--scope", o.scope, "Comma-separated variables whose strata are searched");
    c->add_option("--seed", o.seed, "Seed for randomized steps")->capture_default_str();
  };
  auto out_flags = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Output file (default: stdout)");
    c->add_option("--format", o.format, "Output format");
  };
  auto model_flags = [&](CLI::App* c) {
    c->add_option("--model", o.model, "Model file (.sevt.json)");
    c->add_option("model_file", o.positional, "Model file");
  };

  auto* fit = app.add_subcommand("fit", "Fit the full or independence model and report its score");
  data_flags(fit);
  init_flags(fit);
  fit->add_option("--out", o.out, "Write the model here");
  fit->add_option("--format", o.format, "Report format: text or json");

  auto* learn = app.add_subcommand("learn", "Learn a staging from data or from a model file");
  data_flags(learn);
  init_flags(learn);
  search_flags(learn);
  learn->add_option("--model", o.model, "Start from this model instead of --data");
  learn->add_option("--out", o.out, "Write the learned model here");
  learn->add_option("--manifest", o.manifest, "Run manifest path (default: <out>.manifest.json or stderr)");
  learn->add_option("--format", o.format, "Report format: text or json");

  auto* query = app.add_subcommand("query", "Interrogate a fitted model");
  query->require_subcommand(1);
  std::string query_what;
  auto add_query = [&](const std::string& name, const std::string& help) {
    auto* q = query->add_subcommand(name, help);
    model_flags(q);
    q->add_option("--out", o.out, "Output file (default: stdout)");
    q->callback([&query_what, name] { query_what = name; });
    return q;
  };
  auto* q_prob = add_query("prob", "Probability of an event");
  q_prob->add_option("--event", o.event, "Var=Level,...")->required();
  q_prob->add_flag("--log", o.log, "Natural logarithm of the probability");
  add_query("stage", "Stage of the vertex reached by a path")->add_option("--path", o.path, "L1,L2,...")->required();
  auto* q_paths = add_query("paths", "Paths reaching a stage");
  q_paths->add_option("--var", o.var, "Variable")->required();
  q_paths->add_option("--stage", o.stage, "Stage id")->required();
  add_query("summary", "Stages with their paths, sample sizes and probabilities");
  add_query("florets", "Floret probabilities of every stage as CSV");
  add_query("atoms", "Probability of every leaf as CSV");
  add_query("subtree", "Model rooted at the vertex reached by a path")->add_option("--path", o.path, "L1,L2,...");
  add_query("stndnaming", "Model with stages renamed 1, 2, ... per stratum");

  auto* sample = app.add_subcommand("sample", "Sample records from a model");
  model_flags(sample);
  sample->add_option("--n", o.n, "Number of records")->required();
  sample->add_option("--seed", o.seed, "Seed")->capture_default_str();
  sample->add_option("--out", o.out, "Output CSV (default: stdout)");

  auto* compare = app.add_subcommand("compare", "Compare the stagings of two models");
  compare->add_option("models", o.positional, "Two model files")->expected(2)->required();
  compare->add_option("--method", o.method, "stages, naive or hamming")->capture_default_str();
  compare->add_option("--out", o.out, "Output file (default: stdout)");

  auto* ceg = app.add_subcommand("ceg", "Chain event graph of a model");
  model_flags(ceg);
  out_flags(ceg);

  auto* dot = app.add_subcommand("export-dot", "Staged tree as a DOT digraph");
  model_flags(dot);
  dot->add_option("--out", o.out, "Output file (default: stdout)");

  auto* evaluate = app.add_subcommand("evaluate", "Repeated 80/20 train/test evaluation; the first variable is the class");
  data_flags(evaluate);
  init_flags(evaluate);
  search_flags(evaluate);
  evaluate->add_option("--splits", o.splits, "Number of resamples")->capture_default_str();
  evaluate->add_option("--train-fraction", o.train_fraction, "Share of records used for training")
      ->capture_default_str();
  evaluate->add_option("--out", o.out, "Output CSV (default: stdout)");
  evaluate->add_option("--manifest", o.manifest, "Run manifest path (default: <out>.manifest.json or stderr)");

  auto* predict = app.add_subcommand("predict", "Predict a class variable for records in a CSV file");
  model_flags(predict);
  predict->add_option("--class", o.class_var, "Class variable")->required();
  predict->add_option("--data", o.data, "CSV of records")->required();
  predict->add_option("--out", o.out, "Output CSV (default: stdout)");

  auto* lr = app.add_subcommand("lr-test", "Likelihood-ratio test of a nested model against a general one");
  lr->add_option("models", o.positional, "Nested and general model files")->expected(2)->required();
  lr->add_option("--out", o.out, "Output file (default: stdout)");

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
    return 2;
  }

  const std::vector<std::string> args(argv, argv + argc);
  try {
    if (*fit) cmd_fit(o);
    if (*learn) cmd_learn(o, args);
    if (*query) cmd_query(query_what, o);
    if (*sample) cmd_sample(o);
    if (*compare) cmd_compare(o);
    if (*ceg) cmd_ceg(o);
    if (*dot) cmd_export_dot(o);
    if (*evaluate) cmd_evaluate(o, args);
    if (*predict) cmd_predict(o);
    if (*lr) cmd_lr_test(o);
  } catch (const st::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const st::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const st::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
