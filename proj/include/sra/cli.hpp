/*
 * Copyright 2026 The SRA Tabular Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command implementations behind the `sra` executable. run() is callable
// in-process, which is how `replay` re-executes a manifest.

#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sra/checkpoint.hpp"
#include "sra/dataset.hpp"
#include "sra/errors.hpp"
#include "sra/explain.hpp"
#include "sra/filter.hpp"
#include "sra/manifest.hpp"
#include "sra/metrics.hpp"
#include "sra/pipeline.hpp"
#include "sra/preprocess.hpp"
#include "sra/selfcheck.hpp"
#include "sra/synthgen.hpp"

namespace sra::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kRuntimeError = 3,
  kCheckFailed = 4,
};

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::size_t jobs = 1;
};

namespace detail {

namespace fs = std::filesystem;

inline std::string join(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

/// Dataset from a CSV and a schema file; without a schema every column other
/// than `target` is numeric.
inline TabularDataset load_data(const std::string& data, const std::string& schema_path,
                                const std::string& target) {
  SchemaSpec schema;
  if (!schema_path.empty()) {
    schema = SchemaSpec::load(schema_path);
  } else {
    std::ifstream in(data, std::ios::binary);
    if (!in) throw DataError("cannot open csv '" + data + "'");
    csv::Reader reader(in);
    csv::Record header;
    if (!reader.next(header)) throw DataError("csv input is empty");
    for (const auto& name : header.fields) {
      schema.columns.push_back({name, name == target ? ColumnKind::kTarget : ColumnKind::kNumeric});
    }
  }
  return load_csv(data, schema);
}

inline std::vector<std::size_t> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open row list '" + path + "'");
  std::vector<std::size_t> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw DataError("row list '" + path + "' line " + std::to_string(lineno) +
                      ": not a row index");
    }
    rows.push_back(v);
  }
  return rows;
}

/// Comma-separated features given by name or 1-based position.
inline std::vector<std::size_t> parse_features(const std::string& spec,
                                               const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(' '));
    tok.erase(tok.find_last_not_of(' ') + 1);
    if (tok.empty()) continue;
    const auto it = std::find(names.begin(), names.end(), tok);
    if (it != names.end()) {
      out.push_back(static_cast<std::size_t>(it - names.begin()));
      continue;
    }
    std::size_t pos = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), pos);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || pos < 1 || pos > names.size()) {
      throw ConfigError("unknown feature '" + tok + "'");
    }
    out.push_back(pos - 1);
  }
  if (out.empty()) throw ConfigError("empty feature list '" + spec + "'");
  return out;
}

inline std::string default_preproc(const std::string& checkpoint) {
  fs::path p(checkpoint);
  const std::string stem = p.extension() == ".ckpt" ? p.stem().string() : p.filename().string();
  return (p.parent_path() / (stem + ".preproc.json")).string();
}

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

struct Loaded {
  AnyModel model;
  Preprocessor pre;
  TabularDataset data;
  std::vector<std::size_t> rows;
  Tensor x;
};

inline Loaded load_for_inference(const std::string& checkpoint, std::string preproc,
                                 const std::string& data, const std::string& schema,
                                 const std::string& target, const std::string& rows_file,
                                 const std::string& filter, RunManifest& manifest) {
  if (preproc.empty()) preproc = default_preproc(checkpoint);
  Loaded l{load_checkpoint(checkpoint), Preprocessor::load(preproc),
           load_data(data, schema, target), {}, {}};
  manifest.add_input(checkpoint);
  manifest.add_input(preproc);
  manifest.add_input(data);
  if (!schema.empty()) manifest.add_input(schema);
  if (!rows_file.empty()) {
    manifest.add_input(rows_file);
    l.rows = read_rows(rows_file);
    for (std::size_t r : l.rows) {
      if (r >= l.data.rows()) {
        throw DataError("row index " + std::to_string(r) + " out of range (dataset has " +
                        std::to_string(l.data.rows()) + " rows)");
      }
    }
  }
  if (!filter.empty()) {
    l.rows = RowFilter::parse(filter).select(l.data, l.rows);
  } else if (l.rows.empty()) {
    l.rows.resize(l.data.rows());
    for (std::size_t i = 0; i < l.rows.size(); ++i) l.rows[i] = i;
  }
  if (l.rows.empty()) throw DataError("no rows selected for explanation");
  if (l.pre.width() != features_of(l.model)) {
    throw DataError("preprocessor width " + std::to_string(l.pre.width()) +
                    " does not match checkpoint feature count " +
                    std::to_string(features_of(l.model)));
  }
  l.x = l.pre.transform(l.data.subset(l.rows));
  return l;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

namespace detail {

// Command bodies.

struct SynthArgs {
  std::string kind;
  std::size_t n = 0;
  double noise = -1.0;
  std::string name;
};

inline int cmd_synth(const Globals& g, const SynthArgs& a, RunManifest& m, std::ostream& out) {
  const synth::Kind kind = synth::parse_kind(a.kind);
  const synth::SynthSpec spec{kind, a.n, g.seed, a.noise};
  const synth::Sample s = synth::generate(spec);
  ensure_dir(g.out_dir);
  const std::string name = a.name.empty() ? a.kind : a.name;
  const std::string csv_path = join(g.out_dir, name + ".csv");
  const std::string schema_path = join(g.out_dir, name + ".schema");
  const TabularDataset d = s.dataset(a.kind);
  {
    std::ofstream f = open_out(csv_path);
    d.write_csv(f);
  }
  {
    std::ofstream f = open_out(schema_path);
    d.schema().write(f);
  }
  m.config = {{"kind", a.kind},
              {"n", d.rows()},
              {"noise", a.noise < 0 ? synth::info(kind).default_noise : a.noise},
              {"name", name}};
  m.add_output(csv_path);
  m.add_output(schema_path);
  out << "wrote " << d.rows() << " rows to " << csv_path << '\n';
  return kOk;
}

struct TrainArgs {
  std::string data, schema, target = "y";
  std::string model = "sralinear";
  std::string metric;
  std::size_t dk = 8, folds = 5;
  TrainConfig train;
};

inline int cmd_train(const Globals& g, const TrainArgs& a, RunManifest& m, std::ostream& out) {
  if (a.folds < 2) throw ConfigError("--folds must be >= 2, got " + std::to_string(a.folds));
  CvOptions opt;
  opt.model = parse_model(a.model);
  opt.dk = a.dk;
  opt.folds = a.folds;
  opt.jobs = g.jobs;
  opt.train = a.train;
  opt.train.seed = g.seed;
  if (!a.metric.empty()) opt.metric = parse_metric(a.metric);
  if (opt.model == ModelKind::kSraLinear) EncoderConfig{1, a.dk}.validate();
  opt.train.validate();

  const TabularDataset data = load_data(a.data, a.schema, a.target);
  m.add_input(a.data);
  if (!a.schema.empty()) m.add_input(a.schema);
  // Resolve the task-dependent default metric before the long run.
  const TaskKind task = data.infer_task();
  if (opt.metric) check_metric_task(*opt.metric, task);

  const CvResult cv = cross_validate(data, opt);
  ensure_dir(g.out_dir);
  const std::string prefix = std::string(model_name(opt.model));
  std::vector<std::string> written;
  for (const FoldResult& f : cv.folds) {
    const std::string base = join(g.out_dir, prefix + ".fold" + std::to_string(f.fold));
    save_checkpoint(base + ".ckpt", f.model);
    f.preprocessor.save(base + ".preproc.json");
    {
      std::ofstream rows = open_out(base + ".test.txt");
      for (std::size_t r : f.test_rows) rows << r << '\n';
    }
    {
      std::ofstream log = open_out(base + ".log.csv");
      f.log.write_csv(log);
    }
    for (const char* ext : {".ckpt", ".preproc.json", ".test.txt", ".log.csv"}) {
      written.push_back(base + ext);
    }
  }
  const std::string cv_path = join(g.out_dir, prefix + ".cv.csv");
  {
    std::ofstream f = open_out(cv_path);
    cv.report.write_csv(f);
  }
  written.push_back(cv_path);
  for (const auto& p : written) m.add_output(p);

  m.config = {{"model", prefix},
              {"task", std::string(task_name(cv.task))},
              {"metric", std::string(metric_name(cv.selection))},
              {"reported_metric", cv.report.metric},
              {"dk", a.dk},
              {"folds", a.folds},
              {"lr", a.train.adam.lr},
              {"beta1", a.train.adam.beta1},
              {"beta2", a.train.adam.beta2},
              {"eps", a.train.adam.eps},
              {"weight_decay", a.train.adam.weight_decay},
              {"batch_size", a.train.batch_size},
              {"epochs", a.train.max_epochs},
              {"dropout", a.train.dropout},
              {"patience", a.train.patience},
              {"val_fraction", a.train.val_fraction},
              {"jobs", g.jobs}};
  for (const FoldResult& f : cv.folds) {
    out << prefix << " fold " << f.fold << ": " << cv.report.metric << " = "
        << fixed(f.test_score) << " (best epoch " << f.log.best_epoch << " of "
        << f.log.epochs.size() << ")\n";
  }
  out << prefix << ' ' << cv.report.metric << " mean = " << fixed(cv.report.mean())
      << " std = " << fixed(cv.report.std()) << " over " << cv.folds.size() << " folds\n";
  return kOk;
}

struct ExplainArgs {
  std::string checkpoint, preproc, data, schema, target = "y", rows, filter;
  std::string relevant, candidates, curve, output, tpr_mode = "recall";
  std::size_t k = 0;
  double min_tpr = -1.0;
};

inline int cmd_explain(const Globals& g, const ExplainArgs& a, RunManifest& m, std::ostream& out) {
  Loaded l = load_for_inference(a.checkpoint, a.preproc, a.data, a.schema, a.target, a.rows,
                                a.filter, m);
  const std::vector<std::string> names = l.pre.feature_names();
  const std::vector<Explanation> ex = explain_any(l.model, l.x);
  ensure_dir(g.out_dir);
  const std::string path = a.output.empty() ? join(g.out_dir, "attributions.csv") : a.output;
  {
    std::ofstream f = open_out(path);
    write_attributions(f, ex, names, l.rows);
  }
  m.add_output(path);
  m.config = {{"filter", a.filter}, {"relevant", a.relevant}, {"candidates", a.candidates},
              {"k", a.k},           {"tpr_mode", a.tpr_mode}, {"instances", ex.size()}};
  out << "explained " << ex.size() << " instances -> " << path << '\n';

  int code = kOk;
  if (!a.relevant.empty()) {
    const auto relevant = parse_features(a.relevant, names);
    const auto candidates =
        a.candidates.empty() ? std::vector<std::size_t>{} : parse_features(a.candidates, names);
    const std::size_t k = a.k ? a.k : relevant.size();
    if (a.tpr_mode != "recall" && a.tpr_mode != "strict") {
      throw ConfigError("--tpr-mode must be 'recall' or 'strict'");
    }
    const auto mode = a.tpr_mode == "strict" ? metrics::TprMode::kStrictSet
                                             : metrics::TprMode::kRecall;
    if (k > (candidates.empty() ? names.size() : candidates.size())) {
      throw ConfigError("--k exceeds the number of ranked features");
    }
    const double tpr = metrics::tpr_topk(contribution_matrix(ex), relevant, k, mode, candidates);
    m.config["tpr"] = tpr;
    out << "tpr@" << k << " (" << a.tpr_mode << ") = " << fixed(tpr) << " over " << ex.size()
        << " instances\n";
    if (a.min_tpr >= 0.0 && !(tpr >= a.min_tpr)) {
      out << "check failed: tpr below " << a.min_tpr << '\n';
      code = kCheckFailed;
    }
  }
  if (!a.curve.empty()) {
    const auto* sra_model = std::get_if<SraLinearModel>(&l.model);
    if (!sra_model) throw UnsupportedModelError("--relevance-curve requires an sralinear checkpoint");
    const auto colon = a.curve.find(':');
    if (colon == std::string::npos) throw ConfigError("--relevance-curve expects 'feature:condition'");
    const std::size_t i = parse_features(a.curve.substr(0, colon), names).at(0);
    const std::size_t j = parse_features(a.curve.substr(colon + 1), names).at(0);
    const auto curve = relevance_curve(*sra_model, l.x, i, j);
    const std::string cpath = join(g.out_dir, "relevance_" + names[i] + "_vs_" + names[j] + ".csv");
    {
      std::ofstream f = open_out(cpath);
      write_relevance_curve(f, curve, names[i], names[j]);
    }
    m.add_output(cpath);
    out << "relevance curve (" << curve.size() << " points) -> " << cpath << '\n';
  }
  return code;
}

struct ReinforceArgs {
  std::string checkpoint, preproc, data, schema, target = "y", rows, filter;
};

inline int cmd_reinforce(const Globals& g, const ReinforceArgs& a, RunManifest& m,
                         std::ostream& out) {
  Loaded l = load_for_inference(a.checkpoint, a.preproc, a.data, a.schema, a.target, a.rows,
                                a.filter, m);
  const auto* model = std::get_if<SraLinearModel>(&l.model);
  if (!model) {
    throw UnsupportedModelError("reinforce requires an sralinear checkpoint, got '" +
                                std::string(model_name(kind_of(l.model))) + "'");
  }
  std::vector<double> y;
  for (std::size_t r : l.rows) y.push_back(l.data.target[r]);
  ensure_dir(g.out_dir);
  const ReinforcedExport r = export_reinforced(*model, l.x, y, g.out_dir);
  m.add_output(r.csv_path);
  for (const auto& p : r.svg_paths) m.add_output(p);
  m.config = {{"filter", a.filter}, {"instances", y.size()}};
  out << "wrote " << y.size() << " reinforced rows -> " << r.csv_path << '\n';
  if (r.svg_paths.empty()) {
    out << "notice: SVG export skipped, it needs exactly 2 features (p=" << model->features()
        << ")\n";
  } else {
    for (const auto& p : r.svg_paths) out << "wrote " << p << '\n';
  }
  return kOk;
}

struct GradcheckArgs {
  double step = 1e-5;
  double tol = 1e-4;
  std::size_t seeds = 20;
  std::string corrupt;
  double corrupt_factor = 1.5;
};

inline PrimitiveKind parse_primitive(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(PrimitiveKind::kMse); ++k) {
    if (s == primitive_name(static_cast<PrimitiveKind>(k))) return static_cast<PrimitiveKind>(k);
  }
  throw ConfigError("unknown primitive '" + s + "'");
}

inline int cmd_gradcheck(const Globals& g, const GradcheckArgs& a, std::ostream& out) {
  if (!(a.step > 0.0)) throw ConfigError("--step must be > 0");
  if (a.seeds < 1) throw ConfigError("--seeds must be >= 1");
  std::optional<AdjointFault> fault;
  if (!a.corrupt.empty()) fault = AdjointFault{parse_primitive(a.corrupt), a.corrupt_factor};

  bool ok = true;
  double worst = 0.0;
  std::size_t checks = 0;
  auto report = [&](const std::string& label, const GradCheckReport& r) {
    ++checks;
    ok = ok && r.passed;
    worst = std::max(worst, r.max_rel_error);
    if (!r.passed) {
      out << "FAIL " << label << " max_rel_error=" << format_double(r.max_rel_error) << '\n';
    }
  };
  std::map<std::string, double> by_name;
  for (std::size_t s = 0; s < a.seeds; ++s) {
    const std::uint64_t seed = g.seed + s;
    for (const auto& c : primitive_gradchecks(seed, a.step, a.tol, fault)) {
      report("primitive " + c.name + " seed " + std::to_string(seed), c.report);
      by_name[c.name] = std::max(by_name[c.name], c.report.max_rel_error);
    }
    const std::pair<ModelKind, TaskKind> cases[] = {
        {ModelKind::kSraLinear, TaskKind::kBinary},
        {ModelKind::kSraLinear, TaskKind::kRegression},
        {ModelKind::kMlp, TaskKind::kBinary},
        {ModelKind::kLinear, TaskKind::kBinary},
        {ModelKind::kLinear, TaskKind::kRegression}};
    for (const auto& [kind, task] : cases) {
      const ModelCheckCase c = random_case(kind, task, seed);
      const std::string name = std::string(model_name(kind)) + "/" + std::string(task_name(task));
      const GradCheckReport r = model_gradcheck(c, a.step, a.tol, fault);
      report("model " + name + " seed " + std::to_string(seed) + " (p=" + std::to_string(c.p) +
                 " b=" + std::to_string(c.batch) + ")",
             r);
      by_name[name] = std::max(by_name[name], r.max_rel_error);
    }
  }
  for (const auto& [name, e] : by_name) {
    out << std::left << std::setw(22) << name << " max_rel_error " << format_double(e)
        << (e < a.tol ? "  ok" : "  FAIL") << '\n';
  }
  out << (ok ? "gradcheck passed: " : "gradcheck FAILED: ") << checks << " checks, step "
      << format_double(a.step) << ", tolerance " << format_double(a.tol)
      << ", worst relative error " << format_double(worst) << '\n';
  return ok ? kOk : kCheckFailed;
}

inline int cmd_replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const RunManifest recorded = RunManifest::load(manifest_path);
  if (recorded.argv.empty() || recorded.argv.front() == "replay") {
    throw ConfigError("manifest '" + manifest_path + "' has no replayable command");
  }
  for (const auto& [path, digest] : recorded.inputs) {
    if (file_digest(path) != digest) {
      throw DataError("input '" + path + "' changed since the manifest was written");
    }
  }
  const int code = run(recorded.argv, out, err);
  if (code != kOk) return code;
  std::size_t mismatched = 0;
  for (const auto& [path, digest] : recorded.outputs) {
    if (file_digest(path) != digest) {
      out << "mismatch: " << path << '\n';
      ++mismatched;
    }
  }
  out << "replayed '" << recorded.command << "': " << recorded.outputs.size() - mismatched << " of "
      << recorded.outputs.size() << " outputs reproduced\n";
  return mismatched ? kCheckFailed : kOk;
}

}  // namespace detail

/// Parses `args` (without the program name) and runs one command.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Self-reinforcement attention models for tabular data"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--jobs", g.jobs, "parallel folds")->capture_default_str()->check(
      CLI::PositiveNumber);

  SynthArgs sa;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--kind", sa.kind, "dataset kind")->required();
  synth->add_option("--n", sa.n, "sample count (0: kind default)");
  synth->add_option("--noise", sa.noise, "noise scale for 2-D shapes (negative: default)");
  synth->add_option("--name", sa.name, "output file stem (default: kind)");

  TrainArgs ta;
  CLI::App* train_cmd = app.add_subcommand("train", "cross-validate and store fold checkpoints");
  train_cmd->add_option("--data", ta.data, "input csv")->required();
  train_cmd->add_option("--schema", ta.schema, "schema file (name,kind lines)");
  train_cmd->add_option("--target", ta.target, "target column when no schema is given")
      ->capture_default_str();
  train_cmd->add_option("--model", ta.model, "sralinear | lr | mlp")->capture_default_str();
  train_cmd->add_option("--dk", ta.dk, "key/query width")->capture_default_str();
  train_cmd->add_option("--folds", ta.folds, "cross-validation folds")->capture_default_str();
  train_cmd->add_option("--metric", ta.metric, "aucroc | aucpr | mse (default by task)");
  train_cmd->add_option("--lr", ta.train.adam.lr, "learning rate")->capture_default_str();
  train_cmd->add_option("--batch-size", ta.train.batch_size)->capture_default_str();
  train_cmd->add_option("--epochs", ta.train.max_epochs)->capture_default_str();
  train_cmd->add_option("--dropout", ta.train.dropout)->capture_default_str();
  train_cmd->add_option("--weight-decay", ta.train.adam.weight_decay)->capture_default_str();
  train_cmd->add_option("--patience", ta.train.patience)->capture_default_str();
  train_cmd->add_option("--val-fraction", ta.train.val_fraction)->capture_default_str();

  ExplainArgs ea;
  CLI::App* explain_cmd = app.add_subcommand("explain", "write per-instance attributions");
  explain_cmd->add_option("--checkpoint", ea.checkpoint)->required();
  explain_cmd->add_option("--preproc", ea.preproc, "preprocessor (default: next to checkpoint)");
  explain_cmd->add_option("--data", ea.data)->required();
  explain_cmd->add_option("--schema", ea.schema);
  explain_cmd->add_option("--target", ea.target)->capture_default_str();
  explain_cmd->add_option("--rows", ea.rows, "file of 0-based row indices");
  explain_cmd->add_option("--filter", ea.filter, "e.g. \"x5<=0 and y==1\"");
  explain_cmd->add_option("--relevant", ea.relevant, "relevant features, names or 1-based");
  explain_cmd->add_option("--candidates", ea.candidates, "features ranked for tpr (default all)");
  explain_cmd->add_option("--k", ea.k, "top-k size (default: number of relevant features)");
  explain_cmd->add_option("--tpr-mode", ea.tpr_mode, "recall | strict")->capture_default_str();
  explain_cmd->add_option("--min-tpr", ea.min_tpr, "exit with a failed check below this tpr");
  explain_cmd->add_option("--relevance-curve", ea.curve, "feature:condition, e.g. x3:x5");
  explain_cmd->add_option("--output", ea.output, "attribution csv path");

  ReinforceArgs ra;
  CLI::App* reinforce_cmd = app.add_subcommand("reinforce", "export reinforced inputs");
  reinforce_cmd->add_option("--checkpoint", ra.checkpoint)->required();
  reinforce_cmd->add_option("--preproc", ra.preproc);
  reinforce_cmd->add_option("--data", ra.data)->required();
  reinforce_cmd->add_option("--schema", ra.schema);
  reinforce_cmd->add_option("--target", ra.target)->capture_default_str();
  reinforce_cmd->add_option("--rows", ra.rows);
  reinforce_cmd->add_option("--filter", ra.filter);

  GradcheckArgs ga;
  CLI::App* grad_cmd = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  grad_cmd->add_option("--step", ga.step)->capture_default_str();
  grad_cmd->add_option("--tol", ga.tol)->capture_default_str();
  grad_cmd->add_option("--seeds", ga.seeds)->capture_default_str();
  grad_cmd->add_option("--corrupt-adjoint", ga.corrupt, "debug: scale one primitive's adjoint");
  grad_cmd->add_option("--corrupt-factor", ga.corrupt_factor)->capture_default_str();

  std::string manifest_path;
  CLI::App* replay_cmd = app.add_subcommand("replay", "re-run a manifest and compare outputs");
  replay_cmd->add_option("manifest", manifest_path)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  RunManifest m;
  m.argv = args;
  m.seed = g.seed;
  try {
    int code = kOk;
    std::string command;
    if (synth->parsed()) {
      command = "synth";
      m.command = command;
      code = cmd_synth(g, sa, m, out);
    } else if (train_cmd->parsed()) {
      command = "train";
      m.command = command;
      code = cmd_train(g, ta, m, out);
      command = std::string(model_name(parse_model(ta.model))) + ".train";
    } else if (explain_cmd->parsed()) {
      command = "explain";
      m.command = command;
      code = cmd_explain(g, ea, m, out);
    } else if (reinforce_cmd->parsed()) {
      command = "reinforce";
      m.command = command;
      code = cmd_reinforce(g, ra, m, out);
    } else if (grad_cmd->parsed()) {
      return cmd_gradcheck(g, ga, out);
    } else if (replay_cmd->parsed()) {
      return cmd_replay(manifest_path, out, err);
    }
    if (command == "synth") command = sa.name.empty() ? sa.kind : sa.name;
    const std::string mpath = join(g.out_dir, command + ".manifest.json");
    m.save(mpath);
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnsupportedModelError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace sra::cli
