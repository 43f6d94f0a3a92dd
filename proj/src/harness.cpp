/*
 * Copyright 2026 The StratShield Authors.
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

#include "stratshield/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "stratshield/error.hpp"
#include "stratshield/serialize.hpp"
#include "stratshield/strategic.hpp"

namespace stratshield {

namespace {

// One RFC-4180 record; false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::vector<bool>& quoted,
                 std::size_t& line) {
  fields.clear();
  quoted.clear();
  std::string cur;
  bool in_quotes = false;
  bool was_quoted = false;
  bool any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          cur.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cur.push_back(static_cast<char>(c));
      }
      continue;
    }
    if (c == '"' && !was_quoted && cur.find_first_not_of(" \t") == std::string::npos) {
      cur.clear();
      in_quotes = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      quoted.push_back(was_quoted);
      cur.clear();
      was_quoted = false;
    } else if (c == '\n') {
      ++line;
      break;
    } else if (c != '\r') {
      cur.push_back(static_cast<char>(c));
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field near line " + std::to_string(line));
  if (!any) return false;
  fields.push_back(std::move(cur));
  quoted.push_back(was_quoted);
  return true;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

}  // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& opts) {
  std::vector<std::string> header;
  std::vector<bool> quoted;
  std::size_t line = 0;
  do {
    if (!read_record(in, header, quoted, line)) throw ParseError("CSV has no header row");
  } while (blank_record(header));
  for (auto& h : header) h = trim(h);

  std::size_t label = header.size() - 1;
  if (!opts.label_column.empty()) {
    const auto it = std::find(header.begin(), header.end(), opts.label_column);
    if (it == header.end()) throw SchemaError("label column '" + opts.label_column + "' not in header");
    label = static_cast<std::size_t>(it - header.begin());
  }
  if (header.size() < 2) throw SchemaError("CSV needs at least one feature column and a label");
  for (const auto& c : opts.categorical_columns) {
    if (std::find(header.begin(), header.end(), c) == header.end()) {
      throw SchemaError("categorical column '" + c + "' not in header");
    }
  }

  std::vector<FeatureSpec> specs;
  std::vector<std::size_t> columns;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == label) continue;
    const bool cat = std::find(opts.categorical_columns.begin(), opts.categorical_columns.end(), header[j]) !=
                     opts.categorical_columns.end();
    specs.push_back({header[j], cat ? FeatureKind::kCategorical : FeatureKind::kNumeric, {}});
    columns.push_back(j);
  }
  std::vector<std::map<std::string, std::int32_t>> interned(specs.size());

  std::vector<LabeledExample> rows;
  std::vector<std::string> fields;
  while (true) {
    const std::size_t record_line = line + 1;
    if (!read_record(in, fields, quoted, line)) break;
    if (blank_record(fields)) continue;
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(record_line) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    LabeledExample row;
    const auto y = trim(fields[label]);
    if (y == opts.positive_label) {
      row.y = 1;
    } else if (y == opts.negative_label) {
      row.y = 0;
    } else {
      throw ParseError("line " + std::to_string(record_line) + ": unknown label '" + y + "'");
    }
    row.x = FeatureVector(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto cell = quoted[columns[i]] ? fields[columns[i]] : trim(fields[columns[i]]);
      if (std::find(opts.missing_tokens.begin(), opts.missing_tokens.end(), cell) != opts.missing_tokens.end()) {
        continue;
      }
      if (specs[i].kind == FeatureKind::kCategorical) {
        auto [it, fresh] = interned[i].emplace(cell, static_cast<std::int32_t>(specs[i].symbols.size()));
        if (fresh) specs[i].symbols.push_back(cell);
        row.x[i] = FeatureValue::categorical(it->second);
      } else {
        try {
          row.x[i] = FeatureValue::numeric(parse_double(cell));
        } catch (const Error&) {
          throw ParseError("line " + std::to_string(record_line) + ", column '" + specs[i].name +
                           "': cannot parse '" + cell + "' as a number");
        }
      }
    }
    rows.push_back(std::move(row));
  }
  Dataset out{FeatureSchema(std::move(specs)), std::move(rows)};
  if (out.empty()) throw Error(ErrorCode::kEmptyData, "CSV has no data rows");
  return out;
}

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return parse_csv(in, opts);
}

Dataset align_to_schema(const Dataset& data, const FeatureSchema& target) {
  if (data.schema.size() != target.size()) {
    throw SchemaError("dataset has " + std::to_string(data.schema.size()) + " features, model expects " +
                      std::to_string(target.size()));
  }
  std::vector<std::vector<std::int32_t>> remap(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto& have = data.schema[i];
    const auto& want = target[i];
    if (have.name != want.name || have.kind != want.kind) {
      throw SchemaError("feature " + std::to_string(i) + " is '" + have.name + "', model expects '" +
                        want.name + "' of the same kind");
    }
    if (want.kind != FeatureKind::kCategorical) continue;
    auto next = static_cast<std::int32_t>(want.symbols.size());
    for (const auto& sym : have.symbols) {
      const auto it = std::find(want.symbols.begin(), want.symbols.end(), sym);
      remap[i].push_back(it == want.symbols.end() ? next++ : static_cast<std::int32_t>(it - want.symbols.begin()));
    }
  }
  Dataset out{target, data.rows};
  for (auto& row : out.rows) {
    for (std::size_t i = 0; i < row.x.size(); ++i) {
      if (!row.x[i].is_categorical()) continue;
      const auto id = static_cast<std::size_t>(row.x[i].category());
      if (id >= remap[i].size()) throw SchemaError("category id outside the dataset's symbol table");
      row.x[i] = FeatureValue::categorical(remap[i][id]);
    }
  }
  return out;
}

Dataset mask_features(const Dataset& data, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must lie in [0, 1)");
  }
  Dataset out = data;
  if (epsilon == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution drop(epsilon);
  for (auto& row : out.rows) {
    for (std::size_t i = 0; i < row.x.size(); ++i) {
      if (!row.x[i].is_missing() && drop(rng)) row.x[i] = FeatureValue::missing();
    }
  }
  return out;
}

Dataset undersample_balance(const Dataset& data, std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t r = 0; r < data.size(); ++r) (data.rows[r].y == 1 ? pos : neg).push_back(r);
  if (pos.empty() || neg.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot balance a dataset with a single class");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  const std::size_t m = std::min(pos.size(), neg.size());
  std::vector<std::size_t> keep(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(m));
  keep.insert(keep.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(m));
  std::shuffle(keep.begin(), keep.end(), rng);
  Dataset out{data.schema, {}};
  out.rows.reserve(keep.size());
  for (auto r : keep) out.rows.push_back(data.rows[r]);
  return out;
}

std::optional<double> auc(std::vector<std::pair<double, int>> scores) {
  std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < scores.size();) {
    std::size_t j = i;
    while (j < scores.size() && scores[j].first == scores[i].first) ++j;
    // Midrank of the tie group, 1-based.
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (scores[t].second == 1) {
        rank_sum += mid;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

std::pair<double, double> mean_stddev(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::size_t worker_count(std::size_t requested, std::size_t tasks) {
  std::size_t n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("STRATSHIELD_THREADS")) {
      try {
        n = static_cast<std::size_t>(std::max<std::int64_t>(0, parse_int(env)));
      } catch (const Error&) {
        n = 0;
      }
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, tasks));
}

bool single_class(const Dataset& d) { return d.positives() == 0 || d.positives() == d.size(); }

// Same error code, message prefixed with the failing stage.
[[noreturn]] void rethrow_staged(const std::string& stage) {
  try {
    throw;
  } catch (const Error& e) {
    throw Error(e.code(), "[" + stage + "] " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "[" + stage + "] " + e.what());
  }
}

}  // namespace

RepeatPlan plan_repeat(const Dataset& data, const CvConfig& cfg, std::size_t repeat) {
  const auto s = derive_seed(cfg.seed, repeat, 0);
  std::mt19937_64 rng(s);
  const auto balance_seed = rng();
  const auto mask_seed = rng();
  const auto split_seed = rng();

  Dataset cur = data;
  if (cfg.mask_first) cur = mask_features(cur, cfg.epsilon, mask_seed);
  if (cfg.balance) cur = undersample_balance(cur, balance_seed);
  if (!cfg.mask_first) cur = mask_features(cur, cfg.epsilon, mask_seed);

  std::vector<std::size_t> order(cur.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 split_rng(split_seed);
  std::shuffle(order.begin(), order.end(), split_rng);
  RepeatPlan plan;
  plan.repeat = repeat;
  plan.half_a.schema = cur.schema;
  plan.half_b.schema = cur.schema;
  const std::size_t half = cur.size() / 2;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < half ? plan.half_a : plan.half_b).rows.push_back(cur.rows[order[i]]);
  }
  return plan;
}

FoldResult evaluate_fold(ClassifierKind kind, const Dataset& train, const Dataset& test,
                         const ClassifierOptions& opts) {
  FoldResult out;
  out.classifier = kind;
  if (train.empty() || test.empty() || single_class(train) || single_class(test)) {
    out.skipped = true;
    out.skip_reason = train.empty() || single_class(train) ? "single-class training half"
                                                           : "single-class test half";
    return out;
  }
  const auto model = train_classifier(kind, train, opts);
  const auto local = model.preprocess(test);
  const auto handle = model.model_handle();
  out.truthful = truthful_accuracy(handle, local);
  std::int64_t correct = 0;
  std::vector<std::pair<double, int>> scores;
  for (const auto& row : local.rows) {
    const auto br = best_response(handle, row.x);
    correct += br.outcome == row.y ? 1 : 0;
    if (handle.proba) scores.emplace_back(handle.proba(br.report), row.y);
  }
  out.strategic = {correct, static_cast<std::int64_t>(local.size())};
  if (handle.proba) out.auc = auc(std::move(scores));
  return out;
}

CvResult nx2_cv(const Dataset& data, const CvConfig& cfg) {
  if (cfg.repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be at least 1");
  if (cfg.classifiers.empty()) throw Error(ErrorCode::kInvalidArgument, "no classifiers requested");
  data.validate();

  std::vector<RepeatPlan> plans;
  plans.reserve(cfg.repeats);
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    try {
      plans.push_back(plan_repeat(data, cfg, r));
    } catch (...) {
      rethrow_staged("prepare repeat " + std::to_string(r));
    }
  }

  struct Task {
    std::size_t repeat, fold, classifier;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cfg.classifiers.size(); ++c) {
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      for (std::size_t f = 0; f < 2; ++f) tasks.push_back({r, f, c});
    }
  }
  std::vector<FoldResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      const auto& task = tasks[t];
      const auto kind = cfg.classifiers[task.classifier];
      const auto& plan = plans[task.repeat];
      const auto& train = task.fold == 0 ? plan.half_a : plan.half_b;
      const auto& test = task.fold == 0 ? plan.half_b : plan.half_a;
      ClassifierOptions opts = cfg.model;
      opts.seed = derive_seed(cfg.seed, task.repeat, task.fold + 1);
      try {
        try {
          results[t] = evaluate_fold(kind, train, test, opts);
        } catch (...) {
          rethrow_staged(to_string(kind) + " repeat " + std::to_string(task.repeat) + " fold " +
                         std::to_string(task.fold));
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
      results[t].repeat = task.repeat;
      results[t].fold = task.fold;
      results[t].classifier = kind;
    }
  };
  const auto n_workers = worker_count(cfg.threads, tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CvResult out;
  out.folds = results;
  for (std::size_t c = 0; c < cfg.classifiers.size(); ++c) {
    MetricRow row;
    row.classifier = to_string(cfg.classifiers[c]);
    std::vector<double> tru, str, aucs;
    for (const auto& f : results) {
      if (f.classifier != cfg.classifiers[c]) continue;
      if (f.skipped) {
        ++row.skipped;
        continue;
      }
      ++row.folds;
      tru.push_back(f.truthful.value());
      str.push_back(f.strategic.value());
      if (f.auc) aucs.push_back(*f.auc);
    }
    std::tie(row.truthful_mean, row.truthful_std) = mean_stddev(tru);
    std::tie(row.strategic_mean, row.strategic_std) = mean_stddev(str);
    if (!aucs.empty()) {
      const auto [m, s] = mean_stddev(aucs);
      row.auc_mean = m;
      row.auc_std = s;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

CvResult run_experiment(const ExperimentConfig& cfg) {
  Dataset data;
  try {
    data = load_csv(cfg.dataset_path, cfg.csv);
  } catch (...) {
    rethrow_staged("load");
  }
  return nx2_cv(data, cfg.cv);
}

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

const std::vector<std::string> kColumns = {"classifier",     "folds",         "skipped",
                                           "truthful_mean",  "truthful_std",  "strategic_mean",
                                           "strategic_std",  "auc_mean",      "auc_std"};

std::vector<std::string> cells(const MetricRow& r) {
  return {r.classifier,
          std::to_string(r.folds),
          std::to_string(r.skipped),
          fixed(r.truthful_mean),
          fixed(r.truthful_std),
          fixed(r.strategic_mean),
          fixed(r.strategic_std),
          r.auc_mean ? fixed(*r.auc_mean) : "",
          r.auc_std ? fixed(*r.auc_std) : ""};
}

}  // namespace

void write_metrics_csv(std::ostream& os, const CvResult& result) {
  for (std::size_t j = 0; j < kColumns.size(); ++j) os << (j ? "," : "") << kColumns[j];
  os << "\r\n";
  for (const auto& r : result.rows) {
    const auto c = cells(r);
    for (std::size_t j = 0; j < c.size(); ++j) os << (j ? "," : "") << csv_field(c[j]);
    os << "\r\n";
  }
}

void write_metrics_table(std::ostream& os, const CvResult& result) {
  std::vector<std::vector<std::string>> grid{kColumns};
  for (const auto& r : result.rows) {
    auto c = cells(r);
    for (auto& s : c) {
      if (s.empty()) s = "-";
    }
    grid.push_back(std::move(c));
  }
  std::vector<std::size_t> width(kColumns.size(), 0);
  for (const auto& row : grid) {
    for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
  }
  for (const auto& row : grid) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) os << "  ";
      if (j == 0) {
        os << std::left << std::setw(static_cast<int>(width[j])) << row[j];
      } else {
        os << std::right << std::setw(static_cast<int>(width[j])) << row[j];
      }
    }
    os << '\n';
  }
  std::size_t skipped = 0;
  for (const auto& f : result.folds) skipped += static_cast<std::size_t>(f.skipped);
  if (skipped > 0) {
    os << "skipped folds:";
    for (const auto& f : result.folds) {
      if (f.skipped) {
        os << ' ' << to_string(f.classifier) << '/' << f.repeat << '/' << f.fold << " (" << f.skip_reason << ')';
      }
    }
    os << '\n';
  }
}

Example1 example1() {
  FeatureSchema schema({{"SAT", FeatureKind::kCategorical, {"h", "l"}},
                        {"ACT", FeatureKind::kCategorical, {"h", "l"}}});
  const auto h = FeatureValue::categorical(0);
  const auto l = FeatureValue::categorical(1);
  const auto m = FeatureValue::missing();
  // Each input carries 10 of the 80 units; pos/neg split by Pr(Y | X).
  const std::pair<FeatureVector, std::int64_t> table[] = {
      {{h, h}, 9}, {{h, l}, 7}, {{l, h}, 3}, {{l, l}, 1},
      {{h, m}, 6}, {{m, h}, 6}, {{l, m}, 2}, {{m, l}, 2},
  };
  EmpiricalDistribution::Map map;
  for (const auto& [x, pos] : table) map[x] = {pos, 10 - pos};
  return {schema, EmpiricalDistribution(2, std::move(map))};
}

Example1Report run_example1() {
  const auto ex = example1();
  const auto trained = train_mincut(ex.schema, ex.distribution);
  Example1Report out;
  for (const auto& x : trained.model.accepted()) out.accepted.push_back(to_string(x, &ex.schema));
  std::sort(out.accepted.begin(), out.accepted.end());
  out.loss = empirical_loss(trained.model, ex.distribution);
  out.brute_force_loss = brute_force_optimal(ex.distribution).loss;
  out.flow = trained.cut.flow_value;
  return out;
}

}  // namespace stratshield
