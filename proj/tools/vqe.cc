// Copyright 2026 The vqe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// vqe: ingest, index, query, explain, emit-sql, gen and bench.
//
// Exit codes: 0 ok, 1 ingest error, 2 query diagnostics (or bad usage),
// 3 runtime error.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vqe/engine.h"
#include "vqe/error.h"
#include "vqe/indices.h"
#include "vqe/region_store.h"
#include "vqe/sql_emitter.h"
#include "vqe/synth.h"
#include "vqe/vql.h"

namespace vqe::cli {
namespace {

enum Exit { kOk = 0, kIngest = 1, kDiagnostics = 2, kRuntime = 3 };

// Thrown to leave a command with a specific exit code after reporting.
struct Failure {
  int code;
};

void Report(const std::string &message) { std::cerr << "vqe: " << message << "\n"; }

[[noreturn]] void Fail(int code, const std::string &message) {
  Report(message);
  throw Failure{code};
}

// ---------------------------------------------------------------------------
// Shared options

struct StoreOptions {
  std::string path;
  std::vector<std::string> dicts;  // NAME=PATH
};

std::pair<std::string, std::string> SplitAssignment(const std::string &s, const char *what) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    Fail(kDiagnostics, std::string("expected ") + what + " as NAME=VALUE, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

RegionStore LoadStoreOrFail(const StoreOptions &o) {
  try {
    RegionStore store = LoadStoreFile(o.path);
    for (const auto &d : o.dicts) {
      auto [name, path] = SplitAssignment(d, "--dict");
      store.RegisterDictionary(LoadDictionaryFile(name, path));
    }
    return store;
  } catch (const Error &e) {
    Fail(kIngest, e.what());
  }
}

struct QueryOptions {
  std::string file;
  std::string text;
  std::vector<std::string> params;  // k=v
};

void AddQueryOptions(CLI::App *cmd, QueryOptions &q) {
  auto *file = cmd->add_option("--query", q.file, "VQL query file");
  auto *text = cmd->add_option("--q", q.text, "VQL query text");
  file->excludes(text);
  cmd->add_option("--param", q.params, "bind ${name} placeholders (name=value)");
}

std::string QueryText(const QueryOptions &q) {
  if (!q.file.empty()) {
    std::ifstream in(q.file, std::ios::binary);
    if (!in) Fail(kDiagnostics, "cannot read query file '" + q.file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  if (q.text.empty()) Fail(kDiagnostics, "one of --query or --q is required");
  return q.text;
}

// Parses, binds and validates; diagnostics go to stderr with exit 2.
vql::TypedQuery Compile(const QueryOptions &q, const vql::Catalog &catalog) {
  std::string text = QueryText(q);
  bool color = vql::ColorFromEnvironment(STDERR_FILENO);
  auto fail = [&](const std::vector<vql::Diagnostic> &diags) {
    std::cerr << vql::RenderDiagnostics(text, diags, color);
    throw Failure{kDiagnostics};
  };
  vql::ParseResult parsed = vql::Parse(text);
  if (!parsed.query) fail(parsed.diagnostics);
  std::map<std::string, std::string> params;
  for (const auto &p : q.params) params.insert(SplitAssignment(p, "--param"));
  std::vector<vql::Diagnostic> bound = vql::SubstituteParams(*parsed.query, params);
  if (!bound.empty()) fail(bound);
  vql::ValidationResult v = vql::Validate(*parsed.query, catalog);
  if (!v.typed) fail(v.diagnostics);
  return *v.typed;
}

vql::Catalog CatalogOf(const RegionStore &store) {
  vql::Catalog c;
  for (const auto &[name, dict] : store.dictionaries()) c.dictionaries.insert(name);
  return c;
}

IndexConfig ConfigOrFail(const std::string &name) {
  auto c = IndexConfig::Parse(name);
  if (!c) Fail(kDiagnostics, "unknown index configuration '" + name + "'");
  return *c;
}

IndexSet IndicesFor(const RegionStore &store, IndexConfig config, const std::string &index_file) {
  if (index_file.empty()) return IndexSet::Build(store, config);
  IndexSet loaded = ReadIndexFile(store, index_file);
  if ((config.text && !loaded.text) || (config.region && !loaded.region)) {
    throw Error(ErrorCode::kIndexMismatch,
                "'" + index_file + "' lacks indices needed for '" + config.Name() + "'");
  }
  return loaded.Restrict(config);
}

// ---------------------------------------------------------------------------
// Commands

struct IngestArgs {
  std::string input, out;
  std::vector<std::string> dicts;
};

int Ingest(const IngestArgs &a) {
  RegionStore store = LoadStoreOrFail({a.input, a.dicts});
  try {
    SaveStoreFile(store, a.out);
  } catch (const Error &e) {
    Fail(kIngest, e.what());
  }
  std::cerr << "ingested " << store.size() << " regions on " << store.pages().size()
            << " pages into " << a.out << "\n";
  return kOk;
}

struct IndexArgs {
  StoreOptions store;
  std::string out;
  std::string indices = "all";
};

int Index(const IndexArgs &a) {
  RegionStore store = LoadStoreOrFail(a.store);
  IndexConfig config = ConfigOrFail(a.indices);
  WriteIndexFile(store, IndexSet::Build(store, config), a.out);
  std::cerr << "wrote " << config.Name() << " indices for " << store.size() << " regions to "
            << a.out << "\n";
  return kOk;
}

struct QueryArgs {
  StoreOptions store;
  QueryOptions query;
  std::string indices = "all";
  std::string index_file;
  std::string format = "jsonl";
  unsigned threads = 0;
};

int Query(const QueryArgs &a) {
  RegionStore store = LoadStoreOrFail(a.store);
  IndexConfig config = ConfigOrFail(a.indices);
  vql::TypedQuery typed = Compile(a.query, CatalogOf(store));
  IndexSet indices = IndicesFor(store, config, a.index_file);
  engine::PhysicalPlan plan = engine::Optimize(engine::Lower(typed), store, indices);
  engine::ResultSet rs = engine::Execute(plan, store, indices, a.threads);
  if (a.format == "csv") {
    engine::WriteCsv(rs, store, std::cout);
  } else {
    engine::WriteJsonl(rs, store, std::cout);
  }
  return kOk;
}

struct ExplainArgs {
  StoreOptions store;
  QueryOptions query;
  std::string indices = "all";
  bool logical_only = false;
};

int Explain(const ExplainArgs &a) {
  RegionStore store = LoadStoreOrFail(a.store);
  IndexConfig config = ConfigOrFail(a.indices);
  engine::LogicalPlan logical = engine::Lower(Compile(a.query, CatalogOf(store)));
  std::cout << "logical plan:\n" << engine::Explain(logical);
  if (a.logical_only) return kOk;
  IndexSet indices = IndexSet::Build(store, config);
  std::cout << "\nphysical plan:\n" << engine::Explain(engine::Optimize(logical, store, indices));
  return kOk;
}

struct EmitArgs {
  QueryOptions query;
  std::string store;
  std::vector<std::string> dict_names;
  bool strict = false;
  bool placeholders = false;
};

int EmitSql(const EmitArgs &a) {
  vql::Catalog catalog;
  if (!a.store.empty()) catalog = CatalogOf(LoadStoreOrFail({a.store, {}}));
  catalog.dictionaries.insert(a.dict_names.begin(), a.dict_names.end());
  engine::LogicalPlan plan = engine::Lower(Compile(a.query, catalog));
  sql::SqlText text = sql::Emit(plan, {.strict = a.strict, .placeholders = a.placeholders});
  std::cout << text.statement << "\n";
  for (std::size_t i = 0; i < text.parameters.size(); ++i) {
    std::cout << "-- ?" << i + 1 << " = " << text.parameters[i] << "\n";
  }
  for (const auto &w : text.warnings) std::cerr << "warning: " << w << "\n";
  return kOk;
}

struct GenArgs {
  std::size_t pages = 10;
  std::size_t regions_per_page = 300;
  std::uint64_t seed = 1;
  std::string out;
};

int Gen(const GenArgs &a) {
  RegionStore store = SynthCorpus(a.pages, a.regions_per_page, DefaultVocabulary(), a.seed);
  SaveStoreFile(store, a.out);
  std::cerr << "generated " << store.size() << " regions on " << store.pages().size()
            << " pages into " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// Bench

struct BenchArgs {
  StoreOptions store;
  std::string queries;
  std::vector<std::size_t> sizes = {100000};
  std::size_t regions_per_page = 300;
  std::uint64_t seed = 1;
  int runs = 5;
  unsigned threads = 0;
  std::vector<std::string> params;
  std::string json;
};

using Json = nlohmann::ordered_json;

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

double Ms(std::chrono::steady_clock::duration d) {
  return std::chrono::duration<double, std::milli>(d).count();
}

Json BenchStore(const RegionStore &store, const std::string &label,
                const std::vector<std::filesystem::path> &queries, const BenchArgs &a) {
  static const char *kConfigs[] = {"none", "text", "region", "all"};
  auto t0 = std::chrono::steady_clock::now();
  IndexSet all = IndexSet::Build(store, IndexConfig::All());
  Json report;
  report["store"] = label;
  report["pages"] = store.pages().size();
  report["regions"] = store.size();
  report["index_build_ms"] = Ms(std::chrono::steady_clock::now() - t0);
  report["queries"] = Json::array();
  for (const auto &path : queries) {
    QueryOptions q{path.string(), "", a.params};
    engine::LogicalPlan logical = engine::Lower(Compile(q, CatalogOf(store)));
    // Correctness before timing: every configuration must agree.
    std::optional<engine::ResultSet> reference;
    std::vector<std::pair<IndexSet, engine::PhysicalPlan>> plans;
    for (const char *name : kConfigs) {
      IndexSet indices = all.Restrict(*IndexConfig::Parse(name));
      engine::PhysicalPlan plan = engine::Optimize(logical, store, indices);
      engine::ResultSet rs = engine::Execute(plan, store, indices, a.threads);
      if (!reference) {
        reference = std::move(rs);
      } else if (rs != *reference) {
        Fail(kRuntime, path.filename().string() + ": configuration '" + name +
                           "' disagrees with 'none' on " + label + "; no timings reported");
      }
      plans.emplace_back(std::move(indices), std::move(plan));
    }
    Json entry;
    entry["query"] = path.filename().string();
    entry["rows"] = reference->rows.size();
    Json configs = Json::object();
    double baseline = 0;
    for (std::size_t c = 0; c < plans.size(); ++c) {
      std::vector<double> times;
      for (int r = 0; r < a.runs; ++r) {
        auto start = std::chrono::steady_clock::now();
        engine::ResultSet rs = engine::Execute(plans[c].second, store, plans[c].first, a.threads);
        times.push_back(Ms(std::chrono::steady_clock::now() - start));
      }
      double median = Median(times);
      if (c == 0) baseline = median;
      configs[kConfigs[c]] = {{"median_ms", median},
                              {"runs_ms", times},
                              {"speedup", median > 0 ? baseline / median : 0.0}};
    }
    entry["configs"] = std::move(configs);
    report["queries"].push_back(std::move(entry));
  }
  return report;
}

void PrintTable(const Json &report, std::ostream &out) {
  out << report["store"].get<std::string>() << ": " << report["regions"] << " regions, "
      << report["pages"] << " pages, index build " << std::fixed << std::setprecision(1)
      << report["index_build_ms"].get<double>() << " ms\n";
  out << std::left << std::setw(26) << "query" << std::right << std::setw(8) << "rows";
  for (const char *c : {"none", "text", "region", "all"}) out << std::setw(12) << c;
  out << std::setw(10) << "speedup" << "\n";
  for (const auto &q : report["queries"]) {
    out << std::left << std::setw(26) << q["query"].get<std::string>() << std::right
        << std::setw(8) << q["rows"];
    for (const auto &[name, c] : q["configs"].items()) {
      out << std::setw(10) << std::setprecision(2) << c["median_ms"].get<double>() << "ms";
    }
    out << std::setw(9) << std::setprecision(1) << q["configs"]["all"]["speedup"].get<double>()
        << "x\n";
  }
}

int Bench(const BenchArgs &a) {
  if (a.runs < 1) Fail(kDiagnostics, "--runs must be at least 1");
  std::vector<std::filesystem::path> queries;
  std::error_code ec;
  for (const auto &entry : std::filesystem::directory_iterator(a.queries, ec)) {
    if (entry.path().extension() == ".vql") queries.push_back(entry.path());
  }
  if (ec) Fail(kDiagnostics, "cannot list '" + a.queries + "': " + ec.message());
  if (queries.empty()) Fail(kDiagnostics, "no .vql files in '" + a.queries + "'");
  std::sort(queries.begin(), queries.end());

  Json reports = Json::array();
  if (!a.store.path.empty()) {
    reports.push_back(BenchStore(LoadStoreOrFail(a.store), a.store.path, queries, a));
  } else {
    for (std::size_t size : a.sizes) {
      std::size_t pages = std::max<std::size_t>(1, (size + a.regions_per_page - 1) /
                                                       a.regions_per_page);
      RegionStore store = SynthCorpus(pages, a.regions_per_page, DefaultVocabulary(), a.seed);
      reports.push_back(BenchStore(store, "synthetic(" + std::to_string(size) + ")", queries, a));
    }
  }
  for (const auto &r : reports) {
    PrintTable(r, std::cout);
    std::cout << "\n";
  }
  Json doc = {{"seed", a.seed}, {"runs", a.runs}, {"stores", reports}};
  if (!a.json.empty()) {
    std::ofstream out(a.json);
    if (!out) Fail(kRuntime, "cannot write '" + a.json + "'");
    out << doc.dump(2) << "\n";
  }
  return kOk;
}

int Main(int argc, char **argv) {
  CLI::App app{"vqe: visual query engine over region stores"};
  app.require_subcommand(1);
  int status = kOk;

  IngestArgs ingest;
  auto *c_ingest = app.add_subcommand("ingest", "validate a JSONL region store and save it");
  c_ingest->add_option("--input", ingest.input, "input JSONL")->required();
  c_ingest->add_option("--out", ingest.out, "output store")->required();
  c_ingest->add_option("--dict", ingest.dicts, "register a dictionary (NAME=PATH)");
  c_ingest->callback([&] { status = Ingest(ingest); });

  IndexArgs index;
  auto *c_index = app.add_subcommand("index", "build indices into a sidecar file");
  c_index->add_option("--store", index.store.path, "region store")->required();
  c_index->add_option("--dict", index.store.dicts, "register a dictionary (NAME=PATH)");
  c_index->add_option("--out", index.out, "index file")->required();
  c_index->add_option("--indices", index.indices, "none, text, region or all");
  c_index->callback([&] { status = Index(index); });

  QueryArgs query;
  auto *c_query = app.add_subcommand("query", "run a query");
  c_query->add_option("--store", query.store.path, "region store")->required();
  c_query->add_option("--dict", query.store.dicts, "register a dictionary (NAME=PATH)");
  AddQueryOptions(c_query, query.query);
  c_query->add_option("--indices", query.indices, "none, text, region or all");
  c_query->add_option("--index-file", query.index_file, "prebuilt indices from `vqe index`");
  c_query->add_option("--format", query.format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  c_query->add_option("--threads", query.threads, "page parallelism (0: all cores)");
  c_query->callback([&] { status = Query(query); });

  ExplainArgs explain;
  auto *c_explain = app.add_subcommand("explain", "print logical and physical plans");
  c_explain->add_option("--store", explain.store.path, "region store")->required();
  c_explain->add_option("--dict", explain.store.dicts, "register a dictionary (NAME=PATH)");
  AddQueryOptions(c_explain, explain.query);
  c_explain->add_option("--indices", explain.indices, "none, text, region or all");
  c_explain->add_flag("--logical", explain.logical_only, "logical plan only");
  c_explain->callback([&] { status = Explain(explain); });

  EmitArgs emit;
  auto *c_emit = app.add_subcommand("emit-sql", "translate a query into SQL");
  AddQueryOptions(c_emit, emit.query);
  c_emit->add_option("--store", emit.store, "store whose dictionaries are known");
  c_emit->add_option("--dict-name", emit.dict_names, "declare a dictionary name");
  c_emit->add_flag("--strict", emit.strict, "fail on operators without an SQL form");
  c_emit->add_flag("--placeholders", emit.placeholders, "emit literals as ? parameters");
  c_emit->callback([&] { status = EmitSql(emit); });

  GenArgs gen;
  auto *c_gen = app.add_subcommand("gen", "generate a synthetic corpus");
  c_gen->add_option("--pages", gen.pages, "page count")->check(CLI::PositiveNumber);
  c_gen->add_option("--regions-per-page", gen.regions_per_page, "regions per page")
      ->check(CLI::PositiveNumber);
  c_gen->add_option("--seed", gen.seed, "random seed");
  c_gen->add_option("--out", gen.out, "output store")->required();
  c_gen->callback([&] { status = Gen(gen); });

  BenchArgs bench;
  auto *c_bench = app.add_subcommand("bench", "time queries under each index configuration");
  c_bench->add_option("--store", bench.store.path, "bench this store instead of synthetic ones");
  c_bench->add_option("--dict", bench.store.dicts, "register a dictionary (NAME=PATH)");
  c_bench->add_option("--queries", bench.queries, "directory of .vql files")->required();
  c_bench->add_option("--sizes", bench.sizes, "synthetic store sizes in regions")
      ->delimiter(',');
  c_bench->add_option("--regions-per-page", bench.regions_per_page, "synthetic page size")
      ->check(CLI::PositiveNumber);
  c_bench->add_option("--seed", bench.seed, "synthetic corpus seed");
  c_bench->add_option("--runs", bench.runs, "timed runs per configuration (median reported)");
  c_bench->add_option("--threads", bench.threads, "page parallelism (0: all cores)");
  c_bench->add_option("--param", bench.params, "bind ${name} placeholders (name=value)");
  c_bench->add_option("--json", bench.json, "write the report as JSON");
  c_bench->callback([&] { status = Bench(bench); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kDiagnostics;
  } catch (const Failure &f) {
    return f.code;
  } catch (const Error &e) {
    Report(e.what());
    return kRuntime;
  }
  return status;
}

}  // namespace
}  // namespace vqe::cli

int main(int argc, char **argv) { return vqe::cli::Main(argc, argv); }
