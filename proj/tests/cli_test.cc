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

// End-to-end runs of the vqe binary.

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support/fixtures.h"
#include "vqe/region_store.h"
#include "vqe/sql_emitter.h"

namespace vqe::testing {
namespace {

// Single-quotes for the shell.
std::string Q(const std::string &s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

struct Cli {
  std::string dir = TempDir("cli");

  // stderr is folded into the output when `merge` is set, dropped otherwise.
  CommandResult Run(const std::string &args, bool merge = false,
                    const std::string &env = "") const {
    return RunCommand(env + " " + Q(CliPath()) + " " + args + (merge ? " 2>&1" : " 2>/dev/null"));
  }

  std::string Path(const std::string &name) const { return dir + "/" + name; }

  std::string Write(const std::string &name, const std::string &content) const {
    std::ofstream(Path(name), std::ios::binary) << content;
    return Path(name);
  }
};

// The fixture store with dictionary T registered.
std::string Store() {
  return Q(FixturePath("sysreq.jsonl")) + " --dict T=" + Q(FixturePath("os.dict"));
}
std::string QueryFile(const std::string &name) { return Q(FixturePath("queries/" + name)); }

std::vector<std::string> Lines(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> FixtureLines() { return Lines(ReadFile(FixturePath("sysreq.jsonl"))); }

std::string JoinLines(const std::vector<std::string> &lines) {
  std::string out;
  for (const auto &l : lines) out += l + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// ingest

TEST(CliIngest, WritesValidatedStore) {
  Cli cli;
  CommandResult r = cli.Run("ingest --input " + Store() + " --out " + Q(cli.Path("s.jsonl")));
  ASSERT_EQ(r.status, 0);
  RegionStore saved = LoadStoreFile(cli.Path("s.jsonl"));
  EXPECT_EQ(saved.size(), 30u);
  ASSERT_NE(saved.FindDictionary("T"), nullptr);
  EXPECT_EQ(saved.FindDictionary("T")->phrases, SysreqStore().FindDictionary("T")->phrases);
}

TEST(CliIngest, MalformedLineIsCited) {
  Cli cli;
  auto lines = FixtureLines();
  lines[6] = "{\"page_id\": \"sysreq\", \"region_id\": ";
  std::string bad = cli.Write("bad.jsonl", JoinLines(lines));
  CommandResult r = cli.Run("ingest --input " + Q(bad) + " --out " + Q(cli.Path("o")), true);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("ParseError"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("line 7"), std::string::npos) << r.out;
}

TEST(CliIngest, DuplicateRegionIsRejected) {
  Cli cli;
  auto lines = FixtureLines();
  lines.push_back(lines[2]);
  std::string dup = cli.Write("dup.jsonl", JoinLines(lines));
  CommandResult r = cli.Run("ingest --input " + Q(dup) + " --out " + Q(cli.Path("o")), true);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("ValidationError"), std::string::npos) << r.out;
}

TEST(CliIngest, MissingInputIsAnIngestError) {
  Cli cli;
  EXPECT_EQ(cli.Run("ingest --input " + Q(cli.Path("absent")) + " --out " + Q(cli.Path("o")))
                .status,
            1);
}

// ---------------------------------------------------------------------------
// query

TEST(CliQuery, Q4ReturnsTheWindowsRequirement) {
  Cli cli;
  CommandResult all = cli.Run("query --store " + Store() + " --query " + QueryFile("q4.vql") +
                              " --indices all");
  ASSERT_EQ(all.status, 0);
  auto rows = Lines(all.out);
  ASSERT_EQ(rows.size(), 1u);
  auto j = nlohmann::json::parse(rows[0]);
  EXPECT_EQ(j["R3.VisualSpan"]["region_id"], "1.3.2.2");
  EXPECT_EQ(j["R3.VisualSpan"]["text"], "2 GB RAM, 10 GB disk");
  for (const char *config : {"none", "text", "region"}) {
    CommandResult r = cli.Run("query --store " + Store() + " --query " + QueryFile("q4.vql") +
                              " --indices " + config + " --threads 1");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, all.out) << config;
  }
}

TEST(CliQuery, InlineTextAndCsv) {
  Cli cli;
  CommandResult r = cli.Run("query --store " + Store() + " --format csv --q " +
                            Q("select R1.Region from R(D) as R1 where ContainsPhrase(R1, 'AIX')"));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out,
            "page_id,R1.Region.region_id,R1.Region.xl,R1.Region.yl,R1.Region.xh,R1.Region.yh\r\n"
            "sysreq,1.3.4.1,100,320,300,340\r\n");
}

TEST(CliQuery, ParamsBindPlaceholders) {
  Cli cli;
  std::string base = "query --store " + Store() + " --query " + QueryFile("q1.vql");
  CommandResult dflt = cli.Run(base);
  CommandResult four = cli.Run(base + " --param n=4");
  ASSERT_EQ(dflt.status, 0);
  ASSERT_EQ(four.status, 0);
  EXPECT_EQ(Lines(dflt.out).size(), 3u);
  EXPECT_EQ(Lines(four.out).size(), 1u);
  EXPECT_EQ(cli.Run(base + " --param n").status, 2);
}

TEST(CliQuery, EmptyResultIsSuccess) {
  Cli cli;
  CommandResult r = cli.Run("query --store " + Store() + " --q " +
                            Q("select R1.Region from R(D) as R1 where ContainsPhrase(R1, 'zebra')"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "");
}

TEST(CliQuery, DiagnosticsExitTwoWithPositions) {
  Cli cli;
  CommandResult r = cli.Run("query --store " + Store() + " --q " +
                                Q("select R1.Span from R(D) as R1 where"),
                            true, "VQL_COLOR=never");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("1:37: error[Syntax]"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("\x1b["), std::string::npos);

  CommandResult unknown = cli.Run("query --store " + Store() + " --q " +
                                      Q("select R1.Span from Dict('Nope', D) as R1"),
                                  true, "VQL_COLOR=always");
  EXPECT_EQ(unknown.status, 2);
  EXPECT_NE(unknown.out.find("Nope"), std::string::npos) << unknown.out;
  EXPECT_NE(unknown.out.find("\x1b["), std::string::npos) << unknown.out;
}

TEST(CliQuery, RuntimeErrorsExitThree) {
  Cli cli;
  // Indices built for another store.
  CommandResult gen = cli.Run("gen --pages 2 --regions-per-page 20 --out " + Q(cli.Path("g")));
  ASSERT_EQ(gen.status, 0);
  ASSERT_EQ(cli.Run("index --store " + Q(cli.Path("g")) + " --out " + Q(cli.Path("g.idx")))
                .status,
            0);
  CommandResult r = cli.Run("query --store " + Store() + " --query " + QueryFile("q2.vql") +
                                " --index-file " + Q(cli.Path("g.idx")),
                            true);
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.out.find("IndexMismatch"), std::string::npos) << r.out;
}

TEST(CliQuery, UsageErrorsExitTwo) {
  Cli cli;
  EXPECT_EQ(cli.Run("").status, 2);
  EXPECT_EQ(cli.Run("query --store " + Store()).status, 2);
  EXPECT_EQ(cli.Run("query --store " + Store() + " --q x --indices fast").status, 2);
  EXPECT_EQ(cli.Run("--help").status, 0);
}

// ---------------------------------------------------------------------------
// index

TEST(CliIndex, SidecarServesQueries) {
  Cli cli;
  ASSERT_EQ(cli.Run("index --store " + Store() + " --out " + Q(cli.Path("s.idx"))).status, 0);
  CommandResult with = cli.Run("query --store " + Store() + " --query " + QueryFile("q3.vql") +
                               " --index-file " + Q(cli.Path("s.idx")));
  CommandResult without = cli.Run("query --store " + Store() + " --query " + QueryFile("q3.vql") +
                                  " --indices none");
  ASSERT_EQ(with.status, 0);
  EXPECT_EQ(with.out, without.out);
  EXPECT_EQ(Lines(with.out).size(), 3u);

  // A text-only sidecar cannot serve the region configuration.
  ASSERT_EQ(cli.Run("index --indices text --store " + Store() + " --out " + Q(cli.Path("t.idx")))
                .status,
            0);
  EXPECT_EQ(cli.Run("query --store " + Store() + " --query " + QueryFile("q3.vql") +
                    " --indices region --index-file " + Q(cli.Path("t.idx")))
                .status,
            3);
}

// ---------------------------------------------------------------------------
// explain

TEST(CliExplain, ShowsIndexAccess) {
  Cli cli;
  CommandResult r = cli.Run("explain --store " + Store() + " --query " + QueryFile("q2.vql"));
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("logical plan:"), std::string::npos);
  EXPECT_NE(r.out.find("text_index(phrase 'system requirements')"), std::string::npos) << r.out;
  CommandResult none = cli.Run("explain --indices none --store " + Store() + " --query " +
                               QueryFile("q2.vql"));
  EXPECT_EQ(none.out.find("text_index"), std::string::npos) << none.out;
  CommandResult logical = cli.Run("explain --logical --store " + Store() + " --query " +
                                  QueryFile("q2.vql"));
  EXPECT_EQ(logical.out.find("physical plan:"), std::string::npos);
}

// ---------------------------------------------------------------------------
// emit-sql

TEST(CliEmitSql, StatementOnStdoutWarningsOnStderr) {
  Cli cli;
  CommandResult q4 = cli.Run("emit-sql --query " + QueryFile("q4_phrase.vql"));
  ASSERT_EQ(q4.status, 0);
  EXPECT_EQ(sql::NormalizeWhitespace(q4.out),
            sql::NormalizeWhitespace(ReadFile(FixturePath("golden/q4.sql"))));
  EXPECT_EQ(q4.out.rfind("SELECT R3.pageid, R3.regionid\n", 0), 0u) << q4.out;

  std::string hybrid = "emit-sql --q " + Q("select R1.Region from ConsolidateContained(R(D)) as R1");
  CommandResult out_only = cli.Run(hybrid);
  ASSERT_EQ(out_only.status, 0);
  EXPECT_EQ(out_only.out.find("warning"), std::string::npos);
  CommandResult err_only = RunCommand(Q(CliPath()) + " " + hybrid + " 2>&1 >/dev/null");
  EXPECT_EQ(err_only.out, "warning: hybrid: consolidation executes natively\n");
  EXPECT_EQ(cli.Run(hybrid + " --strict").status, 3);
}

TEST(CliEmitSql, DictionariesAndPlaceholders) {
  Cli cli;
  std::string q = " --q " + Q("select R1.Region from Dict('T', D) as R1");
  EXPECT_EQ(cli.Run("emit-sql" + q).status, 2);
  EXPECT_EQ(cli.Run("emit-sql --dict-name T" + q).status, 0);
  CommandResult r = cli.Run("emit-sql --placeholders --store " + Q(cli.Path("none")) + q);
  EXPECT_EQ(r.status, 1);
  CommandResult p = cli.Run("emit-sql --placeholders --dict-name T" + q);
  EXPECT_EQ(p.out,
            "SELECT R1.pageid, R1.regionid\nFROM regions R1\nWHERE MatchesDict(R1.text, ?)\n"
            "-- ?1 = 'T'\n");
}

// ---------------------------------------------------------------------------
// gen and bench

TEST(CliGen, DeterministicStores) {
  Cli cli;
  std::string args = "gen --pages 3 --regions-per-page 50 --seed 9 --out ";
  ASSERT_EQ(cli.Run(args + Q(cli.Path("a"))).status, 0);
  ASSERT_EQ(cli.Run(args + Q(cli.Path("b"))).status, 0);
  EXPECT_EQ(ReadFile(cli.Path("a")), ReadFile(cli.Path("b")));
  RegionStore store = LoadStoreFile(cli.Path("a"));
  EXPECT_EQ(store.pages().size(), 3u);
  EXPECT_EQ(store.size(), 150u);
  EXPECT_NE(store.FindDictionary("T"), nullptr);
}

TEST(CliBench, ReportsEveryConfiguration) {
  Cli cli;
  CommandResult r = cli.Run("bench --queries " + Q(FixturePath("bench_queries")) +
                            " --sizes 3000,6000 --runs 5 --seed 3 --json " +
                            Q(cli.Path("b.json")));
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("q4_requirements.vql"), std::string::npos) << r.out;
  auto doc = nlohmann::json::parse(ReadFile(cli.Path("b.json")));
  ASSERT_EQ(doc["stores"].size(), 2u);
  EXPECT_EQ(doc["stores"][0]["regions"], 3000);
  for (const auto &store : doc["stores"]) {
    ASSERT_EQ(store["queries"].size(), 4u);
    for (const auto &q : store["queries"]) {
      for (const char *c : {"none", "text", "region", "all"}) {
        EXPECT_EQ(q["configs"][c]["runs_ms"].size(), 5u);
      }
      EXPECT_GT(q["rows"].get<int>(), 0) << q["query"];
    }
  }
  // Same seed, same cardinalities.
  CommandResult again = cli.Run("bench --queries " + Q(FixturePath("bench_queries")) +
                                " --sizes 3000,6000 --runs 1 --seed 3 --json " +
                                Q(cli.Path("c.json")));
  ASSERT_EQ(again.status, 0);
  auto doc2 = nlohmann::json::parse(ReadFile(cli.Path("c.json")));
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t q = 0; q < 4; ++q) {
      EXPECT_EQ(doc["stores"][s]["queries"][q]["rows"], doc2["stores"][s]["queries"][q]["rows"]);
    }
  }
}

TEST(CliBench, GivenStoreAndBadQueries) {
  Cli cli;
  CommandResult r = cli.Run("bench --runs 5 --store " + Store() + " --queries " +
                            Q(FixturePath("queries")) + " --param n=3");
  EXPECT_EQ(r.status, 0) << r.out;
  std::string dir = cli.Path("broken");
  std::filesystem::create_directories(dir);
  std::ofstream(dir + "/x.vql") << "select from";
  EXPECT_EQ(cli.Run("bench --sizes 300 --queries " + Q(dir)).status, 2);
  EXPECT_EQ(cli.Run("bench --sizes 300 --queries " + Q(cli.Path("missing"))).status, 2);
}

}  // namespace
}  // namespace vqe::testing
