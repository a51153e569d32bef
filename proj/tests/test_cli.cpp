#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "symtwist/cli.hpp"

using namespace symtwist;

namespace {

struct Run {
  int code = 0;
  std::string out, err, file;
};

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "symtwist_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

// Runs the tool in-process; with a file name the report goes there and is read back.
Run run(std::vector<std::string> args, const std::string& file = {}) {
  if (!file.empty()) {
    std::filesystem::remove(scratch(file));
    args.push_back("--out");
    args.push_back(scratch(file).string());
  }
  std::vector<const char*> argv{"symtwist"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  if (!file.empty() && std::filesystem::exists(scratch(file))) {
    std::ifstream f(scratch(file), std::ios::binary);
    r.file.assign(std::istreambuf_iterator<char>(f), {});
  }
  return r;
}

std::vector<std::string> split_crlf(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find("\r\n", pos);
    if (end == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 2;
  }
  return lines;
}

json strip_volatile(json doc) {
  doc["meta"].erase("generated_at");
  for (auto& row : doc["rows"]) row.erase("seconds");
  return doc;
}

}  // namespace

TEST(Cli, InputErrorsExitWithOne) {
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases = {
      {{"chars", "list", "--p", "4", "--a", "2"}, "p must be an odd prime"},
      {{"chars", "list", "--p", "9", "--a", "2"}, "p must be an odd prime"},
      {{"chars", "list", "--a", "2"}, "--p"},
      {{"chars", "list", "--p", "3", "--a", "2", "--no-such-flag"}, "no-such-flag"},
      {{"chars", "list", "--p", "3", "--a", "x"}, "a must be"},
      {{"chars", "list", "--p", "3", "--a", "4..2"}, "empty range"},
      {{"chars", "list", "--p", "3", "--a", "2", "--format", "xml"}, "format"},
      {{"charsum", "converge", "--p", "3", "--a", "2", "--beta", "0.4"}, "beta"},
      {{"padic", "measure", "--p", "3", "--a", "2", "--j", "3"}, "j must be 1 or 2"},
      {{"curve", "info", "--curve", "1,2,3"}, "five coefficients"},
      {{"curve", "info", "--curve", "0,0,0,0,0"}, "error"},
      {{"chars"}, "subcommand"},
  };
  for (const auto& [args, needle] : cases) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 1) << args[0] << " " << needle;
    EXPECT_NE(r.err.find(needle), std::string::npos) << r.err;
  }
}

TEST(Cli, HelpAndVersion) {
  const auto h = run({"--help"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("charsum"), std::string::npos);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(kVersion), std::string::npos);
}

TEST(Cli, CharsListCsv) {
  const auto r = run({"chars", "list", "--p", "3", "--a", "3"}, "chars.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = split_crlf(r.file);
  ASSERT_EQ(lines.size(), 10u);  // header + p^(a-1) wild characters
  EXPECT_EQ(lines[0], "u,order,conductor,parity,gauss_re,gauss_im");
  EXPECT_EQ(std::count(r.file.begin(), r.file.end(), '\n'), std::count(r.file.begin(), r.file.end(), '\r'));
  // primitive rows carry a Gauss sum of absolute value sqrt(27)
  std::size_t primitive = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> cells;
    std::stringstream ss(lines[i]);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() == 6 && cells[2] == "27") {
      ++primitive;
      EXPECT_NEAR(std::hypot(std::stod(cells[4]), std::stod(cells[5])), std::sqrt(27.0), 1e-9);
    }
  }
  EXPECT_EQ(primitive, 6u);
}

TEST(Cli, JsonRoundTrip) {
  const auto r = run({"curve", "ap", "--curve", "11a1", "--max", "60", "--format", "json"}, "ap.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.file);
  EXPECT_EQ(doc["meta"]["tool"], "symtwist");
  EXPECT_EQ(doc["meta"]["config"]["command"], "curve ap");
  EXPECT_EQ(doc["meta"]["config"]["max"], 60);
  EXPECT_EQ(doc["rows"].size(), 17u);  // primes up to 60
  const std::array<i64, 5> a{0, -1, 1, -10, -20};
  for (const auto& row : doc["rows"]) {
    const auto rr = row["r"].get<u64>();
    if (rr == 11) {
      EXPECT_EQ(row["kind"], "split_mult");
      continue;
    }
    EXPECT_EQ(row["a_r"].get<i64>(), oracle::trace(a, rr)) << rr;
  }
  // the same document re-rendered through the library is byte-identical
  Report rep;
  rep.meta = doc["meta"];
  for (const auto& row : doc["rows"]) rep.rows.push_back(row);
  EXPECT_EQ(render_json(rep), r.file);
}

TEST(Cli, RunsAreDeterministic) {
  const std::vector<std::string> args{"padic", "measure", "--curve", "11a1", "--p", "3", "--a", "2", "--format", "json"};
  const auto r1 = run(args, "m1.json");
  const auto r2 = run(args, "m2.json");
  ASSERT_EQ(r1.code, 0) << r1.err;
  ASSERT_EQ(r2.code, 0) << r2.err;
  EXPECT_EQ(strip_volatile(json::parse(r1.file)), strip_volatile(json::parse(r2.file)));
  // thread count does not change the numbers
  auto args4 = args;
  args4.insert(args4.end(), {"--threads", "4"});
  const auto r4 = run(args4, "m4.json");
  ASSERT_EQ(r4.code, 0) << r4.err;
  auto a = strip_volatile(json::parse(r1.file)), b = strip_volatile(json::parse(r4.file));
  a["meta"]["config"].erase("threads");
  b["meta"]["config"].erase("threads");
  EXPECT_EQ(a, b);
}

TEST(Cli, ConvergeCsvShape) {
  const auto r = run({"charsum", "converge", "--curve", "11a1", "--p", "3", "--a", "2..3", "--beta", "1.0"}, "conv.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = split_crlf(r.file);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].rfind("a,num_chars,S_re,S_im,limit_re,abs_err,seconds", 0), 0u) << lines[0];
  EXPECT_EQ(lines[1].rfind("2,2,", 0), 0u);
  EXPECT_EQ(lines[2].rfind("3,6,", 0), 0u);
}

TEST(Cli, EmptyReportIsAnError) {
  Report rep;
  rep.columns = {"x"};
  EXPECT_THROW(emit_report(rep, "csv", scratch("empty.csv").string()), Error);
  rep.rows.push_back({{"x", 1}});
  EXPECT_THROW(emit_report(rep, "yaml", scratch("empty.csv").string()), Error);
}

TEST(Cli, CsvQuoting) {
  EXPECT_EQ(csv_cell(json("plain")), "plain");
  EXPECT_EQ(csv_cell(json("a,b")), "\"a,b\"");
  EXPECT_EQ(csv_cell(json("say \"hi\"")), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_cell(json(nullptr)), "");
  EXPECT_EQ(csv_cell(json(0.1)), "0.10000000000000001");
  EXPECT_EQ(csv_cell(json(-3)), "-3");
  EXPECT_EQ(csv_cell(json(true)), "true");
}

TEST(Cli, RegistryIsConsistent) {
  EXPECT_TRUE(verify_registry().empty());
  for (const auto& c : curve_registry()) {
    const auto E = parse_curve(c.name);
    EXPECT_EQ(to_string(E.discriminant()), c.delta) << c.name;
    const auto r = run({"curve", "info", "--curve", c.name, "--format", "json"}, "info.json");
    EXPECT_EQ(r.code, 0) << c.name << r.err;
  }
  EXPECT_EQ(parse_curve("0,-1,1,-10,-20").coefficients(), parse_curve("11a1").coefficients());
  EXPECT_EQ(parse_a_range("2..5"), (std::vector<unsigned>{2, 3, 4, 5}));
  EXPECT_EQ(parse_a_range("7"), (std::vector<unsigned>{7}));
  EXPECT_THROW((void)parse_a_range("0"), Error);
  EXPECT_THROW((void)parse_curve("1,2,3,4,5,6"), Error);
}
