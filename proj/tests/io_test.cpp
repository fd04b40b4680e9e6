#include "exactpl/io.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "exactpl/cli.hpp"
#include "support/gen.hpp"

namespace exactpl {
namespace {

int run(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  int code = cli::cli_run(std::move(args), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

TEST(Formats, PLRoundTrip) {
  testgen::Rng rng(1);
  for (int i = 0; i < 50; i++) {
    auto f = testgen::pl_no_flat(rng, 3 + rng() % 10);
    std::string text = serialize_pl(f);
    std::istringstream in(text);
    PLFunction g = parse_pl(in);
    ASSERT_TRUE(g.knots() == f.knots());
    ASSERT_EQ(serialize_pl(g), text);
  }
  EXPECT_TRUE(serialize_pl(SeedFunction::expanding().base()).starts_with("PL v1 8\n0/1 1/1\n"));
}

TEST(Formats, PLParseErrors) {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    EXPECT_THROW(parse_pl(in), parse_error);
  };
  bad("");
  bad("PL v2 2\n0/1 0/1\n1/1 1/1\n");
  bad("PL v1 3\n0/1 0/1\n1/1 1/1\n");  // truncated
  bad("PL v1 2\n0/1\n1/1 1/1\n");
  bad("PL v1 xyz\n");
  bad("PL v1 -2\n");
}

TEST(Formats, IntervalSetRoundTrip) {
  testgen::Rng rng(2);
  for (int i = 0; i < 50; i++) {
    auto s = testgen::interval_set(rng, 8);
    std::string text = serialize_interval_set(s);
    std::istringstream in(text);
    ASSERT_EQ(parse_interval_set(in), s);
  }
}

TEST(Formats, CertificateRoundTripAndVerify) {
  auto tent = PLFunction::from_pairs({{Rat(0), Rat(0)}, {rat(1, 2), Rat(1)}, {Rat(1), Rat(0)}});
  auto res = approx_max_search(tent, {Rat(0), Rat(1)}, 6);
  const auto& cert = std::get<MaxSearchCertificate>(res);
  std::string text = serialize_certificate(cert);
  std::istringstream in(text);
  ParsedCertificate parsed = parse_certificate(in);
  ASSERT_EQ(parsed.lines.size(), cert.stages.size() + 1);
  EXPECT_TRUE(verify_certificate(parsed, tent).ok());
  EXPECT_TRUE(verify_certificate(parsed, std::nullopt).ok());

  // corrupt a level: structural check fails
  ParsedCertificate bad = parsed;
  bad.lines[2].level = bad.lines[1].level - 1;
  EXPECT_FALSE(verify_certificate(bad, std::nullopt).ok());
}

TEST(Formats, TranscriptRoundTrip) {
  GameTranscript t = simulate(2, 7);
  std::string text = serialize_transcript(t);
  std::istringstream in(text);
  GameTranscript u = parse_transcript(in);
  u.verify();
  EXPECT_EQ(serialize_transcript(u), text);
  EXPECT_EQ(u.rounds, t.rounds);
  EXPECT_EQ(u.rng_seed, t.rng_seed);
  ASSERT_EQ(u.plays.size(), t.plays.size());
  for (size_t i = 0; i < u.plays.size(); i++)
    ASSERT_TRUE(u.plays[i].ball.center.knots() == t.plays[i].ball.center.knots());
}

TEST(Formats, TableProjection) {
  Table t{{"n", "value"}, {{Rat(1), rat(1, 3)}, {Rat(2), rat(-15, 26)}}};
  std::string csv = table_to_csv(t);
  EXPECT_TRUE(csv.find("approximate") != std::string::npos);
  EXPECT_TRUE(csv.find("3.33333333333e-1") != std::string::npos);
  std::string exact = table_to_exact(t);
  EXPECT_TRUE(exact.find("-15/26") != std::string::npos);
}

TEST(Cli, SeedShow) {
  std::string text;
  ASSERT_EQ(run({"seed", "show", "expanding"}, &text), 0);
  EXPECT_TRUE(text.starts_with("PL v1 8\n"));
  ASSERT_EQ(run({"seed", "show", "contracting"}, &text), 0);
  EXPECT_TRUE(text.starts_with("PL v1 14\n"));
  EXPECT_EQ(run({"seed", "show", "nonsense"}), 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"frobnicate"}), 64);
  EXPECT_EQ(run({}), 64);
}

TEST(Cli, DivergeAndConverge) {
  std::string text;
  ASSERT_EQ(run({"diverge", "--levels", "4"}, &text), 0);
  EXPECT_TRUE(text.find("drop-ratio: 5/3 == 5/3 PASS") != std::string::npos);
  EXPECT_TRUE(text.find("midpoints strictly increasing = no") != std::string::npos);
  ASSERT_EQ(run({"converge", "--levels", "2"}, &text), 0);
  EXPECT_TRUE(text.find("chord gap = 15/26") != std::string::npos);
  EXPECT_TRUE(text.find("result PASS") != std::string::npos);
}

TEST(Cli, DensityFloor) {
  std::string text;
  ASSERT_EQ(run({"bprime", "--path", "central", "--levels", "4", "--enclosure-depth", "12"},
                &text),
            0);
  EXPECT_TRUE(text.find("result PASS") != std::string::npos);
  // the zero-slack middle-case walk stays inconclusive at shallow depth
  ASSERT_EQ(run({"bprime", "--path", "3", "--levels", "4", "--enclosure-depth", "6"}, &text),
            1);
  EXPECT_TRUE(text.find("sufficient enclosure depth") != std::string::npos);
  EXPECT_EQ(run({"bprime", "--levels", "4", "--enclosure-depth", "2"}), 2);
}

TEST(Cli, ResourceCap) {
  EXPECT_EQ(run({"construct", "--seed", "contracting", "--depth", "12"}), 3);
}

TEST(Cli, GmaxWitnessRoundTrip) {
  std::string dir = ::testing::TempDir();
  std::string pl_path = dir + "/tent.pl";
  auto tent = PLFunction::from_pairs({{Rat(0), Rat(0)}, {rat(1, 2), Rat(1)}, {Rat(1), Rat(0)}});
  cli::detail::write_file(pl_path, serialize_pl(tent));
  std::string cert_path = dir + "/tent.cert";
  std::string text;
  ASSERT_EQ(run({"gmax", "--pl", pl_path, "--kmax", "8", "--out", cert_path}, &text), 0);
  EXPECT_TRUE(text.find("nested-certificate") != std::string::npos);
  ASSERT_EQ(run({"verify", cert_path, "--pl", pl_path}, &text), 0);
  EXPECT_TRUE(text.find("certificate invariants: PASS") != std::string::npos);

  ASSERT_EQ(run({"witness", "--pl", pl_path, "--interval", "0,1"}, &text), 0);
  EXPECT_TRUE(text.find("approximate-maximum witness") != std::string::npos);
  EXPECT_TRUE(text.find("right slope = -2") != std::string::npos);
}

TEST(Cli, GepsAgainstWorkedExample) {
  std::string dir = ::testing::TempDir();
  std::string is_path = dir + "/set.is";
  cli::detail::write_file(is_path, "IS v1 1\n2/5 3/5\n");
  std::string text;
  ASSERT_EQ(run({"geps", is_path, "--interval", "0,1", "--epsilon", "1/2"}, &text), 0);
  EXPECT_TRUE(text.find("IS v1 1\n1/5 4/5\n") != std::string::npos);
  EXPECT_TRUE(text.find("measure bound: 3/5 <= 4/5 PASS") != std::string::npos);
}

TEST(Cli, GameTranscriptVerify) {
  std::string dir = ::testing::TempDir();
  std::string game_path = dir + "/play.game";
  std::string text;
  ASSERT_EQ(run({"game", "--rounds", "2", "--seed", "5", "--out", game_path}, &text), 0);
  EXPECT_TRUE(text.find("result PASS") != std::string::npos);
  ASSERT_EQ(run({"verify", game_path}, &text), 0);
  EXPECT_TRUE(text.find("round-trip: PASS") != std::string::npos);
}

TEST(Cli, DeterministicOutput) {
  for (auto args : {std::vector<std::string>{"diverge", "--levels", "5"},
                    std::vector<std::string>{"bprime", "--levels", "3"},
                    std::vector<std::string>{"game", "--rounds", "2", "--seed", "9"}}) {
    std::string a, b;
    ASSERT_EQ(run(args, &a), run(args, &b));
    ASSERT_EQ(a, b);
  }
}

TEST(Cli, CsvEmission) {
  std::string dir = ::testing::TempDir();
  std::string out_path = dir + "/report.csv";
  ASSERT_EQ(run({"diverge", "--levels", "3", "--format", "csv", "--out", out_path}), 0);
  std::string csv = cli::detail::read_file(out_path);
  EXPECT_TRUE(csv.find("approximate") != std::string::npos);
  std::string exact = cli::detail::read_file(out_path + ".exact");
  EXPECT_TRUE(exact.find("17/9") != std::string::npos);
  // csv without a destination cannot write its sidecar
  EXPECT_EQ(run({"construct", "--depth", "1", "--format", "csv"}), 2);
  // per-play radii projection of a transcript
  std::string radii_path = dir + "/radii.csv";
  ASSERT_EQ(run({"game", "--rounds", "2", "--seed", "3", "--format", "csv", "--out",
                 radii_path}),
            0);
  std::string radii = cli::detail::read_file(radii_path);
  EXPECT_TRUE(radii.find("play,radius") != std::string::npos);
  std::string radii_exact = cli::detail::read_file(radii_path + ".exact");
  EXPECT_TRUE(radii_exact.find("0 1/4") != std::string::npos);
}

TEST(Cli, MissingFile) {
  EXPECT_EQ(run({"verify", "/nonexistent/path.pl"}), 74);
}

}  // namespace
}  // namespace exactpl
