#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "exactpl/density_floor.hpp"
#include "exactpl/io.hpp"

namespace exactpl::cli {

struct io_failure : std::runtime_error {
  explicit io_failure(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_failure("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_failure("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw io_failure("write to '" + path + "' failed");
}

inline std::pair<Rat, Rat> parse_rat_pair(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos)
    throw parse_error("expected '<rational>,<rational>', got '" + text + "'");
  return {rat_parse(text.substr(0, comma)), rat_parse(text.substr(comma + 1))};
}

// Deterministic check/value report; every asserted inequality carries both
// sides exactly.
class Reporter {
 public:
  explicit Reporter(std::ostream& out) : out_(out) {}

  void value(const std::string& name, const std::string& v) {
    out_ << "value " << name << " = " << v << "\n";
  }
  void value(const std::string& name, const Rat& v) { value(name, rat_str(v)); }

  void check(const std::string& name, bool pass, const Rat& lhs, const char* rel,
             const Rat& rhs) {
    checks_++;
    if (!pass) failures_++;
    out_ << "check " << name << ": " << rat_str(lhs) << " " << rel << " " << rat_str(rhs)
         << " " << (pass ? "PASS" : "FAIL") << "\n";
  }
  void check(const std::string& name, bool pass) {
    checks_++;
    if (!pass) failures_++;
    out_ << "check " << name << ": " << (pass ? "PASS" : "FAIL") << "\n";
  }

  int finish() {
    if (failures_ == 0) {
      out_ << "result PASS (" << checks_ << " checks)\n";
      return 0;
    }
    out_ << "result FAIL (" << failures_ << " of " << checks_ << " checks failed)\n";
    return 1;
  }

 private:
  std::ostream& out_;
  int checks_ = 0, failures_ = 0;
};

inline SeedKind parse_seed_name(const std::string& name) {
  if (name == "expanding") return SeedKind::expanding;
  if (name == "contracting") return SeedKind::contracting;
  throw precondition_error("unknown seed '" + name + "' (expanding|contracting)");
}

inline void require_cap(unsigned long cap) {
  if (cap < 10'000) throw precondition_error("--cap must be at least 10000");
}

inline void emit(const std::string& exact_text, const Table& table, const std::string& format,
                 const std::string& out_path, std::ostream& out) {
  if (format == "exact") {
    if (out_path.empty()) out << exact_text;
    else write_file(out_path, exact_text);
    return;
  }
  // csv projection plus the exact sidecar
  if (out_path.empty())
    throw precondition_error("--format csv requires --out (a sidecar is always written)");
  write_file(out_path, table_to_csv(table));
  write_file(out_path + ".exact", table_to_exact(table));
}

inline PLFunction load_pl_input(const std::string& pl_path, const std::string& seed_name,
                                long depth, unsigned long cap) {
  if (!pl_path.empty()) {
    std::istringstream in(read_file(pl_path));
    return parse_pl(in);
  }
  if (seed_name.empty())
    throw precondition_error("need --pl FILE or --seed NAME with --depth");
  return materialize(parse_seed_name(seed_name), depth, cap);
}

}  // namespace detail

// Runs one subcommand; deterministic report on `out`, timing on `err`.
// Exit codes: 0 all checks pass, 1 checks failed, 2 precondition or input
// data error, 3 resource cap, 64 usage, 74 file I/O.
inline int cli_run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact rational toolkit for piecewise-linear density analysis"};
  app.require_subcommand(1);

  // seed show <name>
  auto* seed_cmd = app.add_subcommand("seed", "print a seed function");
  std::string seed_action, seed_name_arg;
  seed_cmd->add_option("action", seed_action, "only 'show'")->required();
  seed_cmd->add_option("name", seed_name_arg, "expanding|contracting")->required();

  // construct
  auto* construct_cmd = app.add_subcommand("construct", "materialize a construction level");
  std::string c_seed = "expanding", c_format = "exact", c_out;
  long c_depth = 0;
  unsigned long c_cap = kDefaultSegmentCap;
  construct_cmd->add_option("--seed", c_seed, "expanding|contracting");
  construct_cmd->add_option("--depth", c_depth, "construction depth")->required();
  construct_cmd->add_option("--cap", c_cap, "segment cap");
  construct_cmd->add_option("--format", c_format, "exact|csv");
  construct_cmd->add_option("--out", c_out, "output path");

  // diverge
  auto* diverge_cmd = app.add_subcommand("diverge", "expanding-seed divergence report");
  long d_levels = 8;
  std::string d_format = "exact", d_out;
  diverge_cmd->add_option("--levels", d_levels, "levels to tabulate");
  diverge_cmd->add_option("--format", d_format, "exact|csv");
  diverge_cmd->add_option("--out", d_out, "output path");

  // converge
  auto* converge_cmd = app.add_subcommand("converge", "contracting-seed contraction report");
  long v_levels = 6;
  unsigned long v_cap = kDefaultSegmentCap;
  std::string v_format = "exact", v_out;
  converge_cmd->add_option("--levels", v_levels, "levels to tabulate");
  converge_cmd->add_option("--cap", v_cap, "segment cap");
  converge_cmd->add_option("--format", v_format, "exact|csv");
  converge_cmd->add_option("--out", v_out, "output path");

  // bprime
  auto* bprime_cmd = app.add_subcommand("bprime", "difference-quotient density floor");
  std::string b_path = "central";
  long b_levels = 4, b_depth = 12;
  bprime_cmd->add_option("--path", b_path, "walk: 'central' or digits 1..6");
  bprime_cmd->add_option("--levels", b_levels, "levels to certify");
  bprime_cmd->add_option("--enclosure-depth", b_depth, "value enclosure depth");

  // gmax
  auto* gmax_cmd = app.add_subcommand("gmax", "approximate-maximum search");
  std::string m_pl, m_seed, m_interval, m_out;
  long m_depth = 0, m_kmax = 16;
  unsigned long m_cap = kDefaultSegmentCap;
  gmax_cmd->add_option("--pl", m_pl, "piecewise-linear input file");
  gmax_cmd->add_option("--seed", m_seed, "expanding|contracting (with --depth)");
  gmax_cmd->add_option("--depth", m_depth, "construction depth for --seed");
  gmax_cmd->add_option("--interval", m_interval, "search window 'a,b' (default: domain)");
  gmax_cmd->add_option("--kmax", m_kmax, "number of refinement stages");
  gmax_cmd->add_option("--cap", m_cap, "segment cap");
  gmax_cmd->add_option("--out", m_out, "write the certificate here");

  // witness
  auto* witness_cmd = app.add_subcommand("witness", "monotonicity dichotomy for a pair");
  std::string w_pl, w_seed, w_interval;
  long w_depth = 0;
  witness_cmd->add_option("--pl", w_pl, "piecewise-linear input file");
  witness_cmd->add_option("--seed", w_seed, "expanding|contracting (with --depth)");
  witness_cmd->add_option("--depth", w_depth, "construction depth for --seed");
  witness_cmd->add_option("--interval", w_interval, "pair 'x1,x2'")->required();

  // geps
  auto* geps_cmd = app.add_subcommand("geps", "high-density component extraction");
  std::string g_file, g_interval = "0,1", g_eps = "1/2", g_out;
  geps_cmd->add_option("set", g_file, "interval-set file (IS v1)")->required();
  geps_cmd->add_option("--interval", g_interval, "window 'a,b'");
  geps_cmd->add_option("--epsilon", g_eps, "density threshold in (0,1)");
  geps_cmd->add_option("--out", g_out, "write the components here (IS v1)");

  // game
  auto* game_cmd = app.add_subcommand("game", "nested-ball strategy simulation");
  long game_rounds = 5;
  unsigned long long game_seed = 0;
  std::string game_adversary = "random", game_out, game_format = "exact";
  game_cmd->add_option("--rounds", game_rounds, "rounds to play");
  game_cmd->add_option("--seed", game_seed, "rng seed");
  game_cmd->add_option("--adversary", game_adversary, "random|shift");
  game_cmd->add_option("--format", game_format, "exact|csv (csv: per-play radii)");
  game_cmd->add_option("--out", game_out, "write the transcript (or csv) here");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "re-check a serialized artifact");
  std::string vf_file, vf_pl;
  long vf_samples = 2;
  verify_cmd->add_option("file", vf_file, "PL/IS/CERT/GAME file")->required();
  verify_cmd->add_option("--pl", vf_pl, "function file for certificate re-checking");
  verify_cmd->add_option("--samples", vf_samples, "samples per partition interval");

  try {
    std::vector<const char*> argv;
    argv.push_back("exactpl");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {  // --help
        out << app.help();
        return 0;
      }
      err << "usage error: " << e.what() << "\n";
      err << app.help();
      return 64;
    }

    auto started = std::chrono::steady_clock::now();
    detail::Reporter rep(out);
    int code = 0;

    if (construct_cmd->parsed() || converge_cmd->parsed() || gmax_cmd->parsed()) {
      detail::require_cap(construct_cmd->parsed() ? c_cap
                          : converge_cmd->parsed() ? v_cap
                                                   : m_cap);
    }
    if (seed_cmd->parsed()) {
      if (seed_action != "show") throw precondition_error("seed action must be 'show'");
      const auto& seed = SeedFunction::get(detail::parse_seed_name(seed_name_arg));
      out << serialize_pl(seed.base());
    } else if (construct_cmd->parsed()) {
      PLFunction f = materialize(detail::parse_seed_name(c_seed), c_depth, c_cap);
      Table t{{"x", "y"}, {}};
      if (c_format == "csv")
        for (const auto& k : f.knots()) t.rows.push_back({k.x, k.y});
      detail::emit(serialize_pl(f), t, c_format, c_out, out);
    } else if (diverge_cmd->parsed()) {
      out << "diverge levels=" << d_levels << "\n";
      DivergenceReport r = divergence_report(static_cast<int>(d_levels));
      Table t{{"n", "drop", "ratio", "left_value", "partial_sum", "midpoint_value"}, {}};
      for (const auto& lv : r.levels) {
        rep.value("level " + std::to_string(lv.n) + " central",
                  "[" + rat_str(lv.central.lo) + ", " + rat_str(lv.central.hi) + "]");
        rep.value("level " + std::to_string(lv.n) + " drop", lv.drop);
        if (lv.drop_ratio)
          rep.check("level " + std::to_string(lv.n) + " drop-ratio",
                    *lv.drop_ratio == rat(5, 3), *lv.drop_ratio, "==", rat(5, 3));
        rep.check("level " + std::to_string(lv.n) + " left-value-vs-sum",
                  lv.left_matches_sum, lv.left_value, "==", lv.partial_sum);
        t.rows.push_back({Rat(lv.n), lv.drop, lv.drop_ratio ? *lv.drop_ratio : Rat(0),
                          lv.left_value, lv.partial_sum, r.midpoint_values[lv.n]});
      }
      for (size_t n = 0; n < r.midpoint_values.size(); n++)
        rep.value("midpoint value at level " + std::to_string(n), r.midpoint_values[n]);
      rep.value("midpoints strictly increasing",
                r.midpoints_strictly_increasing ? "yes" : "no");
      if (d_format == "csv" || !d_out.empty()) detail::emit("", t, "csv", d_out, out);
      code = rep.finish();
    } else if (converge_cmd->parsed()) {
      out << "converge levels=" << v_levels << "\n";
      ConvergenceReport r = convergence_report(static_cast<int>(v_levels), v_cap);
      rep.value("chord gap", r.chord_gap);
      rep.check("chord gap value", r.chord_gap == rat(15, 26), r.chord_gap, "==", rat(15, 26));
      Table t{{"n", "max_drop", "sup_diff", "bound"}, {}};
      for (const auto& lv : r.levels) {
        Rat expected = rat_pow(rat(3, 4), lv.n + 1);
        rep.check("level " + std::to_string(lv.n) + " max-drop", lv.max_drop == expected,
                  lv.max_drop, "==", expected);
        rep.check("level " + std::to_string(lv.n) + " sup-diff-bound",
                  lv.sup_diff <= lv.bound, lv.sup_diff, "<=", lv.bound);
        t.rows.push_back({Rat(lv.n), lv.max_drop, lv.sup_diff, lv.bound});
      }
      if (v_format == "csv" || !v_out.empty()) detail::emit("", t, "csv", v_out, out);
      code = rep.finish();
    } else if (bprime_cmd->parsed()) {
      out << "bprime path=" << b_path << " levels=" << b_levels
          << " enclosure-depth=" << b_depth << "\n";
      auto cert = dq_density_floor(parse_floor_path(b_path), static_cast<int>(b_levels),
                                   static_cast<int>(b_depth));
      rep.value("value enclosure", "[" + rat_str(cert.value_enclosure.lo) + ", " +
                                       rat_str(cert.value_enclosure.hi) + "]");
      for (const auto& lv : cert.per_level) {
        std::string tag = "level " + std::to_string(lv.n) + " ";
        Rat scaled = lv.interval.length() * 13;
        Rat expected = rat_pow(rat(1, 13), lv.n - 1);
        rep.check(tag + "interval-measure", scaled == expected, scaled, "==", expected);
        rep.check(tag + "floor", lv.conclusive && lv.bound >= rat(1, 26), lv.bound, ">=",
                  rat(1, 26));
      }
      rep.check("all levels conclusive", cert.all_conclusive);
      if (cert.sufficient_depth)
        rep.value("sufficient enclosure depth", Rat(*cert.sufficient_depth));
      code = rep.finish();
    } else if (gmax_cmd->parsed()) {
      PLFunction f = detail::load_pl_input(m_pl, m_seed, m_depth, m_cap);
      Interval window = f.domain();
      if (!m_interval.empty()) {
        auto [a, b] = detail::parse_rat_pair(m_interval);
        window = Interval(a, b);
      }
      out << "gmax kmax=" << m_kmax << "\n";
      MaxSearchResult res = approx_max_search(f, window, static_cast<int>(m_kmax));
      if (std::holds_alternative<StrictlyIncreasingResult>(res)) {
        rep.value("outcome", "strictly-increasing: no approximate maximum required");
        code = rep.finish();
      } else if (const auto* flat = std::get_if<FlatMaxResult>(&res)) {
        rep.value("outcome", "flat-piece fallback");
        rep.value("flat piece",
                  "[" + rat_str(flat->flat.lo) + ", " + rat_str(flat->flat.hi) + "]");
        rep.value("level", flat->level);
        rep.value("density point", flat->x0);
        code = rep.finish();
      } else {
        const auto& cert = std::get<MaxSearchCertificate>(res);
        rep.value("outcome", cert.boundary_case ? "boundary-maximum" : "nested-certificate");
        rep.value("enclosure", "[" + rat_str(cert.enclosure.lo) + ", " +
                                   rat_str(cert.enclosure.hi) + "]");
        rep.value("enclosure width", cert.enclosure.length());
        for (const auto& st : cert.stages) {
          rep.value("stage eps=" + rat_str(st.checks.eps) + " bracket",
                    "[" + rat_str(st.bracket.lo) + ", " + rat_str(st.bracket.hi) +
                        "] level " + rat_str(st.y1));
        }
        rep.check("certificate verified", true);
        if (!m_out.empty()) detail::write_file(m_out, serialize_certificate(cert));
        code = rep.finish();
      }
    } else if (witness_cmd->parsed()) {
      PLFunction f = detail::load_pl_input(w_pl, w_seed, w_depth, kDefaultSegmentCap);
      auto [x1, x2] = detail::parse_rat_pair(w_interval);
      out << "witness pair=[" << rat_str(x1) << ", " << rat_str(x2) << "]\n";
      WitnessResult res = monotonicity_witness(f, x1, x2);
      if (const auto* inc = std::get_if<StrictIncreaseCertificate>(&res)) {
        rep.value("outcome", "strict-increase");
        rep.check("f(x1) < f(x2)", inc->fx1 < inc->fx2, inc->fx1, "<", inc->fx2);
      } else {
        const auto& wit = std::get<DecreaseWitness>(res);
        rep.value("outcome", "approximate-maximum witness");
        rep.value("witness point", wit.x_witness);
        rep.value("right slope", wit.right_slope);
        rep.check("right slope nonpositive", wit.right_slope <= 0, wit.right_slope, "<=",
                  Rat(0));
      }
      code = rep.finish();
    } else if (geps_cmd->parsed()) {
      std::istringstream in(detail::read_file(g_file));
      IntervalSet H = parse_interval_set(in);
      auto [a, b] = detail::parse_rat_pair(g_interval);
      Interval window(a, b);
      Rat eps = rat_parse(g_eps);
      out << "geps epsilon=" << rat_str(eps) << " interval=[" << rat_str(a) << ", "
          << rat_str(b) << "]\n";
      ComponentList comps = high_density_components(H, window, eps);
      out << serialize_interval_set(comps.as_set());
      for (size_t i = 0; i < comps.components.size(); i++) {
        const auto& c = comps.components[i];
        std::string tag = "component " + std::to_string(i) + " ";
        rep.check(tag + "density", density(H, c) >= eps / 2, density(H, c), ">=", eps / 2);
        rep.check(tag + "left straddle",
                  max_straddling_density(H, window, c.lo) <= eps,
                  max_straddling_density(H, window, c.lo), "<=", eps);
        rep.check(tag + "right straddle",
                  max_straddling_density(H, window, c.hi) <= eps,
                  max_straddling_density(H, window, c.hi), "<=", eps);
      }
      auto bound = component_measure_bound(H, window, eps);
      rep.check("measure bound", bound.ok, bound.lhs, "<=", bound.rhs);
      if (!g_out.empty()) detail::write_file(g_out, serialize_interval_set(comps.as_set()));
      code = rep.finish();
    } else if (game_cmd->parsed()) {
      AdversaryKind adv = game_adversary == "shift" ? AdversaryKind::monotone_shift
                                                    : AdversaryKind::random;
      out << "game rounds=" << game_rounds << " seed=" << game_seed << " adversary="
          << game_adversary << "\n";
      GameTranscript t = simulate(static_cast<int>(game_rounds), game_seed, adv);
      for (const auto& p : t.plays) {
        if (!p.params) {
          rep.value("opposing radius", p.ball.radius);
          continue;
        }
        rep.value("responder radius", p.ball.radius);
        rep.check("alpha positive", p.params->alpha > 0, p.params->alpha, ">", Rat(0));
        rep.check("mu margin", p.params->mu - 2 * p.params->delta > 0,
                  p.params->mu - 2 * p.params->delta, ">", Rat(0));
        rep.check("eta margin", p.params->eta - 2 * p.params->delta > 0,
                  p.params->eta - 2 * p.params->delta, ">", Rat(0));
      }
      for (const auto& sc : t.final_report)
        rep.check("sampled density exceeds alpha at play " + std::to_string(sc.move_index),
                  sc.ok, sc.min_density, ">", sc.alpha);
      if (!game_out.empty()) {
        if (game_format == "csv") {
          Table pt{{"play", "radius"}, {}};
          for (size_t i = 0; i < t.plays.size(); i++)
            pt.rows.push_back({Rat(static_cast<long>(i)), t.plays[i].ball.radius});
          detail::emit("", pt, "csv", game_out, out);
        } else {
          detail::write_file(game_out, serialize_transcript(t));
        }
      }
      code = rep.finish();
    } else if (verify_cmd->parsed()) {
      std::string bytes = detail::read_file(vf_file);
      std::istringstream sniff(bytes);
      std::string kind;
      sniff >> kind;
      out << "verify kind=" << kind << "\n";
      if (kind == "PL") {
        std::istringstream in(bytes);
        PLFunction f = parse_pl(in);
        std::string text = serialize_pl(f);
        std::istringstream in2(text);
        PLFunction g = parse_pl(in2);
        rep.check("round-trip", g.knots() == f.knots() && serialize_pl(g) == text);
      } else if (kind == "IS") {
        std::istringstream in(bytes);
        IntervalSet s = parse_interval_set(in);
        std::istringstream in2(serialize_interval_set(s));
        rep.check("round-trip", parse_interval_set(in2) == s);
      } else if (kind == "CERT") {
        std::istringstream in(bytes);
        ParsedCertificate cert = parse_certificate(in);
        std::optional<PLFunction> f;
        if (!vf_pl.empty()) {
          std::istringstream fin(detail::read_file(vf_pl));
          f = parse_pl(fin);
        }
        auto check = verify_certificate(cert, f);
        for (const auto& msg : check.failures) rep.value("failure", msg);
        rep.check("certificate invariants", check.ok());
      } else if (kind == "GAME") {
        std::istringstream in(bytes);
        GameTranscript t = parse_transcript(in);
        bool structural = true;
        try {
          t.verify();
          verify_limit_scales(t, static_cast<int>(vf_samples));
        } catch (const internal_error& e) {
          structural = false;
          rep.value("failure", e.what());
        }
        rep.check("transcript invariants", structural);
        rep.check("round-trip", serialize_transcript(t) == bytes);
      } else {
        throw parse_error("unknown artifact kind '" + kind + "'");
      }
      code = rep.finish();
    }

    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    err << "elapsed " << elapsed.count() << "s\n";
    return code;
  } catch (const io_failure& e) {
    err << "io error: " << e.what() << "\n";
    return 74;
  } catch (const resource_error& e) {
    err << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const parse_error& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const precondition_error& e) {
    err << "precondition error: " << e.what() << "\n";
    return 2;
  } catch (const internal_error& e) {
    err << "internal check failed: " << e.what() << "\n";
    return 70;
  }
}

}  // namespace exactpl::cli
