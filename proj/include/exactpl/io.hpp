#pragma once

#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "exactpl/components.hpp"
#include "exactpl/game.hpp"
#include "exactpl/refine.hpp"

namespace exactpl {

// Line-oriented text formats with exact rationals.  PL and IS knot lines are
// always slashed ("3/1" for integers); headers carry explicit counts.  All
// writers are deterministic: equal values produce identical bytes.

namespace detail {

inline std::string read_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw parse_error(std::string("unexpected end of ") + what);
  return line;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

inline long parse_count(const std::string& text, const char* what) {
  try {
    size_t used = 0;
    long v = std::stol(text, &used);
    if (used != text.size() || v < 0) throw parse_error("");
    return v;
  } catch (const std::exception&) {
    throw parse_error(std::string("bad ") + what + ": '" + text + "'");
  }
}

inline unsigned long long parse_u64(const std::string& text, const char* what) {
  try {
    size_t used = 0;
    unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw parse_error("");
    return v;
  } catch (const std::exception&) {
    throw parse_error(std::string("bad ") + what + ": '" + text + "'");
  }
}

}  // namespace detail

inline std::string serialize_pl(const PLFunction& f) {
  std::string out = "PL v1 " + std::to_string(f.knots().size()) + "\n";
  for (const auto& k : f.knots()) out += rat_slashed(k.x) + " " + rat_slashed(k.y) + "\n";
  return out;
}

inline PLFunction parse_pl(std::istream& in) {
  auto header = detail::split_fields(detail::read_line(in, "PL header"));
  if (header.size() != 3 || header[0] != "PL" || header[1] != "v1")
    throw parse_error("expected 'PL v1 <count>' header");
  long count = detail::parse_count(header[2], "knot count");
  std::vector<PLKnot> ks;
  for (long i = 0; i < count; i++) {
    auto fields = detail::split_fields(detail::read_line(in, "PL knot line"));
    if (fields.size() != 2) throw parse_error("PL knot line needs two rationals");
    ks.push_back({rat_parse(fields[0]), rat_parse(fields[1])});
  }
  return PLFunction(std::move(ks));
}

inline std::string serialize_interval_set(const IntervalSet& s) {
  std::string out = "IS v1 " + std::to_string(s.parts().size()) + "\n";
  for (const auto& p : s.parts()) out += rat_slashed(p.lo) + " " + rat_slashed(p.hi) + "\n";
  return out;
}

inline IntervalSet parse_interval_set(std::istream& in) {
  auto header = detail::split_fields(detail::read_line(in, "IS header"));
  if (header.size() != 3 || header[0] != "IS" || header[1] != "v1")
    throw parse_error("expected 'IS v1 <count>' header");
  long count = detail::parse_count(header[2], "part count");
  std::vector<Interval> parts;
  for (long i = 0; i < count; i++) {
    auto fields = detail::split_fields(detail::read_line(in, "IS part line"));
    if (fields.size() != 2) throw parse_error("IS part line needs two rationals");
    parts.emplace_back(rat_parse(fields[0]), rat_parse(fields[1]));
  }
  return IntervalSet::from_parts(std::move(parts));
}

// Certificate format: one line per stage, "k a_k b_k y_k" with canonical
// rationals.  Line 0 carries the start window and base level; a single
// degenerate line 0 records a boundary maximum.
inline std::string serialize_certificate(const MaxSearchCertificate& cert) {
  std::string out = "CERT v1\n";
  out += "0 " + rat_str(cert.start.lo) + " " + rat_str(cert.start.hi) + " " +
         rat_str(cert.y_start) + "\n";
  long k = 1;
  for (const auto& st : cert.stages) {
    out += std::to_string(k++) + " " + rat_str(st.bracket.lo) + " " + rat_str(st.bracket.hi) +
           " " + rat_str(st.y1) + "\n";
  }
  return out;
}

struct ParsedCertificate {
  struct Line {
    long index;
    Interval bracket;
    Rat level;
  };
  std::vector<Line> lines;

  bool boundary_case() const {
    return lines.size() == 1 && lines[0].bracket.length() == 0;
  }
};

inline ParsedCertificate parse_certificate(std::istream& in) {
  auto header = detail::split_fields(detail::read_line(in, "CERT header"));
  if (header.size() != 2 || header[0] != "CERT" || header[1] != "v1")
    throw parse_error("expected 'CERT v1' header");
  ParsedCertificate cert;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = detail::split_fields(line);
    if (fields.size() != 4) throw parse_error("certificate stage line needs 4 fields");
    cert.lines.push_back({detail::parse_count(fields[0], "stage index"),
                          Interval(rat_parse(fields[1]), rat_parse(fields[2])),
                          rat_parse(fields[3])});
  }
  if (cert.lines.empty()) throw parse_error("certificate has no stages");
  return cert;
}

// Structural re-check of a stored certificate, plus the function-dependent
// stage facts when the searched function is supplied (stage k used
// eps = 1/(k+1)).
struct CertificateCheck {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

inline CertificateCheck verify_certificate(const ParsedCertificate& cert,
                                           const std::optional<PLFunction>& f) {
  CertificateCheck out;
  auto fail = [&](const std::string& msg) { out.failures.push_back(msg); };
  if (cert.lines[0].index != 0) fail("first line must have index 0");
  for (size_t i = 1; i < cert.lines.size(); i++) {
    const auto& prev = cert.lines[i - 1];
    const auto& cur = cert.lines[i];
    std::string tag = "stage " + std::to_string(cur.index) + ": ";
    if (cur.index != prev.index + 1) fail(tag + "indices not consecutive");
    if (!(cur.bracket.lo > prev.bracket.lo && cur.bracket.hi < prev.bracket.hi))
      fail(tag + "bracket not strictly nested");
    if (!(cur.bracket.length() < prev.bracket.length() / 2))
      fail(tag + "bracket width not halved");
    if (!(cur.level > prev.level)) fail(tag + "level not increasing");
    if (f) {
      Rat eps = rat(1, cur.index + 1);
      if (!(rat_max((*f)(cur.bracket.lo), (*f)(cur.bracket.hi)) <= cur.level))
        fail(tag + "bracket endpoint value above level");
      IntervalSet H_prev = superlevel(*f, prev.level, cert.lines[0].bracket);
      if (!(density(H_prev, cur.bracket) > rat(1, 2)))
        fail(tag + "previous-level density not above 1/2");
      IntervalSet H_cur = superlevel(*f, cur.level, cert.lines[0].bracket);
      if (!(max_straddling_density(H_cur, cert.lines[0].bracket, cur.bracket.lo) <= eps) ||
          !(max_straddling_density(H_cur, cert.lines[0].bracket, cur.bracket.hi) <= eps))
        fail(tag + "straddling density above eps");
    }
  }
  return out;
}

inline const char* adversary_name(AdversaryKind a) {
  return a == AdversaryKind::random ? "random" : "shift";
}

inline std::string serialize_transcript(const GameTranscript& t) {
  std::string out = "GAME v1 " + std::to_string(t.plays.size()) + " " +
                    std::to_string(t.rounds) + " " + std::to_string(t.rng_seed) + " " +
                    adversary_name(t.adversary) + "\n";
  for (const auto& p : t.plays) {
    out += std::string(p.by_responder ? "P2" : "P1") + " " + rat_str(p.ball.radius) + "\n";
    if (p.params) {
      const auto& sp = *p.params;
      out += "PARAMS " + rat_str(sp.alpha) + " " + rat_str(sp.eta) + " " + rat_str(sp.delta) +
             " " + rat_str(sp.mu) + " " + rat_str(sp.wiggle_amplitude) + " " +
             std::to_string(sp.partition.size()) + "\n";
      for (const auto& J : sp.partition)
        out += rat_str(J.lo) + " " + rat_str(J.hi) + "\n";
      out += "FLOORS";
      for (const auto& fl : sp.cell_floors) out += " " + rat_str(fl);
      out += "\n";
      for (const auto& w : sp.witnesses)
        out += "WITNESS " + rat_str(w.x0) + " " + rat_str(w.x1) + " " + rat_str(w.gx0) + " " +
               rat_str(w.gx1) + "\n";
    }
    out += serialize_pl(p.ball.center);
  }
  return out;
}

inline GameTranscript parse_transcript(std::istream& in) {
  auto header = detail::split_fields(detail::read_line(in, "GAME header"));
  if (header.size() != 6 || header[0] != "GAME" || header[1] != "v1")
    throw parse_error("expected 'GAME v1 <plays> <rounds> <seed> <adversary>' header");
  GameTranscript t;
  long plays = detail::parse_count(header[2], "play count");
  t.rounds = static_cast<int>(detail::parse_count(header[3], "round count"));
  t.rng_seed = detail::parse_u64(header[4], "seed");
  if (header[5] == "random") t.adversary = AdversaryKind::random;
  else if (header[5] == "shift") t.adversary = AdversaryKind::monotone_shift;
  else throw parse_error("unknown adversary tag");
  for (long i = 0; i < plays; i++) {
    auto role = detail::split_fields(detail::read_line(in, "play header"));
    if (role.size() != 2 || (role[0] != "P1" && role[0] != "P2"))
      throw parse_error("expected 'P1 <radius>' or 'P2 <radius>'");
    bool responder = role[0] == "P2";
    Rat radius = rat_parse(role[1]);
    std::optional<StrategyParams> params;
    if (responder) {
      auto pf = detail::split_fields(detail::read_line(in, "PARAMS line"));
      if (pf.size() != 7 || pf[0] != "PARAMS") throw parse_error("expected PARAMS line");
      StrategyParams sp{rat_parse(pf[1]), rat_parse(pf[2]), rat_parse(pf[3]), rat_parse(pf[4]),
                        rat_parse(pf[5]), {}, {}, {}};
      long nparts = detail::parse_count(pf[6], "partition count");
      for (long j = 0; j < nparts; j++) {
        auto jf = detail::split_fields(detail::read_line(in, "partition line"));
        if (jf.size() != 2) throw parse_error("partition line needs two rationals");
        sp.partition.emplace_back(rat_parse(jf[0]), rat_parse(jf[1]));
      }
      auto fl = detail::split_fields(detail::read_line(in, "FLOORS line"));
      if (fl.empty() || fl[0] != "FLOORS" || fl.size() != static_cast<size_t>(nparts) + 1)
        throw parse_error("expected FLOORS line with one value per partition interval");
      for (long j = 0; j < nparts; j++) sp.cell_floors.push_back(rat_parse(fl[j + 1]));
      for (long j = 0; j < nparts; j++) {
        auto wf = detail::split_fields(detail::read_line(in, "WITNESS line"));
        if (wf.size() != 5 || wf[0] != "WITNESS") throw parse_error("expected WITNESS line");
        sp.witnesses.push_back(
            {rat_parse(wf[1]), rat_parse(wf[2]), rat_parse(wf[3]), rat_parse(wf[4])});
      }
      params = std::move(sp);
    }
    PLFunction center = parse_pl(in);
    t.plays.push_back({responder, Ball(std::move(center), std::move(radius)),
                       std::move(params)});
  }
  return t;
}

// Rational-valued table with a CSV projection.  The CSV carries decimal
// approximations (12 significant digits, explicitly marked); the exact
// serialization is always written alongside.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Rat>> rows;
};

inline std::string table_to_csv(const Table& t, int sig_digits = 12) {
  std::string out = "# decimal projection, approximate (" + std::to_string(sig_digits) +
                    " significant digits); exact values in the sidecar file\n";
  for (size_t i = 0; i < t.columns.size(); i++)
    out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); i++)
      out += (i ? "," : "") + rat_decimal(row[i], sig_digits);
    out += "\n";
  }
  return out;
}

inline std::string table_to_exact(const Table& t) {
  std::string out;
  for (size_t i = 0; i < t.columns.size(); i++) out += (i ? " " : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); i++) out += (i ? " " : "") + rat_str(row[i]);
    out += "\n";
  }
  return out;
}

}  // namespace exactpl
