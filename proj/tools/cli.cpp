#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <variant>

#include "indet/acceptance.hpp"
#include "indet/debranges.hpp"
#include "indet/domains.hpp"
#include "indet/nevanlinna.hpp"

namespace indet::cli {

namespace {

using json = nlohmann::ordered_json;

std::string num(double x) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

// Shortest round-trip form, for text reports.
std::string snum(double x) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string cnum(cplx z) {
  std::string s = snum(z.real());
  s += std::signbit(z.imag()) ? '-' : '+';
  s += snum(std::abs(z.imag()));
  s += 'i';
  return s;
}

bool is_preset(const std::string& name) { return name == "power-law" || name == "power_law"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// --- reports -----------------------------------------------------------------

using Value = std::variant<double, cplx, std::string, std::uint64_t, bool>;
using Fields = std::vector<std::pair<std::string, Value>>;

class Report {
 public:
  explicit Report(Format f) : fmt_(f) {}

  /// Summary line; a `#` comment in CSV.
  void note(const Fields& f) {
    if (fmt_ == Format::csv) s_ << "# ";
    bool first = true;
    for (const auto& [k, v] : f) {
      if (!first) s_ << ' ';
      first = false;
      s_ << k << '=' << text(v);
    }
    s_ << '\n';
  }

  /// Table row. CSV repeats the header whenever the column set changes.
  void row(const Fields& f) {
    if (fmt_ == Format::text) return note(f);
    std::string header, line;
    for (const auto& [k, v] : f) {
      if (!header.empty()) {
        header += ',';
        line += ',';
      }
      if (const auto* z = std::get_if<cplx>(&v)) {
        header += k + "_re," + k + "_im";
        line += num(z->real()) + ',' + num(z->imag());
      } else {
        header += k;
        line += csv_cell(v);
      }
    }
    if (header != header_) {
      s_ << header << '\n';
      header_ = header;
    }
    s_ << line << '\n';
  }

  std::string str() const { return s_.str(); }

 private:
  static std::string text(const Value& v) {
    struct V {
      std::string operator()(double x) const { return snum(x); }
      std::string operator()(cplx z) const { return cnum(z); }
      std::string operator()(const std::string& s) const {
        return s.find(' ') == std::string::npos && !s.empty() ? s : '"' + s + '"';
      }
      std::string operator()(std::uint64_t n) const { return std::to_string(n); }
      std::string operator()(bool b) const { return b ? "yes" : "no"; }
    };
    return std::visit(V{}, v);
  }

  static std::string csv_cell(const Value& v) {
    if (const auto* s = std::get_if<std::string>(&v)) {
      if (s->find_first_of(",\"\n") == std::string::npos) return *s;
      std::string q = "\"";
      for (char c : *s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + '"';
    }
    if (const auto* x = std::get_if<double>(&v)) return num(*x);
    return text(v);
  }

  Format fmt_;
  std::ostringstream s_;
  std::string header_;
};

std::uint64_t sz(std::size_t n) { return static_cast<std::uint64_t>(n); }

void header(Report& rep, const std::string& cmd, const RunConfig& cfg, const JacobiCoefficients& src,
            std::size_t N, double tol) {
  rep.note({{"command", cmd},
            {"problem", src.description()},
            {"config_hash", config_hash(cfg)},
            {"seed", cfg.seed},
            {"precision", std::string(cfg.pol.precision == Precision::extended ? "extended" : "standard")},
            {"N", sz(N)},
            {"tol", tol}});
}

// --- complex literals and the combination language -----------------------------

// On failure `bad` (when given) receives the offset of the first character
// that could not be used.
bool parse_real(std::string_view s, double& x, std::size_t* bad = nullptr) {
  if (s.empty()) {
    if (bad) *bad = 0;
    return false;
  }
  const char* first = s.data();
  const char* last = first + s.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec == std::errc() && ptr == last) return true;
  if (bad) *bad = ec == std::errc() ? static_cast<std::size_t>(ptr - s.data()) : 0;
  return false;
}

class SpecParser {
 public:
  SpecParser(std::string_view s, const JacobiCoefficients& src, const TruncationPolicy& pol,
             const SpecContext& ctx)
      : s_(s), src_(src), pol_(pol), ctx_(ctx) {}

  Combination run() {
    struct Term {
      double sign;
      std::string coef_name;  // empty: literal
      cplx coef;
      std::size_t coef_pos;
      char kind;              // p, q, e
      cplx point;
      std::size_t index;
    };
    std::vector<Term> terms;
    skip();
    if (eof()) throw ParseError("empty combination", pos_);
    while (true) {
      skip();
      double sign = 1.0;
      if (!terms.empty()) {
        if (eof() || peek() == '@') break;
        if (peek() != '+' && peek() != '-') throw ParseError("expected '+', '-' or '@'", pos_);
      }
      if (!eof() && (peek() == '+' || peek() == '-')) {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
        skip();
      }
      Term t{sign, "", cplx(1.0), pos_, 0, {}, 0};
      const std::size_t start = pos_;
      if (!eof() && std::isalpha(static_cast<unsigned char>(peek()))) {
        const std::string id = ident();
        skip();
        if ((id == "p" || id == "q" || id == "e") && !eof() && peek() == '(') {
          pos_ = start;
        } else if (id == "alpha" || id == "beta" || id == "gamma" || id == "w") {
          t.coef_name = id;
          expect('*');
        } else if (id == "i") {
          t.coef = cplx(0.0, 1.0);
          expect('*');
        } else {
          throw ParseError("unknown name '" + id + "'", start);
        }
      } else if (!eof() && peek() == '(') {
        const std::size_t close = s_.find(')', pos_);
        if (close == std::string_view::npos) throw ParseError("unclosed '('", pos_);
        t.coef = parse_complex(s_.substr(pos_ + 1, close - pos_ - 1), pos_ + 1);
        pos_ = close + 1;
        expect('*');
      } else if (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) {
        const std::size_t b = pos_;
        while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                          peek() == 'e' || peek() == 'E' ||
                          ((peek() == '+' || peek() == '-') && pos_ > b &&
                           (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E')))) {
          ++pos_;
        }
        if (!eof() && peek() == 'i') ++pos_;
        t.coef = parse_complex(s_.substr(b, pos_ - b), b);
        expect('*');
      } else {
        throw ParseError("expected a coefficient or a vector", pos_);
      }
      skip();
      const std::size_t vpos = pos_;
      const std::string v = ident();
      if (v != "p" && v != "q" && v != "e") throw ParseError("expected p(.), q(.) or e(.)", vpos);
      t.kind = v[0];
      expect('(');
      const std::size_t close = s_.find(')', pos_);
      if (close == std::string_view::npos) throw ParseError("unclosed '('", pos_);
      std::string_view arg = s_.substr(pos_, close - pos_);
      std::size_t apos = pos_;
      while (!arg.empty() && arg.front() == ' ') arg.remove_prefix(1), ++apos;
      while (!arg.empty() && arg.back() == ' ') arg.remove_suffix(1);
      if (t.kind == 'e') {
        const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), t.index);
        if (ec != std::errc() || ptr != arg.data() + arg.size() || arg.empty()) {
          throw ParseError("e(n) needs a non-negative integer", apos);
        }
      } else if (arg == "u") {
        t.point = ctx_.u;
      } else if (arg == "v") {
        t.point = ctx_.v;
      } else if (arg == "lambda") {
        t.point = ctx_.lambda;
      } else {
        t.point = parse_complex(arg, apos);
      }
      pos_ = close + 1;
      terms.push_back(t);
    }

    Combination out;
    skip();
    if (!eof() && peek() == '@') {
      ++pos_;
      std::string_view rest = s_.substr(pos_);
      while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1), ++pos_;
      while (!rest.empty() && rest.back() == ' ') rest.remove_suffix(1);
      try {
        out.t = ExtensionParam::parse(std::string(rest));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), pos_ + e.position());
      }
      pos_ = s_.size();
    }
    if (!eof()) throw ParseError("unexpected character", pos_);

    for (const Term& t : terms) {
      cplx coef = t.coef;
      if (!t.coef_name.empty()) coef = named(t.coef_name, out.t, t.coef_pos, out.bindings);
      SeqVector vec;
      if (t.kind == 'p') vec = truncated_p(src_, t.point, pol_);
      else if (t.kind == 'q') vec = truncated_q(src_, t.point, pol_);
      else vec = SeqVector::unit(t.index);
      out.vector += (t.sign * coef) * vec;
    }
    return out;
  }

 private:
  cplx named(const std::string& name, const std::optional<ExtensionParam>& t, std::size_t at,
             std::vector<std::string>& bindings) {
    const std::size_t N = pol_.working_n();
    cplx val;
    if (name == "w") {
      if (!t) throw ParseError("'w' needs an @t suffix", at);
      const NevQuad q = nev_partial(src_, ctx_.lambda, 0.0, N, pol_.precision);
      val = t->is_infinite() ? -q.C / q.D : -(q.A + t->value() * q.C) / (q.B + t->value() * q.D);
    } else {
      const NevQuad q = nev_partial(src_, ctx_.u, ctx_.v, N, pol_.precision);
      val = name == "alpha" ? q.B : name == "beta" ? -q.C : -q.D;
    }
    const std::string b = name + "=" + cnum(val);
    if (std::find(bindings.begin(), bindings.end(), b) == bindings.end()) bindings.push_back(b);
    return val;
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  void skip() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  std::string ident() {
    const std::size_t b = pos_;
    while (!eof() && std::isalpha(static_cast<unsigned char>(peek()))) ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }
  void expect(char c) {
    skip();
    if (eof() || peek() != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
    skip();
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  const JacobiCoefficients& src_;
  const TruncationPolicy& pol_;
  const SpecContext& ctx_;
};

// --- commands ------------------------------------------------------------------

int cmd_eval(const RunConfig& cfg, const JacobiCoefficients& src,
             const std::vector<std::string>& points, const std::optional<std::string>& vtext,
             Report& rep) {
  if (points.empty()) throw ParseError("eval needs at least one point", 0);
  std::vector<cplx> zs;
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      zs.push_back(parse_complex(points[i]));
    } catch (const ParseError& e) {
      throw ParseError("point " + std::to_string(i + 1) + ": " + e.what(), e.position());
    }
  }
  const std::optional<cplx> v = vtext ? std::optional<cplx>(parse_complex(*vtext)) : std::nullopt;
  header(rep, "eval", cfg, src, cfg.pol.working_n(), cfg.pol.tail_tol);
  auto emit = [&](const char* kind, const NevQuad& q) {
    if (!q.converged) {
      throw ConvergenceError("series at u=" + cnum(q.u) + ", v=" + cnum(q.v) +
                             " did not settle before n_max; raise --nmax or --tail-tol");
    }
    const PolyEval ev = eval_pq_fixed(src, q.u, q.N, cfg.pol);
    rep.row({{"kind", std::string(kind)},
             {"u", q.u},
             {"v", q.v},
             {"N", sz(q.N)},
             {"tol", cfg.pol.tail_tol},
             {"norm_p2", ev.cum_p2},
             {"norm_q2", ev.cum_q2},
             {"A", q.A},
             {"B", q.B},
             {"C", q.C},
             {"D", q.D},
             {"det_residual", q.det_residual()}});
  };
  for (const cplx z : zs) {
    emit("one", nev_one(src, z, cfg.pol));
    if (v) emit("two", nev(src, z, *v, cfg.pol));
  }
  return ok;
}

int cmd_support(const RunConfig& cfg, const JacobiCoefficients& src, std::size_t n_check,
                Report& rep, std::string* sidecar) {
  const DiscreteMeasure m = cfg.window_set
                                ? build_measure(src, cfg.t, cfg.scan, n_check, cfg.pol)
                                : build_measure_auto(src, cfg.t, n_check, cfg.pol, cfg.scan);
  const double tol = cfg.scan.refine_tol;
  header(rep, "support", cfg, src, m.N, tol);
  std::string radii;
  for (double r : m.radii) radii += (radii.empty() ? "" : ",") + snum(r);
  rep.note({{"t", cfg.t.str()},
            {"window", snum(m.lo) + ":" + snum(m.hi)},
            {"points", sz(m.points.size())},
            {"captured_mass", m.captured_mass},
            {"grid_step", m.grid_step},
            {"suspect_missed", m.suspect_missed},
            {"radii", radii.empty() ? std::string("fixed") : radii},
            {"N", sz(m.N)},
            {"tol", tol}});
  for (std::size_t n = 0; n < m.moment_residuals.size(); ++n) {
    rep.note({{"moment", sz(n)},
              {"residual", m.moment_residuals[n]},
              {"N", sz(m.N)},
              {"tol", 1e-7 * (1.0 + std::abs(moment(src, n)))}});
  }
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    rep.row({{"x", m.points[i]}, {"mass", m.masses[i]}, {"N", sz(m.N)}, {"tol", tol}});
  }
  if (sidecar) {
    std::ostringstream s;
    write_measure_sidecar(s, m);
    *sidecar = s.str();
  }
  return ok;
}

int cmd_membership(const RunConfig& cfg, const JacobiCoefficients& src, const std::string& spec,
                   const SpecContext& ctx, Report& rep) {
  const Combination comb = evaluate_combination(spec, src, cfg.pol, ctx);
  const std::size_t N = cfg.pol.working_n();
  const double tol = kMembershipTol;
  const cplx alt = cfg.z0 == kBasepointAlt ? kBasepoint : kBasepointAlt;
  header(rep, "membership", cfg, src, N, tol);
  Fields spec_line{{"spec", spec},
                   {"u", ctx.u},
                   {"v", ctx.v},
                   {"lambda", ctx.lambda},
                   {"entries", sz(comb.vector.size())},
                   {"norm", comb.vector.norm()},
                   {"support", std::string(comb.vector.truncated() ? "truncated" : "finite")}};
  for (const std::string& b : comb.bindings) {
    const auto eq = b.find('=');
    spec_line.emplace_back(b.substr(0, eq), b.substr(eq + 1));
  }
  spec_line.emplace_back("N", sz(N));
  spec_line.emplace_back("tol", tol);
  rep.note(spec_line);
  for (const cplx z : {cfg.z0, alt}) {
    const Residues r = residues(src, comb.vector, z, cfg.pol);
    rep.row({{"basepoint", z}, {"alpha", r.alpha}, {"beta", r.beta}, {"N", sz(r.N)}, {"tol", tol}});
  }
  const MembershipVerdict v = comb.t ? membership_DTt(src, comb.vector, *comb.t, cfg.pol, tol, cfg.z0, alt)
                                     : membership_DT(src, comb.vector, cfg.pol, tol, cfg.z0, alt);
  rep.note({{"domain", v.domain_tag},
            {"in_domain", v.in_domain},
            {"residual", v.residual},
            {"residual_alt", v.residual_alt},
            {"degenerate", v.degenerate},
            {"N", sz(v.N)},
            {"tol", v.tol}});
  return ok;
}

std::vector<Rect> parse_rects(const std::vector<std::string>& texts) {
  std::vector<Rect> out;
  for (const std::string& s : texts) {
    std::vector<double> v;
    std::size_t b = 0;
    while (true) {
      const std::size_t e = s.find(':', b);
      double x = 0.0;
      const std::string_view part = std::string_view(s).substr(b, e == std::string::npos ? std::string::npos : e - b);
      if (!parse_real(part, x)) throw ParseError("rectangle '" + s + "': expected a number", b);
      v.push_back(x);
      if (e == std::string::npos) break;
      b = e + 1;
    }
    if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3])) {
      throw ParseError("rectangle '" + s + "' must be re_lo:re_hi:im_lo:im_hi with lo < hi", 0);
    }
    out.push_back({v[0], v[1], v[2], v[3]});
  }
  return out;
}

int cmd_zeros(const RunConfig& cfg, const JacobiCoefficients& src, const std::string& fspec,
              double v, const std::vector<std::string>& rect_texts, Report& rep) {
  const std::size_t N = cfg.pol.working_n();
  ComplexFn f;
  std::string label;
  if (fspec == "ext") {
    f = extremal_function(src, cfg.t, cfg.pol);
    label = cfg.t.is_infinite() ? "D(.)" : "B(.)+" + cfg.t.str() + "*D(.)";
  } else if (fspec == "A" || fspec == "B" || fspec == "C" || fspec == "D") {
    const auto slice = std::make_shared<NevanlinnaSlice>(src, v, N, cfg.pol.precision);
    const char which = fspec[0];
    f = [slice, which](cplx u) {
      const NevQuad q = slice->at(u);
      return which == 'A' ? q.A : which == 'B' ? q.B : which == 'C' ? q.C : q.D;
    };
    label = fspec + "(.," + snum(v) + ")";
  } else {
    throw ParseError("unknown function '" + fspec + "' (expected A, B, C, D or ext)", 0);
  }
  const std::vector<Rect> rects = parse_rects(rect_texts);
  const RealFn fr = [&f](double x) { return f(cplx(x)).real(); };
  const ZeroScan zs = real_zeros(fr, cfg.scan, &f);
  const double tol = cfg.scan.refine_tol;
  header(rep, "zeros", cfg, src, N, tol);
  Fields info{{"function", label},
              {"window", snum(cfg.scan.lo) + ":" + snum(cfg.scan.hi)},
              {"zeros", sz(zs.zeros.size())},
              {"grid_step", zs.grid_step},
              {"extended", zs.extended},
              {"suspect_missed", zs.suspect_missed}};
  if (zs.strip_count) info.emplace_back("strip_count", sz(static_cast<std::size_t>(*zs.strip_count)));
  info.emplace_back("N", sz(N));
  info.emplace_back("tol", tol);
  rep.note(info);
  for (const Rect& r : rects) {
    const int n = count_zeros_rect(f, r);
    rep.note({{"rect", snum(r.re_lo) + ":" + snum(r.re_hi) + ":" + snum(r.im_lo) + ":" + snum(r.im_hi)},
              {"count", sz(static_cast<std::size_t>(std::max(n, 0)))},
              {"N", sz(N)},
              {"tol", tol}});
  }
  for (double x : zs.zeros) rep.row({{"x", x}, {"value", fr(x)}, {"N", sz(N)}, {"tol", tol}});
  return ok;
}

int cmd_xi(const RunConfig& cfg, const JacobiCoefficients& src, const std::string& path, Report& rep) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  const SeqVector c = read_vector(in);
  const SeqVector x = xi_apply(src, c, cfg.z0, cfg.pol);
  const double tol = 1e-10;
  const std::size_t M = c.M();
  const double res = resolvent_residual(src, c, cfg.z0, cfg.pol);
  const MembershipVerdict v = membership_DT(src, x, cfg.pol);
  header(rep, "xi", cfg, src, M, tol);
  rep.note({{"z0", cfg.z0},
            {"input_entries", sz(c.size())},
            {"norm_c", c.norm()},
            {"norm_xi", x.norm()},
            {"F_c(z0)", F_eval(src, c, cfg.z0, cfg.pol)},
            {"resolvent_residual", res},
            {"N", sz(M)},
            {"tol", tol}});
  rep.note({{"domain", v.domain_tag},
            {"in_domain", v.in_domain},
            {"residual", v.residual},
            {"residual_alt", v.residual_alt},
            {"degenerate", v.degenerate},
            {"N", sz(v.N)},
            {"tol", v.tol}});
  for (std::size_t k = 0; k < x.size(); ++k) {
    rep.row({{"k", sz(k)}, {"xi", x.entries[k]}, {"N", sz(M)}, {"tol", tol}});
  }
  return v.in_domain && res < tol ? ok : check_failed;
}

int cmd_verify(const RunConfig& cfg, const JacobiCoefficients& src, Report& rep, std::ostream& live) {
  AcceptanceConfig ac;
  ac.src = src;
  ac.pol = cfg.pol;
  ac.seed = cfg.seed;
  header(rep, "verify", cfg, src, cfg.pol.working_n(), 0.0);
  int failed = 0;
  for (int id = 1; id <= kCriteria; ++id) {
    const CheckResult r = run_criterion(id, ac);
    if (!r.pass) ++failed;
    live << format_check(r) << '\n' << std::flush;
    rep.row({{"id", sz(static_cast<std::size_t>(r.id))},
             {"result", std::string(r.pass ? "PASS" : "FAIL")},
             {"name", r.name},
             {"measured", r.measured},
             {"N", sz(r.N)},
             {"tol", r.tol},
             {"detail", r.detail}});
  }
  rep.note({{"failed", sz(static_cast<std::size_t>(failed))},
            {"criteria", sz(static_cast<std::size_t>(kCriteria))},
            {"N", sz(cfg.pol.working_n())},
            {"tol", 0.0}});
  return failed == 0 ? ok : check_failed;
}

}  // namespace

// --- configuration -------------------------------------------------------------

void RunConfig::validate() const {
  pol.validate();
  scan.validate();
  if (!(std::imag(z0) > 0.0)) throw DomainError("invalid basepoint: need Im z0 > 0");
  if (is_preset(problem) && !(c > 1.0)) throw Error("power-law exponent must exceed 1");
}

void apply_config_json(RunConfig& cfg, std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw ParseError("config: top level must be an object", 0);
  auto where = [&](const std::string& key) {
    const auto p = text.find('"' + key + '"');
    return p == std::string_view::npos ? std::size_t{0} : p;
  };
  auto check_keys = [&](const json& obj, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : obj.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; })) {
        throw ParseError("config: unknown key '" + k + "'", where(k));
      }
    }
  };
  check_keys(j, {"problem", "c", "truncation", "scan", "precision", "seed", "t", "z0", "output"});
  try {
    if (j.contains("problem")) cfg.problem = j["problem"].get<std::string>();
    if (j.contains("c")) cfg.c = j["c"].get<double>();
    if (j.contains("truncation")) {
      const json& t = j["truncation"];
      check_keys(t, {"n_max", "tail_tol", "safety", "fixed_n"});
      if (t.contains("n_max")) cfg.pol.n_max = t["n_max"].get<std::size_t>();
      if (t.contains("tail_tol")) cfg.pol.tail_tol = t["tail_tol"].get<double>();
      if (t.contains("safety")) cfg.pol.safety = t["safety"].get<double>();
      if (t.contains("fixed_n")) {
        cfg.pol.fixed_n = t["fixed_n"].is_null() ? std::nullopt
                                                  : std::optional<std::size_t>(t["fixed_n"].get<std::size_t>());
      }
    }
    if (j.contains("scan")) {
      const json& s = j["scan"];
      check_keys(s, {"lo", "hi", "grid_step", "refine_tol", "zero_tol"});
      if (s.contains("lo")) cfg.scan.lo = s["lo"].get<double>(), cfg.window_set = true;
      if (s.contains("hi")) cfg.scan.hi = s["hi"].get<double>(), cfg.window_set = true;
      if (s.contains("grid_step")) cfg.scan.grid_step = s["grid_step"].get<double>();
      if (s.contains("refine_tol")) cfg.scan.refine_tol = s["refine_tol"].get<double>();
      if (s.contains("zero_tol")) cfg.scan.zero_tol = s["zero_tol"].get<double>();
    }
    if (j.contains("precision")) {
      const std::string p = j["precision"].get<std::string>();
      if (p != "standard" && p != "extended") throw ParseError("config: precision must be standard or extended", where("precision"));
      cfg.pol.precision = p == "extended" ? Precision::extended : Precision::standard;
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("t")) {
      const json& t = j["t"];
      cfg.t = t.is_string() ? ExtensionParam::parse(t.get<std::string>()) : ExtensionParam::finite(t.get<double>());
    }
    if (j.contains("z0")) cfg.z0 = parse_complex(j["z0"].get<std::string>());
    if (j.contains("output")) {
      const json& o = j["output"];
      check_keys(o, {"path", "format"});
      if (o.contains("path")) cfg.out = o["path"].get<std::string>();
      if (o.contains("format")) {
        const std::string f = o["format"].get<std::string>();
        if (f != "csv" && f != "text") throw ParseError("config: format must be csv or text", where("format"));
        cfg.format = f == "csv" ? Format::csv : Format::text;
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what(), 0);
  }
}

JacobiCoefficients load_problem(const RunConfig& cfg) {
  if (is_preset(cfg.problem)) return JacobiCoefficients::power_law(cfg.c);
  return JacobiCoefficients::from_file(cfg.problem);
}

std::string config_hash(const RunConfig& cfg) {
  json j;
  j["problem"] = cfg.problem;
  if (is_preset(cfg.problem)) j["c"] = num(cfg.c);
  else j["problem_text"] = read_file(cfg.problem);
  j["n_max"] = cfg.pol.n_max;
  j["tail_tol"] = num(cfg.pol.tail_tol);
  j["safety"] = num(cfg.pol.safety);
  j["fixed_n"] = cfg.pol.fixed_n ? json(*cfg.pol.fixed_n) : json(nullptr);
  j["precision"] = cfg.pol.precision == Precision::extended ? "extended" : "standard";
  j["window"] = cfg.window_set ? num(cfg.scan.lo) + ":" + num(cfg.scan.hi) : "auto";
  j["grid_step"] = num(cfg.scan.grid_step);
  j["refine_tol"] = num(cfg.scan.refine_tol);
  j["zero_tol"] = num(cfg.scan.zero_tol);
  j["t"] = cfg.t.str();
  j["z0"] = cnum(cfg.z0);
  j["seed"] = cfg.seed;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

cplx parse_complex(std::string_view text, std::size_t base) {
  std::string_view s = text;
  if (s.empty()) throw ParseError("empty complex literal", base);
  const std::string what = "invalid complex literal '" + std::string(text) + "'";
  std::size_t bad = 0;
  if (s.back() != 'i') {
    double re = 0.0;
    if (!parse_real(s, re, &bad)) throw ParseError(what, base + bad);
    return {re, 0.0};
  }
  s.remove_suffix(1);
  // The imaginary part starts at the last sign that is not an exponent sign.
  std::size_t split = 0;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  double re = 0.0, im = 0.0;
  const std::string_view im_part = s.substr(split);
  if (split > 0 && !parse_real(s.substr(0, split), re, &bad)) throw ParseError(what, base + bad);
  if (im_part.empty() || im_part == "+") im = 1.0;
  else if (im_part == "-") im = -1.0;
  else if (!parse_real(im_part, im, &bad)) throw ParseError(what, base + split + bad);
  return {re, im};
}

std::pair<double, double> parse_window(std::string_view text) {
  // The separator is the first ':' (numbers never contain one).
  const std::size_t c = text.find(':');
  if (c == std::string_view::npos) throw ParseError("window must be lo:hi", text.size());
  double lo = 0.0, hi = 0.0;
  if (!parse_real(text.substr(0, c), lo)) throw ParseError("window: invalid lower bound", 0);
  if (!parse_real(text.substr(c + 1), hi)) throw ParseError("window: invalid upper bound", c + 1);
  if (!(lo < hi)) throw ParseError("window: need lo < hi", 0);
  return {lo, hi};
}

Combination evaluate_combination(std::string_view spec, const JacobiCoefficients& src,
                                 const TruncationPolicy& pol, const SpecContext& ctx) {
  return SpecParser(spec, src, pol, ctx).run();
}

SeqVector read_vector(std::istream& in) {
  std::vector<cplx> e;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    double re = 0.0, im = 0.0;
    if (tok.size() > 2 || !parse_real(tok[0], re) || (tok.size() == 2 && !parse_real(tok[1], im))) {
      throw ParseError("vector file line " + std::to_string(lineno) + ": expected 're' or 're im'", lineno);
    }
    e.emplace_back(re, im);
  }
  if (e.empty()) throw ParseError("vector file has no entries", 0);
  return SeqVector(std::move(e));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nevanlinna functions, N-extremal measures and operator domains of indeterminate moment problems"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, problem, window, t_text, z0_text, precision, out_path, format;
  double c = 0.0, tail_tol = 0.0;
  std::size_t nmax = 0, fixed_n = 0;
  std::uint64_t seed = 0;
  auto* o_config = app.add_option("--config", config_path, "JSON run configuration");
  auto* o_problem = app.add_option("--problem", problem, "preset name (power-law) or coefficient file");
  auto* o_c = app.add_option("--c", c, "exponent of the power-law preset a_n=(n+1)^c");
  auto* o_nmax = app.add_option("--nmax", nmax, "truncation cap");
  auto* o_fixed = app.add_option("--fixed-n", fixed_n, "use this truncation everywhere");
  auto* o_tail = app.add_option("--tail-tol", tail_tol, "stop-rule tail tolerance");
  auto* o_window = app.add_option("--window", window, "real window lo:hi");
  auto* o_t = app.add_option("--t", t_text, "extension parameter (real or inf)");
  auto* o_z0 = app.add_option("--z0", z0_text, "basepoint, Im z0 > 0");
  auto* o_seed = app.add_option("--seed", seed, "seed for randomized checks");
  auto* o_prec = app.add_option("--precision", precision, "standard or extended")
                     ->check(CLI::IsMember({"standard", "extended"}));
  auto* o_out = app.add_option("--out", out_path, "write the report here");
  auto* o_format = app.add_option("--format", format, "csv or text")->check(CLI::IsMember({"csv", "text"}));

  std::vector<std::string> eval_points;
  std::optional<std::string> eval_v;
  auto* eval = app.add_subcommand("eval", "p/q norms and A, B, C, D at points");
  eval->add_option("points", eval_points, "complex points such as 1.5, 2i, 1-0.5i");
  eval->add_option("--v", eval_v, "also evaluate the two-variable functions at (z, v)");

  std::size_t n_check = 6;
  auto* support = app.add_subcommand("support", "support and masses of the N-extremal measure mu_t");
  support->add_option("--moments", n_check, "check moments up to this order")->capture_default_str();

  std::string spec;
  std::string u_text = "1", v_text = "-1", lambda_text = "i";
  auto* membership = app.add_subcommand("membership", "membership of a combination in D(T) or D(T_t)");
  membership->add_option("spec", spec, "combination, e.g. 'p(u)+alpha*p(v)'")->required();
  membership->add_option("--u", u_text, "value of u")->capture_default_str();
  membership->add_option("--v", v_text, "value of v")->capture_default_str();
  membership->add_option("--lambda", lambda_text, "value of lambda")->capture_default_str();

  std::string fspec = "ext";
  double zeros_v = 0.0;
  std::vector<std::string> rects;
  auto* zeros = app.add_subcommand("zeros", "real zeros in the window and rectangle zero counts");
  zeros->add_option("function", fspec, "A, B, C, D (in u, at fixed --v) or ext (B+tD)")->capture_default_str();
  zeros->add_option("--v", zeros_v, "second variable for A..D")->capture_default_str();
  zeros->add_option("--rect", rects, "re_lo:re_hi:im_lo:im_hi (repeatable)");

  std::string vector_path;
  auto* xi = app.add_subcommand("xi", "apply Xi_{z0} to a finite vector");
  xi->add_option("vector-file", vector_path, "one entry per line: re [im]")->required();

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return usage;
  }

  RunConfig cfg;
  std::ostringstream live_buf;
  try {
    try {
      if (*o_config) apply_config_json(cfg, read_file(config_path));
      if (*o_problem) cfg.problem = problem;
      if (*o_c) cfg.c = c;
      if (*o_nmax) cfg.pol.n_max = nmax;
      if (*o_fixed) cfg.pol.fixed_n = fixed_n;
      if (*o_tail) cfg.pol.tail_tol = tail_tol;
      if (*o_window) {
        std::tie(cfg.scan.lo, cfg.scan.hi) = parse_window(window);
        cfg.window_set = true;
      }
      if (*o_t) cfg.t = ExtensionParam::parse(t_text);
      if (*o_z0) cfg.z0 = parse_complex(z0_text);
      if (*o_seed) cfg.seed = seed;
      if (*o_prec) cfg.pol.precision = precision == "extended" ? Precision::extended : Precision::standard;
      if (*o_out) cfg.out = out_path;
      if (*o_format) cfg.format = format == "csv" ? Format::csv : Format::text;
      cfg.validate();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), 0);
    }
    const JacobiCoefficients src = load_problem(cfg);

    Report rep(cfg.format);
    std::string sidecar;
    int code = ok;
    // verify prints its lines as they complete when the report goes to a file.
    std::ostream& live = cfg.out.empty() ? static_cast<std::ostream&>(live_buf) : out;
    if (*eval) {
      code = cmd_eval(cfg, src, eval_points, eval_v, rep);
    } else if (*support) {
      code = cmd_support(cfg, src, n_check, rep,
                         cfg.format == Format::csv && !cfg.out.empty() ? &sidecar : nullptr);
    } else if (*membership) {
      SpecContext ctx;
      ctx.u = parse_complex(u_text);
      ctx.v = parse_complex(v_text);
      ctx.lambda = parse_complex(lambda_text);
      code = cmd_membership(cfg, src, spec, ctx, rep);
    } else if (*zeros) {
      code = cmd_zeros(cfg, src, fspec, zeros_v, rects, rep);
    } else if (*xi) {
      code = cmd_xi(cfg, src, vector_path, rep);
    } else if (*verify) {
      code = cmd_verify(cfg, src, rep, live);
    }

    if (cfg.out.empty()) {
      out << rep.str();
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw Error("cannot write '" + cfg.out + "'");
      f << rep.str();
      if (!sidecar.empty()) {
        std::ofstream s(cfg.out + ".json", std::ios::binary);
        s << sidecar;
      }
    }
    return code;
  } catch (const ParseError& e) {
    err << "usage error: " << e.what() << " (at position " << e.position() << ")\n";
    return usage;
  } catch (const ConvergenceError& e) {
    err << "numeric error: " << e.what() << '\n';
    return numeric;
  } catch (const OverflowError& e) {
    err << "numeric error: " << e.what() << '\n';
    return numeric;
  } catch (const InconclusiveError& e) {
    err << "numeric error: " << e.what() << '\n';
    return numeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  }
}

}  // namespace indet::cli
