#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "indet/domains.hpp"
#include "indet/nevanlinna.hpp"

using namespace indet;
using namespace indet::cli;

namespace {

const JacobiCoefficients kPower = JacobiCoefficients::power_law(2.0);
const TruncationPolicy kPol;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "indet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t parse_error_position(const std::string& spec) {
  try {
    evaluate_combination(spec, kPower, kPol, {});
  } catch (const ParseError& e) {
    return e.position();
  }
  FAIL("no parse error for " << spec);
  return 0;
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = "cli_test_" + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("complex literals") {
  CHECK(parse_complex("1.5") == cplx(1.5, 0));
  CHECK(parse_complex("-2") == cplx(-2, 0));
  CHECK(parse_complex("2i") == cplx(0, 2));
  CHECK(parse_complex("i") == cplx(0, 1));
  CHECK(parse_complex("-i") == cplx(0, -1));
  CHECK(parse_complex("1-0.5i") == cplx(1, -0.5));
  CHECK(parse_complex("+1+i") == cplx(1, 1));
  CHECK(parse_complex("1e-3+2e+1i") == cplx(1e-3, 20));
  CHECK(parse_complex("-1e2-1e-2i") == cplx(-100, -0.01));
  CHECK_THROWS_AS(parse_complex(""), ParseError);
  CHECK_THROWS_AS(parse_complex("1+2j"), ParseError);
  try {
    parse_complex("1+2.x i", 10);
    FAIL("accepted");
  } catch (const ParseError& e) {
    CHECK(e.position() == 14);
  }
}

TEST_CASE("window strings") {
  CHECK(parse_window("-5:7.5") == std::pair<double, double>(-5, 7.5));
  CHECK_THROWS_AS(parse_window("5"), ParseError);
  CHECK_THROWS_AS(parse_window("5:1"), ParseError);
  CHECK_THROWS_AS(parse_window("a:1"), ParseError);
}

TEST_CASE("combinations: values of the named coefficients") {
  SpecContext ctx;
  ctx.u = cplx(0.3, 0.2);
  ctx.v = cplx(-1.1, 0.4);
  ctx.lambda = cplx(0.5, 1.5);
  const NevQuad q = nev_partial(kPower, ctx.u, ctx.v, kPol.working_n());
  const SeqVector pu = truncated_p(kPower, ctx.u, kPol), pv = truncated_p(kPower, ctx.v, kPol);
  const SeqVector qu = truncated_q(kPower, ctx.u, kPol), qv = truncated_q(kPower, ctx.v, kPol);

  const auto close = [](const SeqVector& a, const SeqVector& b) {
    return (a - b).norm() <= 1e-13 * std::max(1.0, b.norm());
  };
  const Combination a = evaluate_combination("p(u)+alpha*p(v)", kPower, kPol, ctx);
  CHECK(close(a.vector, pu + q.B * pv));
  REQUIRE(a.bindings.size() == 1);
  CHECK(a.bindings[0].rfind("alpha=", 0) == 0);
  CHECK_FALSE(a.t.has_value());
  CHECK(close(evaluate_combination("q(u) + beta * q(v)", kPower, kPol, ctx).vector, qu - q.C * qv));
  CHECK(close(evaluate_combination("p(u)+gamma*q(v)", kPower, kPol, ctx).vector, pu - q.D * qv));
  CHECK(close(evaluate_combination("-p(v)+(1-2i)*q(u)-0.5i*p(u)", kPower, kPol, ctx).vector,
              cplx(-1) * pv + cplx(1, -2) * qu - cplx(0, 0.5) * pu));

  const NevQuad l = nev_partial(kPower, ctx.lambda, 0.0, kPol.working_n());
  const Combination w = evaluate_combination("w*p(lambda)+q(lambda)@1", kPower, kPol, ctx);
  REQUIRE(w.t.has_value());
  CHECK(*w.t == ExtensionParam::finite(1.0));
  const cplx wv = -(l.A + l.C) / (l.B + l.D);
  CHECK(close(w.vector, wv * truncated_p(kPower, ctx.lambda, kPol) + truncated_q(kPower, ctx.lambda, kPol)));
  const Combination wi = evaluate_combination("w*p(lambda)+q(lambda) @ inf", kPower, kPol, ctx);
  CHECK(wi.t->is_infinite());
  CHECK(close(wi.vector, (-l.C / l.D) * truncated_p(kPower, ctx.lambda, kPol) +
                             truncated_q(kPower, ctx.lambda, kPol)));

  const Combination e = evaluate_combination("2*e(3)-e(0)", kPower, kPol, ctx);
  CHECK_FALSE(e.vector.truncated());
  CHECK(e.vector.size() == 4);
  CHECK(e.vector[3] == cplx(2));
  CHECK(e.vector[0] == cplx(-1));

  const Combination lit = evaluate_combination("p(0.5+0.5i)", kPower, kPol, ctx);
  CHECK(close(lit.vector, truncated_p(kPower, cplx(0.5, 0.5), kPol)));
}

TEST_CASE("combinations: errors carry the position") {
  CHECK(parse_error_position("") == 0);
  CHECK(parse_error_position("p(u)+") == 5);
  CHECK(parse_error_position("p(u)+*p(v)") == 5);
  CHECK(parse_error_position("p(u) p(v)") == 5);
  CHECK(parse_error_position("p(u)+delta*p(v)") == 5);
  CHECK(parse_error_position("p(u)+alpha p(v)") == 11);
  CHECK(parse_error_position("p(u)+alpha*r(v)") == 11);
  CHECK(parse_error_position("p(u+alpha*p(v)") == 2);
  CHECK(parse_error_position("p(1+2j)") == 3);
  CHECK(parse_error_position("e(-1)") == 2);
  CHECK(parse_error_position("w*p(lambda)") == 0);
  CHECK(parse_error_position("p(u)@x") == 5);
  CHECK(parse_error_position("(1+i*p(u)") == 2);
}

TEST_CASE("vector files") {
  std::istringstream good("# header\n1\n\n0.5 -0.25  # trailing\n2 1\n");
  const SeqVector v = read_vector(good);
  REQUIRE(v.size() == 3);
  CHECK(v[1] == cplx(0.5, -0.25));
  CHECK_FALSE(v.truncated());
  std::istringstream bad("1\n2 3 4\n");
  try {
    read_vector(bad);
    FAIL("accepted");
  } catch (const ParseError& e) {
    CHECK(e.position() == 2);
  }
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_vector(empty), ParseError);
}

TEST_CASE("config documents") {
  RunConfig cfg;
  apply_config_json(cfg, R"({"problem": "power-law", "c": 2.5, "truncation": {"n_max": 300, "fixed_n": 200},
      "scan": {"lo": -3, "hi": 4}, "precision": "extended", "seed": 9, "t": "inf", "z0": "1+2i",
      "output": {"format": "csv"}})");
  CHECK(cfg.c == 2.5);
  CHECK(cfg.pol.n_max == 300);
  CHECK(cfg.pol.fixed_n == std::optional<std::size_t>(200));
  CHECK(cfg.window_set);
  CHECK(cfg.scan.lo == -3);
  CHECK(cfg.pol.precision == Precision::extended);
  CHECK(cfg.seed == 9);
  CHECK(cfg.t.is_infinite());
  CHECK(cfg.z0 == cplx(1, 2));
  CHECK(cfg.format == Format::csv);

  RunConfig other;
  try {
    apply_config_json(other, R"({"seed": 1, "sede": 2})");
    FAIL("accepted");
  } catch (const ParseError& e) {
    CHECK(e.position() == 12);
  }
  CHECK_THROWS_AS(apply_config_json(other, R"({"seed": )"), ParseError);
  CHECK_THROWS_AS(apply_config_json(other, R"({"truncation": {"nmax": 3}})"), ParseError);

  RunConfig a, b;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 1;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.out = "elsewhere.csv";
  CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("cli: documented examples") {
  const Outcome s = invoke({"support", "--t", "inf"});
  CHECK(s.code == 0);
  CHECK(s.out.find("\nx=0 ") != std::string::npos);

  const Outcome m = invoke({"membership", "p(u)+(-1)*p(u)"});
  CHECK(m.code == 0);
  CHECK(m.out.find("in_domain=yes") != std::string::npos);
  CHECK(m.out.find("degenerate=yes") != std::string::npos);
}

TEST_CASE("cli: every report line carries N and tol, and the seed is recorded") {
  const std::string vec = temp_file("vec.txt", "1\n0 1\n-0.5\n");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"eval", "1", "0.5+2i", "--v", "-1"},
           {"support", "--window", "-20:20", "--t", "1"},
           {"membership", "p(u)+alpha*p(v)", "--u", "2", "--v", "0.5i"},
           {"zeros", "B", "--v", "1", "--window", "-15:15", "--rect", "-5:5:0.5:1"},
           {"xi", vec, "--z0", "1i"}}) {
    for (const char* fmt : {"text", "csv"}) {
      auto full = args;
      full.insert(full.end(), {"--format", fmt, "--seed", "77"});
      const Outcome o = invoke(full);
      CHECK_MESSAGE(o.code == 0, args[0] << ": " << o.err);
      CHECK(o.out.find("seed=77") != std::string::npos);
      CHECK(o.out.find("config_hash=") != std::string::npos);
      std::istringstream lines(o.out);
      bool csv_header_has = false;
      for (std::string line; std::getline(lines, line);) {
        if (std::string(fmt) == "csv" && line[0] != '#') {
          if (line.find(",N,tol") != std::string::npos || line.find(",N,") != std::string::npos) {
            csv_header_has = true;
          }
          CHECK_MESSAGE(csv_header_has, line);
          continue;
        }
        CHECK_MESSAGE(line.find(" N=") != std::string::npos, line);
        CHECK_MESSAGE(line.find(" tol=") != std::string::npos, line);
      }
    }
  }
  std::remove(vec.c_str());
}

TEST_CASE("cli: reports are byte-identical for identical configuration") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"support", "--t", "0", "--format", "csv"},
           {"eval", "0.25-1i", "3", "--v", "2i"},
           {"zeros", "ext", "--t", "inf", "--window", "-40:40"}}) {
    const Outcome a = invoke(args);
    const Outcome b = invoke(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("cli: CSV carries 17 significant digits") {
  const Outcome o = invoke({"support", "--t", "inf", "--window", "-10:10", "--format", "csv"});
  REQUIRE(o.code == 0);
  std::istringstream lines(o.out);
  std::string line;
  while (std::getline(lines, line) && line[0] == '#') {
  }
  CHECK(line == "x,mass,N,tol");
  std::getline(lines, line);
  const std::string x = line.substr(0, line.find(','));
  CHECK(std::stod(x) == std::stod(x));
  const std::string out = "cli_test_support.csv";
  CHECK(invoke({"support", "--t", "inf", "--window", "-10:10", "--format", "csv", "--out", out}).code == 0);
  std::ifstream side(out + ".json");
  CHECK(side.good());
  std::remove(out.c_str());
  std::remove((out + ".json").c_str());
}

TEST_CASE("cli: exit codes") {
  CHECK(invoke({}).code == Exit::usage);
  CHECK(invoke({"frobnicate"}).code == Exit::usage);
  CHECK(invoke({"--help"}).code == Exit::ok);
  CHECK(invoke({"eval"}).code == Exit::usage);
  CHECK(invoke({"eval", "1+x"}).code == Exit::usage);
  CHECK(invoke({"eval", "1", "--window", "3:1"}).code == Exit::usage);
  CHECK(invoke({"eval", "1", "--z0", "-1i"}).code == Exit::usage);
  CHECK(invoke({"eval", "1", "--precision", "quad"}).code == Exit::usage);
  CHECK(invoke({"eval", "1", "--problem", "no_such_file.txt"}).code == Exit::usage);
  CHECK(invoke({"membership", "p(u)+"}).code == Exit::usage);
  CHECK(invoke({"zeros", "E"}).code == Exit::usage);
  const Outcome n = invoke({"eval", "1", "--nmax", "20"});
  CHECK(n.code == Exit::numeric);
  CHECK(n.err.find("did not settle") != std::string::npos);

  const Outcome pe = invoke({"membership", "p(u)+delta*p(v)"});
  CHECK(pe.err.find("position 5") != std::string::npos);
}

TEST_CASE("cli: flags override the config file") {
  const std::string cfg = temp_file("cfg.json", R"({"seed": 5, "truncation": {"n_max": 300}})");
  const Outcome a = invoke({"--config", cfg, "eval", "1"});
  CHECK(a.code == 0);
  CHECK(a.out.find("seed=5") != std::string::npos);
  const Outcome b = invoke({"--config", cfg, "--seed", "6", "eval", "1"});
  CHECK(b.out.find("seed=6") != std::string::npos);
  const std::string bad = temp_file("bad.json", R"({"seed": 5, "bogus": 1})");
  CHECK(invoke({"--config", bad, "eval", "1"}).code == Exit::usage);
  std::remove(cfg.c_str());
  std::remove(bad.c_str());
}

TEST_CASE("cli: coefficient files") {
  std::ostringstream rows;
  for (int n = 0; n < 700; ++n) rows << (n + 1.0) * (n + 1.0) << " 0\n";
  const std::string path = temp_file("coeffs.txt", "# a_n b_n\n" + rows.str());
  const Outcome f = invoke({"eval", "0.5+1i", "--problem", path});
  const Outcome p = invoke({"eval", "0.5+1i"});
  REQUIRE(f.code == 0);
  // Same numbers, different problem label and hash.
  CHECK(f.out.substr(f.out.find('\n')) == p.out.substr(p.out.find('\n')));
  CHECK(f.out != p.out);
  std::remove(path.c_str());
}

TEST_CASE("cli: xi reports the resolvent residual and the domain verdict") {
  const std::string vec = temp_file("xi.txt", "0.5\n1 -1\n0 2\n3\n");
  const Outcome o = invoke({"xi", vec, "--z0", "0.5+1i"});
  CHECK(o.code == 0);
  CHECK(o.out.find("in_domain=yes") != std::string::npos);
  CHECK(o.out.find("k=2 ") != std::string::npos);
  CHECK(o.out.find("k=3 ") == std::string::npos);
  std::remove(vec.c_str());
}
