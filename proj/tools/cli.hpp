#pragma once

// The `indet` command-line front end. Everything but main() lives here so
// the tests can drive commands in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "indet/jacobi.hpp"
#include "indet/zeros.hpp"

namespace indet::cli {

enum class Format { text, csv };

enum Exit : int { ok = 0, check_failed = 1, usage = 2, numeric = 3 };

struct RunConfig {
  std::string problem = "power-law";  ///< preset name or coefficient file
  double c = 2.0;                     ///< exponent of the power-law preset
  TruncationPolicy pol;
  RootScanConfig scan;
  bool window_set = false;            ///< false: support uses window doubling
  ExtensionParam t = ExtensionParam::finite(0.0);
  cplx z0{0.0, 1.0};
  std::uint64_t seed = 20240601;
  std::string out;                    ///< empty: standard output
  Format format = Format::text;

  void validate() const;
};

/// Overlays the fields present in a JSON config document onto `cfg`.
/// Unknown keys are a ParseError.
void apply_config_json(RunConfig& cfg, std::string_view text);

JacobiCoefficients load_problem(const RunConfig& cfg);

/// FNV-1a over the canonical form of everything that affects results
/// (output path and format excluded), as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`. ParseError positions are offset by
/// `base`.
cplx parse_complex(std::string_view text, std::size_t base = 0);

/// "lo:hi" with lo < hi.
std::pair<double, double> parse_window(std::string_view text);

/// Values bound to the names of the combination mini-language.
struct SpecContext {
  cplx u{1.0, 0.0};
  cplx v{-1.0, 0.0};
  cplx lambda{0.0, 1.0};
};

struct Combination {
  SeqVector vector;
  std::optional<ExtensionParam> t;  ///< from an `@t` suffix
  std::vector<std::string> bindings; ///< "alpha=..." for every named coefficient used
};

/// Parses and evaluates a linear combination such as `p(u)+alpha*p(v)`,
/// `q(u)+beta*q(v)`, `w*p(lambda)+q(lambda)@1` or `2*e(0)-(1+2i)*p(0.5)`.
/// Vectors are p(pt), q(pt) (truncated at pol.working_n()+1) and e(n);
/// pt is u, v, lambda or a complex literal. Coefficients are literals (a
/// compound literal needs parentheses) or alpha = B(u,v), beta = -C(u,v),
/// gamma = -D(u,v), w = -(A+tC)/(B+tD) at (lambda, 0), which needs `@t`.
Combination evaluate_combination(std::string_view spec, const JacobiCoefficients& src,
                                 const TruncationPolicy& pol, const SpecContext& ctx);

/// Reads a vector file: one entry per line as `re` or `re im`; `#` comments.
SeqVector read_vector(std::istream& in);

/// Runs the command line; reports go to `out` (or --out), diagnostics to
/// `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace indet::cli
