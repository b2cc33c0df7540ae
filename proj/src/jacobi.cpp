#include "indet/jacobi.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <variant>

#include "indet/detail/recurrence.hpp"

namespace indet {

struct JacobiCoefficients::Data {
  struct PowerLaw {
    double exponent;
  };
  struct Explicit {
    std::vector<Coeff> rows;
    std::optional<TailRule> tail;
  };
  std::variant<PowerLaw, Explicit> kind;
};

JacobiCoefficients::JacobiCoefficients(std::shared_ptr<const Data> data, std::size_t offset,
                                       std::string description)
    : data_(std::move(data)), offset_(offset), description_(std::move(description)) {}

JacobiCoefficients JacobiCoefficients::power_law(double exponent) {
  if (!(exponent > 1.0) || !std::isfinite(exponent)) {
    throw Error("power-law exponent must be a finite real > 1");
  }
  auto data = std::make_shared<Data>(Data{Data::PowerLaw{exponent}});
  std::ostringstream label;
  label << "power_law(c=" << exponent << ")";
  return JacobiCoefficients(std::move(data), 0, label.str());
}

JacobiCoefficients JacobiCoefficients::explicit_list(std::vector<Coeff> rows,
                                                     std::optional<TailRule> tail,
                                                     std::string description) {
  if (rows.empty() && !tail) throw Error("explicit coefficient list is empty");
  for (std::size_t n = 0; n < rows.size(); ++n) {
    if (!(rows[n].a > 0.0) || !std::isfinite(rows[n].a) || !std::isfinite(rows[n].b)) {
      throw Error("invalid coefficient at index " + std::to_string(n) +
                  ": need a_n > 0 and finite b_n");
    }
  }
  auto data = std::make_shared<Data>(Data{Data::Explicit{std::move(rows), std::move(tail)}});
  return JacobiCoefficients(std::move(data), 0, std::move(description));
}

JacobiCoefficients JacobiCoefficients::parse(std::istream& in, std::string description) {
  std::vector<Coeff> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    Coeff c{};
    std::string extra;
    if (!(fields >> c.a >> c.b) || (fields >> extra)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected two decimal fields `a_n b_n`",
                       line_no);
    }
    if (!(c.a > 0.0) || !std::isfinite(c.a)) {
      throw ParseError("line " + std::to_string(line_no) + ": a_n must be > 0", line_no);
    }
    if (!std::isfinite(c.b)) {
      throw ParseError("line " + std::to_string(line_no) + ": b_n must be finite", line_no);
    }
    rows.push_back(c);
  }
  if (rows.empty()) throw ParseError("no coefficient rows found", line_no);
  return explicit_list(std::move(rows), std::nullopt, std::move(description));
}

JacobiCoefficients JacobiCoefficients::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open coefficient file: " + path);
  return parse(in, path);
}

Coeff JacobiCoefficients::coeffs(std::size_t n) const {
  const std::size_t idx = n + offset_;
  return std::visit(
      [&](const auto& k) -> Coeff {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Data::PowerLaw>) {
          return {std::pow(static_cast<double>(idx + 1), k.exponent), 0.0};
        } else {
          if (idx < k.rows.size()) return k.rows[idx];
          if (!k.tail) throw RangeError("coefficient range exhausted");
          const Coeff c = (*k.tail)(idx);
          if (!(c.a > 0.0) || !std::isfinite(c.a) || !std::isfinite(c.b)) {
            throw Error("tail rule produced an invalid coefficient at index " +
                        std::to_string(idx));
          }
          return c;
        }
      },
      data_->kind);
}

std::vector<Coeff> JacobiCoefficients::table(std::size_t last) const {
  std::vector<Coeff> out;
  out.reserve(last + 1);
  for (std::size_t n = 0; n <= last; ++n) out.push_back(coeffs(n));
  return out;
}

JacobiCoefficients JacobiCoefficients::truncate_once() const {
  if (auto m = max_index(); m && *m == 0) throw RangeError("coefficient range exhausted");
  return JacobiCoefficients(data_, offset_ + 1, description_ + "^(1)");
}

std::optional<std::size_t> JacobiCoefficients::max_index() const {
  if (const auto* e = std::get_if<Data::Explicit>(&data_->kind); e && !e->tail) {
    if (e->rows.size() <= offset_) return 0;
    return e->rows.size() - 1 - offset_;
  }
  return std::nullopt;
}

void TruncationPolicy::validate() const {
  if (n_max < 8) throw Error("truncation policy: n_max must be >= 8");
  if (!(tail_tol > 0.0)) throw Error("truncation policy: tail_tol must be > 0");
  if (!(safety >= 1.0)) throw Error("truncation policy: safety must be >= 1");
  if (fixed_n && *fixed_n < 1) throw Error("truncation policy: fixed_n must be >= 1");
}

PolyEval eval_pq(const JacobiCoefficients& src, cplx z, const TruncationPolicy& pol) {
  pol.validate();
  if (pol.fixed_n) return eval_pq_fixed(src, z, *pol.fixed_n, pol);
  if (pol.precision == Precision::extended) {
    return detail::to_double(detail::recur<ext_real>(src, lift<ext_real>(z), pol.n_max, pol, true));
  }
  return detail::to_double(detail::recur<double>(src, z, pol.n_max, pol, true));
}

PolyEval eval_pq_fixed(const JacobiCoefficients& src, cplx z, std::size_t N,
                       const TruncationPolicy& pol) {
  if (pol.precision == Precision::extended) {
    return detail::to_double(detail::recur<ext_real>(src, lift<ext_real>(z), N, pol, false));
  }
  return detail::to_double(detail::recur<double>(src, z, N, pol, false));
}

SeqVector SeqVector::unit(std::size_t n) {
  SeqVector v;
  v.entries.assign(n + 1, cplx{});
  v.entries[n] = 1.0;
  return v;
}

double SeqVector::norm() const {
  double s = 0.0;
  for (const auto& c : entries) s += std::norm(c);
  return std::sqrt(s);
}

bool SeqVector::is_zero() const {
  for (const auto& c : entries) {
    if (c != cplx{}) return false;
  }
  return true;
}

SeqVector SeqVector::conj() const {
  SeqVector out = *this;
  for (auto& c : out.entries) c = std::conj(c);
  return out;
}

SeqVector& SeqVector::operator+=(const SeqVector& o) {
  if (o.entries.size() > entries.size()) entries.resize(o.entries.size());
  for (std::size_t n = 0; n < o.entries.size(); ++n) entries[n] += o.entries[n];
  if (o.truncated()) support = Support::truncated;
  return *this;
}

SeqVector& SeqVector::operator*=(cplx s) {
  for (auto& c : entries) c *= s;
  return *this;
}

SeqVector operator+(SeqVector a, const SeqVector& b) { return a += b; }
SeqVector operator-(SeqVector a, const SeqVector& b) { return a += (-1.0) * b; }
SeqVector operator*(cplx s, SeqVector v) { return v *= s; }

SeqVector apply_jacobi(const JacobiCoefficients& src, const SeqVector& c) {
  const std::size_t M = c.M();
  const auto tab = src.table(M + 1);
  SeqVector out;
  out.support = c.support;
  out.entries.assign(c.size() + 1, cplx{});
  if (c.entries.empty()) return out;
  for (std::size_t n = 0; n <= M + 1; ++n) {
    cplx v{};
    if (n >= 1) v += tab[n - 1].a * c[n - 1];
    v += tab[n].b * c[n];
    v += tab[n].a * c[n + 1];
    out.entries[n] = v;
  }
  return out;
}

double moment(const JacobiCoefficients& src, std::size_t n) {
  // J^k e_0 is supported on 0..k; only indices <= n are ever needed.
  const auto tab = src.table(n + 1);
  std::vector<long double> v{1.0L};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<long double> w(v.size() + 1, 0.0L);
    for (std::size_t i = 0; i < w.size(); ++i) {
      long double s = 0.0L;
      if (i >= 1) s += static_cast<long double>(tab[i - 1].a) * v[i - 1];
      if (i < v.size()) s += static_cast<long double>(tab[i].b) * v[i];
      if (i + 1 < v.size()) s += static_cast<long double>(tab[i].a) * v[i + 1];
      w[i] = s;
    }
    v = std::move(w);
  }
  return static_cast<double>(v[0]);
}

SeqVector p_vector(const PolyEval& ev) { return SeqVector(ev.p, SeqVector::Support::truncated); }
SeqVector q_vector(const PolyEval& ev) { return SeqVector(ev.q, SeqVector::Support::truncated); }

}  // namespace indet
