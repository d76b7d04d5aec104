#pragma once

#include "upblab/atoms.hpp"
#include "upblab/json_io.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <thread>

#ifndef UPBLAB_DATA_DIR
#define UPBLAB_DATA_DIR "data"
#endif

namespace upblab {

// Bit k set means atom k is negative.
using SignMask = std::uint32_t;
using SignConfig = std::array<int, kAtomCount>;

inline SignMask to_mask(const SignConfig& c) {
  SignMask m = 0;
  for (int k = 0; k < kAtomCount; ++k)
    if (c[std::size_t(k)] < 0) m |= SignMask(1) << k;
  return m;
}

inline SignConfig from_mask(SignMask m) {
  SignConfig c{};
  for (int k = 0; k < kAtomCount; ++k) c[std::size_t(k)] = (m >> k) & 1 ? -1 : 1;
  return c;
}

inline SignConfig sign_config_of(const AtomVector& a) {
  SignConfig c{};
  for (int k = 0; k < kAtomCount; ++k) c[std::size_t(k)] = a[std::size_t(k)] < 0 ? -1 : 1;
  return c;
}

inline std::string config_string(const SignConfig& c) {
  std::string s;
  for (int v : c) s += v < 0 ? '-' : '+';
  return s;
}

struct SignedMonomial {
  int overall = 1;
  std::array<int, kAtomCount> exponents{};

  int sign(SignMask m) const {
    int odd = 0;
    for (int k = 0; k < kAtomCount; ++k)
      if ((exponents[std::size_t(k)] & 1) && ((m >> k) & 1)) odd ^= 1;
    return odd ? -overall : overall;
  }

  double value(const AtomVector& a) const {
    double v = overall;
    for (int k = 0; k < kAtomCount; ++k) v *= std::pow(a[std::size_t(k)], exponents[std::size_t(k)]);
    return v;
  }
};

namespace detail {

enum Atom { P, Q, R, S, PP, QQ, RR, SS, PQ, RS, PR, PS, RQ, QS, QRP, QRS, PSQ, RPS, QRPS };

inline SignedMonomial mono(int overall, std::initializer_list<std::pair<Atom, int>> f) {
  SignedMonomial m;
  m.overall = overall;
  for (auto [a, e] : f) m.exponents[std::size_t(a)] += e;
  return m;
}

}  // namespace detail

// Diagonal entries (2,2),(3,3),(4,4),(6,6),(7,7),(8,8) of the closed-form state for the plus sign.
inline const std::array<SignedMonomial, 6>& diagonal_monomials() {
  using namespace detail;
  static const std::array<SignedMonomial, 6> d = {
      mono(1, {{QRS, 1}, {R, -1}, {QQ, -1}}),
      mono(-1, {{RPS, 1}, {S, -1}, {PP, -1}}),
      mono(1, {{RS, 1}, {PSQ, 1}, {P, -1}, {PQ, -1}, {SS, -1}}),
      mono(1, {{PS, 1}, {RS, 1}, {P, -1}, {PP, -1}, {S, -1}, {SS, -1}}),
      mono(1, {{QRP, 1}, {RS, 1}, {Q, -1}, {PQ, -1}, {RR, -1}}),
      mono(1, {{RQ, 1}, {RS, 1}, {Q, -1}, {QQ, -1}, {R, -1}, {RR, -1}})};
  return d;
}

// 2x2 principal minors on the pairs (2,3),(2,8),(3,6),(4,6),(4,7),(7,8).
inline const std::array<SignedMonomial, 6>& minor_monomials() {
  using namespace detail;
  static const std::array<SignedMonomial, 6> m = {
      mono(-1, {{RS, 1}, {QRPS, 1}, {R, -1}, {PP, -1}, {S, -1}, {QQ, -1}}),
      mono(-1, {{QS, 1}, {RS, 1}, {Q, -1}, {QQ, -1}, {R, -1}, {RR, -1}}),
      mono(1, {{PR, 1}, {RS, 1}, {P, -1}, {PP, -1}, {S, -1}, {SS, -1}}),
      mono(1, {{QS, 1}, {RS, 2}, {P, -1}, {PP, -1}, {PQ, -1}, {S, -1}, {SS, -1}}),
      mono(1, {{RS, 2}, {QRPS, 1}, {P, -1}, {PQ, -1}, {Q, -1}, {RR, -1}, {SS, -1}}),
      mono(-1, {{PR, 1}, {RS, 2}, {PQ, -1}, {Q, -1}, {QQ, -1}, {R, -1}, {RR, -1}})};
  return m;
}

inline const std::array<std::pair<int, int>, 6>& minor_pairs() {
  static const std::array<std::pair<int, int>, 6> p = {{{2, 3}, {2, 8}, {3, 6}, {4, 6}, {4, 7}, {7, 8}}};
  return p;
}

// The invariant quadruples of the 12 permutation rows as monomials in the atoms.
inline const std::array<std::array<SignedMonomial, 4>, 12>& invariant_monomials() {
  using namespace detail;
  static const std::array<std::array<SignedMonomial, 4>, 12> t = {{
      {mono(-1, {{P, 1}, {Q, -1}}), mono(1, {{QQ, 1}}), mono(1, {{RS, 1}, {S, -1}}), mono(-1, {{R, 1}, {RR, -1}})},
      {mono(-1, {{Q, 1}, {P, -1}}), mono(1, {{PP, 1}}), mono(-1, {{RS, 1}, {R, -1}}), mono(-1, {{S, 1}, {SS, -1}})},
      {mono(-1, {{Q, -1}}), mono(-1, {{PQ, 1}, {P, -1}}), mono(-1, {{SS, 1}, {S, -1}}), mono(1, {{RR, -1}})},
      {mono(-1, {{Q, 1}}), mono(-1, {{PP, 1}, {P, -1}}), mono(1, {{SS, 1}}), mono(1, {{S, 1}, {RS, -1}})},
      {mono(-1, {{P, -1}}), mono(1, {{PQ, 1}, {Q, -1}}), mono(-1, {{RR, 1}, {R, -1}}), mono(1, {{SS, -1}})},
      {mono(-1, {{P, 1}}), mono(-1, {{QQ, 1}, {Q, -1}}), mono(1, {{RR, 1}}), mono(-1, {{R, 1}, {RS, -1}})},
      {mono(1, {{PQ, 1}, {Q, -1}}), mono(1, {{QQ, -1}}), mono(-1, {{R, 1}, {S, -1}}), mono(-1, {{RS, 1}, {RR, -1}})},
      {mono(1, {{Q, 1}, {PQ, -1}}), mono(-1, {{PP, 1}, {QQ, -1}}), mono(-1, {{R, 1}, {RS, -1}}), mono(-1, {{S, 1}})},
      {mono(-1, {{QQ, 1}, {Q, -1}}), mono(-1, {{P, 1}, {PQ, -1}}), mono(-1, {{S, -1}}), mono(-1, {{SS, 1}, {RR, -1}})},
      {mono(-1, {{Q, 1}, {QQ, -1}}), mono(-1, {{PP, 1}, {PQ, -1}}), mono(1, {{SS, -1}}), mono(-1, {{S, 1}, {R, -1}})},
      {mono(-1, {{PQ, 1}, {P, -1}}), mono(1, {{PP, -1}}), mono(-1, {{S, 1}, {R, -1}}), mono(1, {{RS, 1}, {SS, -1}})},
      {mono(-1, {{P, 1}, {PQ, -1}}), mono(-1, {{QQ, 1}, {PP, -1}}), mono(1, {{S, 1}, {RS, -1}}), mono(-1, {{R, 1}})},
  }};
  return t;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  static const char* d = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[std::size_t(i)] = d[v & 15];
  return s;
}

struct ConstraintRow {
  std::string source;
  SignMask mask = 0;   // atoms the row constrains
  SignMask value = 0;  // required negative bits within mask
  std::string pattern;
};

struct PositiveRow {
  int sigma = 0;
  int context = 1;
  SignConfig signs{};
};

struct SignData {
  std::vector<ConstraintRow> constraints;
  std::vector<PositiveRow> positive_rows;
};

namespace detail {

inline void check_atom_header(const json& j, const std::string& path) {
  if (!j.contains("atoms") || j.at("atoms").size() != kAtomCount) throw InputError(path + ": bad atom header");
  for (int k = 0; k < kAtomCount; ++k)
    if (j.at("atoms")[std::size_t(k)].get<std::string>() != atom_names()[std::size_t(k)])
      throw InputError(path + ": atom order differs from the library's");
}

inline int sign_char(char c, const std::string& path) {
  if (c == '+') return 1;
  if (c == '-') return -1;
  if (c == '.') return 0;
  throw InputError(path + ": invalid sign character");
}

}  // namespace detail

inline std::vector<ConstraintRow> load_constraints(const std::string& path) {
  json j = read_json_file(path);
  detail::check_atom_header(j, path);
  std::vector<ConstraintRow> rows;
  std::string canon;
  for (const auto& r : j.at("rows")) {
    ConstraintRow c;
    c.source = r.value("source", "");
    c.pattern = r.at("pattern").get<std::string>();
    if (c.pattern.size() != kAtomCount) throw InputError(path + ": pattern has wrong length");
    for (int k = 0; k < kAtomCount; ++k) {
      int v = detail::sign_char(c.pattern[std::size_t(k)], path);
      if (v != 0) c.mask |= SignMask(1) << k;
      if (v < 0) c.value |= SignMask(1) << k;
    }
    if (!canon.empty()) canon += '\n';
    canon += c.pattern;
    rows.push_back(c);
  }
  if (hex16(fnv1a(canon)) != j.at("checksum").get<std::string>()) throw InputError(path + ": checksum mismatch");
  return rows;
}

inline std::vector<PositiveRow> load_positive_table(const std::string& path) {
  json j = read_json_file(path);
  detail::check_atom_header(j, path);
  std::vector<PositiveRow> rows;
  std::string canon;
  for (const auto& r : j.at("rows")) {
    PositiveRow t;
    t.sigma = r.at("sigma").get<int>();
    std::string ctx = r.at("context").get<std::string>();
    std::string sg = r.at("signs").get<std::string>();
    if (sg.size() != kAtomCount || (ctx != "+" && ctx != "-")) throw InputError(path + ": malformed row");
    t.context = ctx == "+" ? 1 : -1;
    for (int k = 0; k < kAtomCount; ++k) {
      int v = detail::sign_char(sg[std::size_t(k)], path);
      if (v == 0) throw InputError(path + ": positive table rows must be fully specified");
      t.signs[std::size_t(k)] = v;
    }
    if (!canon.empty()) canon += '\n';
    canon += std::to_string(t.sigma) + ":" + ctx + ":" + sg;
    rows.push_back(t);
  }
  if (hex16(fnv1a(canon)) != j.at("checksum").get<std::string>()) throw InputError(path + ": checksum mismatch");
  return rows;
}

inline SignData load_sign_data(const std::string& dir = UPBLAB_DATA_DIR) {
  return {load_constraints(dir + "/constraints.json"), load_positive_table(dir + "/positive_signs.json")};
}

inline bool is_forbidden(SignMask m, const std::vector<ConstraintRow>& rows) {
  for (const auto& r : rows)
    if ((m & r.mask) == r.value) return true;
  return false;
}

inline bool is_forbidden(const SignConfig& c, const std::vector<ConstraintRow>& rows) {
  return is_forbidden(to_mask(c), rows);
}

// Equal-sign relations between list entries: in the plus context sign(p-r) = sign(p-s)
// and sign(r-q) = -sign(q-s); the minus context flips both.
inline bool context_relations(SignMask m, int sign) {
  auto neg = [&](int k) { return int((m >> k) & 1); };
  bool same_pr_ps = neg(10) == neg(11);
  bool same_rq_qs = neg(12) == neg(13);
  return sign > 0 ? (same_pr_ps && !same_rq_qs) : (!same_pr_ps && same_rq_qs);
}

inline bool positivity_signs(SignMask m, int sign) {
  for (const auto& d : diagonal_monomials())
    if (sign * d.sign(m) < 0) return false;
  for (const auto& mi : minor_monomials())
    if (mi.sign(m) < 0) return false;
  return true;
}

inline bool positivity_signs(const SignConfig& c, int sign) { return positivity_signs(to_mask(c), sign); }

// Rows (1..12) whose invariant quadruple is all-positive under the config.
inline std::vector<int> positive_invariant_rows(SignMask m) {
  std::vector<int> out;
  const auto& t = invariant_monomials();
  for (int i = 0; i < 12; ++i) {
    bool ok = true;
    for (const auto& mono : t[std::size_t(i)]) ok = ok && mono.sign(m) > 0;
    if (ok) out.push_back(i + 1);
  }
  return out;
}

inline std::optional<int> match_positive_row(const SignConfig& c, const std::vector<PositiveRow>& rows) {
  for (const auto& r : rows)
    if (r.signs == c) return r.sigma;
  return std::nullopt;
}

struct PositiveConfig {
  SignConfig config{};
  int sign = 1;
  std::vector<int> invariant_rows;
  std::optional<int> positive_row;
};

struct EnumerationReport {
  long long count_plus = 0;
  long long count_minus = 0;
  long long not_forbidden = 0;
  std::vector<PositiveConfig> positive;
};

inline json to_json(const EnumerationReport& r) {
  json pos = json::array();
  for (const auto& p : r.positive)
    pos.push_back(json{{"config", config_string(p.config)},
                       {"sign", p.sign > 0 ? "+" : "-"},
                       {"invariant_rows", p.invariant_rows},
                       {"positive_row", p.positive_row ? json(*p.positive_row) : json(nullptr)}});
  return json{{"count_plus", r.count_plus},
              {"count_minus", r.count_minus},
              {"not_forbidden", r.not_forbidden},
              {"positive_configs", pos}};
}

// Exhaustive scan of all 2^19 configurations, split into 256 chunks by the top 8 atoms.
inline EnumerationReport enumerate_admissible(const SignData& data, unsigned workers = 4) {
  constexpr int kChunks = 256;
  constexpr int kLowBits = kAtomCount - 8;
  std::vector<EnumerationReport> parts(kChunks);
  auto run_chunk = [&](int chunk) {
    EnumerationReport& rep = parts[std::size_t(chunk)];
    for (SignMask low = 0; low < (SignMask(1) << kLowBits); ++low) {
      SignMask m = (SignMask(chunk) << kLowBits) | low;
      if (is_forbidden(m, data.constraints)) continue;
      ++rep.not_forbidden;
      for (int sign : {1, -1}) {
        if (!context_relations(m, sign)) continue;
        (sign > 0 ? rep.count_plus : rep.count_minus) += 1;
        if (!positivity_signs(m, sign)) continue;
        PositiveConfig pc;
        pc.config = from_mask(m);
        pc.sign = sign;
        pc.invariant_rows = positive_invariant_rows(m);
        pc.positive_row = match_positive_row(pc.config, data.positive_rows);
        rep.positive.push_back(pc);
      }
    }
  };
  workers = std::max(1u, workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int c = int(w); c < kChunks; c += int(workers)) run_chunk(c);
    });
  for (auto& t : pool) t.join();
  EnumerationReport out;
  for (const auto& p : parts) {
    out.count_plus += p.count_plus;
    out.count_minus += p.count_minus;
    out.not_forbidden += p.not_forbidden;
    out.positive.insert(out.positive.end(), p.positive.begin(), p.positive.end());
  }
  return out;
}

struct PositiveTableCheck {
  int matched = 0;
  bool bijective = false;
  std::vector<std::string> problems;
};

// Checks that the positive configs and the positive table rows correspond one to one, with matching
// sign context and with exactly the row's own invariant quadruple all-positive.
inline PositiveTableCheck verify_positive_table(const SignData& data, const EnumerationReport& rep) {
  PositiveTableCheck v;
  std::map<int, int> seen;
  for (const auto& p : rep.positive) {
    if (!p.positive_row) {
      v.problems.push_back("positive config " + config_string(p.config) + " is not in the positive table");
      continue;
    }
    ++seen[*p.positive_row];
    const PositiveRow* row = nullptr;
    for (const auto& r : data.positive_rows)
      if (r.sigma == *p.positive_row) row = &r;
    if (row->context != p.sign) v.problems.push_back("sign context differs for row " + std::to_string(row->sigma));
    if (p.invariant_rows != std::vector<int>{row->sigma})
      v.problems.push_back("invariant table positivity does not single out row " + std::to_string(row->sigma));
  }
  for (const auto& r : data.positive_rows) {
    if (seen[r.sigma] == 1)
      ++v.matched;
    else
      v.problems.push_back("positive table row " + std::to_string(r.sigma) + " matched " + std::to_string(seen[r.sigma]) +
                           " times");
  }
  v.bijective = v.problems.empty() && v.matched == int(data.positive_rows.size()) && rep.positive.size() == data.positive_rows.size();
  return v;
}

}  // namespace upblab
