#pragma once

#include "upblab/combinatorics.hpp"
#include "upblab/json_io.hpp"

#include <optional>
#include <set>

namespace upblab {

enum class GupbKind { Minimal, General, Multipartite };

inline const char* kind_name(GupbKind k) {
  switch (k) {
    case GupbKind::Minimal: return "minimal";
    case GupbKind::General: return "general";
    default: return "multipartite";
  }
}

struct GupbCertificate {
  GupbKind kind = GupbKind::Minimal;
  bool verdict = false;
  std::optional<ProductVector> witness;
  long long checked_partitions = 0;
  std::string reason;
};

inline json to_json(const GupbCertificate& c) {
  json j{{"kind", kind_name(c.kind)}, {"verdict", c.verdict}, {"checked_partitions", c.checked_partitions}};
  j["witness"] = c.witness ? to_json(*c.witness) : json(nullptr);
  if (!c.reason.empty()) j["reason"] = c.reason;
  return j;
}

namespace detail {

inline void check_dims(const std::vector<ProductVector>& vs, const std::vector<int>& dims) {
  for (const auto& v : vs) {
    if (v.parties() != dims.size()) throw InputError("product vector has wrong number of factors");
    for (std::size_t k = 0; k < dims.size(); ++k)
      if (v.factors[k].size() != dims[k]) throw InputError("factor dimension mismatch");
  }
}

// A unit vector orthogonal to all columns of F (F has rank < rows).
inline Vec orthogonal_to(const Mat& F, const Tolerance& tol) {
  int n = int(F.rows());
  if (F.cols() == 0) {
    Vec e = Vec::Zero(n);
    e(0) = 1.0;
    return e;
  }
  Mat nb = null_basis(F.adjoint(), tol);
  if (nb.cols() == 0) throw NumericalError("no orthogonal vector exists for a spanning set");
  return nb.col(0);
}

inline ProductVector witness_from_sets(const std::vector<ProductVector>& vs, const std::vector<std::vector<int>>& sets,
                                       const Tolerance& tol) {
  ProductVector w;
  for (std::size_t k = 0; k < sets.size(); ++k) w.factors.push_back(orthogonal_to(stack_factor(vs, k, sets[k]), tol));
  return w;
}

// Maximal index sets whose factors in the given party do not span C^n:
// closures of rank n-1 subsets. If the whole set does not span, that is the only one.
inline std::vector<std::vector<int>> maximal_nonspanning(const std::vector<ProductVector>& vs, std::size_t party, int n,
                                                        const Tolerance& tol) {
  int N = int(vs.size());
  std::vector<int> all(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) all[std::size_t(i)] = i;
  if (numerical_rank(stack_factor(vs, party, all), tol) < n) return {all};
  std::set<std::vector<int>> found;
  for_each_subset(N, n - 1, [&](const std::vector<int>& t) {
    Mat T = stack_factor(vs, party, t);
    if (!t.empty() && numerical_rank(T, tol) < n - 1) return true;
    Mat onb = t.empty() ? Mat(n, 0) : range_basis(T, tol);
    std::vector<int> closure;
    for (int i = 0; i < N; ++i) {
      const Vec& f = vs[std::size_t(i)].factors[party];
      if (subspace_distance(onb, f) <= std::sqrt(tol.rank_rel)) closure.push_back(i);
    }
    found.insert(closure);
    return true;
  });
  return {found.begin(), found.end()};
}

}  // namespace detail

inline GupbCertificate is_minimal_gupb(const std::vector<ProductVector>& vs, int n, int m, const Tolerance& tol = {}) {
  detail::check_dims(vs, {n, m});
  int N = int(vs.size());
  if (N < n + m - 1)
    throw InputError("fewer than n+m-1 product vectors can never form a gUPB");
  if (N != n + m - 1) throw InputError("minimal gUPB check needs exactly n+m-1 vectors");
  GupbCertificate c;
  c.kind = GupbKind::Minimal;
  c.verdict = true;
  auto side = [&](std::size_t party, int k) {
    for_each_subset(N, k, [&](const std::vector<int>& s) {
      ++c.checked_partitions;
      if (numerical_rank(stack_factor(vs, party, s), tol) == k) return true;
      c.verdict = false;
      // f orthogonal to the dependent tuple, g orthogonal to the rest on the other side.
      std::vector<int> rest = complement_of(N, s);
      std::vector<std::vector<int>> sets(2);
      sets[party] = s;
      sets[1 - party] = rest;
      c.witness = detail::witness_from_sets(vs, sets, tol);
      c.reason = std::string(party == 0 ? "phi" : "psi") + "-side tuple {";
      for (std::size_t i = 0; i < s.size(); ++i) c.reason += (i ? "," : "") + std::to_string(s[i] + 1);
      c.reason += "} is linearly dependent";
      return false;
    });
  };
  side(0, n);
  if (c.verdict) side(1, m);
  return c;
}

inline GupbCertificate is_gupb_multipartite(const std::vector<ProductVector>& vs, const std::vector<int>& dims,
                                            const Tolerance& tol = {}) {
  detail::check_dims(vs, dims);
  int N = int(vs.size());
  int need = 1;
  for (int d : dims) need += d - 1;
  if (N < need) throw InputError("fewer than sum(n_i) - l + 1 product vectors can never form a gUPB");
  std::size_t l = dims.size();
  if (N > (l == 2 ? 20 : 12)) throw InputError("too many vectors for exhaustive partition check");
  GupbCertificate c;
  c.kind = l == 2 ? GupbKind::General : GupbKind::Multipartite;
  c.verdict = true;
  std::vector<std::vector<std::vector<int>>> cand(l);
  for (std::size_t k = 0; k < l; ++k) cand[k] = detail::maximal_nonspanning(vs, k, dims[k], tol);
  // A violating partition exists iff some choice of maximal non-spanning sets covers every index.
  std::vector<std::size_t> choice(l, 0);
  std::vector<int> cover(static_cast<std::size_t>(N), 0);
  std::function<bool(std::size_t)> rec = [&](std::size_t k) -> bool {
    if (k == l) {
      ++c.checked_partitions;
      for (int x : cover)
        if (x == 0) return false;
      return true;
    }
    for (std::size_t i = 0; i < cand[k].size(); ++i) {
      for (int x : cand[k][i]) ++cover[std::size_t(x)];
      choice[k] = i;
      bool hit = rec(k + 1);
      for (int x : cand[k][i]) --cover[std::size_t(x)];
      if (hit) return true;
    }
    return false;
  };
  if (rec(0)) {
    c.verdict = false;
    std::vector<std::vector<int>> sets(l);
    std::vector<char> used(static_cast<std::size_t>(N), 0);
    for (std::size_t k = 0; k < l; ++k)
      for (int x : cand[k][choice[k]])
        if (!used[std::size_t(x)]) {
          used[std::size_t(x)] = 1;
          sets[k].push_back(x);
        }
    c.witness = detail::witness_from_sets(vs, sets, tol);
    c.reason = "partition with no spanning block found";
  }
  return c;
}

inline GupbCertificate is_gupb(const std::vector<ProductVector>& vs, int n, int m, const Tolerance& tol = {}) {
  return is_gupb_multipartite(vs, {n, m}, tol);
}

inline std::vector<ProductVector> vandermonde_gupb(int n, int m, const std::vector<double>& alphas,
                                                   const std::vector<double>& betas) {
  std::size_t N = std::size_t(n + m - 1);
  if (alphas.size() != N || betas.size() != N) throw InputError("need n+m-1 nodes on each side");
  auto distinct = [](std::vector<double> x) {
    std::sort(x.begin(), x.end());
    return std::adjacent_find(x.begin(), x.end()) == x.end();
  };
  if (!distinct(alphas) || !distinct(betas)) throw InputError("Vandermonde nodes must be pairwise distinct");
  std::vector<ProductVector> out;
  for (std::size_t i = 0; i < N; ++i) {
    Vec phi(n), psi(m);
    for (int k = 0; k < n; ++k) phi(k) = std::pow(alphas[i], k);
    for (int k = 0; k < m; ++k) psi(k) = std::pow(betas[i], k);
    out.emplace_back(phi, psi);
  }
  return out;
}

inline std::vector<ProductVector> orthogonal_products(const std::vector<ProductVector>& vs, int n, int m,
                                                      const Tolerance& tol = {}) {
  detail::check_dims(vs, {n, m});
  int N = int(vs.size());
  if (N != n + m - 2) throw InputError("orthogonal_products needs exactly n+m-2 vectors");
  auto generic_side = [&](std::size_t party, int k) {
    bool ok = true;
    for_each_subset(N, std::min(k, N), [&](const std::vector<int>& s) {
      if (numerical_rank(stack_factor(vs, party, s), tol) < int(s.size())) ok = false;
      return ok;
    });
    return ok;
  };
  if (!generic_side(0, n) || !generic_side(1, m)) throw InputError("inputs are not in generic position");
  std::vector<ProductVector> out;
  for_each_subset(N, n - 1, [&](const std::vector<int>& s) {
    std::vector<int> rest = complement_of(N, s);
    Mat F = stack_factor(vs, 0, s), G = stack_factor(vs, 1, rest);
    Mat nf = null_basis(F.adjoint(), tol), ng = null_basis(G.adjoint(), tol);
    if (nf.cols() != 1 || ng.cols() != 1) throw InputError("inputs are not in generic position");
    ProductVector p(projective_normalize(nf.col(0)), projective_normalize(ng.col(0)));
    Vec full = p.full() / p.full().norm();
    for (const auto& v : vs)
      if (std::abs(full.dot(v.full())) > tol.residual * v.full().norm())
        throw NumericalError("orthogonal product residual too large");
    bool dup = false;
    for (const auto& q : out) dup = dup || projectively_equal(p, q, tol.dedup);
    if (!dup) out.push_back(p);
    return true;
  });
  return out;
}

}  // namespace upblab
