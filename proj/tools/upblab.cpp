#include "upblab/upblab.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace upblab;

namespace {

struct Common {
  std::string file;
  std::string out;
  std::string data_dir = UPBLAB_DATA_DIR;
  std::uint64_t seed = 42;
  int trials = 100;
  int threads = 0;
  double tol_rank = Tolerance{}.rank_rel;
  double tol_residual = Tolerance{}.residual;
  bool json_out = false;

  Tolerance tolerance() const {
    Tolerance t;
    t.rank_rel = tol_rank;
    t.residual = tol_residual;
    t.validate();
    return t;
  }

  unsigned thread_count() const {
    if (threads > 0) return unsigned(threads);
    if (const char* env = std::getenv("UPBLAB_THREADS")) {
      int v = std::atoi(env);
      if (v > 0) return unsigned(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

void add_common(CLI::App* app, Common& c, bool needs_file) {
  auto* f = app->add_option("--file", c.file, "input JSON file");
  if (needs_file) f->required();
  app->add_option("--out", c.out, "write JSON result to this path");
  app->add_option("--seed", c.seed, "PRNG seed");
  app->add_option("--trials", c.trials, "number of trials")->check(CLI::NonNegativeNumber);
  app->add_option("--threads", c.threads, "worker threads (default: UPBLAB_THREADS or all cores)");
  app->add_option("--tol-rank", c.tol_rank, "relative rank tolerance");
  app->add_option("--tol-residual", c.tol_residual, "residual tolerance");
  app->add_flag("--json", c.json_out, "print machine-readable JSON instead of a summary");
}

void emit(const Common& c, const json& j, const std::string& summary) {
  if (!c.out.empty()) {
    std::ofstream o(c.out);
    if (!o) throw InputError("cannot write " + c.out);
    o << j.dump(2) << "\n";
  }
  if (c.json_out)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << summary;
}

VectorFile load_vectors(const Common& c) { return vector_file_from_json(read_json_file(c.file)); }

PPTState load_state(const Common& c) {
  json j = read_json_file(c.file);
  if (!j.is_object() || !j.contains("matrix")) throw InputError("state file needs \"matrix\"");
  std::vector<int> dims = {3, 3};
  if (j.contains("dims")) dims = j.at("dims").get<std::vector<int>>();
  if (dims.size() != 2) throw InputError("state dims must have two entries");
  return make_state(mat_from_json(j.at("matrix")), dims[0], dims[1], c.tolerance());
}

int cmd_check(const Common& c) {
  VectorFile f = load_vectors(c);
  Tolerance tol = c.tolerance();
  GupbCertificate cert;
  if (f.dims.size() == 2 && int(f.vectors.size()) == f.dims[0] + f.dims[1] - 1)
    cert = is_minimal_gupb(f.vectors, f.dims[0], f.dims[1], tol);
  else
    cert = is_gupb_multipartite(f.vectors, f.dims, tol);
  std::ostringstream s;
  s << kind_name(cert.kind) << " gUPB check: " << (cert.verdict ? "true" : "false") << " (" << cert.checked_partitions
    << " partitions checked)\n";
  if (!cert.reason.empty()) s << "  " << cert.reason << "\n";
  emit(c, to_json(cert), s.str());
  return cert.verdict ? 0 : 1;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("bad number in list: " + item);
    }
  }
  return out;
}

int cmd_vandermonde(const Common& c, int n, int m, const std::string& al, const std::string& be) {
  VectorFile f;
  f.dims = {n, m};
  f.vectors = vandermonde_gupb(n, m, parse_list(al), parse_list(be));
  std::ostringstream s;
  s << "Vandermonde set with " << f.vectors.size() << " product vectors in C^" << n << " x C^" << m << "\n";
  emit(c, to_json(f), s.str());
  return 0;
}

int cmd_invariants(const Common& c) {
  VectorFile f = load_vectors(c);
  if (f.dims != std::vector<int>{3, 3} || f.vectors.size() != 5) throw InputError("invariants need five vectors in 3x3");
  auto scan = invariant_scan(f.vectors);
  json rows = json::array();
  std::ostringstream s;
  for (int i = 0; i < 12; ++i) {
    bool pos = scan[std::size_t(i)].all_real_positive();
    rows.push_back(json{{"row", i + 1}, {"invariants", to_json(scan[std::size_t(i)])}, {"all_positive", pos}});
    s << "sigma" << i + 1 << ":";
    for (cd z : scan[std::size_t(i)].s) s << " " << z.real() << (std::abs(z.imag()) > 1e-12 ? "(+i)" : "");
    s << (pos ? "  all positive" : "") << "\n";
  }
  emit(c, json{{"scan", rows}}, s.str());
  return 0;
}

int cmd_orthogonalize(const Common& c) {
  VectorFile f = load_vectors(c);
  if (f.dims != std::vector<int>{3, 3}) throw InputError("orthogonalize works in 3x3");
  OrthogonalizeResult r = orthogonalize_upb(f.vectors, c.tolerance());
  std::ostringstream s;
  if (r.found)
    s << "orthogonalizable via sigma" << r.perm_index << ", residual " << r.residual << "\n";
  else
    s << "not orthogonalizable\n";
  emit(c, to_json(r), s.str());
  return r.found ? 0 : 1;
}

json state_json(const PPTState& st) {
  return json{{"dims", {st.n, st.m}}, {"matrix", to_json(st.rho)}, {"rank", st.rank}, {"rank_T1", st.rank_T1},
              {"min_eig", st.min_eig}, {"min_eig_T1", st.min_eig_T1}};
}

int cmd_from_gupb(const Common& c) {
  VectorFile f = load_vectors(c);
  if (f.dims != std::vector<int>{3, 3}) throw InputError("from-gupb works in 3x3");
  StateFromGupb r = state_from_gupb(f.vectors, c.tolerance());
  std::ostringstream s;
  json j{{"found", r.found}};
  if (r.found) {
    j.update(state_json(r.state));
    j["sign"] = r.sign;
    j["canonical"] = to_json(r.canonical);
    j["kernel_residual"] = r.kernel_residual;
    s << "PPT state found (sign " << (r.sign > 0 ? "+" : "-") << "), rank " << r.state.rank << ", rank_T1 "
      << r.state.rank_T1 << ", min eigenvalue " << r.state.min_eig << "\n";
  } else {
    j["reason"] = r.reason;
    s << "no PPT state: " << r.reason << "\n";
  }
  emit(c, j, s.str());
  return r.found ? 0 : 1;
}

int cmd_analyze(const Common& c) {
  PPTState st = load_state(c);
  AnalysisReport r = analyze(st, c.tolerance());
  std::ostringstream s;
  s << "PSD " << r.is_psd << ", PPT " << r.is_ppt << ", rank " << r.rank << "/" << r.rank_T1 << "\n";
  if (r.kernel_products) s << "kernel product vectors: " << r.kernel_products->points.size() << "\n";
  s << "edge: " << (r.is_edge ? "yes" : "no") << "\n";
  s << "classification: " << classification_name(r.classification.kind) << "\n";
  for (const auto& d : r.classification.diagnostics) s << "  " << d << "\n";
  emit(c, to_json(r), s.str());
  return r.classification.kind == Classification::Undetermined ? 1 : 0;
}

int cmd_kernel_products(const Common& c) {
  PPTState st = load_state(c);
  if (st.n != 3 || st.m != 3) throw InputError("kernel-products works in 3x3");
  if (st.kernel.cols() != 5) throw InputError("kernel must be 5-dimensional");
  SegreSolution sol = products_in_kernel(st.kernel, c.tolerance());
  std::ostringstream s;
  s << sol.points.size() << " product vectors in the kernel\n";
  for (std::size_t i = 0; i < sol.points.size(); ++i)
    s << "  #" << i + 1 << " residual " << sol.residuals[i] << (sol.transverse[i] ? " transverse" : " not transverse")
      << "\n";
  emit(c, to_json(sol), s.str());
  return 0;
}

int cmd_enumerate(const Common& c) {
  SignData data = load_sign_data(c.data_dir);
  EnumerationReport r = enumerate_admissible(data, c.thread_count());
  std::ostringstream s;
  s << "admissible configurations: " << r.count_plus << " (+), " << r.count_minus << " (-)\n";
  s << "positive configurations: " << r.positive.size() << "\n";
  for (const auto& p : r.positive) {
    s << "  " << config_string(p.config) << " " << (p.sign > 0 ? "+" : "-") << " rows:";
    for (int k : p.invariant_rows) s << " sigma" << k;
    s << "\n";
  }
  emit(c, to_json(r), s.str());
  return 0;
}

int cmd_verify(const Common& c) {
  SignData data = load_sign_data(c.data_dir);
  EnumerationReport r = enumerate_admissible(data, c.thread_count());
  PositiveTableCheck v = verify_positive_table(data, r);
  std::ostringstream s;
  s << v.matched << "/" << data.positive_rows.size() << " positive table rows matched" << (v.bijective ? " (bijective)" : "") << "\n";
  for (const auto& p : v.problems) s << "  " << p << "\n";
  emit(c, json{{"matched", v.matched}, {"rows", data.positive_rows.size()}, {"bijective", v.bijective}, {"problems", v.problems}},
       s.str());
  return v.bijective ? 0 : 1;
}

int cmd_roundtrip(const Common& c, double cap) {
  Tolerance tol = c.tolerance();
  Philox root(c.seed);
  int N = c.trials;
  std::vector<double> residuals(static_cast<std::size_t>(N), 0.0);
  std::vector<int> passed(static_cast<std::size_t>(N), 0);
  std::vector<std::string> notes(static_cast<std::size_t>(N));
  unsigned workers = std::min<unsigned>(c.thread_count(), unsigned(std::max(N, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int t = int(w); t < N; t += int(workers)) {
        Philox rng = root.split(std::uint64_t(t));
        try {
          ConjugatedState cs = random_entangled_state(rng, cap, tol);
          ClassifyResult cr = classify(cs.state, tol);
          residuals[std::size_t(t)] = cr.residual;
          passed[std::size_t(t)] = cr.kind == Classification::EntangledUPBForm && cr.residual <= 1e-6;
          if (!passed[std::size_t(t)]) notes[std::size_t(t)] = classification_name(cr.kind);
        } catch (const std::exception& e) {
          notes[std::size_t(t)] = e.what();
        }
      }
    });
  for (auto& t : pool) t.join();
  int npass = 0;
  json trials = json::array();
  std::ostringstream s;
  for (int t = 0; t < N; ++t) {
    npass += passed[std::size_t(t)];
    json tj{{"trial", t}, {"residual", residuals[std::size_t(t)]}, {"pass", bool(passed[std::size_t(t)])}};
    if (!notes[std::size_t(t)].empty()) tj["note"] = notes[std::size_t(t)];
    trials.push_back(tj);
    if (!passed[std::size_t(t)])
      s << "trial " << t << " failed (seed " << c.seed << ", stream " << t << "): " << notes[std::size_t(t)] << "\n";
  }
  s << npass << "/" << N << " round trips passed\n";
  emit(c,
       json{{"seed", c.seed}, {"prng", Philox::name}, {"trials", trials}, {"passed", npass}, {"total", N},
            {"condition_cap", cap}},
       s.str());
  return npass == N ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"upblab: generalized UPBs and rank-4 PPT states in 3x3"};
  app.require_subcommand(1);
  Common c;

  auto* gupb = app.add_subcommand("gupb", "gUPB certification and canonical forms");
  gupb->require_subcommand(1);
  auto* g_check = gupb->add_subcommand("check", "certify a gUPB");
  add_common(g_check, c, true);
  auto* g_vand = gupb->add_subcommand("vandermonde", "build a Vandermonde minimal gUPB");
  int vn = 3, vm = 3;
  std::string alphas = "0,1,2,3,4", betas = "0,1,2,3,4";
  g_vand->add_option("--n", vn);
  g_vand->add_option("--m", vm);
  g_vand->add_option("--alphas", alphas);
  g_vand->add_option("--betas", betas);
  add_common(g_vand, c, false);
  auto* g_inv = gupb->add_subcommand("invariants", "invariant scan over the 12 permutations");
  add_common(g_inv, c, true);
  auto* g_orth = gupb->add_subcommand("orthogonalize", "map to an orthogonal pentagram UPB");
  add_common(g_orth, c, true);

  auto* state = app.add_subcommand("state", "rank-4 PPT states");
  state->require_subcommand(1);
  auto* s_from = state->add_subcommand("from-gupb", "construct the PPT state with a given kernel gUPB");
  add_common(s_from, c, true);
  auto* s_an = state->add_subcommand("analyze", "full analysis and classification");
  add_common(s_an, c, true);
  auto* s_kp = state->add_subcommand("kernel-products", "product vectors in the kernel");
  add_common(s_kp, c, true);

  auto* tables = app.add_subcommand("tables", "sign-table combinatorics");
  tables->require_subcommand(1);
  auto* t_en = tables->add_subcommand("enumerate", "enumerate all sign configurations");
  add_common(t_en, c, false);
  t_en->add_option("--data-dir", c.data_dir, "directory with constraints.json and positive_signs.json");
  auto* t_ver = tables->add_subcommand("verify", "check the positive table bijection");
  add_common(t_ver, c, false);
  t_ver->add_option("--data-dir", c.data_dir, "directory with constraints.json and positive_signs.json");

  auto* demo = app.add_subcommand("demo", "seeded experiments");
  demo->require_subcommand(1);
  auto* d_rt = demo->add_subcommand("roundtrip", "construct -> classify round trip");
  double cap = 20.0;
  d_rt->add_option("--cond-cap", cap, "condition-number cap for the random SL factors");
  add_common(d_rt, c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (g_check->parsed()) return cmd_check(c);
    if (g_vand->parsed()) return cmd_vandermonde(c, vn, vm, alphas, betas);
    if (g_inv->parsed()) return cmd_invariants(c);
    if (g_orth->parsed()) return cmd_orthogonalize(c);
    if (s_from->parsed()) return cmd_from_gupb(c);
    if (s_an->parsed()) return cmd_analyze(c);
    if (s_kp->parsed()) return cmd_kernel_products(c);
    if (t_en->parsed()) return cmd_enumerate(c);
    if (t_ver->parsed()) return cmd_verify(c);
    if (d_rt->parsed()) return cmd_roundtrip(c, cap);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
