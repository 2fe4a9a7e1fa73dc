#pragma once

// Command-line front end: abelnp <command> [spec] [flags].

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "abelnp/cover.hpp"
#include "abelnp/dwork.hpp"
#include "abelnp/lfunction.hpp"
#include "abelnp/sweep.hpp"

namespace abelnp::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kInputError = 2, kBudget = 3 };

struct JobConfig {
  std::string command;
  std::string spec_path;
  std::string output;     // report JSON, stdout when empty
  std::string tsv_dir;    // polygon TSVs, skipped when empty
  std::string cache_dir;  // overrides ABELNP_CACHE_DIR
  std::string out_dir = "sweep-out";
  std::uint64_t budget = kDefaultBudget;
  unsigned workers = 0;
  unsigned guard = 3;
  std::uint64_t seed = kDefaultSeed;
  std::string hodge_slopes;
  bool no_inverse = false;
  DworkOptions dwork;
  SweepOptions sweep;
};

namespace detail {

inline std::string point_string(const Point& Q, const FieldDesc& fd) {
  return Q.infinite ? std::string("inf") : abelnp::detail::element_string(Q.x, fd);
}

inline std::vector<Rational> parse_slopes(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t{}");
    const auto e = item.find_last_not_of(" \t{}");
    if (b == std::string::npos) continue;
    out.push_back(parse_rational(item.substr(b, e - b + 1)));
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  f << text;
}

class Session {
 public:
  Session(const JobConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {
    std::string dir = cfg.cache_dir;
    if (dir.empty())
      if (const char* env = std::getenv("ABELNP_CACHE_DIR")) dir = env;
    if (dir.empty()) {
      ledger_ = std::make_unique<SumLedger>();
    } else {
      std::filesystem::create_directories(dir);
      ledger_ = std::make_unique<SumLedger>((std::filesystem::path(dir) / "sums.jsonl").string());
    }
    lopt_.budget = cfg.budget;
    lopt_.workers = cfg.workers;
    lopt_.guard = cfg.guard;
    lopt_.ledger = ledger_.get();
  }

  const LOptions& lopt() const { return lopt_; }
  SumLedger& ledger() { return *ledger_; }

  void polygon(const std::string& hash, const std::string& name, const RationalPolygon& P) {
    if (cfg_.tsv_dir.empty()) return;
    write_file(std::filesystem::path(cfg_.tsv_dir) / (hash + "." + name + ".tsv"), to_tsv(P));
  }

  void emit(nlohmann::json body) {
    nlohmann::json doc{{"command", cfg_.command}, {"seed", cfg_.seed}};
    doc.update(body);
    const std::string text = doc.dump(2) + "\n";
    if (cfg_.output.empty()) {
      out_ << text;
    } else {
      write_file(cfg_.output, text);
    }
  }

 private:
  const JobConfig& cfg_;
  std::ostream& out_;
  std::unique_ptr<SumLedger> ledger_;
  LOptions lopt_;
};

inline nlohmann::json invariants_json(const Character& ch) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& pd : ch.points())
    pts.push_back({{"point", point_string(pd.Q, ch.spec().field)},
                   {"swan", pd.datum.s},
                   {"eps", pd.datum.eps},
                   {"omega", pd.datum.omega},
                   {"e_class", to_string(pd.datum.e_class)},
                   {"ord_f", pd.ord_f},
                   {"ramified", pd.datum.ramified()}});
  return {{"spec_hash", spec_hash(ch.spec())},
          {"p", ch.p()},
          {"a", ch.a()},
          {"q", ch.q()},
          {"n", ch.n()},
          {"genus", ch.spec().genus},
          {"points", pts},
          {"ramified_points", ch.ramified_count()},
          {"Omega", ch.omega()},
          {"degree", ch.degree()},
          {"remark_endpoint", remark_endpoint(ch.spec().genus, ch.ramification())}};
}

inline int cmd_invariants(const JobConfig& cfg, Session& s) {
  const Character ch(read_spec_file(cfg.spec_path));
  s.emit(invariants_json(ch));
  return kOk;
}

inline int cmd_hodge(const JobConfig& cfg, Session& s) {
  const Character ch(read_spec_file(cfg.spec_path));
  const std::string hash = spec_hash(ch.spec());
  const RationalPolygon hp = ch.hodge();
  s.polygon(hash, "hodge", hp);
  s.emit({{"spec_hash", hash},
          {"hodge", to_json(hp)},
          {"slopes", slopes_string(ch.hodge_slopes())},
          {"length", to_string(hp.length())},
          {"Omega", ch.omega()},
          {"degree", ch.degree()}});
  return kOk;
}

inline int cmd_lfunction(const JobConfig& cfg, Session& s) {
  const Character ch(read_spec_file(cfg.spec_path));
  const CycloRing R(ch.p(), ch.n(), ch.q());
  const LPolynomial L = l_polynomial(ch, s.lopt());
  nlohmann::json sums = nlohmann::json::array(), raw = nlohmann::json::array(), completed = nlohmann::json::array(),
                 comps = nlohmann::json::array();
  for (const auto& v : L.sums) sums.push_back(cyclo_to_json(R, v));
  for (const auto& v : L.raw) raw.push_back(cyclo_to_json(R, v));
  for (const auto& v : L.completed) completed.push_back(cyclo_to_json(R, v));
  for (const auto& [Q, v] : L.completions) comps.push_back({{"point", point_string(Q, ch.spec().field)}, {"zeta_exp", v.w}, {"xi_exp", v.c}});
  nlohmann::json body{{"spec_hash", L.spec_hash},
                      {"degree", L.degree},
                      {"observed_degree", L.observed_degree},
                      {"guards_vanish", L.guards_vanish},
                      {"sums", sums},
                      {"l_open", raw},
                      {"l_completed", completed},
                      {"completions", comps}};
  if (L.guards_vanish) {
    const NewtonResult np = newton_polygon(ch, L.completed, L.degree);
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& v : np.valuations) vals.push_back(v ? nlohmann::json(to_string(*v)) : nlohmann::json("inf"));
    body["newton"] = to_json(np.polygon);
    body["valuations_q"] = vals;
    body["precision"] = np.precision;
    s.polygon(L.spec_hash, "newton", np.polygon);
  }
  s.emit(body);
  return L.guards_vanish ? kOk : kViolation;
}

inline int cmd_verify(const JobConfig& cfg, Session& s) {
  const CharacterSpec spec = read_spec_file(cfg.spec_path);
  VerifyOptions vo;
  vo.l = s.lopt();
  vo.check_inverse = !cfg.no_inverse;
  if (!cfg.hodge_slopes.empty()) vo.hodge_override = parse_slopes(cfg.hodge_slopes);
  const VerifyReport r = verify_character(spec, vo);
  const Character ch(spec);
  s.polygon(r.spec_hash, "newton", r.np);
  s.polygon(r.spec_hash, "hodge", r.hp);
  if (r.np_inverse) s.polygon(r.spec_hash, "newton_inverse", *r.np_inverse);
  if (r.hp_inverse) s.polygon(r.spec_hash, "hodge_inverse", *r.hp_inverse);
  nlohmann::json body = to_json(r, ch);
  body["failures"] = failure_reason(r);
  s.emit(body);
  return r.ok() ? kOk : kViolation;
}

inline int cmd_cover(const JobConfig& cfg, Session& s) {
  const CoverReport r = check_cover(read_spec_file(cfg.spec_path), s.lopt());
  s.polygon(r.spec_hash, "cover_newton", r.np);
  s.polygon(r.spec_hash, "cover_bound", r.bound);
  s.emit(to_json(r));
  return r.ok() ? kOk : kViolation;
}

inline int cmd_dwork(const JobConfig& cfg, Session& s) {
  DworkOptions o = cfg.dwork;
  o.l = s.lopt();
  const DworkReport r = dwork_check(read_spec_file(cfg.spec_path), o);
  if (r.np_fredholm) s.polygon(r.spec_hash, "fredholm_below_one", *r.np_fredholm);
  if (r.np_torus) s.polygon(r.spec_hash, "torus_below_one", *r.np_torus);
  s.emit(to_json(r));
  return r.ok() ? kOk : kViolation;
}

inline int cmd_sweep(const JobConfig& cfg, Session& s, std::ostream& err) {
  SweepOptions so = cfg.sweep;
  so.seed = cfg.seed;
  so.max_points = std::min(so.max_points, cfg.budget);
  const SweepResult res = run_sweep(so, s.lopt());
  const std::filesystem::path dir(cfg.out_dir);
  write_file(dir / "summary.tsv", res.summary_tsv());
  write_file(dir / "failures.json", res.failure_list().dump(2) + "\n");
  write_file(dir / "results.jsonl", res.results_jsonl());
  for (const auto& c : res.cases)
    if (!c.passed) err << "FAIL " << c.hash << ": " << c.reason << "\n";
  s.emit({{"count", res.cases.size()},
          {"passed", res.cases.size() - res.failures()},
          {"failed", res.failures()},
          {"cache_hits", res.cache_hits},
          {"out_dir", cfg.out_dir}});
  return res.failures() == 0 ? kOk : kViolation;
}

}  // namespace detail

inline int dispatch(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.budget > 0, "budget must be positive");
  detail::Session s(cfg, out);
  if (cfg.command == "invariants") return detail::cmd_invariants(cfg, s);
  if (cfg.command == "hodge") return detail::cmd_hodge(cfg, s);
  if (cfg.command == "lfunction") return detail::cmd_lfunction(cfg, s);
  if (cfg.command == "verify") return detail::cmd_verify(cfg, s);
  if (cfg.command == "cover") return detail::cmd_cover(cfg, s);
  if (cfg.command == "dwork-check") return detail::cmd_dwork(cfg, s);
  if (cfg.command == "sweep") return detail::cmd_sweep(cfg, s, err);
  throw InputError("unknown command '" + cfg.command + "'");
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  JobConfig cfg;
  CLI::App app{"Newton and Hodge polygons of abelian L-functions on P^1"};
  app.require_subcommand(1);
  app.add_option("--budget", cfg.budget, "largest field enumerated for a character sum")->capture_default_str();
  app.add_option("--workers", cfg.workers, "enumeration threads (0 = hardware)")->capture_default_str();
  app.add_option("--guard", cfg.guard, "extra L-coefficients that must vanish")->capture_default_str();
  app.add_option("--cache-dir", cfg.cache_dir, "directory for the sum ledger (default $ABELNP_CACHE_DIR)");
  app.add_option("--output", cfg.output, "write the JSON report here instead of stdout");
  app.add_option("--tsv-dir", cfg.tsv_dir, "write polygon TSV files here");
  app.add_option("--seed", cfg.seed, "random seed, recorded in every report")->capture_default_str();

  auto with_spec = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("spec", cfg.spec_path, "character spec file")->required();
    sub->fallthrough();
    return sub;
  };
  with_spec("invariants", "ramification data, Omega and degree");
  with_spec("hodge", "Hodge polygon");
  with_spec("lfunction", "character sums, L(rho, V, s), L(rho, s) and its Newton polygon");
  CLI::App* verify = with_spec("verify", "check NP >= HP, endpoints, degree and duality");
  verify->add_option("--hodge-slopes", cfg.hodge_slopes, "compare against these slopes instead of HP");
  verify->add_flag("--no-inverse", cfg.no_inverse, "skip the inverse character");
  with_spec("cover", "zeta numerator of the Z/p^n cover and its slope bound");
  CLI::App* dwork = with_spec("dwork-check", "trace-formula congruence for a = 1");
  dwork->add_option("--T", cfg.dwork.T, "basis truncation")->capture_default_str();
  dwork->add_option("--M", cfg.dwork.M, "p-adic digits")->capture_default_str();
  dwork->add_option("--d", cfg.dwork.d, "compared s-degree")->capture_default_str();
  CLI::App* sweep = app.add_subcommand("sweep", "verify a random family of characters");
  sweep->fallthrough();
  sweep->add_option("--count", cfg.sweep.count, "number of specs")->capture_default_str();
  sweep->add_option("--primes", cfg.sweep.primes, "characteristics to sample")->capture_default_str();
  sweep->add_option("--max-a", cfg.sweep.max_a, "largest a")->capture_default_str();
  sweep->add_option("--max-n", cfg.sweep.max_n, "largest Witt length")->capture_default_str();
  sweep->add_option("--max-swan", cfg.sweep.max_swan, "largest Swan conductor")->capture_default_str();
  sweep->add_option("--tame-fraction", cfg.sweep.tame_fraction, "share of specs with a tame part")->capture_default_str();
  sweep->add_option("--max-points", cfg.sweep.max_points, "cap on q^{D + guard}")->capture_default_str();
  sweep->add_option("--out-dir", cfg.out_dir, "directory for summary.tsv, failures.json, results.jsonl")->capture_default_str();

  std::vector<std::string> argv_store{"abelnp"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  for (const CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    return dispatch(cfg, out, err);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const BudgetError& e) {
    err << "budget exhausted: " << e.what() << "\n";
    return kBudget;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << "\n";
    return kViolation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kViolation;
  }
}

}  // namespace abelnp::cli
