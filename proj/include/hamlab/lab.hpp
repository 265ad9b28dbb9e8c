#ifndef HAMLAB_LAB_HPP
#define HAMLAB_LAB_HPP

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hamlab/assembly.hpp"
#include "hamlab/blowup.hpp"
#include "hamlab/conditions.hpp"
#include "hamlab/digraph.hpp"
#include "hamlab/hamilton.hpp"
#include "hamlab/regular_pairs.hpp"
#include "json.hpp"

namespace hamlab {

// ---------------------------------------------------------------- oracles

/// Exact: a certificate iff g is Hamiltonian.  n <= 20.
inline std::optional<HamiltonCertificate> brute_force_hamiltonian(const Digraph& g) {
  if (g.order() > 20) fail(ErrorKind::scale, "brute-force Hamiltonicity limited to n <= 20");
  return held_karp_hamilton(g, 20);
}

// ---------------------------------------------------------------- generators

/// Random digraph at edge probability `p0`, then repaired until check_semi_exact
/// passes: the failing index i names a side, and the vertex holding d_i on that
/// side (ties by id) gets one new random edge.  Not uniform over the condition.
inline Digraph gen_random_condition(int n, const Rational& beta, std::uint64_t seed, double p0 = 0.3,
                                    int max_repairs = -1) {
  if (beta <= 0 || beta >= Rational(1, 2)) fail(ErrorKind::parameter, "need 0 < beta < 1/2");
  if (n < 2) fail(ErrorKind::parameter, "need n >= 2");
  if (max_repairs < 0) max_repairs = n * n;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p0);
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && coin(rng)) adj[u][v] = 1;
  auto build = [&] {
    std::vector<Edge> e;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (adj[u][v]) e.emplace_back(u, v);
    return Digraph(n, e);
  };
  for (int step = 0; step <= max_repairs; ++step) {
    const auto g = build();
    const auto rep = check_semi_exact(g, beta);
    if (rep.holds) return g;
    const auto& w = *rep.witness;
    const bool out_side = w.clause != "ii";  // clause (i) is about d^+_i
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return out_side ? g.out_degree(a) < g.out_degree(b) : g.in_degree(a) < g.in_degree(b);
    });
    const int v = order[static_cast<std::size_t>(w.i - 1)];
    std::vector<int> free;
    for (int u = 0; u < n; ++u)
      if (u != v && !(out_side ? adj[v][u] : adj[u][v])) free.push_back(u);
    if (free.empty()) break;
    const int u = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    (out_side ? adj[v][u] : adj[u][v]) = 1;
  }
  fail(ErrorKind::generation, "repair loop cap reached before the semi-exact condition held");
}

// ---------------------------------------------------------------- experiments

enum class Generator { extremal_chvatal, concluding, blowup, random_condition };

inline const char* to_string(Generator g) {
  switch (g) {
    case Generator::extremal_chvatal: return "extremal_chvatal";
    case Generator::concluding: return "concluding";
    case Generator::blowup: return "blowup";
    case Generator::random_condition: return "random_condition";
  }
  return "unknown";
}

inline std::optional<Generator> generator_from_string(const std::string& s) {
  for (auto g : {Generator::extremal_chvatal, Generator::concluding, Generator::blowup, Generator::random_condition})
    if (s == to_string(g)) return g;
  return std::nullopt;
}

/// params keys: extremal_chvatal {n, k}; concluding {n, a}; blowup {k, m, density, v0};
/// random_condition {n, beta}.  Rationals are strings like "1/4".  "beta" also
/// sets the checker parameter (default 1/4), "eta" the pipeline one (default 1/4).
struct InstanceSpec {
  Generator generator = Generator::random_condition;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
};

struct InstanceRecord {
  std::string generator;
  nlohmann::json params;
  std::uint64_t seed = 0;
  int n = 0;
  std::vector<std::pair<std::string, bool>> verdicts;  // condition name -> holds
  std::string solver = "skipped";  // found | none | error:<kind> | skipped
  std::string oracle = "skipped";  // hamiltonian | non-hamiltonian | skipped
  std::optional<bool> agree;       // solver found <=> oracle hamiltonian, when both ran
  std::string error;
  double wall_ms = 0;
};

struct ExperimentReport {
  std::vector<InstanceRecord> records;
  int solved = 0, oracle_hamiltonian = 0, disagreements = 0, errors = 0;
};

namespace detail {

inline Rational param_rational(const nlohmann::json& p, const char* key, const Rational& fallback) {
  if (!p.contains(key)) return fallback;
  const auto& v = p.at(key);
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  fail(ErrorKind::parameter, std::string("parameter ") + key + " must be an integer or a rational string");
}

inline int param_int(const nlohmann::json& p, const char* key) {
  if (!p.contains(key) || !p.at(key).is_number_integer())
    fail(ErrorKind::parameter, std::string("missing integer parameter ") + key);
  return p.at(key).get<int>();
}

struct Generated {
  Digraph g;
  std::optional<Blowup> blowup;
};

inline Generated generate(const InstanceSpec& spec) {
  const auto& p = spec.params;
  switch (spec.generator) {
    case Generator::extremal_chvatal: return {gen_extremal_chvatal(param_int(p, "n"), param_int(p, "k")), {}};
    case Generator::concluding: return {gen_concluding_example(param_int(p, "n"), param_rational(p, "a", {})), {}};
    case Generator::random_condition:
      return {gen_random_condition(param_int(p, "n"), param_rational(p, "beta", Rational(1, 4)), spec.seed), {}};
    case Generator::blowup: {
      const int k = param_int(p, "k");
      if (k % 4 != 0) fail(ErrorKind::parameter, "blowup generator builds F from 4-cycles, so k must be a multiple of 4");
      std::vector<std::vector<int>> cyc;
      for (int i = 0; i < k; i += 4) cyc.push_back({i, i + 1, i + 2, i + 3});
      const auto f = OneFactor::from_cycles(k, cyc);
      const int v0 = p.contains("v0") ? param_int(p, "v0") : 0;
      BlowupOptions bo;
      bo.v0_density = 0.7;
      auto b = gen_blowup(Digraph::complete(k), f, param_int(p, "m"), param_rational(p, "density", Rational(7, 10)), v0,
                          spec.seed, bo);
      Digraph g = b.g;
      return {std::move(g), std::move(b)};
    }
  }
  fail(ErrorKind::parameter, "unknown generator");
}

inline InstanceRecord run_instance(const InstanceSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  InstanceRecord rec;
  rec.generator = to_string(spec.generator);
  rec.params = spec.params;
  rec.seed = spec.seed;
  try {
    const auto gen = generate(spec);
    const Digraph& g = gen.g;
    rec.n = g.order();
    const Rational beta = param_rational(spec.params, "beta", Rational(1, 4));
    for (auto c : {Condition::ghouila_houri, Condition::posa, Condition::nash_williams_chvatal, Condition::semi_exact,
                   Condition::posa_min, Condition::kot})
      rec.verdicts.emplace_back(to_string(c), check_condition(g, c, beta).holds);

    std::optional<HamiltonCertificate> claimed;
    try {
      if (gen.blowup) {
        const auto& b = *gen.blowup;
        claimed = assemble_hamilton(g, b.partition, Digraph::complete(b.f.order()), b.f,
                                    param_rational(spec.params, "eta", Rational(1, 4)), spec.seed)
                      .certificate;
      } else if (g.order() >= 2) {
        claimed = hamilton_in_super_regular(g, std::chrono::milliseconds(2000), spec.seed);
      }
      rec.solver = "none";
      if (claimed) {
        if (!verify_hamilton_cycle(g, *claimed)) fail(ErrorKind::contract, "solver returned an invalid cycle");
        rec.solver = "found";
      }
    } catch (const Error& e) {
      rec.solver = std::string("error:") + to_string(e.kind());
      if (e.kind() == ErrorKind::no_solution) rec.solver = "none";
      else rec.error = e.what();
    }

    if (g.order() <= 20) {
      const auto cert = brute_force_hamiltonian(g);
      if (cert && !verify_hamilton_cycle(g, *cert)) fail(ErrorKind::contract, "oracle certificate fails verification");
      rec.oracle = cert ? "hamiltonian" : "non-hamiltonian";
      if (rec.solver == "found" || rec.solver == "none") rec.agree = (rec.solver == "found") == cert.has_value();
    }
  } catch (const Error& e) {
    rec.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace detail

inline bool deterministic_env() {
  const char* v = std::getenv("HAMLAB_DETERMINISTIC");
  return v && std::string(v) == "1";
}

/// Bounded worker pool over instances; records land in spec order.
inline ExperimentReport run_experiment(const std::vector<InstanceSpec>& specs, int jobs = 1) {
  if (jobs < 1 || deterministic_env()) jobs = 1;
  jobs = std::min<int>(jobs, std::max<std::size_t>(specs.size(), 1));
  ExperimentReport rep;
  rep.records.resize(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < specs.size();) rep.records[i] = detail::run_instance(specs[i]);
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& r : rep.records) {
    rep.solved += r.solver == "found";
    rep.oracle_hamiltonian += r.oracle == "hamiltonian";
    rep.disagreements += r.agree.has_value() && !*r.agree;
    rep.errors += !r.error.empty();
  }
  return rep;
}

inline nlohmann::json to_json(const InstanceRecord& r, bool timing = true) {
  nlohmann::json v = nlohmann::json::object();
  for (const auto& [name, holds] : r.verdicts) v[name] = holds;
  nlohmann::json j{{"generator", r.generator}, {"params", r.params}, {"seed", r.seed},  {"n", r.n},
                   {"verdicts", v},            {"solver", r.solver}, {"oracle", r.oracle}};
  j["agree"] = r.agree ? nlohmann::json(*r.agree) : nlohmann::json(nullptr);
  if (!r.error.empty()) j["error"] = r.error;
  if (timing) j["wall_ms"] = r.wall_ms;
  return j;
}

inline nlohmann::json to_json(const ExperimentReport& rep, bool timing = true) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : rep.records) recs.push_back(to_json(r, timing));
  return {{"records", recs},
          {"aggregate",
           {{"instances", rep.records.size()},
            {"solved", rep.solved},
            {"oracle_hamiltonian", rep.oracle_hamiltonian},
            {"disagreements", rep.disagreements},
            {"errors", rep.errors}}}};
}

inline const char* csv_header() {
  return "# hamlab experiment csv v1\n"
         "generator,params,seed,n,gh,posa,nwc,semi-exact,posa-min,kot,solver,oracle,agree,wall_ms,error\n";
}

inline std::string to_csv(const ExperimentReport& rep) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::ostringstream out;
  out << csv_header();
  for (const auto& r : rep.records) {
    out << r.generator << ',' << quote(r.params.dump()) << ',' << r.seed << ',' << r.n;
    for (const char* name : {"gh", "posa", "nwc", "semi-exact", "posa-min", "kot"}) {
      out << ',';
      for (const auto& [c, holds] : r.verdicts)
        if (c == name) out << (holds ? 1 : 0);
    }
    out << ',' << r.solver << ',' << r.oracle << ',' << (r.agree ? (*r.agree ? "1" : "0") : "") << ',' << r.wall_ms
        << ',' << quote(r.error) << '\n';
  }
  return out.str();
}

/// Spec list from JSON: [{"generator": ..., "params": {...}, "seed": s}, ...],
/// or an object {"generator", "params", "seeds": [a, b]} expanding to seeds a..b-1.
inline std::vector<InstanceSpec> specs_from_json(const nlohmann::json& j) {
  std::vector<InstanceSpec> out;
  auto one = [&](const nlohmann::json& e) {
    try {
      const auto g = generator_from_string(e.at("generator").get<std::string>());
      if (!g) fail(ErrorKind::malformed_input, "unknown generator " + e.at("generator").dump());
      const auto params = e.value("params", nlohmann::json::object());
      if (e.contains("seeds")) {
        const auto range = e.at("seeds").get<std::vector<std::uint64_t>>();
        if (range.size() != 2 || range[0] > range[1]) fail(ErrorKind::malformed_input, "seeds must be [first, last)");
        for (auto s = range[0]; s < range[1]; ++s) out.push_back({*g, params, s});
      } else {
        out.push_back({*g, params, e.value("seed", std::uint64_t{0})});
      }
    } catch (const nlohmann::json::exception& ex) {
      fail(ErrorKind::malformed_input, std::string("experiment spec: ") + ex.what());
    }
  };
  if (j.is_array())
    for (const auto& e : j) one(e);
  else
    one(j);
  return out;
}

}  // namespace hamlab

#endif  // HAMLAB_LAB_HPP
