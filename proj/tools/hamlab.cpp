// hamlab: command-line front end for the library.
//
// Exit codes: 0 success, 1 negative verdict, 2 usage / malformed input,
// 3 wrong pipeline, 4 stage or contract failure.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hamlab/assembly.hpp"
#include "hamlab/blowup.hpp"
#include "hamlab/conditions.hpp"
#include "hamlab/cycle_cover.hpp"
#include "hamlab/io.hpp"
#include "hamlab/lab.hpp"
#include "hamlab/regular_pairs.hpp"

using namespace hamlab;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string output;
  int jobs = 1;
};

void emit(const Globals& g, const std::string& text) {
  if (g.output.empty() || g.output == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out) fail(ErrorKind::malformed_input, "cannot write " + g.output);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

void require_json(const Globals& g, const char* verb) {
  if (g.format != "json") fail(ErrorKind::parameter, std::string(verb) + " only writes json");
}

json witness_json(const ConditionWitness& w) {
  json j{{"i", w.i},
         {"d_out", w.d_out},
         {"d_in", w.d_in},
         {"threshold", to_string(w.threshold)},
         {"partner_threshold", to_string(w.partner_threshold)},
         {"clause", w.clause}};
  j["partner_index"] = w.partner_index ? json(*w.partner_index) : json(nullptr);
  j["partner_out"] = w.partner_out ? json(*w.partner_out) : json(nullptr);
  j["partner_in"] = w.partner_in ? json(*w.partner_in) : json(nullptr);
  return j;
}

json report_json(const ConditionReport& r) {
  json j{{"condition", to_string(r.condition)},
         {"holds", r.holds},
         {"strongly_connected", r.strongly_connected},
         {"n", r.n}};
  j["first_violation"] = r.first_violation ? json(*r.first_violation) : json(nullptr);
  j["witness"] = r.witness ? witness_json(*r.witness) : json(nullptr);
  j["beta"] = r.beta ? json(to_string(*r.beta)) : json(nullptr);
  return j;
}

json verdict_json(const RegularityVerdict& v) {
  json j{{"mode", to_string(v.mode)}, {"regular", v.regular}, {"worst_deviation", to_string(v.worst_deviation)}};
  j["witness"] = v.witness ? json{{"x", v.witness->first}, {"y", v.witness->second}} : json(nullptr);
  j["degree_witness"] = v.degree_witness ? json(*v.degree_witness) : json(nullptr);
  return j;
}

Digraph load_graph(const std::string& path) { return io::read_graph(io::read_file(path)); }

CertifyMode mode_from(const std::string& s) {
  if (s == "exhaustive") return CertifyMode::exhaustive;
  if (s == "sampled") return CertifyMode::sampled;
  fail(ErrorKind::parameter, "mode must be exhaustive or sampled");
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::malformed_input:
    case ErrorKind::parameter: return 2;
    case ErrorKind::wrong_pipeline: return 3;
    case ErrorKind::no_solution: return 1;
    default: return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hamlab: digraph Hamiltonicity laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals glob;
  app.add_option("--seed", glob.seed, "random seed");
  app.add_option("--format", glob.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", glob.output, "output path (stdout when absent)");
  app.add_option("--jobs", glob.jobs, "worker threads for experiment")->check(CLI::PositiveNumber);

  int rc = 0;

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance");
  std::string gen_kind, beta_s = "1/4", a_s = "1/5", density_s = "7/10", part_out, factor_out;
  int gen_n = 0, gen_k = 0, gen_m = 10, gen_v0 = 0;
  gen->add_option("--generator", gen_kind, "extremal_chvatal|concluding|blowup|random_condition")->required();
  gen->add_option("--n", gen_n);
  gen->add_option("--k", gen_k);
  gen->add_option("--a", a_s);
  gen->add_option("--beta", beta_s);
  gen->add_option("--m", gen_m);
  gen->add_option("--density", density_s);
  gen->add_option("--v0", gen_v0);
  gen->add_option("--partition-out", part_out, "blowup: where to write the partition");
  gen->add_option("--factor-out", factor_out, "blowup: where to write the cluster 1-factor");
  gen->callback([&] {
    require_json(glob, "gen");
    const auto kind = generator_from_string(gen_kind);
    if (!kind) fail(ErrorKind::parameter, "unknown generator " + gen_kind);
    json params{{"n", gen_n}, {"k", gen_k}, {"a", a_s}, {"beta", beta_s}, {"m", gen_m}, {"density", density_s},
                {"v0", gen_v0}};
    const auto out = detail::generate(InstanceSpec{*kind, params, glob.seed});
    emit(glob, io::write_graph_json(out.g));
    if (out.blowup) {
      auto dump = [](const std::string& path, const json& j) {
        if (path.empty()) return;
        std::ofstream f(path);
        if (!f) fail(ErrorKind::malformed_input, "cannot write " + path);
        f << j.dump() << '\n';
      };
      dump(part_out, io::to_json(out.blowup->partition));
      dump(factor_out, io::to_json(out.blowup->f));
    }
  });

  // check
  auto* check = app.add_subcommand("check", "evaluate a degree-sequence condition");
  std::string cond_s, input;
  check->add_option("--condition", cond_s, "gh|posa|nwc|semi-exact|posa-min|kot")->required();
  check->add_option("--beta", beta_s);
  check->add_option("--input", input)->required();
  check->callback([&] {
    const auto c = condition_from_string(cond_s);
    if (!c) fail(ErrorKind::parameter, "unknown condition " + cond_s);
    const auto r = check_condition(load_graph(input), *c, parse_rational(beta_s));
    if (glob.format == "csv") {
      emit(glob, "condition,holds,n,first_violation\n" + std::string(to_string(r.condition)) + "," +
                     (r.holds ? "1" : "0") + "," + std::to_string(r.n) + "," +
                     (r.first_violation ? std::to_string(*r.first_violation) : ""));
    } else {
      emit(glob, report_json(r).dump(2));
    }
    rc = r.holds ? 0 : 1;
  });

  // cover
  auto* cover = app.add_subcommand("cover", "cycle cover of a reduced digraph");
  std::string d_s, trace_path;
  bool random_active = false;
  cover->add_option("--input", input)->required();
  cover->add_option("--d", d_s)->required();
  cover->add_option("--trace", trace_path, "JSON-lines trace, one record per iteration");
  cover->add_flag("--random-active", random_active, "pick the active path at random");
  cover->callback([&] {
    require_json(glob, "cover");
    const auto r = load_graph(input);
    const Rational d = parse_rational(d_s);
    const auto res = cover_by_cycles(r, d, CoverOptions{random_active, glob.seed});
    if (!trace_path.empty()) {
      std::ofstream t(trace_path);
      if (!t) fail(ErrorKind::malformed_input, "cannot write " + trace_path);
      for (const auto& s : res.trace)
        t << json{{"iteration", s.iteration}, {"case", s.action},   {"S", to_string(s.s)},
                  {"alpha", to_string(s.alpha)}, {"active", s.active_id}, {"partner", s.partner_id},
                  {"new_path", s.new_path_id}, {"waste_added", s.waste_added}, {"endpoint_invariant", s.endpoint_invariant}}
                 .dump()
          << '\n';
    }
    const bool within = le_coef_sqrt(Rational(static_cast<std::int64_t>(res.waste.size())), Rational(7) * Rational(r.order()), d);
    emit(glob, json{{"cycles", res.cycles}, {"waste", res.waste}, {"waste_within_bound", within},
                    {"valid", validate_cover(r, res)}}
                   .dump(2));
  });

  // pairs
  auto* pairs = app.add_subcommand("pairs", "regular-pair tools");
  pairs->require_subcommand(1);
  std::string part_path, mode_s, eps_s = "1/4", theta_s = "1/5";
  int from = 0, to = 1, samples = 10000;
  auto pair_opts = [&](CLI::App* sc) {
    sc->add_option("--input", input)->required();
    sc->add_option("--partition", part_path)->required();
    sc->add_option("--from", from, "cluster index of side A");
    sc->add_option("--to", to, "cluster index of side B");
    sc->add_option("--eps", eps_s);
    sc->add_option("--d", d_s);
    sc->add_option("--mode", mode_s, "exhaustive|sampled (default by size)");
    sc->add_option("--samples", samples);
  };
  struct Loaded {
    Digraph g;
    ClusterPartition part;
  };
  auto load_pair = [&]() {
    Loaded l{load_graph(input), io::partition_from_json(io::read_json_file(part_path))};
    l.part.validate(l.g.order());
    if (from < 0 || to < 0 || from >= l.part.k() || to >= l.part.k() || from == to)
      fail(ErrorKind::parameter, "--from/--to must name two distinct clusters");
    return l;
  };
  auto* certify = pairs->add_subcommand("certify", "certify (super-)regularity");
  pair_opts(certify);
  certify->callback([&] {
    require_json(glob, "pairs certify");
    const auto l = load_pair();
    const Pair p(l.g, l.part.clusters[from], l.part.clusters[to]);
    const auto mode = mode_s.empty() ? default_mode(p) : mode_from(mode_s);
    const Rational eps = parse_rational(eps_s);
    const auto v = d_s.empty() ? certify_regular(p, eps, mode, glob.seed, samples)
                               : certify_super_regular(p, eps, parse_rational(d_s), mode, glob.seed, samples);
    emit(glob, verdict_json(v).dump(2));
    rc = v.regular ? 0 : 1;
  });
  auto* matching = pairs->add_subcommand("matching", "matching promised by regularity");
  bool super = false;
  pair_opts(matching);
  matching->add_flag("--super", super, "assert super-regularity (perfect matching)");
  matching->callback([&] {
    require_json(glob, "pairs matching");
    const auto l = load_pair();
    const Pair p(l.g, l.part.clusters[from], l.part.clusters[to]);
    const auto m = regular_pair_matching(p, parse_rational(eps_s), super);
    emit(glob, json{{"size", m.size()}, {"pairs", m.pairs}}.dump(2));
  });
  auto* ideal = pairs->add_subcommand("ideal", "select and audit an ideal");
  pair_opts(ideal);
  ideal->add_option("--theta", theta_s);
  ideal->callback([&] {
    require_json(glob, "pairs ideal");
    const auto l = load_pair();
    const Pair p(l.g, l.part.clusters[from], l.part.clusters[to]);
    const Rational d = d_s.empty() ? Rational(1, 80) : parse_rational(d_s);
    const auto id = select_ideal(p, parse_rational(theta_s), d, glob.seed);
    const auto mode = mode_s.empty() ? CertifyMode::sampled : mode_from(mode_s);
    const bool ok = audit_ideal(p, id, parse_rational(eps_s), d * d, 20, glob.seed, mode, std::min(samples, 2000));
    emit(glob, json{{"a_star", id.a_star}, {"b_star", id.b_star}, {"audit", ok}}.dump(2));
    rc = ok ? 0 : 1;
  });

  // solve
  auto* solve = app.add_subcommand("solve", "run the assembly pipeline on a clustered instance");
  std::string factor_path, reduced_path, cert_path, eta_s = "1/4";
  solve->add_option("--input", input)->required();
  solve->add_option("--partition", part_path)->required();
  solve->add_option("--factor", factor_path, "1-factor on the clusters")->required();
  solve->add_option("--reduced", reduced_path, "reduced digraph on the clusters (derived from the input if absent)");
  solve->add_option("--eta", eta_s);
  solve->add_option("--cert", cert_path, "certificate output path");
  solve->callback([&] {
    require_json(glob, "solve");
    const auto g = load_graph(input);
    const auto part = io::partition_from_json(io::read_json_file(part_path));
    const auto f = io::factor_from_json(io::read_json_file(factor_path), part.k());
    const Rational eta = parse_rational(eta_s);
    const auto res = reduced_path.empty() ? assemble_hamilton(g, part, f, eta, glob.seed)
                                          : assemble_hamilton(g, part, load_graph(reduced_path), f, eta, glob.seed);
    const auto cert = io::to_json(res.certificate).dump();
    if (!cert_path.empty()) {
      std::ofstream out(cert_path);
      if (!out) fail(ErrorKind::malformed_input, "cannot write " + cert_path);
      out << cert << '\n';
    }
    const auto& r = res.report;
    emit(glob, json{{"verified", true},
                    {"n", g.order()},
                    {"walk_length", r.walk_length},
                    {"max_use", r.max_use},
                    {"strict_cap_ok", r.strict_cap_ok},
                    {"fixed_edges", r.fixed_edges},
                    {"cycles_before_merge", r.cycles_before_merge},
                    {"merges", r.merges},
                    {"chaining_ok", r.chaining_ok}}
                   .dump(2));
  });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact Hamiltonicity (n <= 20)");
  bool coverage = false;
  oracle->add_option("--input", input)->required();
  oracle->add_flag("--coverage", coverage, "also report the maximum cycle-cover coverage (n <= 16)");
  oracle->callback([&] {
    require_json(glob, "oracle");
    const auto g = load_graph(input);
    const auto cert = brute_force_hamiltonian(g);
    json j{{"n", g.order()}, {"hamiltonian", cert.has_value()}};
    j["order"] = cert ? json(cert->order) : json(nullptr);
    if (coverage) j["max_cycle_cover_coverage"] = max_cycle_cover_coverage(g);
    emit(glob, j.dump(2));
    rc = cert ? 0 : 1;
  });

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run a campaign of instances");
  std::string spec_path;
  bool timing = true;
  experiment->add_option("--spec", spec_path, "spec list JSON")->required();
  experiment->add_flag("--timing,!--no-timing", timing, "include wall times in JSON records");
  experiment->callback([&] {
    const auto rep = run_experiment(specs_from_json(io::read_json_file(spec_path)), glob.jobs);
    emit(glob, glob.format == "csv" ? to_csv(rep) : to_json(rep, timing).dump(2));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "hamlab: " << to_string(e.kind()) << ": " << e.what() << '\n';
    if (!e.witness().empty()) {
      std::cerr << "witness:";
      for (int v : e.witness()) std::cerr << ' ' << v;
      std::cerr << '\n';
    }
    return exit_code(e.kind());
  }
  return rc;
}
