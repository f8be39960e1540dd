#include "carlab/cli.hpp"

#include "carlab/car_analysis.hpp"
#include "carlab/errors.hpp"
#include "carlab/scenario_io.hpp"
#include "carlab/update_rules.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace carlab {

namespace {

struct Options {
  std::string verb;
  std::string scenario;
  std::string file;
  std::vector<std::string> params;
  std::string obs;
  std::string rule;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::size_t samples = 100000;
  int restarts = 100;
  std::string format = "text";
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Json exact_and_float(const Rational& r) { return {{"exact", r.str()}, {"float", to_double(r)}}; }

Json posterior_json(const NaiveDistribution& d) {
  return {{"exact", distribution_to_json(d)}, {"float", distribution_to_json(to_float(d))}};
}

Json posterior_json(const FloatDistribution& d) { return {{"exact", nullptr}, {"float", distribution_to_json(d)}}; }

std::string render(const NaiveDistribution& d) {
  std::string out;
  for (std::size_t w = 0; w < d.size(); ++w) {
    out += (w ? ", " : "") + d.space().label(w) + ": " + d[w].str();
  }
  return out;
}

std::string render(const FloatDistribution& d) {
  std::string out;
  for (std::size_t w = 0; w < d.size(); ++w) {
    out += (w ? ", " : "") + d.space().label(w) + ": " + fmt(d[w]);
  }
  return out;
}

std::map<std::string, Rational> split_params(const std::vector<std::string>& raw,
                                             std::map<std::string, Rational>* lambdas) {
  std::map<std::string, Rational> out;
  for (const auto& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::InvalidArgument, "--param expects key=value, got \"" + item + "\"");
    }
    const std::string key = item.substr(0, eq);
    Rational value;
    try {
      value = Rational::parse(item.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, "--param " + key + ": " + e.what());
    }
    auto& target = (lambdas && key.rfind("lambda", 0) == 0) ? *lambdas : out;
    if (!target.emplace(key, value).second) throw Error(ErrorCode::InvalidArgument, "duplicate --param " + key);
  }
  return out;
}

ScenarioSpec load(const Options& opt, std::map<std::string, Rational>* lambdas = nullptr) {
  auto params = split_params(opt.params, lambdas);
  if (opt.scenario.empty() == opt.file.empty()) {
    throw Error(ErrorCode::InvalidArgument, "exactly one of --scenario and --file is required");
  }
  if (!opt.file.empty()) {
    if (!params.empty()) throw Error(ErrorCode::InvalidArgument, "--param only applies to built-in scenarios");
    auto spec = load_scenario(opt.file);
    if (spec.name.empty()) spec.name = opt.file;
    return spec;
  }
  return build_scenario(opt.scenario, params);
}

const Protocol& need_protocol(const ScenarioSpec& spec, const std::string& verb) {
  if (const auto* p = std::get_if<Protocol>(&spec.build)) return *p;
  throw Error(ErrorCode::InvalidArgument, verb + " needs a protocol; scenario \"" + spec.name + "\" has no kernel");
}

std::vector<std::size_t> selected(const ObservationAlphabet& alphabet, const std::string& obs) {
  if (!obs.empty()) return {alphabet.index_of(obs)};
  std::vector<std::size_t> all(alphabet.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

ConstraintObservation constraints_of(const Observation& o) {
  if (const auto* e = std::get_if<EventObservation>(&o)) return as_constraints(*e);
  if (const auto* j = std::get_if<JeffreyObservation>(&o)) return as_constraints(*j);
  return std::get<ConstraintObservation>(o);
}

SolverOptions solver_options(const Options& opt) {
  SolverOptions s;
  s.tol = opt.tol;
  s.seed = opt.seed;
  s.restarts = opt.restarts;
  return s;
}

struct Report {
  Json json;
  std::string text;
};

Report do_scenario(const Options& opt) {
  const auto spec = load(opt);
  Report r{scenario_to_json(spec), {}};
  std::ostringstream t;
  t << "scenario " << spec.name << "\n";
  for (const auto& [k, v] : spec.parameters) t << "  " << k << " = " << v.str() << "\n";
  if (const auto* p = std::get_if<Protocol>(&spec.build)) {
    t << "prior: " << render(marginal_worlds(*p)) << "\n";
    t << "joint:\n";
    for (std::size_t w = 0; w < p->world_count(); ++w) {
      for (std::size_t o = 0; o < p->observation_count(); ++o) {
        if (!p->mass(w, o).is_zero()) {
          t << "  " << p->space().label(w) << ", " << name_of(p->alphabet()[o]) << ": " << p->mass(w, o).str() << "\n";
        }
      }
    }
  } else {
    const auto& po = std::get<PriorAndObservations>(spec.build);
    t << "prior: " << render(po.prior) << "\n";
    t << "observations (no protocol):";
    for (const auto& o : po.observations.items()) t << " " << name_of(o) << " [" << kind_name(kind_of(o)) << "]";
    t << "\n";
  }
  r.text = t.str();
  return r;
}

Report do_update(const Options& opt) {
  const auto spec = load(opt);
  const SolverOptions sopts = solver_options(opt);
  const ObservationAlphabet& alphabet = std::holds_alternative<Protocol>(spec.build)
                                            ? std::get<Protocol>(spec.build).alphabet()
                                            : std::get<PriorAndObservations>(spec.build).observations;
  const UpdateRule rule = opt.rule.empty() ? natural_rule(alphabet.kind()) : parse_rule(opt.rule);
  Report r{{{"verb", "update"}, {"scenario", spec.name}, {"rule", std::string(rule_name(rule))}}, {}};
  r.json["results"] = Json::array();
  std::ostringstream t;
  t << "update (" << rule_name(rule) << ") on " << spec.name << "\n";

  if (const auto* p = std::get_if<Protocol>(&spec.build)) {
    for (std::size_t o : selected(alphabet, opt.obs)) {
      const auto c = compare(*p, o, rule, sopts);
      Json item{{"observation", name_of(alphabet[o])}};
      item["naive"] = c.naive_exact ? posterior_json(*c.naive_exact) : posterior_json(c.naive_result);
      item["sophisticated"] = posterior_json(c.sophisticated_result);
      item["tv_gap"] = c.tv_gap_exact ? exact_and_float(*c.tv_gap_exact) : Json{{"exact", nullptr}, {"float", c.tv_gap}};
      item["agree"] = c.agree;
      r.json["results"].push_back(std::move(item));
      t << "observation " << name_of(alphabet[o]) << "\n";
      t << "  naive:         " << (c.naive_exact ? render(*c.naive_exact) : render(c.naive_result)) << "\n";
      t << "  sophisticated: " << render(c.sophisticated_result) << "\n";
      t << "  tv gap:        " << (c.tv_gap_exact ? c.tv_gap_exact->str() : fmt(c.tv_gap)) << "\n";
      t << "  agree:         " << (c.agree ? "yes" : "no") << "\n";
    }
  } else {
    const auto& po = std::get<PriorAndObservations>(spec.build);
    for (std::size_t o : selected(alphabet, opt.obs)) {
      const auto& item = alphabet[o];
      const auto kind = kind_of(item);
      if ((rule == UpdateRule::NaiveConditioning && kind != ObservationKind::Event) ||
          (rule == UpdateRule::JeffreyConditioning && kind != ObservationKind::Jeffrey)) {
        throw Error(ErrorCode::RuleKindMismatch, std::string(rule_name(rule)) + " updating cannot consume " +
                                                     kind_name(kind) + " observation \"" + name_of(item) + "\"");
      }
      Json entry{{"observation", name_of(item)}};
      t << "observation " << name_of(item) << "\n";
      if (rule == UpdateRule::MRE) {
        const auto sol = solve_mre(po.prior, to_linear_constraints(po.prior.space(), constraints_of(item)), sopts);
        entry["posterior"] = posterior_json(sol.posterior);
        entry["kl_bits"] = sol.kl_value;
        entry["residual"] = sol.residual;
        entry["iterations"] = sol.iterations;
        t << "  posterior: " << render(sol.posterior) << "\n";
        t << "  KL (bits): " << fmt(sol.kl_value) << ", residual " << fmt(sol.residual) << "\n";
      } else {
        const auto post = rule == UpdateRule::NaiveConditioning
                              ? naive_condition(po.prior, std::get<EventObservation>(item))
                              : jeffrey_update(po.prior, std::get<JeffreyObservation>(item));
        entry["posterior"] = posterior_json(post);
        t << "  posterior: " << render(post) << "\n";
      }
      r.json["results"].push_back(std::move(entry));
    }
  }
  r.text = t.str();
  return r;
}

Json car_json(const Protocol& p, const CarReport& c) {
  Json out = car_report_to_json(p.space(), c);
  out["name"] = name_of(p.alphabet()[c.observation]);
  return out;
}

std::string car_text(const Protocol& p, const CarReport& c) {
  std::ostringstream t;
  t << "observation " << name_of(p.alphabet()[c.observation]) << ": CAR " << (c.holds ? "holds" : "fails") << "\n";
  t << "  kernel:";
  for (std::size_t w = 0; w < c.kernel_values.size(); ++w) {
    if (c.kernel_values[w]) t << " " << p.space().label(w) << "=" << c.kernel_values[w]->str();
  }
  t << "\n";
  if (c.witness) {
    t << "  witness: " << p.space().label(c.witness->first) << " vs " << p.space().label(c.witness->second) << "\n";
  }
  return t.str();
}

CarReport car_for(const Protocol& p, std::size_t o) {
  switch (p.alphabet().kind()) {
    case ObservationKind::Event: return check_car(p, o);
    case ObservationKind::Jeffrey: return check_generalized_car(p, o);
    case ObservationKind::Constraint: break;
  }
  throw Error(ErrorCode::RuleKindMismatch, "CAR checks need event or Jeffrey observations");
}

Report do_check_car(const Options& opt) {
  const auto spec = load(opt);
  const auto& p = need_protocol(spec, "check-car");
  Report r{{{"verb", "check-car"}, {"scenario", spec.name}}, {}};
  r.json["results"] = Json::array();
  std::ostringstream t;
  t << "check-car on " << spec.name << "\n";
  for (std::size_t o : selected(p.alphabet(), opt.obs)) {
    const auto c = car_for(p, o);
    r.json["results"].push_back(car_json(p, c));
    t << car_text(p, c);
  }
  if (p.alphabet().kind() == ObservationKind::Event) {
    const bool all = car_guaranteed_for_all_priors(p);
    r.json["car_for_all_priors"] = all;
    t << "CAR for every prior on these runs: " << (all ? "yes" : "no") << "\n";
  }
  r.text = t.str();
  return r;
}

Report do_audit(const Options& opt) {
  const auto spec = load(opt);
  const auto& p = need_protocol(spec, "audit");
  const SolverOptions sopts = solver_options(opt);
  Report r{{{"verb", "audit"}, {"scenario", spec.name}}, {}};
  std::ostringstream t;
  t << "audit of " << spec.name << "\n";

  const auto accuracy = validate_accuracy(p);
  r.json["accurate"] = accuracy.ok();
  r.json["accuracy_violations"] = Json::array();
  for (const auto& v : accuracy.violations) r.json["accuracy_violations"].push_back(v.detail);
  t << "accuracy: " << (accuracy.ok() ? "ok" : "violated") << "\n";
  for (const auto& v : accuracy.violations) t << "  " << v.detail << "\n";

  const auto pr_o = marginal_observations(p);
  const UpdateRule rule = natural_rule(p.alphabet().kind());
  r.json["rule"] = std::string(rule_name(rule));
  r.json["results"] = Json::array();
  for (std::size_t o : selected(p.alphabet(), opt.obs)) {
    const std::string name = name_of(p.alphabet()[o]);
    Json item{{"observation", name}, {"probability", exact_and_float(pr_o[static_cast<Eigen::Index>(o)])}};
    t << "observation " << name << " (probability " << pr_o[static_cast<Eigen::Index>(o)].str() << ")\n";
    if (pr_o[static_cast<Eigen::Index>(o)].is_zero()) {
      item["observable"] = false;
      r.json["results"].push_back(std::move(item));
      t << "  never observed\n";
      continue;
    }
    item["observable"] = true;
    const auto c = compare(p, o, rule, sopts);
    item["naive"] = c.naive_exact ? posterior_json(*c.naive_exact) : posterior_json(c.naive_result);
    item["sophisticated"] = posterior_json(c.sophisticated_result);
    item["tv_gap"] = c.tv_gap_exact ? exact_and_float(*c.tv_gap_exact) : Json{{"exact", nullptr}, {"float", c.tv_gap}};
    item["agree"] = c.agree;
    t << "  naive (" << rule_name(rule) << "): " << (c.naive_exact ? render(*c.naive_exact) : render(c.naive_result)) << "\n";
    t << "  sophisticated:    " << render(c.sophisticated_result) << "\n";
    t << "  tv gap: " << (c.tv_gap_exact ? c.tv_gap_exact->str() : fmt(c.tv_gap)) << ", agree: " << (c.agree ? "yes" : "no")
      << "\n";
    if (accuracy.ok() && p.alphabet().kind() != ObservationKind::Constraint) {
      const auto car = car_for(p, o);
      item["car"] = car_json(p, car);
      t << "  CAR: " << (car.holds ? "holds" : "fails");
      if (car.witness) {
        t << " (witness " << p.space().label(car.witness->first) << " vs " << p.space().label(car.witness->second) << ")";
      }
      t << "\n";
    }
    r.json["results"].push_back(std::move(item));
  }
  if (p.alphabet().kind() == ObservationKind::Constraint) {
    try {
      const auto th = thm43_check(p, sopts);
      Json jl = Json::array();
      for (const auto& v : th.jeffrey_like) jl.push_back(v.jeffrey_like);
      r.json["two_set_analysis"] = {{"preconditions_met", th.preconditions_met},
                                    {"jeffrey_like", jl},
                                    {"discrepancies", th.discrepancies},
                                    {"discrepancy_expected", th.discrepancy_expected},
                                    {"discrepancy_confirmed", th.discrepancy_confirmed}};
      t << "two-set analysis: preconditions " << (th.preconditions_met ? "met" : "not met") << ", discrepancy "
        << (th.discrepancy_expected ? (th.discrepancy_confirmed ? "expected and confirmed" : "expected, not confirmed")
                                    : "not implied")
        << "\n";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WrongAlphabetShape) throw;
    }
  }
  r.text = t.str();
  return r;
}

Report do_construct(const Options& opt) {
  if (opt.file.empty() || !opt.scenario.empty() || !opt.params.empty()) {
    throw Error(ErrorCode::InvalidArgument, "construct reads its inputs from --file only");
  }
  std::ifstream in(opt.file);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + opt.file);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Json doc;
  try {
    doc = Json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  const auto need = [&](const char* key) -> const Json& {
    if (!doc.is_object() || !doc.contains(key) || !doc[key].is_array()) {
      throw Error(ErrorCode::ParseError, std::string("construct input: \"") + key + "\" must be an array");
    }
    return doc[key];
  };
  std::vector<std::string> labels;
  for (const auto& l : need("worlds")) {
    if (!l.is_string()) throw Error(ErrorCode::ParseError, "worlds: labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  WorldSet space(std::move(labels));
  std::vector<Event> cells;
  for (const auto& c : need("cells")) {
    if (!c.is_array()) throw Error(ErrorCode::ParseError, "cells: each cell must be an array");
    std::vector<std::string> members;
    for (const auto& l : c) members.push_back(l.get<std::string>());
    cells.push_back(space.event(members));
  }
  const Json& pr_json = need("pr_O");
  Vector<Rational> pr_o(static_cast<Eigen::Index>(pr_json.size()));
  for (std::size_t i = 0; i < pr_json.size(); ++i) {
    pr_o[static_cast<Eigen::Index>(i)] = rational_from_json(pr_json[i], "pr_O[" + std::to_string(i) + "]");
  }
  const Json& alpha_json = need("alphas");
  Matrix<Rational> alphas(static_cast<Eigen::Index>(alpha_json.size()), static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < alpha_json.size(); ++i) {
    if (!alpha_json[i].is_array() || alpha_json[i].size() != cells.size()) {
      throw Error(ErrorCode::InvalidAlphas, "alphas row " + std::to_string(i + 1) + " needs one entry per cell");
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      alphas(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rational_from_json(alpha_json[i][j], "alphas[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  std::vector<NaiveDistribution> conditionals;
  for (const auto& c : need("conditionals")) {
    if (!c.is_object()) throw Error(ErrorCode::ParseError, "conditionals: each entry must be an object");
    Vector<Rational> mass = Vector<Rational>::Constant(static_cast<Eigen::Index>(space.size()), Rational(0));
    for (const auto& [label, value] : c.items()) {
      mass[static_cast<Eigen::Index>(space.index_of(label))] = rational_from_json(value, "conditionals." + label);
    }
    conditionals.emplace_back(space, std::move(mass));
  }

  const Protocol p = construct_car_joint(space, cells, pr_o, alphas, conditionals);
  Report r{{{"verb", "construct"}}, {}};
  r.json["protocol"] = scenario_to_json(ScenarioSpec{"constructed", {}, p});
  r.json["accurate"] = validate_accuracy(p).ok();
  r.json["results"] = Json::array();
  std::ostringstream t;
  t << "constructed joint (" << p.world_count() << " worlds, " << p.observation_count() << " observations), accurate: "
    << (validate_accuracy(p).ok() ? "yes" : "no") << "\n";
  const auto prior = marginal_worlds(p);
  for (std::size_t o = 0; o < p.observation_count(); ++o) {
    const auto c = check_generalized_car(p, o);
    const bool match = jeffrey_update(prior, p.alphabet().jeffrey(o)) == sophisticated_posterior(p, o);
    Json item = car_json(p, c);
    item["jeffrey_matches_sophisticated"] = match;
    r.json["results"].push_back(std::move(item));
    t << car_text(p, c) << "  Jeffrey update matches sophisticated posterior: " << (match ? "yes" : "no") << "\n";
  }
  r.text = t.str();
  return r;
}

Report do_fixed_point(const Options& opt) {
  std::map<std::string, Rational> lambda_params;
  const auto spec = load(opt, &lambda_params);
  const ObservationAlphabet& alphabet = std::holds_alternative<Protocol>(spec.build)
                                            ? std::get<Protocol>(spec.build).alphabet()
                                            : std::get<PriorAndObservations>(spec.build).observations;
  const WorldSet& space = std::holds_alternative<Protocol>(spec.build)
                              ? std::get<Protocol>(spec.build).space()
                              : std::get<PriorAndObservations>(spec.build).prior.space();
  std::vector<ConstraintObservation> observations;
  for (const auto& o : alphabet.items()) observations.push_back(constraints_of(o));
  const auto k = static_cast<Eigen::Index>(observations.size());
  Vector<Rational> lambdas(k);
  if (!lambda_params.empty()) {
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto it = lambda_params.find("lambda" + std::to_string(i + 1));
      if (it == lambda_params.end()) throw Error(ErrorCode::InvalidArgument, "missing --param lambda" + std::to_string(i + 1));
      lambdas[i] = it->second;
    }
    if (static_cast<Eigen::Index>(lambda_params.size()) != k) {
      throw Error(ErrorCode::InvalidArgument, "expected lambda1..lambda" + std::to_string(k));
    }
  } else if (const auto* p = std::get_if<Protocol>(&spec.build)) {
    lambdas = marginal_observations(*p);
  } else {
    throw Error(ErrorCode::InvalidArgument, "fixed-point needs --param lambda<i>=p/q without a protocol");
  }

  const auto res = mre_car_fixed_point(space, lambdas, observations, solver_options(opt));
  Report r{{{"verb", "fixed-point"}, {"scenario", spec.name}}, {}};
  Json lam = Json::array();
  for (Eigen::Index i = 0; i < k; ++i) lam.push_back(lambdas[i].str());
  r.json["lambdas"] = lam;
  r.json["result"] = fixed_point_to_json(res);
  std::ostringstream t;
  t << "fixed-point search on " << spec.name << "\n";
  t << "  compatible: " << (res.compatible ? "yes (certified)" : "not found") << "\n";
  t << "  residual: " << fmt(res.residual) << " after " << res.restarts_used << " start(s)\n";
  t << "  best prior: " << render(res.best_prior) << "\n";
  if (res.compatible) t << "  certificate gap: " << fmt(res.certificate_gap) << "\n";
  r.text = t.str();
  return r;
}

Report do_simulate(const Options& opt) {
  const auto spec = load(opt);
  const auto& p = need_protocol(spec, "simulate");
  const auto runs = sample_runs(p, opt.seed, opt.samples);
  const auto n_w = p.world_count();
  const auto n_o = p.observation_count();
  std::vector<std::vector<std::size_t>> counts(n_o, std::vector<std::size_t>(n_w, 0));
  for (const auto& s : runs) ++counts[s.observation][s.world];

  Report r{{{"verb", "simulate"},
            {"scenario", spec.name},
            {"algorithm", std::string(kSamplerAlgorithm)},
            {"seed", opt.seed},
            {"samples", opt.samples}},
           {}};
  r.json["results"] = Json::array();
  std::ostringstream t;
  t << "simulate " << spec.name << ": " << opt.samples << " runs, seed " << opt.seed << " (" << kSamplerAlgorithm << ")\n";
  const auto pr_o = marginal_observations(p);
  for (std::size_t o = 0; o < n_o; ++o) {
    std::size_t total = 0;
    for (auto c : counts[o]) total += c;
    Json item{{"observation", name_of(p.alphabet()[o])}, {"count", total}};
    t << "observation " << name_of(p.alphabet()[o]) << ": " << total << " runs\n";
    if (total == 0 || pr_o[static_cast<Eigen::Index>(o)].is_zero()) {
      r.json["results"].push_back(std::move(item));
      continue;
    }
    const auto exact = sophisticated_posterior(p, o);
    Json empirical = Json::object();
    double worst = 0.0;
    for (std::size_t w = 0; w < n_w; ++w) {
      const double freq = static_cast<double>(counts[o][w]) / static_cast<double>(total);
      empirical[p.space().label(w)] = freq;
      worst = std::max(worst, std::abs(freq - to_double(exact[w])));
      t << "  " << p.space().label(w) << ": empirical " << fmt(freq) << ", exact " << exact[w].str() << "\n";
    }
    item["empirical"] = std::move(empirical);
    item["exact"] = distribution_to_json(exact);
    item["max_deviation"] = worst;
    r.json["results"].push_back(std::move(item));
  }
  r.text = t.str();
  return r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Naive versus sophisticated updating: CAR checks, Jeffrey and MRE updates, simulations"};
  app.name("carlab");
  app.add_option("verb", opt.verb, "update | check-car | audit | construct | fixed-point | simulate | scenario")
      ->required()
      ->check(CLI::IsMember({"update", "check-car", "audit", "construct", "fixed-point", "simulate", "scenario"}));
  app.add_option("--scenario", opt.scenario, "built-in: monty-hall, three-prisoners, judy-benjamin, mar");
  app.add_option("--file", opt.file, "scenario JSON file (construct: construction input)");
  app.add_option("--param", opt.params, "k=v with v a rational p/q; repeatable");
  app.add_option("--obs", opt.obs, "restrict to one observation by name");
  app.add_option("--rule", opt.rule, "naive | jeffrey | mre")->check(CLI::IsMember({"naive", "jeffrey", "mre"}));
  app.add_option("--tol", opt.tol, "tolerance for float comparisons")->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "random seed");
  app.add_option("--samples", opt.samples, "simulated runs");
  app.add_option("--restarts", opt.restarts, "fixed-point starts")->check(CLI::PositiveNumber);
  app.add_option("--format", opt.format, "text | json")->check(CLI::IsMember({"text", "json"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    Report r;
    if (opt.verb == "update") r = do_update(opt);
    else if (opt.verb == "check-car") r = do_check_car(opt);
    else if (opt.verb == "audit") r = do_audit(opt);
    else if (opt.verb == "construct") r = do_construct(opt);
    else if (opt.verb == "fixed-point") r = do_fixed_point(opt);
    else if (opt.verb == "simulate") r = do_simulate(opt);
    else r = do_scenario(opt);
    if (opt.format == "json") {
      out << r.json.dump(2) << "\n";
    } else {
      out << r.text;
    }
    return 0;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const nlohmann::json::exception& e) {
    err << "ParseError: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace carlab
