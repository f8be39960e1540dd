#include "carlab/scenario_io.hpp"

#include "carlab/errors.hpp"

#include <fstream>
#include <sstream>

namespace carlab {

namespace {

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::ParseError, where + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::ParseError, where + ": missing field \"" + key + "\"");
  return *it;
}

const Json& array_field(const Json& obj, const char* key, const std::string& where) {
  const Json& value = field(obj, key, where);
  if (!value.is_array()) throw Error(ErrorCode::ParseError, where + "." + key + ": expected an array");
  return value;
}

std::string string_value(const Json& value, const std::string& where) {
  if (!value.is_string()) throw Error(ErrorCode::ParseError, where + ": expected a string");
  return value.get<std::string>();
}

Event event_from_json(const WorldSet& space, const Json& value, const std::string& where) {
  if (!value.is_array()) throw Error(ErrorCode::ParseError, where + ": expected an array of world labels");
  Event e(space.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    e.insert(space.index_of(string_value(value[i], where + "[" + std::to_string(i) + "]")));
  }
  return e;
}

std::vector<Event> events_from_json(const WorldSet& space, const Json& value, const std::string& where) {
  if (!value.is_array()) throw Error(ErrorCode::ParseError, where + ": expected an array of sets");
  std::vector<Event> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(event_from_json(space, value[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<Rational> rationals_from_json(const Json& value, const std::string& where) {
  if (!value.is_array()) throw Error(ErrorCode::ParseError, where + ": expected an array of rationals");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(rational_from_json(value[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Observation observation_from_json(const WorldSet& space, const Json& value, const std::string& where) {
  const std::string kind = string_value(field(value, "kind", where), where + ".kind");
  std::string name = string_value(field(value, "name", where), where + ".name");
  if (kind == "event") {
    return EventObservation{std::move(name), event_from_json(space, field(value, "set", where), where + ".set")};
  }
  if (kind != "jeffrey" && kind != "constraint") {
    throw Error(ErrorCode::ParseError, where + ".kind: unknown observation kind \"" + kind + "\"");
  }
  auto sets = events_from_json(space, array_field(value, "sets", where), where + ".sets");
  auto alphas = rationals_from_json(array_field(value, "alphas", where), where + ".alphas");
  if (sets.size() != alphas.size()) {
    throw Error(ErrorCode::ValidationError, where + ": \"sets\" and \"alphas\" differ in length");
  }
  if (kind == "jeffrey") {
    if (value.contains("odds")) throw Error(ErrorCode::ParseError, where + ": odds rows need kind \"constraint\"");
    return JeffreyObservation{std::move(name), std::move(sets), std::move(alphas)};
  }
  ConstraintObservation c{std::move(name), std::move(sets), std::move(alphas), {}};
  if (value.contains("odds")) {
    const Json& odds = array_field(value, "odds", where);
    for (std::size_t i = 0; i < odds.size(); ++i) {
      const std::string at = where + ".odds[" + std::to_string(i) + "]";
      c.odds.push_back(OddsConstraint{event_from_json(space, field(odds[i], "numerator", at), at + ".numerator"),
                                      event_from_json(space, field(odds[i], "denominator", at), at + ".denominator"),
                                      rational_from_json(field(odds[i], "ratio", at), at + ".ratio")});
    }
  }
  return c;
}

ScenarioSpec parse_document(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "top level: expected an object");
  const Json& worlds = array_field(doc, "worlds", "top level");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < worlds.size(); ++i) labels.push_back(string_value(worlds[i], "worlds[" + std::to_string(i) + "]"));
  WorldSet space(std::move(labels));

  const Json& prior_json = field(doc, "prior", "top level");
  if (!prior_json.is_object()) throw Error(ErrorCode::ParseError, "prior: expected an object");
  Vector<Rational> mass = Vector<Rational>::Constant(static_cast<Eigen::Index>(space.size()), Rational(0));
  for (const auto& [label, value] : prior_json.items()) {
    mass[static_cast<Eigen::Index>(space.index_of(label))] = rational_from_json(value, "prior." + label);
  }
  NaiveDistribution prior(space, std::move(mass));

  const Json& obs_json = array_field(doc, "observations", "top level");
  std::vector<Observation> items;
  for (std::size_t i = 0; i < obs_json.size(); ++i) {
    items.push_back(observation_from_json(space, obs_json[i], "observations[" + std::to_string(i) + "]"));
  }
  ObservationAlphabet alphabet(std::move(items), space.size());

  ScenarioSpec spec{"", {}, PriorAndObservations{prior, alphabet}};
  if (doc.contains("name")) spec.name = string_value(doc["name"], "name");
  if (doc.contains("parameters")) {
    if (!doc["parameters"].is_object()) throw Error(ErrorCode::ParseError, "parameters: expected an object");
    for (const auto& [key, value] : doc["parameters"].items()) {
      spec.parameters.emplace(key, rational_from_json(value, "parameters." + key));
    }
  }
  if (!doc.contains("kernel")) return spec;

  const Json& kernel_json = doc["kernel"];
  if (!kernel_json.is_object()) throw Error(ErrorCode::ParseError, "kernel: expected an object");
  Matrix<Rational> kernel = Matrix<Rational>::Constant(static_cast<Eigen::Index>(space.size()),
                                                       static_cast<Eigen::Index>(alphabet.size()), Rational(0));
  std::vector<bool> seen(space.size(), false);
  for (const auto& [label, row] : kernel_json.items()) {
    const std::size_t w = space.index_of(label);
    seen[w] = true;
    if (!row.is_object()) throw Error(ErrorCode::ParseError, "kernel." + label + ": expected an object");
    for (const auto& [obs, value] : row.items()) {
      kernel(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(alphabet.index_of(obs))) =
          rational_from_json(value, "kernel." + label + "." + obs);
    }
  }
  for (std::size_t w = 0; w < space.size(); ++w) {
    if (!seen[w]) throw Error(ErrorCode::ValidationError, "kernel: no row for world \"" + space.label(w) + "\"");
  }
  Protocol p = from_kernel(prior, alphabet, kernel);
  const auto report = validate_accuracy(p);
  if (!report.ok()) {
    throw Error(ErrorCode::ValidationError, "protocol is not accurate: " + report.violations.front().detail);
  }
  spec.build = std::move(p);
  return spec;
}

}  // namespace

Rational rational_from_json(const Json& value, const std::string& where) {
  if (!value.is_string()) throw Error(ErrorCode::ParseError, where + ": expected a \"p/q\" string");
  try {
    return Rational::parse(value.get<std::string>());
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, where + ": " + e.what());
  }
}

ScenarioSpec parse_scenario(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return parse_document(doc);
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

Json event_to_json(const WorldSet& space, const Event& e) {
  Json out = Json::array();
  for (std::size_t w : e.indices()) out.push_back(space.label(w));
  return out;
}

Json observation_to_json(const WorldSet& space, const Observation& o) {
  Json out;
  if (const auto* e = std::get_if<EventObservation>(&o)) {
    out["kind"] = "event";
    out["name"] = e->name;
    out["set"] = event_to_json(space, e->set);
    return out;
  }
  const auto write_sets = [&](const std::vector<Event>& sets, const std::vector<Rational>& alphas) {
    out["sets"] = Json::array();
    for (const auto& s : sets) out["sets"].push_back(event_to_json(space, s));
    out["alphas"] = Json::array();
    for (const auto& a : alphas) out["alphas"].push_back(a.str());
  };
  if (const auto* j = std::get_if<JeffreyObservation>(&o)) {
    out["kind"] = "jeffrey";
    out["name"] = j->name;
    write_sets(j->cells, j->weights);
    return out;
  }
  const auto& c = std::get<ConstraintObservation>(o);
  out["kind"] = "constraint";
  out["name"] = c.name;
  write_sets(c.sets, c.targets);
  if (!c.odds.empty()) {
    out["odds"] = Json::array();
    for (const auto& r : c.odds) {
      out["odds"].push_back({{"numerator", event_to_json(space, r.numerator)},
                             {"denominator", event_to_json(space, r.denominator)},
                             {"ratio", r.ratio.str()}});
    }
  }
  return out;
}

Json distribution_to_json(const NaiveDistribution& d) {
  Json out = Json::object();
  for (std::size_t w = 0; w < d.size(); ++w) out[d.space().label(w)] = d[w].str();
  return out;
}

Json distribution_to_json(const FloatDistribution& d) {
  Json out = Json::object();
  for (std::size_t w = 0; w < d.size(); ++w) out[d.space().label(w)] = d[w];
  return out;
}

Json car_report_to_json(const WorldSet& space, const CarReport& report) {
  Json kernel = Json::object();
  for (std::size_t w = 0; w < report.kernel_values.size(); ++w) {
    kernel[space.label(w)] = report.kernel_values[w] ? Json(report.kernel_values[w]->str()) : Json(nullptr);
  }
  Json out{{"observation", report.observation}, {"holds", report.holds}, {"kernel_values", std::move(kernel)}};
  out["witness"] = report.witness ? Json::array({space.label(report.witness->first), space.label(report.witness->second)})
                                  : Json(nullptr);
  out["posterior_check"] = report.posterior_check;
  return out;
}

Json fixed_point_to_json(const FixedPointResult& result) {
  return {{"compatible", result.compatible},
          {"best_prior", distribution_to_json(result.best_prior)},
          {"residual", result.residual},
          {"restarts_used", result.restarts_used},
          {"certificate_accurate", result.certificate_accurate},
          {"certificate_gap", result.certificate_gap}};
}

Json scenario_to_json(const ScenarioSpec& spec) {
  Json out;
  if (!spec.name.empty()) out["name"] = spec.name;
  if (!spec.parameters.empty()) {
    out["parameters"] = Json::object();
    for (const auto& [k, v] : spec.parameters) out["parameters"][k] = v.str();
  }
  const NaiveDistribution prior = std::holds_alternative<Protocol>(spec.build)
                                      ? marginal_worlds(std::get<Protocol>(spec.build))
                                      : std::get<PriorAndObservations>(spec.build).prior;
  const ObservationAlphabet& alphabet = std::holds_alternative<Protocol>(spec.build)
                                            ? std::get<Protocol>(spec.build).alphabet()
                                            : std::get<PriorAndObservations>(spec.build).observations;
  const WorldSet& space = prior.space();
  out["worlds"] = space.labels();
  out["prior"] = distribution_to_json(prior);
  out["observations"] = Json::array();
  for (const auto& o : alphabet.items()) out["observations"].push_back(observation_to_json(space, o));

  if (const auto* p = std::get_if<Protocol>(&spec.build)) {
    const auto kernel_of = [&](std::size_t o) { return kernel_column(*p, o); };
    std::vector<std::vector<std::optional<Rational>>> columns;
    for (std::size_t o = 0; o < alphabet.size(); ++o) columns.push_back(kernel_of(o));
    out["kernel"] = Json::object();
    for (std::size_t w = 0; w < space.size(); ++w) {
      Json row = Json::object();
      if (prior[w].is_zero()) {
        std::size_t pick = 0;
        for (std::size_t o = 0; o < alphabet.size(); ++o) {
          const auto* e = std::get_if<EventObservation>(&alphabet[o]);
          if (!e || e->set.contains(w)) {
            pick = o;
            break;
          }
        }
        row[name_of(alphabet[pick])] = "1/1";
      } else {
        for (std::size_t o = 0; o < alphabet.size(); ++o) {
          if (!columns[o][w]->is_zero()) row[name_of(alphabet[o])] = columns[o][w]->str();
        }
      }
      out["kernel"][space.label(w)] = std::move(row);
    }
  }
  return out;
}

}  // namespace carlab
