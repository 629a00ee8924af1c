#include "pooling/io.hpp"

#include <fstream>
#include <ostream>

namespace pooling {

namespace {

Json point_json(const Point2& p) { return Json::array({p.x(), p.y()}); }

Point2 point_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw DataError("a point must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json pairs_json(const std::vector<JobPair>& pairs) {
  Json out = Json::array();
  for (const auto& [a, b] : pairs) out.push_back(Json::array({a + 1, b + 1}));
  return out;
}

Json ids_json(const std::vector<JobIndex>& ids) {
  Json out = Json::array();
  for (JobIndex j : ids) out.push_back(j + 1);
  return out;
}

}  // namespace

Json to_json(const Criticality& crit) {
  if (const auto* cw = std::get_if<CountWindow>(&crit)) return {{"kind", "count"}, {"d", cw->d}};
  return {{"kind", "time"}, {"window", std::get<TimeWindow>(crit).seconds}};
}

Criticality criticality_from_json(const Json& doc) {
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "count") return CountWindow{doc.at("d").get<int>()};
  if (kind == "time") return TimeWindow{doc.at("window").get<double>()};
  throw DataError("unknown criticality kind: " + kind);
}

Json to_json(const JobType& type) {
  if (const auto* v = std::get_if<OneD>(&type)) return {{"theta", v->value}};
  const auto& t = std::get<TwoD>(type);
  return {{"origin", point_json(t.origin)}, {"dest", point_json(t.dest)}};
}

Json to_json(const Instance& inst) {
  Json arrivals = Json::array();
  for (const auto& a : inst.arrivals()) {
    Json row = {{"id", a.id}};
    if (a.timestamp) row["t"] = *a.timestamp;
    row.update(to_json(a.type));
    arrivals.push_back(std::move(row));
  }
  return {{"topology", std::string(to_string(inst.topology()))},
          {"criticality", to_json(inst.criticality())},
          {"seed", inst.seed()},
          {"arrivals", std::move(arrivals)}};
}

Instance instance_from_json(const Json& doc) {
  try {
    const auto top = parse_topology(doc.at("topology").get<std::string>());
    const auto crit = criticality_from_json(doc.at("criticality"));
    const auto seed = doc.value("seed", std::uint64_t{0});
    std::vector<Arrival> arrivals;
    for (const auto& row : doc.at("arrivals")) {
      Arrival a;
      a.id = row.at("id").get<int>();
      if (row.contains("t")) a.timestamp = row["t"].get<double>();
      if (row.contains("theta")) {
        a.type = OneD{row["theta"].get<double>()};
      } else {
        a.type = TwoD{point_from(row.at("origin")), point_from(row.at("dest"))};
      }
      arrivals.push_back(std::move(a));
    }
    return Instance(std::move(arrivals), crit, top, seed);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed instance document: ") + e.what());
  }
}

Json to_json(const MatchingSolution& sol) {
  return {{"value", sol.value}, {"pairs", pairs_json(sol.pairs)}};
}

Json to_json(const LPSolution& sol, const EdgeSet& edges) {
  Json x = Json::array();
  for (std::size_t e = 0; e < edges.edges.size(); ++e) {
    const double v = sol.primal_x[static_cast<Eigen::Index>(e)];
    if (v > 1e-12) {
      x.push_back({{"pair", Json::array({edges.edges[e].j + 1, edges.edges[e].k + 1})}, {"x", v}});
    }
  }
  Json lambda = Json::array();
  for (Eigen::Index j = 0; j < sol.dual_lambda.size(); ++j) lambda.push_back(sol.dual_lambda[j]);
  return {{"objective", sol.objective},
          {"dual_objective", sol.dual_objective},
          {"iterations", sol.iterations},
          {"lambda", std::move(lambda)},
          {"primal", std::move(x)}};
}

Json to_json(const PriceTable& table) {
  Json scheme;
  if (const auto* g = std::get_if<TwoDGrid>(&table.scheme())) {
    scheme = {{"kind", "two-d-grid"}, {"level", g->level}};
  } else {
    scheme = {{"kind", "one-d-uniform"}, {"cells", std::get<OneDUniform>(table.scheme()).cells}};
  }
  Json levels = Json::array();
  for (std::size_t i = 0; i < table.levels().size(); ++i) {
    Json cells = Json::array();
    for (const auto& [id, stat] : table.levels()[i]) {
      cells.push_back(Json::array({id, stat.mean, stat.count}));
    }
    levels.push_back({{"resolution", PriceTable::resolution(table.scheme(), static_cast<int>(i))},
                      {"cells", std::move(cells)}});
  }
  return {{"scheme", std::move(scheme)},
          {"frame", {{"x0", table.frame().x0}, {"y0", table.frame().y0}, {"side", table.frame().side}}},
          {"global_mean", table.global_mean()},
          {"levels", std::move(levels)}};
}

PriceTable price_table_from_json(const Json& doc) {
  try {
    const auto& s = doc.at("scheme");
    const auto kind = s.at("kind").get<std::string>();
    CellScheme scheme;
    if (kind == "two-d-grid") {
      scheme = TwoDGrid{s.at("level").get<int>()};
    } else if (kind == "one-d-uniform") {
      scheme = OneDUniform{s.at("cells").get<int>()};
    } else {
      throw DataError("unknown cell scheme: " + kind);
    }
    const auto& f = doc.at("frame");
    GridFrame frame{f.at("x0").get<double>(), f.at("y0").get<double>(), f.at("side").get<double>()};
    std::vector<std::map<std::uint64_t, CellStat>> levels;
    for (const auto& level : doc.at("levels")) {
      auto& cells = levels.emplace_back();
      for (const auto& c : level.at("cells")) {
        cells[c.at(0).get<std::uint64_t>()] = {c.at(1).get<double>(), c.at(2).get<int>()};
      }
    }
    return PriceTable(scheme, frame, std::move(levels), doc.at("global_mean").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed price table: ") + e.what());
  }
}

Json to_json(const PolicyDecision& decision) {
  return std::visit(
      [](const auto& d) -> Json {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, MatchWith>) {
          return {{"type", "match"}, {"with", d.k + 1}};
        } else if constexpr (std::is_same_v<D, DispatchAlone>) {
          return {{"type", "solo"}};
        } else {
          return {{"type", "batch"}, {"pairs", pairs_json(d.pairs)}, {"solos", ids_json(d.solos)}};
        }
      },
      decision);
}

Json to_json(const TraceEvent& event) {
  Json out = {{"event", std::string(to_string(event.kind))}, {"clock", event.clock}};
  if (event.job >= 0) out["job"] = event.job + 1;
  if (event.kind != EventKind::Arrival) out["available"] = ids_json(event.available);
  if (event.decision) out["decision"] = to_json(*event.decision);
  return out;
}

void write_trace_jsonl(std::ostream& os, const MatchingOutcome& outcome) {
  for (const auto& e : outcome.trace) os << to_json(e).dump() << '\n';
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace pooling
