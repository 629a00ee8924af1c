#ifndef POOLING_IO_HPP_
#define POOLING_IO_HPP_

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "pooling/engine.hpp"
#include "pooling/instance.hpp"
#include "pooling/offline.hpp"
#include "pooling/policies.hpp"

namespace pooling {

using Json = nlohmann::ordered_json;

/// Raised for malformed JSON documents (as opposed to bad arguments).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const Instance& inst);
Instance instance_from_json(const Json& doc);

Json to_json(const Criticality& crit);
Criticality criticality_from_json(const Json& doc);

Json to_json(const JobType& type);

Json to_json(const MatchingSolution& sol);
Json to_json(const LPSolution& sol, const EdgeSet& edges);

Json to_json(const PriceTable& table);
PriceTable price_table_from_json(const Json& doc);

Json to_json(const PolicyDecision& decision);
Json to_json(const TraceEvent& event);

/// One JSON object per trace event, one per line.
void write_trace_jsonl(std::ostream& os, const MatchingOutcome& outcome);

Json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::string& path, const Json& doc);

}  // namespace pooling

#endif
