#ifndef POOLING_TOPOLOGY_HPP_
#define POOLING_TOPOLOGY_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Core>

namespace pooling {

using Point2 = Eigen::Vector2d;

/// Destination on the unit segment, served from a common origin at 0.
struct OneD {
  double value = 0.0;
};

/// Pick-up and drop-off location in the plane.
struct TwoD {
  Point2 origin = Point2::Zero();
  Point2 dest = Point2::Zero();
};

using JobType = std::variant<OneD, TwoD>;

/// Reward topologies. The first three live on [0,1]; Pool2D is the planar
/// pick-up/drop-off pooling saving.
enum class Topology {
  MinCommonOrigin,  // r = min(a, b)
  Proximity,        // r = 1 - |a - b|
  Separation,       // r = |a - b|
  Pool2D,           // distance saved by one pooled trip over two solo trips
};

std::string_view to_string(Topology top);
Topology parse_topology(std::string_view name);

inline bool is_planar(Topology top) { return top == Topology::Pool2D; }

/// True when the job type has the dimensionality the topology expects.
bool compatible(Topology top, const JobType& type);

/// Pairwise pooling reward. Symmetric; only Pool2D can be negative.
/// Throws std::invalid_argument on a dimensionality mismatch.
double reward(Topology top, const JobType& a, const JobType& b);

/// Half of the best reward the job could ever earn, sup_b r(a,b) / 2.
double potential(Topology top, const JobType& a);

/// Length of the job's solo trip. Only defined for the pooling topologies
/// (MinCommonOrigin and Pool2D).
std::optional<double> solo_distance(Topology top, const JobType& a);

/// Length of the shortest pooled route serving both planar jobs, with both
/// pick-ups before either drop-off.
double pooled_route_length(const TwoD& a, const TwoD& b);

}  // namespace pooling

#endif
