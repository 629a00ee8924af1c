#include "pooling/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pooling {

namespace {

const OneD& as_line(Topology top, const JobType& t) {
  const auto* v = std::get_if<OneD>(&t);
  if (v == nullptr) {
    throw std::invalid_argument(std::string(to_string(top)) + " expects one-dimensional job types");
  }
  return *v;
}

const TwoD& as_plane(const JobType& t) {
  const auto* v = std::get_if<TwoD>(&t);
  if (v == nullptr) {
    throw std::invalid_argument("pool-2d expects two-dimensional job types");
  }
  return *v;
}

}  // namespace

std::string_view to_string(Topology top) {
  switch (top) {
    case Topology::MinCommonOrigin:
      return "min-common-origin";
    case Topology::Proximity:
      return "proximity";
    case Topology::Separation:
      return "separation";
    case Topology::Pool2D:
      return "pool-2d";
  }
  return "unknown";
}

Topology parse_topology(std::string_view name) {
  for (auto top : {Topology::MinCommonOrigin, Topology::Proximity, Topology::Separation,
                   Topology::Pool2D}) {
    if (name == to_string(top)) return top;
  }
  throw std::invalid_argument("unknown topology: " + std::string(name));
}

bool compatible(Topology top, const JobType& type) {
  return is_planar(top) ? std::holds_alternative<TwoD>(type) : std::holds_alternative<OneD>(type);
}

double pooled_route_length(const TwoD& a, const TwoD& b) {
  const double middle = std::min({(a.dest - a.origin).norm(), (b.dest - a.origin).norm(),
                                  (a.dest - b.origin).norm(), (b.dest - b.origin).norm()});
  return (a.origin - b.origin).norm() + middle + (a.dest - b.dest).norm();
}

double reward(Topology top, const JobType& a, const JobType& b) {
  switch (top) {
    case Topology::MinCommonOrigin:
      return std::min(as_line(top, a).value, as_line(top, b).value);
    case Topology::Proximity:
      return 1.0 - std::abs(as_line(top, a).value - as_line(top, b).value);
    case Topology::Separation:
      return std::abs(as_line(top, a).value - as_line(top, b).value);
    case Topology::Pool2D: {
      const auto& x = as_plane(a);
      const auto& y = as_plane(b);
      return (x.dest - x.origin).norm() + (y.dest - y.origin).norm() - pooled_route_length(x, y);
    }
  }
  throw std::invalid_argument("unknown topology");
}

double potential(Topology top, const JobType& a) {
  switch (top) {
    case Topology::MinCommonOrigin:
      return as_line(top, a).value / 2.0;
    case Topology::Proximity:
      as_line(top, a);
      return 0.5;
    case Topology::Separation: {
      const double v = as_line(top, a).value;
      return std::max(v, 1.0 - v) / 2.0;
    }
    case Topology::Pool2D: {
      const auto& x = as_plane(a);
      return (x.dest - x.origin).norm() / 2.0;
    }
  }
  throw std::invalid_argument("unknown topology");
}

std::optional<double> solo_distance(Topology top, const JobType& a) {
  switch (top) {
    case Topology::MinCommonOrigin:
      if (const auto* v = std::get_if<OneD>(&a)) return v->value;
      return std::nullopt;
    case Topology::Pool2D:
      if (const auto* v = std::get_if<TwoD>(&a)) return (v->dest - v->origin).norm();
      return std::nullopt;
    case Topology::Proximity:
    case Topology::Separation:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace pooling
