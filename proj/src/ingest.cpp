#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "pooling/instance.hpp"

namespace pooling {

namespace {

constexpr double kEarthRadiusMeters = 6371008.8;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> parse_digits(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Row {
  int line = 0;
  std::string id;
  double time = 0.0;
  double ox = 0.0, oy = 0.0, dx = 0.0, dy = 0.0;
};

bool id_less(const std::string& a, const std::string& b) {
  long long x = 0;
  long long y = 0;
  const auto ra = std::from_chars(a.data(), a.data() + a.size(), x);
  const auto rb = std::from_chars(b.data(), b.data() + b.size(), y);
  const bool na = ra.ec == std::errc() && ra.ptr == a.data() + a.size();
  const bool nb = rb.ec == std::errc() && rb.ptr == b.data() + b.size();
  if (na && nb) return x < y;
  if (na != nb) return na;  // numeric ids first
  return a < b;
}

}  // namespace

std::optional<double> parse_timestamp(std::string_view text) {
  if (auto v = parse_double(text)) return v;
  // YYYY-MM-DD[T ]HH:MM:SS[.fff][Z|+HH:MM|-HH:MM]
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  const auto year = parse_digits(text.substr(0, 4));
  const auto month = parse_digits(text.substr(5, 2));
  const auto day = parse_digits(text.substr(8, 2));
  const auto hour = parse_digits(text.substr(11, 2));
  const auto minute = parse_digits(text.substr(14, 2));
  const auto second = parse_digits(text.substr(17, 2));
  if (!year || !month || !day || !hour || !minute || !second) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*year}, std::chrono::month{unsigned(*month)},
                                        std::chrono::day{unsigned(*day)}};
  if (!ymd.ok() || *hour > 23 || *minute > 59 || *second > 60) return std::nullopt;
  double t = static_cast<double>(std::chrono::sys_days{ymd}.time_since_epoch().count()) * 86400.0 +
             *hour * 3600.0 + *minute * 60.0 + *second;
  std::string_view rest = text.substr(19);
  if (!rest.empty() && rest[0] == '.') {
    std::size_t k = 1;
    while (k < rest.size() && std::isdigit(static_cast<unsigned char>(rest[k]))) ++k;
    if (k == 1) return std::nullopt;
    const auto frac = parse_double(std::string("0") + std::string(rest.substr(0, k)));
    if (!frac) return std::nullopt;
    t += *frac;
    rest = rest.substr(k);
  }
  if (rest.empty() || rest == "Z") return t;
  if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':') {
    const auto oh = parse_digits(rest.substr(1, 2));
    const auto om = parse_digits(rest.substr(4, 2));
    if (!oh || !om || *oh > 23 || *om > 59) return std::nullopt;
    const double offset = *oh * 3600.0 + *om * 60.0;
    return rest[0] == '+' ? t - offset : t + offset;
  }
  return std::nullopt;
}

IngestResult ingest_orders_csv(const std::string& path, double window_seconds,
                               PlanarProjection projection, bool strict) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestError(path + " is empty");
  const auto header = split_csv_line(line);
  std::map<std::string, int> col;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) col[header[i]] = i;

  auto find_col = [&](std::initializer_list<const char*> names) -> int {
    for (const char* n : names) {
      if (const auto it = col.find(n); it != col.end()) return it->second;
    }
    return -1;
  };
  const int c_id = find_col({"order_id"});
  const int c_time = find_col({"order_time"});
  const int c_ox = find_col({"origin_x", "origin_lng"});
  const int c_oy = find_col({"origin_y", "origin_lat"});
  const int c_dx = find_col({"dest_x", "dest_lng"});
  const int c_dy = find_col({"dest_y", "dest_lat"});
  std::vector<std::string> missing;
  if (c_id < 0) missing.emplace_back("order_id");
  if (c_time < 0) missing.emplace_back("order_time");
  if (c_ox < 0) missing.emplace_back("origin_x|origin_lng");
  if (c_oy < 0) missing.emplace_back("origin_y|origin_lat");
  if (c_dx < 0) missing.emplace_back("dest_x|dest_lng");
  if (c_dy < 0) missing.emplace_back("dest_y|dest_lat");
  if (!missing.empty()) {
    std::string msg = path + ": missing columns";
    for (const auto& m : missing) msg += " " + m;
    throw IngestError(msg);
  }
  const bool geographic_header = col.count("origin_lng") > 0 || col.count("origin_lat") > 0;
  const bool project = projection == PlanarProjection::Equirectangular ||
                       (projection == PlanarProjection::Auto && geographic_header);

  std::vector<Row> rows;
  std::vector<RejectedRow> rejected;
  std::set<std::string> seen;
  int lineno = 1;
  const int needed = std::max({c_id, c_time, c_ox, c_oy, c_dx, c_dy}) + 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_csv_line(line);
    if (static_cast<int>(f.size()) < needed) {
      rejected.push_back({lineno, "too few fields"});
      continue;
    }
    Row r;
    r.line = lineno;
    r.id = f[c_id];
    if (r.id.empty()) {
      rejected.push_back({lineno, "empty order_id"});
      continue;
    }
    const auto t = parse_timestamp(f[c_time]);
    if (!t) {
      rejected.push_back({lineno, "unparsable order_time '" + f[c_time] + "'"});
      continue;
    }
    r.time = *t;
    const auto ox = parse_double(f[c_ox]);
    const auto oy = parse_double(f[c_oy]);
    const auto dx = parse_double(f[c_dx]);
    const auto dy = parse_double(f[c_dy]);
    if (!ox || !oy || !dx || !dy) {
      rejected.push_back({lineno, "non-numeric or non-finite coordinate"});
      continue;
    }
    if (project && (std::abs(*oy) > 90.0 || std::abs(*dy) > 90.0 || std::abs(*ox) > 180.0 ||
                    std::abs(*dx) > 180.0)) {
      rejected.push_back({lineno, "longitude/latitude out of range"});
      continue;
    }
    if (!seen.insert(r.id).second) {
      rejected.push_back({lineno, "duplicate order_id " + r.id});
      continue;
    }
    r.ox = *ox;
    r.oy = *oy;
    r.dx = *dx;
    r.dy = *dy;
    rows.push_back(std::move(r));
  }
  if (strict && !rejected.empty()) {
    throw IngestError(path + ": " + std::to_string(rejected.size()) + " rejected rows", rejected);
  }
  if (rows.empty()) throw IngestError(path + ": no valid rows", rejected);

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.time != b.time) return a.time < b.time;
    return id_less(a.id, b.id);
  });

  double lng0 = 0.0;
  double lat0 = 0.0;
  if (project) {
    for (const auto& r : rows) {
      lng0 += r.ox + r.dx;
      lat0 += r.oy + r.dy;
    }
    lng0 /= 2.0 * static_cast<double>(rows.size());
    lat0 /= 2.0 * static_cast<double>(rows.size());
  }
  const double rad = std::numbers::pi / 180.0;
  auto planar = [&](double x, double y) -> Point2 {
    if (!project) return {x, y};
    return {kEarthRadiusMeters * (x - lng0) * rad * std::cos(lat0 * rad),
            kEarthRadiusMeters * (y - lat0) * rad};
  };

  std::vector<Arrival> arrivals;
  arrivals.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    arrivals.push_back(
        {static_cast<int>(i) + 1, TwoD{planar(r.ox, r.oy), planar(r.dx, r.dy)}, r.time});
  }
  return {Instance(std::move(arrivals), TimeWindow{window_seconds}, Topology::Pool2D), rejected};
}

}  // namespace pooling
