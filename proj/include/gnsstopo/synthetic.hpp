// Copyright 2026 The gnsstopo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scenario generators: small random visibility graphs, and a geometric
// constellation (Walker MEO shell plus IGSO and GEO satellites over three
// ground stations) sampled into fixed-visibility states.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gnsstopo/scenario_io.hpp"

namespace gnsstopo {

struct RandomScenarioOptions {
  int satellites = 7;
  int ground_stations = 1;
  int antennas_per_station = 1;
  int states = 1;
  int slots = 6;
  double p_ss = 0.4;  // satellite pair visibility probability
  double p_sg = 0.4;  // satellite to station visibility probability
  std::uint64_t seed = 1;
};

namespace detail {

inline std::vector<Node> make_nodes(int satellites, int stations, int antennas) {
  std::vector<Node> nodes;
  for (int i = 1; i <= satellites; ++i) nodes.push_back({"s" + std::to_string(i), NodeKind::satellite, ""});
  for (int g = 1; g <= stations; ++g)
    for (int a = 1; a <= antennas; ++a) {
      const std::string gs = "GS" + std::to_string(g);
      nodes.push_back({gs + "/" + std::to_string(a), NodeKind::gs_antenna, gs});
    }
  return nodes;
}

// Every other satellite carries the extra service load.
inline TrafficSpec alternate_service(const std::vector<Node>& nodes, Packets f_td, Packets f_sm) {
  TrafficSpec t{f_td, f_sm, {}, {}};
  int k = 0;
  for (const Node& n : nodes)
    if (n.kind == NodeKind::satellite && k++ % 2 == 0) t.service_nodes.push_back(n.name);
  return t;
}

}  // namespace detail

inline Scenario random_scenario(const RandomScenarioOptions& opt) {
  if (opt.satellites < 1 || opt.ground_stations < 0 || opt.antennas_per_station < 1 || opt.states < 1 ||
      opt.slots < 1)
    throw std::invalid_argument("random scenario sizes must be positive");
  std::mt19937_64 rng(opt.seed);
  std::bernoulli_distribution ss(opt.p_ss), sg(opt.p_sg);
  Scenario sc;
  sc.name = "random-" + std::to_string(opt.satellites) + "-" + std::to_string(opt.seed);
  sc.nodes = detail::make_nodes(opt.satellites, opt.ground_stations, opt.antennas_per_station);
  const std::size_t S = static_cast<std::size_t>(opt.satellites);
  const std::size_t A = static_cast<std::size_t>(opt.antennas_per_station);
  for (int s = 0; s < opt.states; ++s) {
    BinaryMatrix v(sc.nodes.size());
    for (std::size_t i = 0; i < S; ++i)
      for (std::size_t j = i + 1; j < S; ++j)
        if (ss(rng)) v.set_symmetric(i, j, 1);
    for (std::size_t i = 0; i < S; ++i)
      for (int g = 0; g < opt.ground_stations; ++g)
        if (sg(rng))
          for (std::size_t a = 0; a < A; ++a) v.set_symmetric(i, S + static_cast<std::size_t>(g) * A + a, 1);
    sc.states.emplace_back(s + 1, opt.slots, sc.nodes, std::move(v));
  }
  sc.traffic = detail::alternate_service(sc.nodes, 6, 4);
  sc.params = SystemParams{};
  return sc;
}

struct ConstellationOptions {
  int states = 288;
  int slots = 20;
  double state_seconds = 300;  // one day at the default state count
  double min_elevation_deg = 10;
  double grazing_altitude_km = 1000;  // inter-satellite rays must clear this
  int antennas_per_station = 2;
};

namespace detail {

constexpr double earth_radius_km = 6371.0;
constexpr double earth_mu = 398600.4418;
constexpr double earth_rate = 7.2921159e-5;  // rad/s
constexpr double deg = std::numbers::pi / 180.0;

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

struct Orbit {
  double radius_km;
  double inclination;
  double raan;
  double phase;  // argument of latitude at t = 0

  Vec3 position(double t) const {
    const double u = phase + std::sqrt(earth_mu / (radius_km * radius_km * radius_km)) * t;
    const double cu = std::cos(u), su = std::sin(u), cO = std::cos(raan), sO = std::sin(raan);
    const double ci = std::cos(inclination), si = std::sin(inclination);
    return {radius_km * (cO * cu - sO * su * ci), radius_km * (sO * cu + cO * su * ci), radius_km * su * si};
  }
};

// Closest approach of segment ab to the Earth's centre.
inline double segment_clearance(const Vec3& a, const Vec3& b) {
  const Vec3 d{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const double len2 = dot(d, d);
  double s = len2 > 0 ? -dot(a, d) / len2 : 0;
  s = std::clamp(s, 0.0, 1.0);
  const Vec3 p{a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2]};
  return std::sqrt(dot(p, p));
}

inline Vec3 station_position(double lat_deg, double lon_deg, double t) {
  const double lon = lon_deg * deg + earth_rate * t;
  const double lat = lat_deg * deg;
  return {earth_radius_km * std::cos(lat) * std::cos(lon), earth_radius_km * std::cos(lat) * std::sin(lon),
          earth_radius_km * std::sin(lat)};
}

inline double elevation(const Vec3& station, const Vec3& sat) {
  const Vec3 d{sat[0] - station[0], sat[1] - station[1], sat[2] - station[2]};
  const double up = dot(d, station) / std::sqrt(dot(d, d) * dot(station, station));
  return std::asin(std::clamp(up, -1.0, 1.0));
}

inline std::vector<Orbit> navigation_constellation() {
  std::vector<Orbit> out;
  const double meo = 27906, geo = 42164;
  // Walker 24/3/1 at 55 degrees.
  for (int p = 0; p < 3; ++p)
    for (int s = 0; s < 8; ++s)
      out.push_back({meo, 55 * deg, p * 120 * deg, (s * 45 + p * 15) * deg});
  // IGSO: three planes with shared ground track, raised at 118E.
  for (int k = 0; k < 3; ++k) out.push_back({geo, 55 * deg, (118 + k * 120) * deg, (-k * 120) * deg});
  // GEO at 80E, 110.5E, 140E.
  for (double lon : {80.0, 110.5, 140.0}) out.push_back({geo, 0.0, 0.0, lon * deg});
  return out;
}

}  // namespace detail

// 30 satellites and 3 ground stations; with the default two antennas per
// station the scenario has 36 nodes.
inline Scenario constellation_scenario(const ConstellationOptions& opt = {}) {
  if (opt.states < 1 || opt.slots < 1 || opt.antennas_per_station < 1)
    throw std::invalid_argument("constellation sizes must be positive");
  const auto orbits = detail::navigation_constellation();
  const std::array<std::array<double, 2>, 3> stations{{{39.9, 116.4}, {18.3, 109.5}, {39.5, 76.0}}};
  const std::size_t S = orbits.size(), A = static_cast<std::size_t>(opt.antennas_per_station);
  Scenario sc;
  sc.name = "constellation-" + std::to_string(opt.states);
  sc.nodes = detail::make_nodes(static_cast<int>(S), static_cast<int>(stations.size()), opt.antennas_per_station);
  const double clear = detail::earth_radius_km + opt.grazing_altitude_km;
  for (int s = 0; s < opt.states; ++s) {
    // Sample geometry at the middle of the state.
    const double t = (s + 0.5) * opt.state_seconds;
    std::vector<detail::Vec3> pos;
    for (const auto& o : orbits) pos.push_back(o.position(t));
    BinaryMatrix v(sc.nodes.size());
    for (std::size_t i = 0; i < S; ++i)
      for (std::size_t j = i + 1; j < S; ++j)
        if (detail::segment_clearance(pos[i], pos[j]) > clear) v.set_symmetric(i, j, 1);
    for (std::size_t g = 0; g < stations.size(); ++g) {
      const auto gs = detail::station_position(stations[g][0], stations[g][1], t);
      for (std::size_t i = 0; i < S; ++i)
        if (detail::elevation(gs, pos[i]) >= opt.min_elevation_deg * detail::deg)
          for (std::size_t a = 0; a < A; ++a) v.set_symmetric(i, S + g * A + a, 1);
    }
    sc.states.emplace_back(s + 1, opt.slots, sc.nodes, std::move(v));
  }
  sc.traffic = detail::alternate_service(sc.nodes, 6, 4);
  sc.params = SystemParams::practical();
  sc.params.gs_antennas.assign(stations.size(), opt.antennas_per_station);
  return sc;
}

}  // namespace gnsstopo
