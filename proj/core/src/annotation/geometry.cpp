// Copyright 2026 The Medico Authors.
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

#include <charconv>
#include <cmath>
#include <regex>
#include <set>

#include <fmt/format.h>

#include "medico/annotation/annotation.h"
#include "medico/error.h"

namespace medico::annotation {
namespace {

[[noreturn]] void Bad(std::string_view text, std::string_view why) {
  throw Error(ErrorCode::kValidation,
              fmt::format("invalid geometry \"{}\": {}", text, why));
}

int ParseInt(std::string_view whole, std::string_view part) {
  int value = 0;
  auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
  if (ec != std::errc() || end != part.data() + part.size() || part.empty()) {
    Bad(whole, fmt::format("\"{}\" is not an integer", part));
  }
  return value;
}

std::vector<std::string_view> Split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t at = text.find(sep, start);
    out.push_back(text.substr(start, at - start));
    if (at == std::string_view::npos) return out;
    start = at + 1;
  }
}

std::vector<int> Ints(std::string_view whole, std::string_view body,
                      std::size_t expected) {
  auto parts = Split(body, ',');
  if (parts.size() != expected) {
    Bad(whole, fmt::format("expected {} comma-separated integers", expected));
  }
  std::vector<int> out;
  for (auto p : parts) out.push_back(ParseInt(whole, p));
  return out;
}

}  // namespace

std::string FormatGeometry(const Geometry& geometry) {
  if (const auto* r = std::get_if<Rect>(&geometry)) {
    return fmt::format("rect:{},{},{},{}", r->x, r->y, r->width, r->height);
  }
  if (const auto* b = std::get_if<Box3d>(&geometry)) {
    return fmt::format("box:{},{},{},{},{},{}", b->x, b->y, b->z, b->dx, b->dy, b->dz);
  }
  std::string out = "poly:";
  const auto& points = std::get<Polygon>(geometry).points;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0) out += ';';
    out += fmt::format("{} {}", points[i].first, points[i].second);
  }
  return out;
}

Geometry ParseGeometry(std::string_view text) {
  Geometry g;
  if (text.starts_with("rect:")) {
    auto v = Ints(text, text.substr(5), 4);
    g = Rect{v[0], v[1], v[2], v[3]};
  } else if (text.starts_with("box:")) {
    auto v = Ints(text, text.substr(4), 6);
    g = Box3d{v[0], v[1], v[2], v[3], v[4], v[5]};
  } else if (text.starts_with("poly:")) {
    Polygon poly;
    for (auto vertex : Split(text.substr(5), ';')) {
      auto xy = Split(vertex, ' ');
      if (xy.size() != 2) Bad(text, "polygon vertices are \"x y\"");
      poly.points.emplace_back(ParseInt(text, xy[0]), ParseInt(text, xy[1]));
    }
    g = std::move(poly);
  } else {
    Bad(text, "expected rect:, poly: or box:");
  }
  ValidateGeometry(g);
  return g;
}

void ValidateGeometry(const Geometry& geometry) {
  std::string text = FormatGeometry(geometry);
  if (const auto* r = std::get_if<Rect>(&geometry)) {
    if (r->x < 0 || r->y < 0) Bad(text, "negative origin");
    if (r->width <= 0 || r->height <= 0) Bad(text, "width and height must be positive");
  } else if (const auto* b = std::get_if<Box3d>(&geometry)) {
    if (b->x < 0 || b->y < 0 || b->z < 0) Bad(text, "negative origin");
    if (b->dx <= 0 || b->dy <= 0 || b->dz <= 0) Bad(text, "extents must be positive");
  } else {
    const auto& points = std::get<Polygon>(geometry).points;
    if (points.size() < 3) Bad(text, "a polygon needs at least 3 vertices");
    std::set<std::pair<int, int>> seen(points.begin(), points.end());
    if (seen.size() != points.size()) Bad(text, "polygon vertices must be distinct");
    for (auto [x, y] : points) {
      if (x < 0 || y < 0) Bad(text, "negative vertex");
    }
  }
}

Point3 Centroid(const Geometry& geometry) {
  if (const auto* r = std::get_if<Rect>(&geometry)) {
    return {r->x + r->width / 2.0, r->y + r->height / 2.0, 0};
  }
  if (const auto* b = std::get_if<Box3d>(&geometry)) {
    return {b->x + b->dx / 2.0, b->y + b->dy / 2.0, b->z + b->dz / 2.0};
  }
  // Vertex mean; good enough for "which annotation is closest".
  Point3 c;
  const auto& points = std::get<Polygon>(geometry).points;
  for (auto [x, y] : points) {
    c.x += x;
    c.y += y;
  }
  c.x /= static_cast<double>(points.size());
  c.y /= static_cast<double>(points.size());
  return c;
}

bool IsVolumetric(const Geometry& geometry) {
  return std::holds_alternative<Box3d>(geometry);
}

std::string_view OriginName(Origin origin) {
  return origin == Origin::kManual ? "manual" : "automatic";
}

std::optional<Origin> ParseOrigin(std::string_view name) {
  if (name == "manual") return Origin::kManual;
  if (name == "automatic") return Origin::kAutomatic;
  return std::nullopt;
}

std::string FormatTimestamp(std::chrono::system_clock::time_point t) {
  using namespace std::chrono;
  auto secs = floor<seconds>(t);
  auto day = floor<days>(secs);
  year_month_day ymd{day};
  hh_mm_ss hms{secs - day};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

std::chrono::system_clock::time_point ParseTimestamp(std::string_view text) {
  using namespace std::chrono;
  static const std::regex kPattern(
      R"((\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(?:\.(\d{1,9}))?Z)");
  std::cmatch m;
  if (!std::regex_match(text.data(), text.data() + text.size(), m, kPattern)) {
    throw Error(ErrorCode::kValidation,
                fmt::format("timestamp \"{}\" is not ISO-8601 UTC", text));
  }
  auto num = [&](int i) { return std::stoi(m[i].str()); };
  year_month_day ymd{year{num(1)}, month{static_cast<unsigned>(num(2))},
                     day{static_cast<unsigned>(num(3))}};
  if (!ymd.ok() || num(4) > 23 || num(5) > 59 || num(6) > 60) {
    throw Error(ErrorCode::kValidation,
                fmt::format("timestamp \"{}\" is out of range", text));
  }
  system_clock::time_point t = sys_days{ymd};
  t += hours{num(4)} + minutes{num(5)} + seconds{num(6)};
  if (m[7].matched) {
    std::string frac = m[7].str();
    frac.resize(9, '0');
    t += duration_cast<system_clock::duration>(nanoseconds{std::stoll(frac)});
  }
  return t;
}

Clock FixedClock(std::chrono::system_clock::time_point t) {
  return [t] { return t; };
}

std::string FormatDecimal(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc()) {
    throw Error(ErrorCode::kValidation, "cannot format decimal");
  }
  return std::string(buf, end);
}

std::string IdGenerator::Next() {
  std::uint64_t hi, lo;
  {
    std::lock_guard lock(mu_);
    hi = rng_();
    lo = rng_();
  }
  hi = (hi & ~0xF000ULL) | 0x4000ULL;                  // version 4
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;  // RFC 4122 variant
  return fmt::format("{:08x}-{:04x}-{:04x}-{:04x}-{:012x}", hi >> 32, (hi >> 16) & 0xFFFF,
                     hi & 0xFFFF, lo >> 48, lo & 0xFFFFFFFFFFFFULL);
}

}  // namespace medico::annotation
