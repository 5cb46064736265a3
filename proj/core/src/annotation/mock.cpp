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

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "medico/annotation/annotation.h"
#include "medico/error.h"
#include "medico/vocab.h"

namespace medico::annotation {
namespace {

// Assumed volume extent in voxels (x, y, z); z runs head to foot.
constexpr double kDims[3] = {512, 512, 400};

struct Nominal {
  const char* name;
  double x, y, z;
};

// Rough normalized positions for a neck-to-thigh CT; jittered per seed.
constexpr std::array<Nominal, 19> kLandmarks = {{
    {"BifurcationOfTrachea", 0.50, 0.45, 0.25},
    {"ApexOfLeftLung", 0.62, 0.45, 0.10},
    {"ApexOfRightLung", 0.38, 0.45, 0.10},
    {"JugularNotch", 0.50, 0.25, 0.08},
    {"XiphoidProcess", 0.50, 0.22, 0.40},
    {"ApexOfHeart", 0.62, 0.30, 0.37},
    {"AorticArch", 0.48, 0.40, 0.20},
    {"AorticBifurcation", 0.50, 0.45, 0.65},
    {"DomeOfLiver", 0.38, 0.45, 0.38},
    {"InferiorTipOfLiver", 0.35, 0.45, 0.60},
    {"UpperPoleOfSpleen", 0.68, 0.60, 0.42},
    {"LowerPoleOfSpleen", 0.70, 0.55, 0.54},
    {"UpperPoleOfLeftKidney", 0.62, 0.65, 0.50},
    {"LowerPoleOfLeftKidney", 0.63, 0.62, 0.66},
    {"UpperPoleOfRightKidney", 0.38, 0.65, 0.52},
    {"LowerPoleOfRightKidney", 0.37, 0.62, 0.68},
    {"HeadOfLeftFemur", 0.66, 0.50, 0.90},
    {"HeadOfRightFemur", 0.34, 0.50, 0.90},
    {"PubicSymphysis", 0.50, 0.30, 0.92},
}};

struct NominalBox {
  const char* name;
  double x, y, z, dx, dy, dz;  // center and size, normalized
};

constexpr std::array<NominalBox, 7> kOrgans = {{
    {"Liver", 0.36, 0.45, 0.48, 0.28, 0.30, 0.22},
    {"Spleen", 0.68, 0.58, 0.48, 0.10, 0.14, 0.12},
    {"LeftLung", 0.64, 0.45, 0.22, 0.22, 0.35, 0.30},
    {"RightLung", 0.36, 0.45, 0.22, 0.24, 0.35, 0.30},
    {"LeftKidney", 0.63, 0.64, 0.58, 0.08, 0.10, 0.16},
    {"RightKidney", 0.37, 0.64, 0.60, 0.08, 0.10, 0.16},
    {"UrinaryBladder", 0.50, 0.40, 0.86, 0.12, 0.12, 0.08},
}};

constexpr std::string_view kParserUser = "volume-parser";
constexpr std::string_view kParserNote = "inserted by the automatic volume parser (mock)";

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : rng_(seed) {}
  // Uniform in [0, 1) with 53-bit resolution.
  double Unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  // 0.5 + k * 2^-53 for k < 2^52: exactly representable and always < 1.
  double Confidence() { return 0.5 + static_cast<double>(rng_() >> 12) * 0x1.0p-53; }
  double Jitter(double amplitude) { return (2 * Unit() - 1) * amplitude; }

 private:
  std::mt19937_64 rng_;
};

Term Fma(std::string_view local) { return Term::Iri("urn:fma:" + std::string(local)); }

int Clamp(double v, int lo, int hi) {
  return std::clamp(static_cast<int>(std::lround(v)), lo, hi);
}

}  // namespace

const std::vector<Term>& MockLandmarkNames() {
  static const std::vector<Term> names = [] {
    std::vector<Term> out;
    for (const auto& l : kLandmarks) out.push_back(Fma(l.name));
    return out;
  }();
  return names;
}

const std::vector<Term>& MockOrganNames() {
  static const std::vector<Term> names = [] {
    std::vector<Term> out;
    for (const auto& o : kOrgans) out.push_back(Fma(o.name));
    return out;
  }();
  return names;
}

MockResult AnnotationService::MockAutoAnnotate(const Term& volume, std::uint64_t seed) {
  const std::uint64_t key = SplitMix(Fnv1a(volume.value()) ^ SplitMix(seed));
  auto id_for = [&](std::string_view kind, std::size_t index) {
    return Term::Iri(vocab::MintedIri(
        kind, fmt::format("mock-{:016x}", SplitMix(key + index * 0x100 + kind.size()))));
  };
  std::string timestamp = FormatTimestamp(clock_());

  return store_.Write([&](Store& s) {
    if (!s.Contains({volume, vocab::Type(), vocab::Series()})) {
      throw Error(ErrorCode::kNotFound, "unknown series " + volume.value());
    }
    MockResult result;

    // Same volume and seed again: hand back what is already stored.
    if (s.Contains({id_for("landmark", 0), vocab::Type(), vocab::Landmark()})) {
      for (std::size_t i = 0; i < kLandmarks.size(); ++i) {
        result.landmarks.push_back(*ReadLandmark(s, ontology_, id_for("landmark", i)));
      }
      for (std::size_t i = 0; i < kOrgans.size(); ++i) {
        result.regions.push_back(*ReadRegion(s, id_for("region", i)));
        result.organ_annotations.push_back(
            *ReadAnnotation(s, ontology_, id_for("annotation", i)));
      }
      return result;
    }

    Stream rng(key);
    std::vector<Triple> batch;
    for (std::size_t i = 0; i < kLandmarks.size(); ++i) {
      const Nominal& n = kLandmarks[i];
      Point3 p{static_cast<double>(Clamp((n.x + rng.Jitter(0.02)) * kDims[0], 0, 511)),
               static_cast<double>(Clamp((n.y + rng.Jitter(0.02)) * kDims[1], 0, 511)),
               static_cast<double>(Clamp((n.z + rng.Jitter(0.02)) * kDims[2], 0, 399))};
      Landmark lm{id_for("landmark", i), ontology_.Get(Fma(n.name)), p, volume,
                  rng.Confidence()};
      batch.emplace_back(lm.id, vocab::Type(), vocab::Landmark());
      batch.emplace_back(lm.id, vocab::LandmarkName(), lm.name.iri);
      batch.emplace_back(lm.id, vocab::Position(),
                         Term::Literal(fmt::format("{},{},{}", FormatDecimal(p.x),
                                                   FormatDecimal(p.y), FormatDecimal(p.z))));
      batch.emplace_back(lm.id, vocab::InVolume(), volume);
      batch.emplace_back(lm.id, vocab::Confidence(),
                         Term::Literal(FormatDecimal(lm.confidence),
                                       std::string(vocab::kXsd) + "decimal"));
      result.landmarks.push_back(std::move(lm));
    }

    for (std::size_t i = 0; i < kOrgans.size(); ++i) {
      const NominalBox& o = kOrgans[i];
      double size[3] = {o.dx * kDims[0] * (1 + rng.Jitter(0.1)),
                        o.dy * kDims[1] * (1 + rng.Jitter(0.1)),
                        o.dz * kDims[2] * (1 + rng.Jitter(0.1))};
      double center[3] = {(o.x + rng.Jitter(0.02)) * kDims[0],
                          (o.y + rng.Jitter(0.02)) * kDims[1],
                          (o.z + rng.Jitter(0.02)) * kDims[2]};
      Box3d box;
      box.dx = std::max(1, static_cast<int>(std::lround(size[0])));
      box.dy = std::max(1, static_cast<int>(std::lround(size[1])));
      box.dz = std::max(1, static_cast<int>(std::lround(size[2])));
      box.x = Clamp(center[0] - box.dx / 2.0, 0, 511);
      box.y = Clamp(center[1] - box.dy / 2.0, 0, 511);
      box.z = Clamp(center[2] - box.dz / 2.0, 0, 399);

      Region region{id_for("region", i), volume, box};
      batch.emplace_back(region.id, vocab::Type(), vocab::ImageRegion());
      batch.emplace_back(region.id, vocab::Type(), vocab::VolumeRegion());
      batch.emplace_back(region.id, vocab::RegionOf(), volume);
      batch.emplace_back(region.id, vocab::Geometry(), Term::Literal(FormatGeometry(box)));

      Payload payload;
      payload.anatomy = Fma(o.name);
      payload.free_text_comment = std::string(kParserNote);
      payload.confidence = rng.Confidence();
      payload.user = std::string(kParserUser);
      payload.origin = Origin::kAutomatic;
      Built b = Build(id_for("annotation", i), region.id, payload, timestamp);
      batch.insert(batch.end(), b.triples.begin(), b.triples.end());
      result.regions.push_back(std::move(region));
      result.organ_annotations.push_back(std::move(b.annotation));
    }
    Commit(s, batch);
    return result;
  });
}

}  // namespace medico::annotation
