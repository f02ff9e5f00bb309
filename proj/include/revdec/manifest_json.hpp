/* Copyright (C) 2026 revdec authors
 * This program is Licensed under the Apache License, Version 2.0
 * (the "License"); you may not use this file except in compliance
 * with the License. You may obtain a copy of the License at
 *   http://www.apache.org/licenses/LICENSE-2.0
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. See accompanying LICENSE file.
 */
#pragma once

#include <string>

#include "json.hpp"
#include "revdec/partition.hpp"

namespace revdec {

inline nlohmann::json manifest_to_json(const PartitionManifest& man) {
  nlohmann::json boxes = nlohmann::json::array();
  for (const auto& b : man.boxes) {
    const auto& fp = b.footprint;
    const auto& fr = b.frame;
    nlohmann::json jb;
    jb["footprint"] = {{"alpha1", fp.angular.lo}, {"alpha2", fp.angular.hi},
                       {"r1", fp.radial.lo},      {"r2", fp.radial.hi},
                       {"case", to_string(fp.kind)}, {"k", fp.k},
                       {"n", fp.n}};
    jb["frame"] = {
        {"center", {fr.center.x, fr.center.y, fr.center.z}},
        {"axes",
         {fr.axis[0].x, fr.axis[0].y, fr.axis[0].z, fr.axis[1].x,
          fr.axis[1].y, fr.axis[1].z, fr.axis[2].x, fr.axis[2].y,
          fr.axis[2].z}},
        {"halfwidths", {fr.half[0], fr.half[1], fr.half[2]}}};
    boxes.push_back(std::move(jb));
  }
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [key, value] : man.counts) counts[key] = value;
  return nlohmann::json{{"profile", man.profile_id},
                        {"delta", man.delta},
                        {"boxes", std::move(boxes)},
                        {"counts", std::move(counts)}};
}

inline PieceCase piece_case_from_string(const std::string& s) {
  if (s == "nondegenerate") return PieceCase::Nondegenerate;
  if (s == "plate") return PieceCase::Plate;
  if (s == "quasi-torus") return PieceCase::QuasiTorus;
  if (s == "perturbed-cone") return PieceCase::PerturbedCone;
  throw validation_error("unknown piece case '" + s + "'");
}

inline PartitionManifest manifest_from_json(const nlohmann::json& j) {
  PartitionManifest man;
  man.profile_id = j.at("profile").get<std::string>();
  man.delta = j.at("delta").get<double>();
  for (const auto& jb : j.at("boxes")) {
    PartitionBox b;
    const auto& fp = jb.at("footprint");
    b.footprint.angular = {fp.at("alpha1").get<double>(),
                           fp.at("alpha2").get<double>()};
    b.footprint.radial = {fp.at("r1").get<double>(), fp.at("r2").get<double>()};
    b.footprint.kind = piece_case_from_string(fp.at("case").get<std::string>());
    b.footprint.k = fp.at("k").get<int>();
    b.footprint.n = fp.at("n").get<int>();
    const auto& fr = jb.at("frame");
    const auto& c = fr.at("center");
    b.frame.center = {c.at(0).get<double>(), c.at(1).get<double>(),
                      c.at(2).get<double>()};
    const auto& ax = fr.at("axes");
    for (int i = 0; i < 3; ++i)
      b.frame.axis[i] = {ax.at(3 * i).get<double>(),
                         ax.at(3 * i + 1).get<double>(),
                         ax.at(3 * i + 2).get<double>()};
    const auto& h = fr.at("halfwidths");
    for (int i = 0; i < 3; ++i) b.frame.half[i] = h.at(i).get<double>();
    man.boxes.push_back(std::move(b));
  }
  if (j.contains("counts"))
    for (const auto& [key, value] : j.at("counts").items())
      man.counts[key] = value.get<std::size_t>();
  return man;
}

}  // namespace revdec
