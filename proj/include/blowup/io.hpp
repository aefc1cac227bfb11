#pragma once

// JSON file formats. All indices in files are 1-based; all numbers are
// exact integers. Unknown keys are rejected.
//
//   forest:    {"dimension": d, "points": [{"id": 1, "degree": 1, "proximate_to": []}, ...]}
//   partition: {"blocks": [[1, 3], [2]]}
//   tensor:    {"dimension": d, "size": m, "entries": [{"index": [1, 1, 2, 2], "value": -1}, ...]}
//   trace:     {"steps": [{"contracted": 3, "degree": 3, "proximate_to_current": [2]}, ...],
//               "index_maps": [[1, 2], [1]]}
//   witness:   {"equivalent": true, "permutation": [2, 1, 3]} or {"equivalent": false}

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "blowup/contraction.hpp"
#include "blowup/equivalence.hpp"
#include "blowup/error.hpp"
#include "blowup/model.hpp"
#include "blowup/tensor.hpp"

namespace blowup::io {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void schema(const std::string& what) {
  throw error(errc::invalid_input, what);
}

inline const json& object(const json& j, std::string_view what,
                          std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) schema(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto k : keys) known = known || key == k;
    if (!known) schema("unknown field \"" + key + "\" in " + std::string(what));
  }
  for (auto k : keys)
    if (!j.contains(std::string(k)))
      schema(std::string(what) + " is missing field \"" + std::string(k) + "\"");
  return j;
}

inline std::int64_t integer(const json& j, std::string_view what) {
  if (!j.is_number_integer()) schema(std::string(what) + " must be an integer");
  if (j.is_number_unsigned() && j.get<std::uint64_t>() > INT64_MAX)
    schema(std::string(what) + " is out of range");
  return j.get<std::int64_t>();
}

inline Index one_based(const json& j, std::string_view what) {
  const auto v = integer(j, what);
  if (v < 1) schema(std::string(what) + " must be a positive index");
  return static_cast<Index>(v - 1);
}

inline const json& array(const json& j, std::string_view what) {
  if (!j.is_array()) schema(std::string(what) + " must be an array");
  return j;
}

inline json indices(const std::vector<Index>& v) {
  json out = json::array();
  for (Index i : v) out.push_back(i + 1);
  return out;
}

}  // namespace detail

inline json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw error(errc::invalid_input, std::string("malformed JSON: ") + e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::invalid_input, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

// ---- forest

inline json to_json(const ProximityForest& f) {
  json points = json::array();
  for (Index i = 0; i < f.size(); ++i) {
    points.push_back({{"id", i + 1},
                      {"degree", f.degree(i)},
                      {"proximate_to", detail::indices(f.point(i).proximate_to)}});
  }
  return {{"dimension", f.dimension()}, {"points", std::move(points)}};
}

inline ProximityForest forest_from_json(const json& j) {
  detail::object(j, "forest", {"dimension", "points"});
  const auto d = detail::integer(j["dimension"], "dimension");
  if (d < INT32_MIN || d > INT32_MAX) detail::schema("dimension out of range");
  std::vector<Point> points;
  for (const auto& pj : detail::array(j["points"], "points")) {
    detail::object(pj, "point", {"id", "degree", "proximate_to"});
    const auto id = detail::integer(pj["id"], "point id");
    if (id != static_cast<std::int64_t>(points.size()) + 1)
      detail::schema("point ids must be 1..m in order; found " + std::to_string(id) +
                     " at position " + std::to_string(points.size() + 1));
    Point p;
    p.degree = detail::integer(pj["degree"], "degree");
    for (const auto& t : detail::array(pj["proximate_to"], "proximate_to"))
      p.proximate_to.push_back(detail::one_based(t, "proximate_to entry"));
    points.push_back(std::move(p));
  }
  return ProximityForest(static_cast<int>(d), std::move(points));
}

// ---- partition

inline json to_json(const MarkedPartition& p) {
  json blocks = json::array();
  for (const auto& b : p.blocks()) blocks.push_back(detail::indices(b));
  return {{"blocks", std::move(blocks)}};
}

inline MarkedPartition partition_from_json(const json& j) {
  detail::object(j, "partition", {"blocks"});
  std::vector<std::vector<Index>> blocks;
  for (const auto& bj : detail::array(j["blocks"], "blocks")) {
    std::vector<Index> block;
    for (const auto& x : detail::array(bj, "block"))
      block.push_back(detail::one_based(x, "block member"));
    blocks.push_back(std::move(block));
  }
  return MarkedPartition(std::move(blocks));
}

// ---- tensor

inline json to_json(const IntersectionTensor& t) {
  json entries = json::array();
  for (const auto& [idx, value] : t.entries())
    entries.push_back({{"index", detail::indices(idx.indices())}, {"value", value}});
  return {{"dimension", t.dimension()}, {"size", t.size()}, {"entries", std::move(entries)}};
}

inline IntersectionTensor tensor_from_json(const json& j) {
  detail::object(j, "tensor", {"dimension", "size", "entries"});
  const auto d = detail::integer(j["dimension"], "dimension");
  if (d < 1 || d > 64) detail::schema("tensor dimension must be in 1..64");
  const auto m = detail::integer(j["size"], "size");
  if (m < 0) detail::schema("tensor size must be nonnegative");
  std::vector<std::pair<std::vector<Index>, std::int64_t>> entries;
  for (const auto& ej : detail::array(j["entries"], "entries")) {
    detail::object(ej, "entry", {"index", "value"});
    std::vector<Index> idx;
    for (const auto& x : detail::array(ej["index"], "entry index"))
      idx.push_back(detail::one_based(x, "entry index"));
    entries.emplace_back(std::move(idx), detail::integer(ej["value"], "entry value"));
  }
  return IntersectionTensor::from_entries(static_cast<int>(d),
                                          static_cast<std::size_t>(m), entries);
}

// ---- trace

// index_maps[t][n] is the stage-t index of index n in the stage-(t+1) tensor.
inline json to_json(const ContractionTrace& trace) {
  json steps = json::array(), maps = json::array();
  for (const auto& s : trace.steps) {
    steps.push_back({{"contracted", s.contracted + 1},
                     {"degree", s.degree},
                     {"proximate_to_current", detail::indices(s.proximate_to)}});
    maps.push_back(detail::indices(s.kept));
  }
  return {{"steps", std::move(steps)}, {"index_maps", std::move(maps)}};
}

inline ContractionTrace trace_from_json(const json& j) {
  detail::object(j, "trace", {"steps", "index_maps"});
  const auto& steps = detail::array(j["steps"], "steps");
  const auto& maps = detail::array(j["index_maps"], "index_maps");
  if (steps.size() != maps.size()) detail::schema("steps and index_maps differ in length");
  ContractionTrace trace;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    detail::object(steps[t], "step", {"contracted", "degree", "proximate_to_current"});
    ContractionStep s;
    s.contracted = detail::one_based(steps[t]["contracted"], "contracted");
    s.degree = detail::integer(steps[t]["degree"], "degree");
    for (const auto& x : detail::array(steps[t]["proximate_to_current"], "proximate_to_current"))
      s.proximate_to.push_back(detail::one_based(x, "proximate_to_current entry"));
    for (const auto& x : detail::array(maps[t], "index map"))
      s.kept.push_back(detail::one_based(x, "index map entry"));
    trace.steps.push_back(std::move(s));
  }
  return trace;
}

// ---- results

inline json to_json(const ValidationReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"rule", v.rule},
                          {"indices", detail::indices(v.indices)},
                          {"message", v.message}});
  return {{"ok", r.ok()}, {"violations", std::move(violations)}};
}

inline json witness(const std::optional<IndexPermutation>& perm) {
  if (!perm) return {{"equivalent", false}};
  return {{"equivalent", true}, {"permutation", detail::indices(perm->images())}};
}

}  // namespace blowup::io
