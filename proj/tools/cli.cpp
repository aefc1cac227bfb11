#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "blowup/blowup.hpp"
#include "blowup/io.hpp"

namespace blowup::cli {

using json = nlohmann::json;

int exit_code(Status status) {
  switch (status) {
    case Status::ok: return 0;
    case Status::negative_decision: return 1;
    case Status::invalid_input: return 2;
    case Status::internal_limit: return 3;
  }
  return 2;
}

std::string render(const CommandResult& result) {
  if (!result.text.empty()) return result.text;
  return result.payload.dump(2) + "\n";
}

namespace {

json load(const std::string& path) {
  if (path == "-") {
    std::string text((std::istreambuf_iterator<char>(std::cin)),
                     std::istreambuf_iterator<char>());
    return io::parse(text);
  }
  return io::read_file(path);
}

CommandResult error_result(Status status, const std::string& code,
                           const std::string& message) {
  return {status, {{"error", {{"code", code}, {"message", message}}}}, {}};
}

CommandResult decision(json payload, bool positive, bool exit_status) {
  const auto status =
      (!positive && exit_status) ? Status::negative_decision : Status::ok;
  return {status, std::move(payload), {}};
}

Index parse_index(const std::string& text, std::size_t size) {
  std::size_t consumed = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != text.size() || v < 1 || static_cast<std::size_t>(v) > size)
    throw error(errc::invalid_input, "index must be an integer in 1.." +
                                         std::to_string(size) + ", got " + text);
  return static_cast<Index>(v - 1);
}

json orders_payload(const std::vector<Recovery>& orders) {
  json list = json::array();
  bool all_isomorphic = true;
  for (const auto& r : orders) {
    list.push_back({{"forest", io::to_json(r.forest)}, {"trace", io::to_json(r.trace)}});
    if (!forest_isomorphic(orders.front().forest, r.forest)) all_isomorphic = false;
  }
  return {{"all_isomorphic", all_isomorphic},
          {"count", orders.size()},
          {"orders", std::move(list)}};
}

}  // namespace

CommandResult run(const std::vector<std::string>& args) {
  CLI::App app{"Combinatorial calculus of sequences of point blow-ups", "blowup"};
  app.require_subcommand(1);

  std::string file_a, file_b, partition_file, index_text, trace_path;
  std::string marks_a, marks_b, kind = "tensor";
  bool strict = false, exit_status = false;
  std::size_t limit = 1000;
  std::uint64_t seed = 0;
  int dim = 2;
  std::size_t points = 0;
  std::int64_t max_degree = 1;

  auto kind_option = [&](CLI::App* sub) {
    sub->add_option("--kind", kind, "Input kind")
        ->check(CLI::IsMember({"forest", "tensor"}));
  };
  auto exit_option = [&](CLI::App* sub) {
    sub->add_flag("--exit-status", exit_status,
                  "Exit with status 1 on a negative decision");
  };

  auto* tensor = app.add_subcommand("tensor", "Intersection tensor of a forest");
  tensor->add_option("forest", file_a)->required();

  auto* finals = app.add_subcommand("finals", "Final components of a tensor");
  finals->add_option("tensor", file_a)->required();

  auto* contract_cmd = app.add_subcommand("contract", "Blow down one final component");
  contract_cmd->add_option("tensor", file_a)->required();
  contract_cmd->add_option("index", index_text, "1-based component index")->required();

  auto* recover = app.add_subcommand("recover", "Recover the forest from a tensor");
  recover->add_option("tensor", file_a)->required();
  recover->add_option("--trace", trace_path, "Write the contraction trace here");

  auto* recover_all = app.add_subcommand("recover-all", "Recover along every contraction order");
  recover_all->add_option("tensor", file_a)->required();
  recover_all->add_option("--limit", limit, "Maximum number of orders");
  exit_option(recover_all);

  auto* equiv = app.add_subcommand("equiv", "Decide combinatorial equivalence");
  equiv->add_option("a", file_a)->required();
  equiv->add_option("b", file_b)->required();
  equiv->add_option("--marks-a", marks_a, "Partition file for the first input");
  equiv->add_option("--marks-b", marks_b, "Partition file for the second input");
  kind_option(equiv);
  exit_option(equiv);

  auto* canon = app.add_subcommand("canon", "Canonical form and hash");
  canon->add_option("input", file_a)->required();
  kind_option(canon);

  auto* orbits = app.add_subcommand("orbits", "Automorphism orbits");
  orbits->add_option("input", file_a)->required();
  kind_option(orbits);

  auto* compat = app.add_subcommand("compat", "Partition compatibility");
  compat->add_option("input", file_a)->required();
  compat->add_option("partition", partition_file)->required();
  kind_option(compat);
  exit_option(compat);

  auto* quotient = app.add_subcommand("quotient", "Block-level quotient tensor");
  quotient->add_option("tensor", file_a)->required();
  quotient->add_option("partition", partition_file)->required();

  auto* diag = app.add_subcommand("diag", "Diagonal of a tensor");
  diag->add_option("tensor", file_a)->required();

  auto* validate = app.add_subcommand("validate", "Validate a forest");
  validate->add_option("forest", file_a)->required();
  validate->add_flag("--strict", strict, "Add divisibility and surface checks");
  exit_option(validate);

  auto* gen = app.add_subcommand("gen", "Generate a random forest");
  gen->add_option("--seed", seed)->required();
  gen->add_option("--dim", dim)->required();
  gen->add_option("--points", points)->required();
  gen->add_option("--max-degree", max_degree)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    return {Status::ok, {}, app.help()};
  } catch (const CLI::ParseError& e) {
    return error_result(Status::invalid_input, "usage", e.what());
  }

  try {
    const bool forest_kind = kind == "forest";

    if (tensor->parsed())
      return {Status::ok, io::to_json(tensor_from_forest(io::forest_from_json(load(file_a)))), {}};

    if (finals->parsed()) {
      const auto t = io::tensor_from_json(load(file_a));
      json list = json::array();
      for (Index i : final_set(t)) list.push_back(i + 1);
      return {Status::ok, {{"finals", std::move(list)}}, {}};
    }

    if (contract_cmd->parsed()) {
      const auto t = io::tensor_from_json(load(file_a));
      auto [next, step] = contract(t, parse_index(index_text, t.size()));
      ContractionTrace single{{step}};
      auto trace = io::to_json(single);
      return {Status::ok,
              {{"tensor", io::to_json(next)},
               {"step", trace["steps"][0]},
               {"index_map", trace["index_maps"][0]}},
              {}};
    }

    if (recover->parsed()) {
      const auto r = recover_sequence(io::tensor_from_json(load(file_a)));
      if (!trace_path.empty()) {
        std::ofstream out(trace_path, std::ios::binary);
        if (!out) throw error(errc::invalid_input, "cannot write " + trace_path);
        out << io::to_json(r.trace).dump(2) << "\n";
      }
      return {Status::ok, io::to_json(r.forest), {}};
    }

    if (recover_all->parsed()) {
      const auto orders = recover_all_orders(io::tensor_from_json(load(file_a)), limit);
      auto payload = orders_payload(orders);
      const bool agree = payload["all_isomorphic"].get<bool>();
      return decision(std::move(payload), agree, exit_status);
    }

    if (equiv->parsed()) {
      if (marks_a.empty() != marks_b.empty())
        throw error(errc::invalid_input, "--marks-a and --marks-b go together");
      std::optional<IndexPermutation> w;
      const auto ja = load(file_a), jb = load(file_b);
      if (forest_kind) {
        const auto fa = io::forest_from_json(ja), fb = io::forest_from_json(jb);
        require_valid(fa);
        require_valid(fb);
        w = marks_a.empty()
                ? forest_isomorphic(fa, fb)
                : marked_forest_equivalent(fa, io::partition_from_json(load(marks_a)), fb,
                                           io::partition_from_json(load(marks_b)));
      } else {
        const auto ta = io::tensor_from_json(ja), tb = io::tensor_from_json(jb);
        w = marks_a.empty()
                ? tensor_equivalent(ta, tb)
                : marked_tensor_equivalent(ta, io::partition_from_json(load(marks_a)), tb,
                                           io::partition_from_json(load(marks_b)));
      }
      return decision(io::witness(w), w.has_value(), exit_status);
    }

    if (canon->parsed()) {
      const auto j = load(file_a);
      auto emit = [](const auto& form, json object) {
        return json{{"hash", form.hash},
                    {"relabeling", io::detail::indices(form.relabeling.images())},
                    {"canonical", std::move(object)}};
      };
      if (forest_kind) {
        const auto form = canonical_form(io::forest_from_json(j));
        return {Status::ok, emit(form, io::to_json(form.object)), {}};
      }
      const auto form = canonical_form(io::tensor_from_json(j));
      return {Status::ok, emit(form, io::to_json(form.object)), {}};
    }

    if (orbits->parsed()) {
      const auto j = load(file_a);
      MarkedPartition orb;
      if (forest_kind) {
        const auto f = io::forest_from_json(j);
        require_valid(f);
        orb = forest_orbits(f);
      } else {
        orb = automorphism_orbits(io::tensor_from_json(j));
      }
      return {Status::ok, {{"orbits", io::to_json(orb)["blocks"]}}, {}};
    }

    if (compat->parsed()) {
      const auto j = load(file_a);
      const auto p = io::partition_from_json(load(partition_file));
      if (forest_kind) {
        const auto f = io::forest_from_json(j);
        const bool ok = partition_compatible_sequence(f, p);
        json degrees = json::array(), edges = json::array();
        for (std::size_t b = 0; b < p.size(); ++b) degrees.push_back(block_degree(f, p, b));
        for (auto [x, y] : block_proximity(f, p)) edges.push_back({x + 1, y + 1});
        return decision({{"compatible", ok},
                         {"block_degrees", std::move(degrees)},
                         {"block_proximity", std::move(edges)}},
                        ok, exit_status);
      }
      const bool ok = partition_compatible_morphism(io::tensor_from_json(j), p);
      return decision({{"compatible", ok}}, ok, exit_status);
    }

    if (quotient->parsed()) {
      const auto t = io::tensor_from_json(load(file_a));
      const auto p = io::partition_from_json(load(partition_file));
      return {Status::ok, io::to_json(quotient_tensor(t, p)), {}};
    }

    if (diag->parsed())
      return {Status::ok, {{"diagonal", diagonal(io::tensor_from_json(load(file_a)))}}, {}};

    if (validate->parsed()) {
      const auto report = validate_forest(io::forest_from_json(load(file_a)), strict);
      return decision(io::to_json(report), report.ok(), exit_status);
    }

    if (gen->parsed())
      return {Status::ok, io::to_json(random_forest(seed, dim, points, max_degree)), {}};
  } catch (const error& e) {
    const auto status = e.code() == errc::limit_exceeded ? Status::internal_limit
                                                         : Status::invalid_input;
    return error_result(status, std::string(to_string(e.code())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_result(Status::invalid_input, "invalid-input", e.what());
  }
  return error_result(Status::invalid_input, "usage", "no subcommand");
}

}  // namespace blowup::cli
