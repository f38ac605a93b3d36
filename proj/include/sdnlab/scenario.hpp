#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sdnlab/controller.hpp"
#include "sdnlab/simulator.hpp"
#include "sdnlab/slicing.hpp"

namespace sdnlab {

/// Expected rate of one flow (or the sum over several) at an epoch.
struct Expectation {
  std::vector<std::string> flows;
  std::optional<int> epoch;  // nullopt = last epoch
  double rate_mbps = 0;
  double rel_tol = 1e-9;
  double abs_tol = 1e-9;
};

/// A fully expanded experiment. `document` is the normalized JSON it came
/// from (topology inlined), enough to rebuild the scenario on its own.
struct Scenario {
  nlohmann::json document;
  std::string name;
  std::string description;
  std::shared_ptr<const Topology> topo;
  std::vector<Slice> slices;
  std::map<std::string, Ipv4Prefix> slice_bases;
  std::vector<std::string> disabled_proxies;
  std::string controller = "baseline";
  int epochs = 10;
  std::uint64_t seed = 1;
  std::vector<SimEvent> events;  // sorted by epoch
  std::vector<Expectation> expectations;
};

/// Builds from a parsed document. Unknown fields, dangling references and
/// malformed values raise Error(Validation).
Scenario load_scenario(const nlohmann::json& doc);
/// Parses text; `where` labels parse errors. A "topology" field naming a
/// topology file is resolved against `base_dir` and inlined.
Scenario load_scenario(std::string_view text, std::string_view where = "scenario",
                       const std::filesystem::path& base_dir = {});
Scenario load_scenario_file(const std::filesystem::path& path);

/// Names accepted by `make_controller`.
const std::vector<std::string>& controller_names();
std::unique_ptr<Controller> make_controller(std::string_view name, const Topology& t, AddressBook book,
                                            std::string owner = std::string(kRootOwner));
/// Root controller of a scenario: the slicing hypervisor when slices exist,
/// otherwise the named controller over the whole address book.
std::unique_ptr<Controller> make_root_controller(const Scenario& s);

/// Appends a declaration ({"match": ..., "class": ...}) to the document's
/// declaration list, validating it.
void add_declaration(nlohmann::json& doc, std::string_view match, std::string_view cls);

/// Deterministic bounded draw in [0, n) independent of the standard
/// library's distribution implementations.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n);

}  // namespace sdnlab
