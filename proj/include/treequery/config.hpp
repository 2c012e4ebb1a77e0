#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "treequery/ace.hpp"
#include "treequery/graph.hpp"
#include "treequery/remote.hpp"

namespace treequery {

/// Everything a run needs besides its inputs. The API token is read from
/// the TREEQUERY_API_KEY environment variable at backend construction and
/// never appears here or in any emitted file.
struct Config {
    std::string backend = "simulated"; // simulated | remote
    RemoteConfig remote;
    double alpha = 0.0;
    std::optional<double> alpha_adv;
    std::uint64_t seed = 0;
    double tau = 0.7;
    AceParams ace;
    int jobs = 1;
};

void validate(const Config& cfg);

std::string detail_name(LogDetail d);
LogDetail parse_detail(const std::string& name);

/// Snapshot embedded in every output file. Remote settings appear only
/// when the remote backend is selected.
nlohmann::json to_json(const Config& cfg);

Config config_from_json(const nlohmann::json& doc);

/// Simulated backends answer from `truth`; remote backends ignore it.
std::unique_ptr<ExpertBackend> make_backend(const Config& cfg,
                                            const std::optional<CausalGraph>& truth);

} // namespace treequery
