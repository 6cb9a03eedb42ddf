// Batch experiment front end. A run is fully described by a JSON RunConfig;
// every emitted report embeds the resolved config so the run can be repeated
// bit-for-bit from the report file alone. Exit codes: 0 all acceptance bands
// passed, 1 a band or check failed, 2 usage error.
#pragma once

#include <string>

#include <json.hpp>

#include "bealab/calculus.hpp"
#include "bealab/games.hpp"
#include "bealab/problems.hpp"

namespace bealab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

// Builds the problem/game/schedule/start point named by a config block.
Problem problem_from_json(const nlohmann::json& spec);
Game game_from_json(const nlohmann::json& spec);
BatchSchedule schedule_from_json(const Problem& problem,
                                 const nlohmann::json& spec);
ParamVector point_from_json(const nlohmann::json& spec, std::size_t dim,
                            std::uint64_t fallback_seed);

// Fills in every unspecified field so the embedded config stands alone.
nlohmann::json resolve_config(nlohmann::json config);

// Dispatches on config["command"]; writes report files under out_dir.
// Throws std::invalid_argument for malformed configs.
int run_command(const nlohmann::json& config, const std::string& out_dir);

// argv front end (CLI11): subcommand + flags merged over --config.
int run_cli(int argc, char** argv);

}  // namespace bealab::cli
