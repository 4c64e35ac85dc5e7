#pragma once

#include <string>

#include "json.hpp"

#include "jscc/dmc_analysis.hpp"
#include "jscc/errors.hpp"
#include "jscc/markov_info.hpp"
#include "jscc/rate_calculator.hpp"

namespace jscc::io {

// Parses a file into JSON; failures become ConfigError with the path in the
// message.
nlohmann::json load_json_file(const std::string& path);

// {"matrix": [[...]]}: column-stochastic, matrix[i][j] = W(state i | state j).
markov::TransitionMatrix chain_from_json(const nlohmann::json& j);

// {"alphabet_x": nx, "alphabet_z": nz, "matrix": [[...]]} over pair states
// s = x * nz + z. alphabet_z defaults to 1; alphabet_x defaults to
// dim / alphabet_z. Runs the full pair-structure validation.
markov::NonHiddenChain pair_chain_from_json(const nlohmann::json& j);

// {"matrix": [[...]]}: row-stochastic, matrix[x][y] = W(y | x).
dmc::DmcChannel dmc_from_json(const nlohmann::json& j);

// Either {"entropy": h, "varentropy": v} directly, or a (pair) chain object
// whose rates are computed here.
rates::SourceSummary source_from_json(const nlohmann::json& j);

// {"kind": "dmc", "matrix": ...}            analyzed via capacity + extremes
// {"kind": "dmc", "capacity", "v_plus", "v_minus"}
// {"kind": "conditional_additive", "noise": <pair chain>}
//      capacity = log |X| - H(noise), v_c = varentropy(noise)
// {"kind": "conditional_additive", "capacity", "v_c"}
rates::ChannelSummary channel_from_json(const nlohmann::json& j);

// {"source": ..., "channel": ...}
rates::RateProblem problem_from_json(const nlohmann::json& j);

}  // namespace jscc::io
