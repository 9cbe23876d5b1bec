#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "leadel/rng.hpp"
#include "leadel/split_chain.hpp"

namespace leadel {

// Ternary channel feedback: silence (0 senders), success (1), collision (>= 2).
enum class Feedback : uint8_t { Silence, Success, Collision };

const char* feedback_name(Feedback f);

// Snapshot of one time unit. `active` are the stations transmitting this round,
// `non_active` flipped 0 but are still candidates, `eliminated` are already out.
// The three sets partition {0..n-1}.
struct Round {
    std::vector<uint32_t> active;
    std::vector<uint32_t> non_active;
    std::vector<uint32_t> eliminated;
    Feedback feedback = Feedback::Silence;
};

// Complete record of one election. rounds[0] is the deterministic
// initialization (every station sends its ID); the remaining rounds are the
// coin-flip rounds, so time_units = coin_flip_rounds + 1.
struct ElectionTrace {
    uint32_t n = 0;
    std::vector<Round> rounds;
    uint64_t coin_flip_rounds = 0;
    uint64_t time_units = 0;
    std::optional<uint32_t> leader;
    bool truncated = false;
};

// One coin-flip round over the current candidate set. flips[i] is the Bernoulli
// outcome of candidates[i]. On Collision the 0-flippers are eliminated and the
// 1-flippers stay; on Silence everybody re-flips; on Success the transmitter
// becomes leader.
struct RoundOutcome {
    Feedback feedback = Feedback::Silence;
    std::vector<uint32_t> transmitters;
    std::vector<uint32_t> silent;
};

RoundOutcome run_round(const std::vector<uint32_t>& candidates, const std::vector<uint8_t>& flips);
RoundOutcome run_round(const std::vector<uint32_t>& candidates, const SplitParams& par, Rng& rng);

inline constexpr uint64_t kDefaultMaxRounds = 1'000'000;

ElectionTrace run_election(uint32_t n, const SplitParams& par, Rng& rng, uint64_t max_rounds = kDefaultMaxRounds);

// Replay with an explicit flip script: script[r][i] is the flip of the i-th
// candidate (in station-id order) in coin-flip round r. Throws if a round's
// length does not match the candidate count or the script ends early.
ElectionTrace run_election_scripted(uint32_t n, const std::vector<std::vector<uint8_t>>& script);

// Rounds-only fast path for Monte Carlo estimation of E(H_n).
struct ElectionCost {
    uint64_t coin_flip_rounds = 0;
    bool truncated = false;
};

ElectionCost run_election_cost(uint32_t n, const SplitParams& par, Rng& rng, uint64_t max_rounds = kDefaultMaxRounds);

// JSON trace (schema 1) for the CLI's `simulate --trace` output.
std::string trace_to_json(const ElectionTrace& trace, double p, std::optional<uint64_t> seed);

}  // namespace leadel
