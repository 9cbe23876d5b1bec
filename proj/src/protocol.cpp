#include "leadel/protocol.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace leadel {

const char* feedback_name(Feedback f) {
    switch (f) {
        case Feedback::Silence: return "silence";
        case Feedback::Success: return "success";
        case Feedback::Collision: return "collision";
    }
    return "?";
}

RoundOutcome run_round(const std::vector<uint32_t>& candidates, const std::vector<uint8_t>& flips) {
    if (candidates.empty()) throw std::invalid_argument("run_round: candidate set is empty");
    if (flips.size() != candidates.size()) throw std::invalid_argument("run_round: one flip per candidate required");

    RoundOutcome out;
    for (size_t i = 0; i < candidates.size(); ++i) {
        if (flips[i])
            out.transmitters.push_back(candidates[i]);
        else
            out.silent.push_back(candidates[i]);
    }
    if (out.transmitters.empty())
        out.feedback = Feedback::Silence;
    else if (out.transmitters.size() == 1)
        out.feedback = Feedback::Success;
    else
        out.feedback = Feedback::Collision;
    return out;
}

RoundOutcome run_round(const std::vector<uint32_t>& candidates, const SplitParams& par, Rng& rng) {
    std::vector<uint8_t> flips(candidates.size());
    for (auto& f : flips) f = rng.bernoulli(par.p) ? 1 : 0;
    return run_round(candidates, flips);
}

namespace {

std::vector<uint32_t> all_stations(uint32_t n) {
    std::vector<uint32_t> v(n);
    for (uint32_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

// FlipFn: (coin_round_index, slot) -> bool
template <class FlipFn>
ElectionTrace run_election_impl(uint32_t n, uint64_t max_rounds, FlipFn&& flip) {
    ElectionTrace trace;
    trace.n = n;

    // Deterministic initialization round: every station sends.
    Round init;
    init.active = all_stations(n);
    init.feedback = n == 0 ? Feedback::Silence : (n == 1 ? Feedback::Success : Feedback::Collision);
    trace.rounds.push_back(std::move(init));
    if (n <= 1) {
        if (n == 1) trace.leader = 0;
        trace.coin_flip_rounds = 0;
        trace.time_units = 1;
        return trace;
    }

    std::vector<uint32_t> candidates = all_stations(n);
    std::vector<uint32_t> eliminated;
    std::vector<uint8_t> flips;

    for (uint64_t r = 0; r < max_rounds; ++r) {
        flips.resize(candidates.size());
        for (size_t i = 0; i < candidates.size(); ++i) flips[i] = flip(r, i) ? 1 : 0;
        RoundOutcome o = run_round(candidates, flips);

        Round rec;
        rec.active = o.transmitters;
        rec.non_active = o.silent;
        rec.eliminated = eliminated;
        rec.feedback = o.feedback;
        trace.rounds.push_back(std::move(rec));

        if (o.feedback == Feedback::Success) {
            trace.leader = o.transmitters.front();
            break;
        }
        if (o.feedback == Feedback::Collision) {
            eliminated.insert(eliminated.end(), o.silent.begin(), o.silent.end());
            std::sort(eliminated.begin(), eliminated.end());
            candidates = std::move(o.transmitters);
        }
        // Silence: all candidates re-flip.
    }

    trace.coin_flip_rounds = trace.rounds.size() - 1;
    trace.time_units = trace.coin_flip_rounds + 1;
    trace.truncated = !trace.leader.has_value();
    return trace;
}

}  // namespace

ElectionTrace run_election(uint32_t n, const SplitParams& par, Rng& rng, uint64_t max_rounds) {
    if (max_rounds < 1) throw std::invalid_argument("run_election: max_rounds must be >= 1");
    return run_election_impl(n, max_rounds, [&](uint64_t, size_t) { return rng.bernoulli(par.p); });
}

ElectionTrace run_election_scripted(uint32_t n, const std::vector<std::vector<uint8_t>>& script) {
    ElectionTrace trace = run_election_impl(n, script.size() + 1, [&](uint64_t r, size_t slot) {
        if (r >= script.size()) throw std::invalid_argument("run_election_scripted: script ended before a leader emerged");
        if (slot >= script[r].size())
            throw std::invalid_argument("run_election_scripted: round " + std::to_string(r) +
                                        " has fewer flips than candidates");
        return script[r][slot] != 0;
    });
    if (n >= 2 && !trace.truncated && trace.coin_flip_rounds != script.size())
        throw std::invalid_argument("run_election_scripted: script continues past the election of a leader");
    if (trace.truncated) throw std::invalid_argument("run_election_scripted: script ended before a leader emerged");
    // Flips are consumed in station-id order; a round may carry surplus
    // entries (they are ignored), but running short throws above.
    return trace;
}

ElectionCost run_election_cost(uint32_t n, const SplitParams& par, Rng& rng, uint64_t max_rounds) {
    ElectionCost out;
    if (n <= 1) return out;
    uint32_t candidates = n;
    for (uint64_t r = 0; r < max_rounds; ++r) {
        uint32_t ones = 0;
        for (uint32_t i = 0; i < candidates; ++i) ones += rng.bernoulli(par.p) ? 1 : 0;
        ++out.coin_flip_rounds;
        if (ones == 1) return out;
        if (ones >= 2) candidates = ones;
        // ones == 0: silence, same candidates flip again
    }
    out.truncated = true;
    return out;
}

std::string trace_to_json(const ElectionTrace& trace, double p, std::optional<uint64_t> seed) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["n"] = trace.n;
    j["p"] = p;
    if (seed)
        j["seed"] = *seed;
    else
        j["seed"] = nullptr;
    if (trace.leader)
        j["leader"] = *trace.leader;
    else
        j["leader"] = nullptr;
    j["coin_flip_rounds"] = trace.coin_flip_rounds;
    j["time_units"] = trace.time_units;
    j["truncated"] = trace.truncated;
    nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
    for (size_t i = 0; i < trace.rounds.size(); ++i) {
        const Round& r = trace.rounds[i];
        nlohmann::ordered_json rj;
        rj["time_unit"] = i + 1;
        rj["active"] = r.active;
        rj["non_active"] = r.non_active;
        rj["eliminated"] = r.eliminated;
        rj["feedback"] = feedback_name(r.feedback);
        rounds.push_back(std::move(rj));
    }
    j["rounds"] = std::move(rounds);
    return j.dump(2);
}

}  // namespace leadel
