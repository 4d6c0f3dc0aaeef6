#pragma once

#include <concepts>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ksel/channel.hpp"
#include "ksel/rng.hpp"

namespace ksel {

enum class Variant : std::uint8_t {
    OneFailAdaptive,       // "ofa"
    ExpBackOnBackOff,      // "ebobo"
    LoglogIteratedBackoff  // "llib"
};

constexpr std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::OneFailAdaptive: return "ofa";
        case Variant::ExpBackOnBackOff: return "ebobo";
        case Variant::LoglogIteratedBackoff: return "llib";
    }
    return "?";
}

constexpr std::string_view variant_display_name(Variant v) {
    switch (v) {
        case Variant::OneFailAdaptive: return "One-fail Adaptive";
        case Variant::ExpBackOnBackOff: return "Exp Back-on/Back-off";
        case Variant::LoglogIteratedBackoff: return "Loglog-iterated Back-off";
    }
    return "?";
}

std::optional<Variant> variant_from_name(std::string_view name);

// One-fail Adaptive accepts e < delta <= sum_{j=1..5} (5/6)^j.
inline constexpr double kOfaDeltaMin = std::numbers::e;
inline constexpr double kOfaDeltaMax = 23255.0 / 7776.0;
// Exp Back-on/Back-off accepts 0 < delta < 1/e.
inline constexpr double kEboboDeltaMax = 1.0 / std::numbers::e;

/// Per-slot transmission decision, produced before the slot resolves.
struct ProtocolDecision {
    bool transmit = false;
};

struct ProtocolParams {
    Variant variant = Variant::OneFailAdaptive;
    double delta = 2.72;  // OFA / EBOBO tuning constant
    double r = 2.0;       // LLIB window growth factor

    /// Throws std::invalid_argument when a parameter is outside the
    /// variant's legal range.
    void validate() const;

    static ProtocolParams one_fail_adaptive(double delta = 2.72) {
        return {Variant::OneFailAdaptive, delta, 2.0};
    }
    static ProtocolParams exp_back_on_back_off(double delta = 0.366) {
        return {Variant::ExpBackOnBackOff, delta, 2.0};
    }
    static ProtocolParams loglog_iterated_backoff(double r = 2.0) {
        return {Variant::LoglogIteratedBackoff, 0.366, r};
    }
};

/// Contract the engine drives slot by slot. decide() is called exactly once
/// per slot for every active node, the channel resolves, then advance() is
/// called with the node's observation. Implementations must not peek at the
/// outcome before advance(), and both calls reject terminal nodes.
template <typename P>
concept SlotProtocol = requires(P node, const P& cnode, std::uint64_t slot, Rng& rng,
                                const Observation& obs) {
    { node.decide(slot, rng) } -> std::same_as<ProtocolDecision>;
    { node.advance(slot, obs) };
    { cnode.terminal() } -> std::convertible_to<bool>;
};

}  // namespace ksel
