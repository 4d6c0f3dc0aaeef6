#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "ksel/channel.hpp"
#include "ksel/protocol.hpp"
#include "ksel/rng.hpp"

namespace ksel {

/// One-fail Adaptive per-node state. All active nodes hold identical state at
/// every slot: the initial state is common and every update below is driven
/// by globally observed events only (slot parity and other nodes' deliveries),
/// never by the node's own transmission draw.
struct OfaState {
    double kappa_hat = 0.0;   // density estimator, clamped to >= delta + 1
    std::uint64_t sigma = 0;  // messages received so far
    bool terminal = false;    // own message delivered
};

inline OfaState ofa_initial_state(double delta) {
    return OfaState{delta + 1.0, 0, false};
}

/// Odd slots are estimator-driven (AT), even slots counter-driven (BT).
/// Slot indices start at 1.
constexpr bool ofa_is_at_step(std::uint64_t slot_index) {
    return (slot_index % 2) == 1;
}

/// AT slots transmit with probability 1/kappa_hat, BT slots with
/// 1/(1 + log2(sigma + 1)).
inline double ofa_transmit_probability(const OfaState& state, std::uint64_t slot_index) {
    if (ofa_is_at_step(slot_index)) {
        return 1.0 / state.kappa_hat;
    }
    return 1.0 / (1.0 + std::log2(static_cast<double>(state.sigma) + 1.0));
}

/// State transition for one resolved slot.
///
/// OwnDelivery makes the state terminal. Otherwise, on an AT slot the
/// estimator grows by 1 unconditionally, and a reception additionally bumps
/// sigma and subtracts delta + 1 (net -delta for the slot); on a BT slot a
/// reception bumps sigma and subtracts delta. Both subtractions clamp to the
/// floor delta + 1 after the slot's increments and decrements are combined.
inline OfaState ofa_advance(OfaState state, std::uint64_t slot_index, const Observation& obs,
                            double delta) {
    if (state.terminal) {
        throw std::logic_error("ofa_advance: node already delivered");
    }
    if (obs.kind == Observation::Kind::OwnDelivery) {
        state.terminal = true;
        return state;
    }
    const double floor = delta + 1.0;
    if (ofa_is_at_step(slot_index)) {
        state.kappa_hat += 1.0;
        if (obs.kind == Observation::Kind::ReceivedOther) {
            state.sigma += 1;
            state.kappa_hat = std::max(state.kappa_hat - delta - 1.0, floor);
        }
    } else if (obs.kind == Observation::Kind::ReceivedOther) {
        state.sigma += 1;
        state.kappa_hat = std::max(state.kappa_hat - delta, floor);
    }
    return state;
}

class OfaNode {
public:
    explicit OfaNode(double delta) : state_(ofa_initial_state(delta)), delta_(delta) {}

    ProtocolDecision decide(std::uint64_t slot_index, Rng& rng) {
        if (state_.terminal) {
            throw std::logic_error("OfaNode::decide: node already delivered");
        }
        return {bernoulli(rng, ofa_transmit_probability(state_, slot_index))};
    }

    void advance(std::uint64_t slot_index, const Observation& obs) {
        state_ = ofa_advance(state_, slot_index, obs, delta_);
    }

    bool terminal() const { return state_.terminal; }
    const OfaState& state() const { return state_; }

private:
    OfaState state_;
    double delta_;
};

static_assert(SlotProtocol<OfaNode>);

}  // namespace ksel
