#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace ksel {

/// Simulator-side node index, dense in [0, k). Protocols never see it;
/// nodes have no labels on the channel.
using NodeId = std::uint32_t;

/// Verdict of one synchronous slot of the shared channel.
struct SlotOutcome {
    enum class Kind : std::uint8_t { Silence, Success, Collision };

    Kind kind = Kind::Silence;
    NodeId sender = 0;  // meaningful only when kind == Success

    static SlotOutcome silence() { return {Kind::Silence, 0}; }
    static SlotOutcome success(NodeId sender) { return {Kind::Success, sender}; }
    static SlotOutcome collision() { return {Kind::Collision, 0}; }

    friend bool operator==(const SlotOutcome& a, const SlotOutcome& b) {
        return a.kind == b.kind && (a.kind != Kind::Success || a.sender == b.sender);
    }
};

/// What a single node learns from a slot. A node transmitting into a
/// collision observes Nothing: interference and background noise are
/// indistinguishable on a channel without collision detection.
struct Observation {
    enum class Kind : std::uint8_t { OwnDelivery, ReceivedOther, Nothing };

    Kind kind = Kind::Nothing;
    NodeId sender = 0;  // meaningful only when kind == ReceivedOther

    static Observation own_delivery() { return {Kind::OwnDelivery, 0}; }
    static Observation received_other(NodeId sender) { return {Kind::ReceivedOther, sender}; }
    static Observation nothing() { return {Kind::Nothing, 0}; }

    friend bool operator==(const Observation& a, const Observation& b) {
        return a.kind == b.kind && (a.kind != Kind::ReceivedOther || a.sender == b.sender);
    }
};

/// Resolves the set of simultaneous transmitters into the slot outcome:
/// zero transmitters leave silence, exactly one delivers, two or more garble
/// each other.
inline SlotOutcome resolve_slot(std::span<const NodeId> transmitters) {
    if (transmitters.empty()) {
        return SlotOutcome::silence();
    }
    if (transmitters.size() == 1) {
        return SlotOutcome::success(transmitters.front());
    }
    return SlotOutcome::collision();
}

/// Maps a slot outcome to the given node's observation. `transmitted` must be
/// consistent with the outcome; inconsistent inputs are a caller bug.
inline Observation observe(NodeId node, bool transmitted, const SlotOutcome& outcome) {
    if (outcome.kind == SlotOutcome::Kind::Success) {
        if (outcome.sender == node) {
            if (!transmitted) {
                throw std::logic_error("observe: outcome names this node but it did not transmit");
            }
            return Observation::own_delivery();
        }
        if (transmitted) {
            throw std::logic_error("observe: node transmitted but outcome is another node's success");
        }
        return Observation::received_other(outcome.sender);
    }
    if (transmitted && outcome.kind == SlotOutcome::Kind::Silence) {
        throw std::logic_error("observe: node transmitted into a silent slot");
    }
    return Observation::nothing();
}

}  // namespace ksel
