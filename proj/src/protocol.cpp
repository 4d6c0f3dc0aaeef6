#include "ksel/protocol.hpp"

namespace ksel {

std::optional<Variant> variant_from_name(std::string_view name) {
    if (name == "ofa") return Variant::OneFailAdaptive;
    if (name == "ebobo") return Variant::ExpBackOnBackOff;
    if (name == "llib") return Variant::LoglogIteratedBackoff;
    return std::nullopt;
}

void ProtocolParams::validate() const {
    switch (variant) {
        case Variant::OneFailAdaptive:
            if (!(delta > kOfaDeltaMin && delta <= kOfaDeltaMax)) {
                throw std::invalid_argument(
                    "ofa: delta must lie in (e, 2.9906...] (sum of (5/6)^j, j = 1..5)");
            }
            break;
        case Variant::ExpBackOnBackOff:
            if (!(delta > 0.0 && delta < kEboboDeltaMax)) {
                throw std::invalid_argument("ebobo: delta must lie in (0, 1/e)");
            }
            break;
        case Variant::LoglogIteratedBackoff:
            if (!(r > 1.0)) {
                throw std::invalid_argument("llib: r must be > 1");
            }
            break;
    }
}

}  // namespace ksel
