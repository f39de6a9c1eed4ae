#pragma once

#include "opers/scalar.hpp"

#include <string>
#include <string_view>

namespace opers {

// The four calculi of the duality diamond.
//   QMult    p(z) -> p(qz)          (XXZ / trigonometric Ruijsenaars-Schneider)
//   EpsAdd   p(z) -> p(z + eps)     (XXX / trigonometric Calogero-Moser)
//   RatDiff  p -> p' + gamma p      (rational Gaudin / rational Calogero-Moser)
//   TrigDiff p -> z p' + gamma p    (trigonometric Gaudin / rational Ruijsenaars-Schneider)
enum class CornerKind { QMult, EpsAdd, RatDiff, TrigDiff };

template <class S>
struct Corner {
    CornerKind kind = CornerKind::QMult;
    S parameter{1};  // q for QMult, eps for EpsAdd, unused otherwise

    static Corner qmult(S q) {
        if (is_zero(q)) throw invalid_input("QMult corner requires q != 0");
        return {CornerKind::QMult, std::move(q)};
    }
    static Corner eps_add(S eps) { return {CornerKind::EpsAdd, std::move(eps)}; }
    static Corner rational() { return {CornerKind::RatDiff, S(0)}; }
    static Corner trigonometric() { return {CornerKind::TrigDiff, S(0)}; }

    bool is_shift() const { return kind == CornerKind::QMult || kind == CornerKind::EpsAdd; }
    bool is_differential() const { return !is_shift(); }
};

inline std::string_view corner_name(CornerKind k) {
    switch (k) {
        case CornerKind::QMult: return "qmult";
        case CornerKind::EpsAdd: return "epsadd";
        case CornerKind::RatDiff: return "rational";
        case CornerKind::TrigDiff: return "trigonometric";
    }
    return "?";
}

// Accepts the canonical names plus the model tags and short aliases used by
// the CLI ("q", "eps", "tRS", "rCM", ...).
inline CornerKind parse_corner(std::string_view s) {
    if (s == "qmult" || s == "q" || s == "QMult" || s == "tRS" || s == "xxz") return CornerKind::QMult;
    if (s == "epsadd" || s == "eps" || s == "epsilon" || s == "EpsAdd" || s == "tCM" || s == "xxx")
        return CornerKind::EpsAdd;
    if (s == "rational" || s == "rat" || s == "RatDiff" || s == "rCM") return CornerKind::RatDiff;
    if (s == "trigonometric" || s == "trig" || s == "TrigDiff" || s == "rRS") return CornerKind::TrigDiff;
    throw invalid_input("unknown corner '" + std::string(s) + "'");
}

}  // namespace opers
