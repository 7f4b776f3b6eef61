#pragma once

#include "tierforge/errors.hpp"

namespace tierforge {

// Camera response function mapping linear radiance to stored display values.
// gamma kind encodes as x^(1/gamma); identity is provided for oracle tests.
struct CameraResponse {
    enum class Kind { identity, gamma };

    Kind kind = Kind::gamma;
    double gamma_value = 2.2;

    static CameraResponse identity() { return {Kind::identity, 1.0}; }
    static CameraResponse gamma(double g) {
        if (g <= 0.0) throw Error(Errc::bad_argument, "CameraResponse: gamma must be positive");
        return {Kind::gamma, g};
    }
};

double crf_apply(double x, const CameraResponse& crf);
double crf_invert(double y, const CameraResponse& crf);

} // namespace tierforge
