#include "tierforge/crf.hpp"

#include <cmath>

namespace tierforge {

double crf_apply(double x, const CameraResponse& crf) {
    if (crf.kind == CameraResponse::Kind::identity) return x;
    return std::pow(x, 1.0 / crf.gamma_value);
}

double crf_invert(double y, const CameraResponse& crf) {
    if (crf.kind == CameraResponse::Kind::identity) return y;
    return std::pow(y, crf.gamma_value);
}

} // namespace tierforge
