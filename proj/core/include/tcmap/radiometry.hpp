#pragma once

#include <cstdint>
#include <string>

#include "tcmap/image.hpp"

namespace tcmap {

// Planck-law calibration constants for one camera, plus the count range the
// profile is declared valid over. Cameras differ in offsets and calibration,
// so profiles are always external config, never baked in.
struct CameraProfile {
    std::string name;
    double planck_p = 0.0;  // numerator constant, Kelvin-scaled
    double planck_r = 0.0;  // ratio constant, count-scaled
    double offset_o = 0.0;  // sensor count offset
    double calib_f = 1.0;   // calibration constant
    std::uint32_t count_min = 0;
    std::uint32_t count_max = 0;

    // Checks positivity of P and R and that the conversion stays finite and
    // positive over [count_min, count_max]: S - O > 0 and R/(S-O) + F > 1.
    // The log argument is strictly decreasing in S, so the endpoints decide.
    void validate() const;
};

// Key/value text profile: name, planck_p, planck_r, offset_o, calib_f,
// count_min, count_max. Lines are "key = value"; '#' starts a comment.
CameraProfile load_profile(const std::string& path);
void save_profile(const CameraProfile& profile, const std::string& path);

// Scalar conversion: P / ln(R/(S-O) + F) - 273.15, in double precision.
double count_to_celsius(double count, const CameraProfile& profile);

// Algebraic inverse: S = O + R / (exp(P/(T+273.15)) - F).
double celsius_to_count(double celsius, const CameraProfile& profile);

// Per-pixel conversion, evaluated in double and stored as float. Throws
// ValidationError naming the first saturated pixel (S <= O or log
// argument <= 1); saturation signals a profile/frame mismatch.
TemperatureMap counts_to_celsius(const RadiometricFrame& frame, const CameraProfile& profile);

} // namespace tcmap
