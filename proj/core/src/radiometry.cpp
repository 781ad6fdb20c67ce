#include "tcmap/radiometry.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tcmap/error.hpp"

namespace tcmap {

namespace {

constexpr double kZeroCelsiusKelvin = 273.15;

double log_argument(double count, const CameraProfile& p) {
    return p.planck_r / (count - p.offset_o) + p.calib_f;
}

} // namespace

void CameraProfile::validate() const {
    if (!(planck_p > 0.0))
        throw ValidationError("profile '" + name + "': planck_p must be positive");
    if (!(planck_r > 0.0))
        throw ValidationError("profile '" + name + "': planck_r must be positive");
    if (count_max < count_min)
        throw ValidationError("profile '" + name + "': count_max < count_min");
    if (!(static_cast<double>(count_min) > offset_o))
        throw ValidationError("profile '" + name + "': count_min " + std::to_string(count_min) +
                              " must exceed offset_o " + std::to_string(offset_o));
    // Decreasing in S: the weakest log argument is at count_max.
    double arg = log_argument(static_cast<double>(count_max), *this);
    if (!(arg > 1.0))
        throw ValidationError("profile '" + name + "': R/(S-O)+F = " + std::to_string(arg) +
                              " at S = " + std::to_string(count_max) +
                              " must exceed 1 over the declared count range");
}

CameraProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile file: " + path);

    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw IoError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto require = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw IoError(path + ": missing profile field '" + key + "'");
        return it->second;
    };
    auto parse_double = [&](const std::string& key) {
        const std::string& s = require(key);
        try {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw IoError(path + ": field '" + key + "' is not a number: '" + s + "'");
        }
    };

    CameraProfile p;
    p.name = require("name");
    p.planck_p = parse_double("planck_p");
    p.planck_r = parse_double("planck_r");
    p.offset_o = parse_double("offset_o");
    p.calib_f = parse_double("calib_f");
    p.count_min = static_cast<std::uint32_t>(parse_double("count_min"));
    p.count_max = static_cast<std::uint32_t>(parse_double("count_max"));
    p.validate();
    return p;
}

void save_profile(const CameraProfile& profile, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write profile file: " + path);
    out.precision(17);
    out << "name = " << profile.name << "\n"
        << "planck_p = " << profile.planck_p << "\n"
        << "planck_r = " << profile.planck_r << "\n"
        << "offset_o = " << profile.offset_o << "\n"
        << "calib_f = " << profile.calib_f << "\n"
        << "count_min = " << profile.count_min << "\n"
        << "count_max = " << profile.count_max << "\n";
    if (!out) throw IoError("write failed: " + path);
}

double count_to_celsius(double count, const CameraProfile& profile) {
    return profile.planck_p / std::log(log_argument(count, profile)) - kZeroCelsiusKelvin;
}

double celsius_to_count(double celsius, const CameraProfile& profile) {
    double kelvin_ratio = profile.planck_p / (celsius + kZeroCelsiusKelvin);
    return profile.offset_o + profile.planck_r / (std::exp(kelvin_ratio) - profile.calib_f);
}

TemperatureMap counts_to_celsius(const RadiometricFrame& frame, const CameraProfile& profile) {
    frame.validate();
    profile.validate();

    TemperatureMap out;
    out.width = frame.width;
    out.height = frame.height;
    out.celsius.resize(frame.counts.size());

    for (std::size_t i = 0; i < frame.counts.size(); ++i) {
        double s = static_cast<double>(frame.counts[i]);
        if (!(s > profile.offset_o))
            throw ValidationError("saturated pixel " + std::to_string(i) + ": count " +
                                  std::to_string(frame.counts[i]) + " <= offset " +
                                  std::to_string(profile.offset_o) +
                                  " (profile/frame mismatch?)");
        double arg = log_argument(s, profile);
        if (!(arg > 1.0))
            throw ValidationError("saturated pixel " + std::to_string(i) +
                                  ": log argument " + std::to_string(arg) + " <= 1");
        out.celsius[i] = static_cast<float>(profile.planck_p / std::log(arg) - kZeroCelsiusKelvin);
    }
    return out;
}

} // namespace tcmap
