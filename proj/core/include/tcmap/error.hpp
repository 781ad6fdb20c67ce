#pragma once

#include <stdexcept>
#include <string>

namespace tcmap {

// Contract violation: bad config values, saturated pixels, shape mismatches.
// The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem or decode failure. The CLI maps these to exit code 3.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised by the trainer when the loss stops being finite.
class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(int epoch, int step, const std::string& msg)
        : std::runtime_error(msg), epoch(epoch), step(step) {}
    int epoch;
    int step;
};

} // namespace tcmap
