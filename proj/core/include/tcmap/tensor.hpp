#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tcmap/error.hpp"

namespace tcmap::diff {

// Dense row-major tensor. grad stays empty until ensure_grad(); parameter
// tensors allocate it, activations usually do not.
template <typename S>
struct TensorT {
    std::vector<int> shape;
    std::vector<S> data;
    std::vector<S> grad;

    TensorT() = default;
    explicit TensorT(std::vector<int> shp)
        : shape(std::move(shp)), data(static_cast<std::size_t>(count(shape)), S(0)) {}

    static std::int64_t count(const std::vector<int>& s) {
        std::int64_t n = 1;
        for (int d : s) n *= d;
        return n;
    }

    std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }

    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), S(0));
    }
    void zero_grad() { std::fill(grad.begin(), grad.end(), S(0)); }

    void require_shape(const std::vector<int>& expect, const char* what) const {
        if (shape != expect) {
            std::string got, want;
            for (int d : shape) got += std::to_string(d) + " ";
            for (int d : expect) want += std::to_string(d) + " ";
            throw ValidationError(std::string(what) + ": shape [" + got + "] != expected [" +
                                  want + "]");
        }
    }

    template <typename T>
    TensorT<T> cast() const {
        TensorT<T> out(shape);
        for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<T>(data[i]);
        return out;
    }
};

template <typename S>
bool all_finite(const TensorT<S>& t) {
    for (S v : t.data)
        if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
}

template <typename S>
void check_finite(const TensorT<S>& t, const char* where) {
    if (!all_finite(t)) throw ValidationError(std::string("non-finite values after ") + where);
}

// Debug builds verify every op output stays finite; release builds skip the scan.
#ifdef NDEBUG
#define TCMAP_CHECK_FINITE(tensor, where) ((void)0)
#else
#define TCMAP_CHECK_FINITE(tensor, where) ::tcmap::diff::check_finite((tensor), (where))
#endif

} // namespace tcmap::diff
