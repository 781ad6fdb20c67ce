#include "tcmap/scene.hpp"

#include <algorithm>
#include <cmath>

#include "tcmap/error.hpp"
#include "tcmap/rng.hpp"

namespace tcmap {

namespace {

struct Ellipse {
    double cx, cy;      // center, pixel coords
    double ax, ay;      // semi-axes
    double cos_t, sin_t;

    bool contains(double x, double y) const {
        const double dx = x - cx, dy = y - cy;
        const double u = (dx * cos_t + dy * sin_t) / ax;
        const double v = (-dx * sin_t + dy * cos_t) / ay;
        return u * u + v * v <= 1.0;
    }
};

std::vector<std::uint8_t> rasterize(const Ellipse& e, int W, int H) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(W) * H, 0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            if (e.contains(x, y)) mask[static_cast<std::size_t>(y) * W + x] = 1;
    return mask;
}

// True when the candidate mask (dilated by one pixel) stays clear of the
// occupied mask, keeping blobs pairwise disjoint and non-touching.
bool placement_ok(const std::vector<std::uint8_t>& candidate,
                  const std::vector<std::uint8_t>& occupied, int W, int H) {
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (!candidate[static_cast<std::size_t>(y) * W + x]) continue;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int ny = y + dy, nx = x + dx;
                    if (ny < 0 || ny >= H || nx < 0 || nx >= W) continue;
                    if (occupied[static_cast<std::size_t>(ny) * W + nx]) return false;
                }
        }
    return true;
}

} // namespace

CameraProfile default_scene_profile() {
    CameraProfile p;
    p.name = "synthetic-lwir";
    p.planck_p = 1428.0;
    p.planck_r = 366545.0;
    p.offset_o = 342.0;
    p.calib_f = 1.0;
    p.count_min = 400;
    p.count_max = 16383;
    return p;
}

SyntheticScene generate_scene(std::uint64_t seed, const SceneParams& params,
                              const CameraProfile& profile) {
    if (params.width < 16 || params.height < 16)
        throw ValidationError("scene dimensions must be at least 16x16");
    if (params.n_objects < 0) throw ValidationError("n_objects must be >= 0");
    if (!(params.ambient_hi >= params.ambient_lo))
        throw ValidationError("ambient range inverted");
    profile.validate();

    const int W = params.width, H = params.height;
    const std::size_t plane = static_cast<std::size_t>(W) * H;
    Rng rng(seed);

    // Smooth ambient field: random quadratic in normalized coords, affinely
    // rescaled to land exactly inside [ambient_lo, ambient_hi].
    double c[6];
    for (double& v : c) v = rng.uniform(-1.0, 1.0);
    std::vector<double> field(plane);
    double fmin = 1e300, fmax = -1e300;
    for (int y = 0; y < H; ++y) {
        const double v = H > 1 ? 2.0 * y / (H - 1) - 1.0 : 0.0;
        for (int x = 0; x < W; ++x) {
            const double u = W > 1 ? 2.0 * x / (W - 1) - 1.0 : 0.0;
            double t = c[0] + c[1] * u + c[2] * v + c[3] * u * v + c[4] * u * u + c[5] * v * v;
            field[static_cast<std::size_t>(y) * W + x] = t;
            fmin = std::min(fmin, t);
            fmax = std::max(fmax, t);
        }
    }
    const double span = fmax - fmin;
    for (double& t : field) {
        double unit = span > 0 ? (t - fmin) / span : 0.5;
        t = params.ambient_lo + unit * (params.ambient_hi - params.ambient_lo);
    }

    SyntheticScene scene;
    scene.temp.width = W;
    scene.temp.height = H;

    // Disjoint elliptical blobs, rejected until they clear existing ones.
    std::vector<std::uint8_t> occupied(plane, 0);
    const double max_axis = 0.22 * std::min(W, H);
    const double min_axis = std::max(2.0, 0.06 * std::min(W, H));
    for (int i = 0; i < params.n_objects; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
            Ellipse e;
            e.cx = rng.uniform(0.15 * W, 0.85 * W);
            e.cy = rng.uniform(0.15 * H, 0.85 * H);
            e.ax = rng.uniform(min_axis, max_axis);
            e.ay = rng.uniform(min_axis, max_axis);
            const double theta = rng.uniform(0.0, M_PI);
            e.cos_t = std::cos(theta);
            e.sin_t = std::sin(theta);
            auto mask = rasterize(e, W, H);
            const auto area = std::count(mask.begin(), mask.end(), std::uint8_t(1));
            if (area < 4) continue;
            if (!placement_ok(mask, occupied, W, H)) continue;

            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            const double dt = sign * rng.uniform(params.blob_dt_min, params.blob_dt_max);
            for (std::size_t p = 0; p < plane; ++p)
                if (mask[p]) {
                    field[p] += dt;
                    occupied[p] = 1;
                }
            scene.object_masks.push_back(std::move(mask));
            placed = true;
        }
        if (!placed)
            throw ValidationError("could not place blob " + std::to_string(i) +
                                  " after 200 attempts; scene too crowded");
    }

    // Inner boundary of the blob union.
    scene.edge_map.assign(plane, 0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * W + x;
            if (!occupied[p]) continue;
            const bool boundary =
                (y == 0 || !occupied[p - W]) || (y == H - 1 || !occupied[p + W]) ||
                (x == 0 || !occupied[p - 1]) || (x == W - 1 || !occupied[p + 1]);
            if (boundary) scene.edge_map[p] = 1;
        }

    scene.temp.celsius.resize(plane);
    for (std::size_t p = 0; p < plane; ++p) scene.temp.celsius[p] = static_cast<float>(field[p]);

    // Invert the conversion into counts, add Gaussian count noise, clamp to
    // the profile's declared range.
    scene.frame.width = W;
    scene.frame.height = H;
    scene.frame.bit_depth = 14;
    scene.frame.counts.resize(plane);
    const double lo = static_cast<double>(profile.count_min);
    const double hi = static_cast<double>(profile.count_max);
    for (std::size_t p = 0; p < plane; ++p) {
        double s = celsius_to_count(field[p], profile);
        if (params.noise_std > 0.0) s += rng.normal(0.0, params.noise_std);
        s = std::clamp(std::round(s), lo, hi);
        scene.frame.counts[p] = static_cast<std::uint32_t>(s);
    }

    // Construction check: without noise the frame must decode back to the
    // ground truth within 0.1 degC (quantization alone is ~50x finer).
    if (params.noise_std == 0.0) {
        TemperatureMap decoded = counts_to_celsius(scene.frame, profile);
        for (std::size_t p = 0; p < plane; ++p)
            if (std::abs(decoded.celsius[p] - scene.temp.celsius[p]) > 0.1)
                throw ValidationError("scene generation drifted beyond 0.1 degC at pixel " +
                                      std::to_string(p) +
                                      "; temperature range incompatible with the profile");
    }
    return scene;
}

std::vector<SyntheticScene> generate_scenes(std::uint64_t seed, int count,
                                            const SceneParams& params,
                                            const CameraProfile& profile) {
    std::vector<SyntheticScene> scenes;
    scenes.reserve(count);
    for (int i = 0; i < count; ++i)
        scenes.push_back(generate_scene(splitmix64(seed + static_cast<std::uint64_t>(i)), params,
                                        profile));
    return scenes;
}

} // namespace tcmap
