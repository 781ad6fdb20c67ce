#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "tcmap/error.hpp"
#include "tcmap/radiometry.hpp"
#include "tcmap/rng.hpp"

using namespace tcmap;

namespace {

// Independent high-precision route for the conversion, kept apart from the
// library implementation on purpose.
long double reference_celsius(long double s, const CameraProfile& p) {
    return static_cast<long double>(p.planck_p) /
               std::log(static_cast<long double>(p.planck_r) / (s - p.offset_o) + p.calib_f) -
           273.15L;
}

CameraProfile example_profile() {
    CameraProfile p;
    p.name = "lab";
    p.planck_p = 1428.0;
    p.planck_r = 366545.0;
    p.offset_o = 342.0;
    p.calib_f = 1.0;
    p.count_min = 343;
    p.count_max = 16383;
    return p;
}

RadiometricFrame single_pixel(std::uint32_t count, int bit_depth) {
    return RadiometricFrame{1, 1, bit_depth, {count}};
}

std::filesystem::path temp_file(const char* name) {
    auto p = std::filesystem::temp_directory_path() / "tcmap_radiometry_tests";
    std::filesystem::create_directories(p);
    return p / name;
}

// Random profile that is valid over a count window [s_lo, s_hi].
struct RandomSetup {
    CameraProfile profile;
    std::uint32_t s_lo, s_hi;
};

RandomSetup random_setup(Rng& rng) {
    RandomSetup r;
    r.profile.name = "random";
    r.profile.planck_p = rng.uniform(500.0, 3000.0);
    r.profile.planck_r = rng.uniform(5e4, 5e5);
    r.profile.offset_o = rng.uniform(0.0, 1000.0);
    r.profile.calib_f = rng.uniform(0.5, 1.5);
    r.s_lo = static_cast<std::uint32_t>(r.profile.offset_o) + 2;
    r.s_hi = 65535;
    // shrink the window until the log argument stays above 1
    while (r.s_hi > r.s_lo &&
           !(r.profile.planck_r / (r.s_hi - r.profile.offset_o) + r.profile.calib_f > 1.0 + 1e-9))
        r.s_hi = r.s_lo + (r.s_hi - r.s_lo) / 2;
    r.profile.count_min = r.s_lo;
    r.profile.count_max = r.s_hi;
    return r;
}

} // namespace

TEST_CASE("example profile validates over its declared count range") {
    CameraProfile p = example_profile();
    p.validate();
    // direct scan, the independent route for the validity claim
    for (std::uint32_t s = p.count_min; s <= p.count_max; ++s) {
        CHECK(static_cast<double>(s) > p.offset_o);
        CHECK(p.planck_r / (s - p.offset_o) + p.calib_f > 1.0);
    }
}

TEST_CASE("profile field validation names the offending field") {
    CameraProfile p = example_profile();
    p.planck_p = -1.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("planck_p"), ValidationError);

    p = example_profile();
    p.planck_r = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("planck_r"), ValidationError);

    p = example_profile();
    p.count_min = 300;  // below the offset
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("profile file round-trip and errors") {
    auto path = temp_file("profile.txt");
    save_profile(example_profile(), path.string());
    CameraProfile loaded = load_profile(path.string());
    CHECK(loaded.name == "lab");
    CHECK(loaded.planck_p == doctest::Approx(1428.0));
    CHECK(loaded.count_max == 16383);

    CHECK_THROWS_AS(load_profile("/nonexistent/profile.txt"), IoError);

    auto bad = temp_file("bad_profile.txt");
    std::ofstream(bad) << "name = x\nplanck_p = -1\nplanck_r = 1\noffset_o = 0\ncalib_f = 1\n"
                          "count_min = 1\ncount_max = 10\n";
    CHECK_THROWS_WITH_AS(load_profile(bad.string()), doctest::Contains("planck_p"),
                         ValidationError);

    auto missing_field = temp_file("missing_field.txt");
    std::ofstream(missing_field) << "name = x\n";
    CHECK_THROWS_AS(load_profile(missing_field.string()), IoError);
}

TEST_CASE("conversion matches the high-precision oracle at the log(e) anchor") {
    // Count chosen so R/(S-O) = e - 1, i.e. the log argument is e and the
    // temperature collapses to P - 273.15. Needs an 18-bit frame.
    CameraProfile p;
    p.name = "anchor";
    p.planck_p = 1428.0;
    p.planck_r = 360000.0;
    p.offset_o = 500.0;
    p.calib_f = 1.0;
    p.count_min = 501;
    p.count_max = 262143;

    const std::uint32_t s =
        500 + static_cast<std::uint32_t>(std::llround(360000.0 / (std::exp(1.0) - 1.0)));
    RadiometricFrame frame = single_pixel(s, 18);
    frame.validate();

    TemperatureMap out = counts_to_celsius(frame, p);
    CHECK(out.celsius[0] == doctest::Approx(1428.0 - 273.15).epsilon(1e-5));
    CHECK(std::abs(static_cast<long double>(count_to_celsius(s, p)) -
                   reference_celsius(s, p)) < 1e-9L);
}

TEST_CASE("conversion matches hand-evaluated arbitrary-precision value") {
    CameraProfile p;
    p.name = "simple";
    p.planck_p = 1000.0;
    p.planck_r = 1000.0;
    p.offset_o = 0.0;
    p.calib_f = 1.0;
    p.count_min = 1;
    p.count_max = 16383;
    // 1000 / ln(2) - 273.15, frozen from an arbitrary-precision evaluation.
    const double expected = 1169.545040888963407;
    CHECK(count_to_celsius(1000.0, p) == doctest::Approx(expected).epsilon(1e-12));
    TemperatureMap out = counts_to_celsius(single_pixel(1000, 14), p);
    CHECK(out.celsius[0] == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("saturated pixels are an error naming the pixel index") {
    CameraProfile p = example_profile();
    RadiometricFrame frame{2, 1, 14, {1000, 342}};  // pixel 1 sits at the offset
    CHECK_THROWS_WITH_AS(counts_to_celsius(frame, p), doctest::Contains("pixel 1"),
                         ValidationError);
    frame.counts[1] = 100;  // below the offset
    CHECK_THROWS_AS(counts_to_celsius(frame, p), ValidationError);
}

TEST_CASE("conversion is strictly increasing in S and decreasing in O") {
    Rng rng(20240811);
    for (int trial = 0; trial < 200; ++trial) {
        RandomSetup r = random_setup(rng);
        if (r.s_hi <= r.s_lo + 2) continue;
        double s = rng.uniform(static_cast<double>(r.s_lo), static_cast<double>(r.s_hi - 1));
        double t0 = count_to_celsius(s, r.profile);
        double t1 = count_to_celsius(s + 1.0, r.profile);
        CHECK(t1 > t0);

        CameraProfile shifted = r.profile;
        shifted.offset_o += 1.0;
        if (s > shifted.offset_o + 1.0) {
            double t_shifted = count_to_celsius(s, shifted);
            CHECK(t_shifted < t0);
        }
    }
}

TEST_CASE("algebraic inverse round-trips within 1e-6 degC") {
    Rng rng(7);
    int checked = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        RandomSetup r = random_setup(rng);
        if (r.s_hi <= r.s_lo + 2) continue;
        double s = std::floor(rng.uniform(static_cast<double>(r.s_lo), static_cast<double>(r.s_hi)));
        double t = count_to_celsius(s, r.profile);
        double s_back = celsius_to_count(t, r.profile);
        double t_back = count_to_celsius(s_back, r.profile);
        CHECK(std::abs(t - t_back) < 1e-6);
        ++checked;
    }
    CHECK(checked > 1500);
}

TEST_CASE("conversion output is deterministic") {
    CameraProfile p = example_profile();
    RadiometricFrame frame{4, 2, 14, {400, 900, 1500, 4000, 8000, 12000, 16000, 16383}};
    TemperatureMap a = counts_to_celsius(frame, p);
    TemperatureMap b = counts_to_celsius(frame, p);
    CHECK(a.celsius == b.celsius);
}

TEST_CASE("frame validation catches bad geometry and range") {
    RadiometricFrame f{2, 2, 14, {0, 1, 2}};
    CHECK_THROWS_AS(f.validate(), ValidationError);
    f.counts = {0, 1, 2, 16384};  // beyond 14-bit
    CHECK_THROWS_WITH_AS(f.validate(), doctest::Contains("14-bit"), ValidationError);
    f.counts = {0, 1, 2, 16383};
    f.validate();
}
