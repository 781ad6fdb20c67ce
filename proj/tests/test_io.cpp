#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "tcmap/error.hpp"
#include "tcmap/image_io.hpp"
#include "tcmap/rng.hpp"

using namespace tcmap;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    auto p = fs::temp_directory_path() / "tcmap_io_tests";
    fs::create_directories(p);
    return p;
}

RadiometricFrame random_frame(int w, int h, int bit_depth, std::uint64_t seed) {
    Rng rng(seed);
    RadiometricFrame f{w, h, bit_depth, {}};
    f.counts.resize(static_cast<std::size_t>(w) * h);
    for (auto& c : f.counts) c = static_cast<std::uint32_t>(rng.uniform_index(f.max_count() + 1));
    return f;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("tirf round-trip preserves frames and is byte-stable") {
    auto frame = random_frame(7, 5, 14, 99);
    auto path = work_dir() / "frame.tirf";
    write_tirf(frame, path.string());
    auto back = read_tirf(path.string());
    CHECK(back.width == frame.width);
    CHECK(back.height == frame.height);
    CHECK(back.bit_depth == frame.bit_depth);
    CHECK(back.counts == frame.counts);

    std::string first = slurp(path);
    write_tirf(frame, path.string());
    CHECK(slurp(path) == first);
}

TEST_CASE("tirf header/payload mismatches are errors") {
    auto path = work_dir() / "bad.tirf";

    // header declares 2x2 but the payload holds 3 records
    std::string buf;
    buf.append("TIRF", 4);
    auto put16 = [&](std::uint16_t v) {
        buf.push_back(static_cast<char>(v & 0xff));
        buf.push_back(static_cast<char>(v >> 8));
    };
    auto put32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    put16(1);   // version
    put16(14);  // bit depth
    put32(2);
    put32(2);
    put16(10);
    put16(20);
    put16(30);
    std::ofstream(path, std::ios::binary) << buf;
    CHECK_THROWS_AS(read_tirf(path.string()), IoError);

    // count above the declared bit depth
    buf.resize(16);
    put16(10);
    put16(20);
    put16(30);
    put16(16384);
    std::ofstream(path, std::ios::binary) << buf;
    CHECK_THROWS_WITH_AS(read_tirf(path.string()), doctest::Contains("14-bit"), IoError);

    std::ofstream(path, std::ios::binary) << "NOPE";
    CHECK_THROWS_AS(read_tirf(path.string()), IoError);

    RadiometricFrame deep = random_frame(2, 2, 18, 1);
    CHECK_THROWS_AS(write_tirf(deep, path.string()), ValidationError);
}

TEST_CASE("png16 constant image round-trips") {
    RadiometricFrame frame{4, 4, 16, std::vector<std::uint32_t>(16, 1000)};
    auto path = work_dir() / "constant.png";
    write_png16(frame, path.string());
    auto back = read_png16(path.string());
    CHECK(back.width == 4);
    CHECK(back.height == 4);
    CHECK(back.bit_depth == 16);
    CHECK(back.counts == frame.counts);
}

TEST_CASE("png16 random round-trip") {
    auto frame = random_frame(13, 9, 16, 5);
    auto path = work_dir() / "random.png";
    write_png16(frame, path.string());
    CHECK(read_png16(path.string()).counts == frame.counts);
}

TEST_CASE("png8 gray round-trip") {
    ToneMapped8 img{5, 3, {0, 255, 17, 200, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
    auto path = work_dir() / "gray.png";
    write_png8_gray(img, path.string());
    auto back = read_png8_gray(path.string());
    CHECK(back.gray == img.gray);
}

TEST_CASE("frame format guessing") {
    CHECK(guess_frame_format("x.tirf") == FrameFormat::RawBinary);
    CHECK(guess_frame_format("x.PNG") == FrameFormat::Png16);
    CHECK_THROWS_AS(guess_frame_format("x.bmp"), ValidationError);
}

TEST_CASE("temb tensor round-trip and validation") {
    FloatTensorFile t;
    t.channels = 3;
    t.height = 4;
    t.width = 5;
    Rng rng(3);
    t.data.resize(60);
    for (auto& v : t.data) v = static_cast<float>(rng.uniform(-10.0, 300.0));
    auto path = work_dir() / "tensor.temb";
    write_temb(t, path.string());
    auto back = read_temb(path.string());
    CHECK(back.channels == 3);
    CHECK(back.height == 4);
    CHECK(back.width == 5);
    CHECK(back.data == t.data);

    t.data.pop_back();
    CHECK_THROWS_AS(write_temb(t, path.string()), ValidationError);
    std::ofstream(path, std::ios::binary) << "TEMBxxxx";
    CHECK_THROWS_AS(read_temb(path.string()), IoError);
}

TEST_CASE("atomic writes leave no temp droppings and fail cleanly") {
    auto path = work_dir() / "atomic.bin";
    atomic_write_text(path.string(), "hello");
    CHECK(slurp(path) == "hello");
    CHECK(!fs::exists(path.string() + ".tmp"));

    auto bad = fs::path("/nonexistent-dir") / "x.bin";
    CHECK_THROWS_AS(atomic_write_text(bad.string(), "y"), IoError);
    CHECK(!fs::exists(bad));
}
