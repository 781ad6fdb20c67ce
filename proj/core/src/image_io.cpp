#include "tcmap/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "tcmap/error.hpp"

namespace tcmap {

namespace {

constexpr char kTirfMagic[4] = {'T', 'I', 'R', 'F'};
constexpr char kTembMagic[4] = {'T', 'E', 'M', 'B'};
constexpr std::uint16_t kTirfVersion = 1;

void put_u16le(std::string& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32le(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class ByteReader {
public:
    ByteReader(const std::string& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open file: " + path);
        bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint8_t>(bytes_[pos_]) |
                          (static_cast<std::uint16_t>(static_cast<std::uint8_t>(bytes_[pos_ + 1])) << 8);
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    void raw(void* dst, std::size_t n) {
        need(n);
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) {
        if (bytes_.size() - pos_ < n)
            throw IoError(path_ + ": truncated file (need " + std::to_string(n) + " more bytes, have " +
                          std::to_string(bytes_.size() - pos_) + ")");
    }

    std::string path_;
    std::string bytes_;
    std::size_t pos_ = 0;
};

struct PngReadCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReadCtx() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

struct PngWriteCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriteCtx() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

void write_png_gray_impl(int width, int height, int bit_depth, int color_type,
                         const std::vector<png_bytep>& rows, const std::string& path) {
    AtomicOutput out(path);
    PngWriteCtx ctx;
    ctx.fp = std::fopen(out.stage().c_str(), "wb");
    if (!ctx.fp) throw IoError("cannot open for writing: " + path);
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("png_create_write_struct failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw IoError("libpng write error: " + path);

    png_init_io(ctx.png, ctx.fp);
    png_set_IHDR(ctx.png, ctx.info, width, height, bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    if (bit_depth == 16) png_set_swap(ctx.png);  // rows are host little-endian
    png_write_image(ctx.png, const_cast<png_bytepp>(rows.data()));
    png_write_end(ctx.png, nullptr);
    std::fclose(ctx.fp);
    ctx.fp = nullptr;
    out.commit();
}

} // namespace

FrameFormat guess_frame_format(const std::string& path) {
    auto ext = std::filesystem::path(path).extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".tirf") return FrameFormat::RawBinary;
    if (ext == ".png") return FrameFormat::Png16;
    throw ValidationError("cannot guess frame format from extension '" + ext +
                          "' (expected .tirf or .png)");
}

RadiometricFrame read_tirf(const std::string& path) {
    ByteReader r(path);
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kTirfMagic, 4) != 0)
        throw IoError(path + ": bad magic, not a TIRF file");
    std::uint16_t version = r.u16();
    if (version != kTirfVersion)
        throw IoError(path + ": unsupported TIRF version " + std::to_string(version));

    RadiometricFrame frame;
    frame.bit_depth = r.u16();
    frame.width = static_cast<int>(r.u32());
    frame.height = static_cast<int>(r.u32());
    if (frame.bit_depth < 1 || frame.bit_depth > 16)
        throw IoError(path + ": TIRF bit_depth " + std::to_string(frame.bit_depth) +
                      " outside [1,16]");
    if (frame.width <= 0 || frame.height <= 0 || frame.width > (1 << 20) || frame.height > (1 << 20))
        throw IoError(path + ": implausible dimensions " + std::to_string(frame.width) + "x" +
                      std::to_string(frame.height));

    std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
    if (r.remaining() != n * 2)
        throw IoError(path + ": payload holds " + std::to_string(r.remaining() / 2) +
                      " counts, header declares " + std::to_string(n));
    std::vector<std::uint16_t> raw(n);
    r.raw(raw.data(), n * 2);

    frame.counts.resize(n);
    const std::uint32_t mc = frame.max_count();
    for (std::size_t i = 0; i < n; ++i) {
        if (raw[i] > mc)
            throw IoError(path + ": count " + std::to_string(raw[i]) + " at pixel " +
                          std::to_string(i) + " exceeds declared " +
                          std::to_string(frame.bit_depth) + "-bit depth");
        frame.counts[i] = raw[i];
    }
    return frame;
}

void write_tirf(const RadiometricFrame& frame, const std::string& path) {
    frame.validate();
    if (frame.bit_depth > 16)
        throw ValidationError("TIRF stores u16 counts; bit_depth " +
                              std::to_string(frame.bit_depth) + " does not fit");
    std::string buf;
    buf.reserve(16 + frame.counts.size() * 2);
    buf.append(kTirfMagic, 4);
    put_u16le(buf, kTirfVersion);
    put_u16le(buf, static_cast<std::uint16_t>(frame.bit_depth));
    put_u32le(buf, static_cast<std::uint32_t>(frame.width));
    put_u32le(buf, static_cast<std::uint32_t>(frame.height));
    for (std::uint32_t c : frame.counts) put_u16le(buf, static_cast<std::uint16_t>(c));
    atomic_write_bytes(path, buf.data(), buf.size());
}

RadiometricFrame read_png16(const std::string& path) {
    PngReadCtx ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) throw IoError("cannot open file: " + path);
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("png_create_read_struct failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw IoError("libpng read error: " + path);

    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);

    png_uint_32 width = 0, height = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(ctx.png, ctx.info, &width, &height, &bit_depth, &color_type, nullptr, nullptr,
                 nullptr);
    if (color_type != PNG_COLOR_TYPE_GRAY)
        throw IoError(path + ": expected single-channel grayscale PNG");
    if (bit_depth != 16)
        throw IoError(path + ": expected 16-bit PNG, got " + std::to_string(bit_depth) + "-bit");
    png_set_swap(ctx.png);  // file is big-endian, read as host little-endian

    RadiometricFrame frame;
    frame.width = static_cast<int>(width);
    frame.height = static_cast<int>(height);
    frame.bit_depth = 16;
    std::vector<std::uint16_t> raw(static_cast<std::size_t>(width) * height);
    std::vector<png_bytep> rows(height);
    for (png_uint_32 y = 0; y < height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(raw.data() + static_cast<std::size_t>(y) * width);
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);

    frame.counts.assign(raw.begin(), raw.end());
    return frame;
}

void write_png16(const RadiometricFrame& frame, const std::string& path) {
    frame.validate();
    if (frame.bit_depth > 16)
        throw ValidationError("png16 stores u16 samples; bit_depth " +
                              std::to_string(frame.bit_depth) + " does not fit");
    std::vector<std::uint16_t> raw(frame.counts.begin(), frame.counts.end());
    std::vector<png_bytep> rows(frame.height);
    for (int y = 0; y < frame.height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(raw.data() + static_cast<std::size_t>(y) * frame.width);
    write_png_gray_impl(frame.width, frame.height, 16, PNG_COLOR_TYPE_GRAY, rows, path);
}

RadiometricFrame load_raw_frame(const std::string& path, FrameFormat format) {
    switch (format) {
        case FrameFormat::RawBinary: return read_tirf(path);
        case FrameFormat::Png16: return read_png16(path);
    }
    throw ValidationError("unknown frame format");
}

ToneMapped8 read_png8_gray(const std::string& path) {
    PngReadCtx ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) throw IoError("cannot open file: " + path);
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("png_create_read_struct failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw IoError("libpng read error: " + path);

    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);
    png_uint_32 width = 0, height = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(ctx.png, ctx.info, &width, &height, &bit_depth, &color_type, nullptr, nullptr,
                 nullptr);
    if (color_type != PNG_COLOR_TYPE_GRAY || bit_depth != 8)
        throw IoError(path + ": expected 8-bit grayscale PNG");

    ToneMapped8 img{static_cast<int>(width), static_cast<int>(height),
                    std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height)};
    std::vector<png_bytep> rows(height);
    for (png_uint_32 y = 0; y < height; ++y)
        rows[y] = img.gray.data() + static_cast<std::size_t>(y) * width;
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);
    return img;
}

void write_png8_gray(const ToneMapped8& img, const std::string& path) {
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.gray.data() + static_cast<std::size_t>(y) * img.width);
    write_png_gray_impl(img.width, img.height, 8, PNG_COLOR_TYPE_GRAY, rows, path);
}

void write_png8_rgb(int width, int height, const std::vector<std::uint8_t>& rgb,
                    const std::string& path) {
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw ValidationError("rgb buffer length does not match dimensions");
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(y) * width * 3);
    write_png_gray_impl(width, height, 8, PNG_COLOR_TYPE_RGB, rows, path);
}

FloatTensorFile read_temb(const std::string& path) {
    ByteReader r(path);
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kTembMagic, 4) != 0)
        throw IoError(path + ": bad magic, not a TEMB file");
    FloatTensorFile t;
    t.channels = static_cast<int>(r.u32());
    t.height = static_cast<int>(r.u32());
    t.width = static_cast<int>(r.u32());
    if (t.channels <= 0 || t.height <= 0 || t.width <= 0)
        throw IoError(path + ": non-positive tensor dimensions");
    std::size_t n = static_cast<std::size_t>(t.channels) * t.height * t.width;
    if (r.remaining() != n * 4)
        throw IoError(path + ": payload size mismatch");
    t.data.resize(n);
    r.raw(t.data.data(), n * 4);  // host is little-endian
    return t;
}

void write_temb(const FloatTensorFile& tensor, const std::string& path) {
    std::size_t n = static_cast<std::size_t>(tensor.channels) * tensor.height * tensor.width;
    if (tensor.data.size() != n)
        throw ValidationError("tensor data length does not match dimensions");
    std::string buf;
    buf.reserve(16 + n * 4);
    buf.append(kTembMagic, 4);
    put_u32le(buf, static_cast<std::uint32_t>(tensor.channels));
    put_u32le(buf, static_cast<std::uint32_t>(tensor.height));
    put_u32le(buf, static_cast<std::uint32_t>(tensor.width));
    buf.append(reinterpret_cast<const char*>(tensor.data.data()), n * 4);
    atomic_write_bytes(path, buf.data(), buf.size());
}

AtomicOutput::AtomicOutput(std::string target) : target_(std::move(target)) {
    temp_ = target_ + ".tmp";
}

AtomicOutput::~AtomicOutput() {
    if (!committed_) {
        std::error_code ec;
        std::filesystem::remove(temp_, ec);
    }
}

void AtomicOutput::commit() {
    std::error_code ec;
    std::filesystem::rename(temp_, target_, ec);
    if (ec) throw IoError("cannot move " + temp_ + " to " + target_ + ": " + ec.message());
    committed_ = true;
}

void atomic_write_bytes(const std::string& path, const void* data, std::size_t size) {
    AtomicOutput out(path);
    {
        std::ofstream f(out.stage(), std::ios::binary);
        if (!f) throw IoError("cannot open for writing: " + path);
        f.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!f) throw IoError("write failed: " + path);
    }
    out.commit();
}

void atomic_write_text(const std::string& path, const std::string& text) {
    atomic_write_bytes(path, text.data(), text.size());
}

} // namespace tcmap
