#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcmap/image.hpp"

namespace tcmap {

enum class FrameFormat { Png16, RawBinary };

// Picks RawBinary for ".tirf", Png16 for ".png"; throws otherwise.
FrameFormat guess_frame_format(const std::string& path);

// "TIRF" container, little-endian: magic "TIRF", u16 version, u16 bit_depth,
// u32 width, u32 height, then width*height u16 counts, row-major.
RadiometricFrame read_tirf(const std::string& path);
void write_tirf(const RadiometricFrame& frame, const std::string& path);

// Standard 16-bit single-channel grayscale PNG; bit_depth fixed at 16.
RadiometricFrame read_png16(const std::string& path);
void write_png16(const RadiometricFrame& frame, const std::string& path);

RadiometricFrame load_raw_frame(const std::string& path, FrameFormat format);

void write_png8_gray(const ToneMapped8& img, const std::string& path);
ToneMapped8 read_png8_gray(const std::string& path);
// Interleaved RGB, 3 bytes per pixel.
void write_png8_rgb(int width, int height, const std::vector<std::uint8_t>& rgb,
                    const std::string& path);

// "TEMB" container, little-endian: magic "TEMB", u32 channels, u32 height,
// u32 width, then channels*height*width f32, channel-major.
struct FloatTensorFile {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;
};
FloatTensorFile read_temb(const std::string& path);
void write_temb(const FloatTensorFile& tensor, const std::string& path);

// Scope guard for write-to-temp-then-rename: stage() gives the temp path,
// commit() renames it over the target. An uncommitted temp file is removed
// on destruction, so failed writes never leave partial outputs.
class AtomicOutput {
public:
    explicit AtomicOutput(std::string target);
    ~AtomicOutput();
    AtomicOutput(const AtomicOutput&) = delete;
    AtomicOutput& operator=(const AtomicOutput&) = delete;

    const std::string& stage() const { return temp_; }
    void commit();

private:
    std::string target_;
    std::string temp_;
    bool committed_ = false;
};

// Writes an entire byte buffer atomically.
void atomic_write_bytes(const std::string& path, const void* data, std::size_t size);
void atomic_write_text(const std::string& path, const std::string& text);

} // namespace tcmap
