#include "tcmap/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "tcmap/error.hpp"
#include "tcmap/image_io.hpp"

namespace tcmap {

namespace {

constexpr char kMagic[4] = {'T', 'C', 'N', 'W'};
constexpr std::uint16_t kVersion = 1;

void put_u16le(std::string& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32le(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

} // namespace

void write_tcnw(const std::vector<TensorBlock>& blocks, const std::string& path) {
    std::string buf;
    buf.append(kMagic, 4);
    put_u16le(buf, kVersion);
    put_u32le(buf, static_cast<std::uint32_t>(blocks.size()));
    for (const auto& b : blocks) {
        put_u32le(buf, static_cast<std::uint32_t>(b.shape.size()));
        std::size_t n = 1;
        for (int d : b.shape) {
            if (d <= 0) throw ValidationError("checkpoint block has non-positive dimension");
            put_u32le(buf, static_cast<std::uint32_t>(d));
            n *= static_cast<std::size_t>(d);
        }
        if (n != b.data.size())
            throw ValidationError("checkpoint block data length does not match its shape");
    }
    for (const auto& b : blocks)
        buf.append(reinterpret_cast<const char*>(b.data.data()), b.data.size() * 4);
    atomic_write_bytes(path, buf.data(), buf.size());
}

std::vector<TensorBlock> read_tcnw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
        if (bytes.size() - pos < n) throw IoError(path + ": truncated checkpoint");
    };
    auto u16 = [&]() {
        need(2);
        std::uint16_t v = static_cast<std::uint8_t>(bytes[pos]) |
                          (static_cast<std::uint16_t>(static_cast<std::uint8_t>(bytes[pos + 1])) << 8);
        pos += 2;
        return v;
    };
    auto u32 = [&]() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[pos + i])) << (8 * i);
        pos += 4;
        return v;
    };

    need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw IoError(path + ": bad magic, not a TCNW checkpoint");
    pos += 4;
    std::uint16_t version = u16();
    if (version != kVersion)
        throw IoError(path + ": unsupported checkpoint version " + std::to_string(version));

    std::uint32_t count = u32();
    if (count > 1u << 16) throw IoError(path + ": implausible block count");
    std::vector<TensorBlock> blocks(count);
    for (auto& b : blocks) {
        std::uint32_t ndims = u32();
        if (ndims == 0 || ndims > 8) throw IoError(path + ": implausible block rank");
        std::size_t n = 1;
        b.shape.resize(ndims);
        for (auto& d : b.shape) {
            std::uint32_t dim = u32();
            if (dim == 0 || dim > 1u << 24) throw IoError(path + ": implausible block dimension");
            d = static_cast<int>(dim);
            n *= dim;
        }
        b.data.resize(n);
    }
    for (auto& b : blocks) {
        need(b.data.size() * 4);
        std::memcpy(b.data.data(), bytes.data() + pos, b.data.size() * 4);
        pos += b.data.size() * 4;
    }
    if (pos != bytes.size()) throw IoError(path + ": trailing bytes after checkpoint payload");
    return blocks;
}

void save_checkpoint(const CompressionCheckpoint& ckpt, const std::string& path) {
    CompressionNet net = ckpt.net;  // parameters() is non-const
    std::vector<TensorBlock> blocks;
    for (auto* p : net.parameters()) blocks.push_back({p->shape, p->data});
    TensorBlock periods;
    periods.shape = {ckpt.eval_periods.size()};
    for (double d : ckpt.eval_periods.periods) periods.data.push_back(static_cast<float>(d));
    blocks.push_back(std::move(periods));
    write_tcnw(blocks, path);
}

CompressionCheckpoint load_checkpoint(const std::string& path) {
    auto blocks = read_tcnw(path);
    if (blocks.empty()) throw IoError(path + ": empty checkpoint");

    // Network geometry is recoverable from the block shapes.
    const auto& head_w = blocks.size() >= 3 ? blocks[blocks.size() - 3] : blocks.front();
    if (head_w.shape.size() != 2 || head_w.shape[0] % 3 != 0)
        throw IoError(path + ": head weight block has unexpected shape");
    const int n = head_w.shape[0] / 3;

    CompressionCheckpoint ckpt;
    const auto& c1w = blocks[0].shape;
    if (c1w.size() != 4) throw IoError(path + ": conv1 weight block has unexpected shape");
    ckpt.net = CompressionNet::random_init(n, 0, c1w[0], c1w[2], head_w.shape[1]);
    auto params = ckpt.net.parameters();
    if (blocks.size() != params.size() + 1)
        throw IoError(path + ": expected " + std::to_string(params.size() + 1) + " blocks, found " +
                      std::to_string(blocks.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (blocks[i].shape != params[i]->shape)
            throw IoError(path + ": block " + std::to_string(i) + " shape mismatch");
        params[i]->data = blocks[i].data;
    }
    const auto& pb = blocks.back();
    if (pb.shape != std::vector<int>{n})
        throw IoError(path + ": period block must have shape [N]");
    for (float d : pb.data) ckpt.eval_periods.periods.push_back(static_cast<double>(d));
    ckpt.eval_periods.validate();
    return ckpt;
}

} // namespace tcmap
