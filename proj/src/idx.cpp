#include "pupolicy/idx.hpp"

#include <zlib.h>

#include <fstream>
#include <limits>

#include "pupolicy/errors.hpp"

namespace pupolicy {

namespace {

constexpr std::uint32_t kLabelMagic = 0x00000801;
constexpr std::uint32_t kImageMagic = 0x00000803;

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset) {
    if (offset + 4 > bytes.size())
        throw ParseError("truncated IDX header", bytes.size());
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

}  // namespace

std::vector<int> parse_idx_labels(const std::vector<std::uint8_t>& bytes) {
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != kLabelMagic)
        throw ParseError("bad IDX label magic " + std::to_string(magic), 0);
    const std::uint32_t n = read_be32(bytes, 4);
    if (bytes.size() < 8 + static_cast<std::size_t>(n))
        throw ParseError("truncated IDX label payload", bytes.size());
    std::vector<int> labels(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const int v = bytes[8 + i];
        if (v > 9) throw ParseError("label out of range 0..9", 8 + i);
        labels[i] = v;
    }
    return labels;
}

Matrix parse_idx_images(const std::vector<std::uint8_t>& bytes) {
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != kImageMagic)
        throw ParseError("bad IDX image magic " + std::to_string(magic), 0);
    const std::uint64_t n = read_be32(bytes, 4);
    const std::uint64_t h = read_be32(bytes, 8);
    const std::uint64_t w = read_be32(bytes, 12);
    const std::uint64_t d = h * w;
    if (d == 0 || n > std::numeric_limits<std::uint32_t>::max() ||
        n * d / d != n)
        throw ParseError("IDX dimension overflow", 4);
    if (bytes.size() < 16 + n * d)
        throw ParseError("truncated IDX image payload", bytes.size());

    Matrix images(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < images.data.size(); ++i)
        images.data[i] = static_cast<double>(bytes[16 + i]) / 255.0;
    return images;
}

std::vector<std::uint8_t> read_idx_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open IDX file: " + path.string());
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());

    const bool gzipped = raw.size() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b;
    if (!gzipped) return raw;

    std::vector<std::uint8_t> out;
    out.reserve(raw.size() * 4);
    z_stream zs{};
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
        throw ParseError("zlib init failed", 0);
    zs.next_in = raw.data();
    zs.avail_in = static_cast<uInt>(raw.size());
    std::uint8_t buf[1 << 16];
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = buf;
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw ParseError("gzip decompression failed for " + path.string(),
                             zs.total_in);
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
    }
    inflateEnd(&zs);
    return out;
}

}  // namespace pupolicy
