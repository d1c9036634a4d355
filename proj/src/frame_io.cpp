#include "qrng/frame_io.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "qrng/errors.hpp"

namespace qrng {

namespace {

constexpr char kFrameMagic[8] = {'Q', 'R', 'N', 'G', 'F', 'R', 'M', '1'};
constexpr char kSideMagic[8] = {'Q', 'R', 'N', 'G', 'S', 'I', 'D', 'E'};

void put_u32(std::ostream& out, uint32_t v) {
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = (char)((v >> (8 * i)) & 0xff);
    out.write(b.data(), 4);
}

void put_u64(std::ostream& out, uint64_t v) {
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = (char)((v >> (8 * i)) & 0xff);
    out.write(b.data(), 8);
}

uint32_t get_u32(std::istream& in, const char* what) {
    std::array<unsigned char, 4> b;
    if (!in.read((char*)b.data(), 4)) throw parse_error(std::string("truncated ") + what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= (uint32_t)b[i] << (8 * i);
    return v;
}

uint64_t get_u64(std::istream& in, const char* what) {
    std::array<unsigned char, 8> b;
    if (!in.read((char*)b.data(), 8)) throw parse_error(std::string("truncated ") + what);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= (uint64_t)b[i] << (8 * i);
    return v;
}

void expect_magic(std::istream& in, const char (&magic)[8], const char* what) {
    char got[8];
    if (!in.read(got, 8)) throw parse_error(std::string("truncated ") + what + " header");
    if (std::memcmp(got, magic, 8) != 0)
        throw parse_error(std::string("bad magic in ") + what + " file");
}

void expect_eof(std::istream& in, const char* what) {
    char c;
    if (in.read(&c, 1)) throw parse_error(std::string("trailing data in ") + what + " file");
}

void check_padding(const BitString& bits, const char* what) {
    uint32_t used = bits.size() & 7u;
    if (used == 0 || bits.bytes().empty()) return;
    if (bits.bytes().back() >> used)
        throw parse_error(std::string("nonzero padding bits in ") + what + " file");
}

}  // namespace

void write_frames(const FrameBatch& batch, const std::string& frames_path,
                  const std::optional<std::string>& side_path) {
    if (side_path && !batch.side_info)
        throw param_error("write_frames: batch carries no side information");
    size_t nbytes = (batch.pixel_count + 7) / 8;

    std::ofstream out(frames_path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + frames_path);
    out.write(kFrameMagic, 8);
    put_u32(out, batch.pixel_count);
    put_u64(out, batch.frames.size());
    for (const BitString& x : batch.frames) {
        if (x.size() != batch.pixel_count)
            throw param_error("write_frames: frame length differs from pixel count");
        out.write((const char*)x.bytes().data(), (std::streamsize)nbytes);
    }
    if (!out) throw io_error("write failed: " + frames_path);
    out.close();
    if (!out) throw io_error("write failed: " + frames_path);

    if (!side_path) return;
    const auto& side = *batch.side_info;
    if (side.size() != batch.frames.size())
        throw param_error("write_frames: side records do not match frame count");
    std::ofstream sout(*side_path, std::ios::binary | std::ios::trunc);
    if (!sout) throw io_error("cannot open for writing: " + *side_path);
    sout.write(kSideMagic, 8);
    put_u32(sout, batch.pixel_count);
    put_u64(sout, side.size());
    for (const SideRecord& rec : side) {
        put_u32(sout, rec.photon_count);
        sout.write((const char*)rec.status.bytes().data(), (std::streamsize)nbytes);
    }
    if (!sout) throw io_error("write failed: " + *side_path);
}

FrameBatch read_frames(const std::string& frames_path,
                       const std::optional<std::string>& side_path) {
    std::ifstream in(frames_path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + frames_path);
    expect_magic(in, kFrameMagic, "frames");
    uint32_t M = get_u32(in, "frames header");
    if (M < 1) throw parse_error("frames file declares zero pixels");
    uint64_t count = get_u64(in, "frames header");
    size_t nbytes = (M + 7) / 8;

    FrameBatch batch;
    batch.pixel_count = M;
    batch.frames.assign(count, BitString(M));
    for (uint64_t f = 0; f < count; ++f) {
        BitString& x = batch.frames[(size_t)f];
        if (!in.read((char*)x.bytes().data(), (std::streamsize)nbytes))
            throw parse_error("truncated frames payload");
        check_padding(x, "frames");
    }
    expect_eof(in, "frames");

    if (!side_path) return batch;

    std::ifstream sin(*side_path, std::ios::binary);
    if (!sin) throw io_error("cannot open: " + *side_path);
    expect_magic(sin, kSideMagic, "side");
    uint32_t sM = get_u32(sin, "side header");
    uint64_t scount = get_u64(sin, "side header");
    if (sM != M || scount != count)
        throw parse_error("side file header does not match frames file");
    auto& side = batch.side_info.emplace(count, SideRecord{0, BitString(M)});
    for (uint64_t f = 0; f < count; ++f) {
        SideRecord& rec = side[(size_t)f];
        rec.photon_count = get_u32(sin, "side payload");
        if (!sin.read((char*)rec.status.bytes().data(), (std::streamsize)nbytes))
            throw parse_error("truncated side payload");
        check_padding(rec.status, "side");
        const auto& xb = batch.frames[(size_t)f].bytes();
        for (size_t b = 0; b < nbytes; ++b)
            if (xb[b] & ~rec.status.bytes()[b])
                throw parse_error("side file incompatible: detection on an inactive pixel");
    }
    expect_eof(sin, "side");
    return batch;
}

}  // namespace qrng
