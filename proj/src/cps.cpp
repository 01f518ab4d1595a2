#include "cubicpulse/cps.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "cubicpulse/error.hpp"
#include "cubicpulse/io_util.hpp"

namespace cubicpulse {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'C', 'P', 'S', '1'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    auto u = static_cast<std::make_unsigned_t<T>>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<std::uint8_t>((u >> (8 * i)) & 0xFFu));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    bool has(std::size_t n) const { return pos_ + n <= bytes_.size(); }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    template <typename T>
    T get() {
        std::make_unsigned_t<T> u = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            u |= static_cast<std::make_unsigned_t<T>>(bytes_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        return static_cast<T>(u);
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

bool sign_extended(std::int64_t v, int bits) {
    return v >= signed_min(bits) && v <= signed_max(bits);
}

} // namespace

std::vector<std::uint8_t> serialize_cps(const CompressedPulse& cp) {
    cp.validate();
    if (cp.format.alpha_bits > 16)
        fail(ErrorKind::Range, "cps: alpha_bits > 16 cannot be stored in the i16 alpha field");
    if (cp.segments.size() > 0xFFFFFFFFull)
        fail(ErrorKind::Range, "cps: too many segments");

    std::vector<std::uint8_t> out;
    out.reserve(kCpsHeaderBytes + kCpsSegmentBytes * cp.segments.size());
    out.insert(out.end(), kMagic.begin(), kMagic.end());
    out.push_back(cp.symmetric ? 1 : 0);
    out.push_back(static_cast<std::uint8_t>(cp.format.word_bits));
    out.push_back(static_cast<std::uint8_t>(cp.format.frac_bits));
    out.push_back(static_cast<std::uint8_t>(cp.format.alpha_bits));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cp.segments.size()));
    for (const auto& s : cp.segments) {
        put_le<std::uint32_t>(out, s.n_samples);
        put_le<std::int16_t>(out, static_cast<std::int16_t>(s.alpha_raw));
        put_le<std::int64_t>(out, s.beta_raw);
        put_le<std::int64_t>(out, s.gamma_raw);
        put_le<std::int64_t>(out, s.delta_raw);
    }
    return out;
}

CompressedPulse parse_cps(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
        fail(ErrorKind::Format, "bad magic");
    if (bytes.size() < kCpsHeaderBytes)
        fail(ErrorKind::Format, "unexpected end of file in header");

    Reader rd(bytes.subspan(kMagic.size()));
    CompressedPulse cp;
    const auto flags = rd.get<std::uint8_t>();
    if (flags & ~1u)
        fail(ErrorKind::Format, "unknown flag bits " + std::to_string(flags));
    cp.symmetric = (flags & 1u) != 0;
    cp.format.word_bits = rd.get<std::uint8_t>();
    cp.format.frac_bits = rd.get<std::uint8_t>();
    cp.format.alpha_bits = rd.get<std::uint8_t>();
    cp.format.acc_bits = std::max(cp.format.acc_bits, cp.format.word_bits);
    try {
        cp.format.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Format, std::string("invalid format descriptor: ") + e.what());
    }
    if (cp.format.alpha_bits > 16)
        fail(ErrorKind::Format, "alpha_bits > 16 in header");

    const auto count = rd.get<std::uint32_t>();
    cp.segments.reserve(std::min<std::size_t>(count, rd.remaining() / kCpsSegmentBytes));
    const char* names[] = {"beta_raw", "gamma_raw", "delta_raw"};
    for (std::uint32_t k = 0; k < count; ++k) {
        if (!rd.has(kCpsSegmentBytes))
            fail(ErrorKind::Format, "unexpected end of file at segment " + std::to_string(k));
        QuantizedSegment s;
        s.n_samples = rd.get<std::uint32_t>();
        s.alpha_raw = rd.get<std::int16_t>();
        std::int64_t* raws[] = {&s.beta_raw, &s.gamma_raw, &s.delta_raw};
        for (int i = 0; i < 3; ++i) {
            *raws[i] = rd.get<std::int64_t>();
            if (!sign_extended(*raws[i], cp.format.word_bits))
                fail(ErrorKind::Format, std::string(names[i]) + " of segment " + std::to_string(k) +
                                            " is not sign-extended from " +
                                            std::to_string(cp.format.word_bits) + " bits");
        }
        if (!sign_extended(s.alpha_raw, cp.format.alpha_bits))
            fail(ErrorKind::Format, "alpha_raw of segment " + std::to_string(k) +
                                        " exceeds alpha_bits");
        if (s.n_samples == 0)
            fail(ErrorKind::Format, "segment " + std::to_string(k) + " has zero samples");
        cp.segments.push_back(s);
    }
    if (rd.remaining() != 0)
        fail(ErrorKind::Format, std::to_string(rd.remaining()) + " trailing bytes after last segment");
    return cp;
}

void write_cps(const std::filesystem::path& path, const CompressedPulse& cp) {
    const auto bytes = serialize_cps(cp);
    write_file_atomic(path, std::span<const unsigned char>(bytes.data(), bytes.size()));
}

CompressedPulse read_cps(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_cps(bytes);
}

} // namespace cubicpulse
