#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cubicpulse/fixed_point.hpp"

namespace cubicpulse {

// Little-endian coefficient file:
//   "CPS1" | u8 flags (bit0 symmetric) | u8 word_bits | u8 frac_bits | u8 alpha_bits
//   | u32 segment_count | segment_count x { u32 n_samples, i16 alpha_raw,
//   i64 beta_raw, i64 gamma_raw, i64 delta_raw }
// Raws are sign-extended from word_bits; the reader rejects any other upper bits.

inline constexpr std::size_t kCpsHeaderBytes = 12;
inline constexpr std::size_t kCpsSegmentBytes = 30;

std::vector<std::uint8_t> serialize_cps(const CompressedPulse& cp);
/// Throws format-error ("bad magic", "unexpected end of file at segment k", ...).
CompressedPulse parse_cps(std::span<const std::uint8_t> bytes);

void write_cps(const std::filesystem::path& path, const CompressedPulse& cp);
CompressedPulse read_cps(const std::filesystem::path& path);

} // namespace cubicpulse
