#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sandpile/field.hpp"

namespace sandpile {

// IGF1: magic "IGF1", five little-endian signed 64-bit integers
// x0, y0, width, height, reserved=0, then width*height little-endian
// signed 64-bit values, row-major, rows in increasing y.
// FGF1: same header with magic "FGF1", payload little-endian IEEE doubles.

std::vector<std::uint8_t> encode_igf1(const IntField& f);
IntField decode_igf1(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encode_fgf1(const RealField& f);
RealField decode_fgf1(const std::vector<std::uint8_t>& bytes);

IntField read_igf1(const std::string& path);
RealField read_fgf1(const std::string& path);

/// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::vector<std::uint8_t>& bytes);
void write_file_atomic(const std::string& path, const std::string& text);

std::vector<std::uint8_t> read_file(const std::string& path);

/// FNV-1a 64-bit, used for reproducibility manifests and golden hashes.
std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size);
std::string fnv1a64_hex(const std::vector<std::uint8_t>& bytes);

}  // namespace sandpile
