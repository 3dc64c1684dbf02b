#include "sandpile/field_io.hpp"

#include <unistd.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace sandpile {

namespace {

void put_i64(std::vector<std::uint8_t>& out, std::int64_t v) {
    auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((u >> (8 * i)) & 0xff));
}

std::int64_t get_i64(const std::uint8_t* p) {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return static_cast<std::int64_t>(u);
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    put_i64(out, std::bit_cast<std::int64_t>(v));
}

double get_f64(const std::uint8_t* p) { return std::bit_cast<double>(get_i64(p)); }

struct Header {
    std::int64_t x0, y0, width, height;
};

Header decode_header(const std::vector<std::uint8_t>& bytes, const char* magic) {
    if (bytes.size() < 44) throw std::domain_error("field file: truncated header");
    if (std::memcmp(bytes.data(), magic, 4) != 0)
        throw std::domain_error(std::string("field file: bad magic, expected ") + magic);
    Header h{get_i64(&bytes[4]), get_i64(&bytes[12]), get_i64(&bytes[20]), get_i64(&bytes[28])};
    std::int64_t reserved = get_i64(&bytes[36]);
    if (reserved != 0) throw std::domain_error("field file: reserved word must be 0");
    if (h.width < 1 || h.height < 1) throw std::domain_error("field file: bad dimensions");
    std::size_t cells = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
    if (bytes.size() != 44 + 8 * cells) throw std::domain_error("field file: payload size mismatch");
    return h;
}

template <class Field, class Put>
std::vector<std::uint8_t> encode_any(const Field& f, const char* magic, Put put) {
    const Window& w = f.window();
    std::vector<std::uint8_t> out;
    out.reserve(44 + 8 * w.cells());
    out.insert(out.end(), magic, magic + 4);
    put_i64(out, w.x0);
    put_i64(out, w.y0);
    put_i64(out, w.width);
    put_i64(out, w.height);
    put_i64(out, 0);
    for (auto v : f.values()) put(out, v);
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_igf1(const IntField& f) {
    return encode_any(f, "IGF1", [](auto& out, std::int64_t v) { put_i64(out, v); });
}

IntField decode_igf1(const std::vector<std::uint8_t>& bytes) {
    Header h = decode_header(bytes, "IGF1");
    IntField f(Window(h.x0, h.y0, h.width, h.height));
    for (std::size_t i = 0; i < f.values().size(); ++i) f.values()[i] = get_i64(&bytes[44 + 8 * i]);
    return f;
}

std::vector<std::uint8_t> encode_fgf1(const RealField& f) {
    return encode_any(f, "FGF1", [](auto& out, double v) { put_f64(out, v); });
}

RealField decode_fgf1(const std::vector<std::uint8_t>& bytes) {
    Header h = decode_header(bytes, "FGF1");
    RealField f(Window(h.x0, h.y0, h.width, h.height));
    for (std::size_t i = 0; i < f.values().size(); ++i) f.values()[i] = get_f64(&bytes[44 + 8 * i]);
    return f;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::domain_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

IntField read_igf1(const std::string& path) { return decode_igf1(read_file(path)); }
RealField read_fgf1(const std::string& path) { return decode_fgf1(read_file(path)); }

void write_file_atomic(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.parent_path();
    if (dir.empty()) dir = ".";
    fs::path tmp = dir / (target.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot create " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_file_atomic(const std::string& path, const std::string& text) {
    write_file_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size) {
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::vector<std::uint8_t>& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return std::string(buf);
}

}  // namespace sandpile
