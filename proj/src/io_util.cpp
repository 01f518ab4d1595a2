#include "cubicpulse/io_util.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cubicpulse/error.hpp"

namespace cubicpulse {

namespace {

void write_raw(const std::filesystem::path& path, const char* data, std::size_t size) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
        out.write(data, static_cast<std::streamsize>(size));
        if (!out)
            fail(ErrorKind::Io, "write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        fail(ErrorKind::Io, "rename to " + path.string() + " failed: " + ec.message());
}

} // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    write_raw(path, contents.data(), contents.size());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const unsigned char> bytes) {
    write_raw(path, reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        return "nan";
    return std::string(buf, ptr);
}

} // namespace cubicpulse
