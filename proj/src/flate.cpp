#include "opsteg/flate.hpp"

#include <zlib.h>

#include <array>
#include <climits>

#include "opsteg/error.hpp"

namespace opsteg::flate {

namespace {

Bytef* as_bytes(std::string_view s) {
    return reinterpret_cast<Bytef*>(const_cast<char*>(s.data()));
}

}  // namespace

std::string inflate(std::string_view compressed) {
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) {
        throw Error(ErrorCode::CorruptStream, "inflateInit failed");
    }
    zs.next_in = as_bytes(compressed);
    zs.avail_in = static_cast<uInt>(compressed.size());

    std::string out;
    std::array<char, 1 << 16> chunk{};
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = reinterpret_cast<Bytef*>(chunk.data());
        zs.avail_out = static_cast<uInt>(chunk.size());
        rc = ::inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            const std::string msg = zs.msg != nullptr ? zs.msg : "inflate error";
            inflateEnd(&zs);
            throw Error(ErrorCode::CorruptStream, msg);
        }
        out.append(chunk.data(), chunk.size() - zs.avail_out);
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            throw Error(ErrorCode::CorruptStream, "truncated deflate data");
        }
    }
    inflateEnd(&zs);
    return out;
}

std::string deflate(std::string_view plain) {
    if (plain.size() > UINT_MAX / 2) {
        throw Error(ErrorCode::InvalidArgument, "stream too large to compress");
    }
    uLongf bound = compressBound(static_cast<uLong>(plain.size()));
    std::string out(bound, '\0');
    const int rc = compress2(reinterpret_cast<Bytef*>(out.data()), &bound, as_bytes(plain),
                             static_cast<uLong>(plain.size()), Z_DEFAULT_COMPRESSION);
    if (rc != Z_OK) {
        throw Error(ErrorCode::CorruptStream, "deflate failed");
    }
    out.resize(bound);
    return out;
}

}  // namespace opsteg::flate
