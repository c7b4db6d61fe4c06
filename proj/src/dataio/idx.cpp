#include "nad/dataio/idx.hpp"

#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "nad/error.hpp"

namespace nad::data {

namespace {

// Upper bound on decoded bytes; far above any image corpus this tool handles.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t at) {
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
           (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

}  // namespace

IdxArray parse_idx(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) throw Error(Errc::truncated_file, "IDX header is shorter than 4 bytes");
    const std::uint32_t magic = read_be32(bytes, 0);
    std::size_t rank = 0;
    if (magic == kIdxImageMagic) {
        rank = 3;
    } else if (magic == kIdxLabelMagic) {
        rank = 1;
    } else {
        throw Error(Errc::bad_magic, "unsupported IDX magic " + std::to_string(magic));
    }
    const std::size_t header = 4 + 4 * rank;
    if (bytes.size() < header) throw Error(Errc::truncated_file, "IDX dimensions are truncated");

    IdxArray out;
    std::uint64_t total = 1;
    for (std::size_t d = 0; d < rank; ++d) {
        out.dims.push_back(read_be32(bytes, 4 + 4 * d));
        total *= out.dims.back();
        if (total > kMaxElements) throw Error(Errc::dimension_overflow, "IDX payload is too large");
    }
    const std::size_t payload = bytes.size() - header;
    if (payload < total) {
        throw Error(Errc::truncated_file, "IDX payload has " + std::to_string(payload) +
                                              " bytes, header declares " + std::to_string(total));
    }
    if (payload > total) throw Error(Errc::validation_failed, "IDX file has trailing bytes");
    out.values.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
    return out;
}

IdxArray parse_idx(const std::filesystem::path& path) { return parse_idx(read_file(path)); }

std::vector<std::uint8_t> encode_idx(const IdxArray& idx) {
    if (idx.dims.size() != 1 && idx.dims.size() != 3) {
        throw Error(Errc::invalid_argument, "IDX rank must be 1 or 3");
    }
    std::uint64_t total = 1;
    for (auto d : idx.dims) total *= d;
    if (total != idx.values.size()) throw Error(Errc::shape_mismatch, "IDX dims do not match values");
    std::vector<std::uint8_t> out;
    out.reserve(4 + 4 * idx.dims.size() + idx.values.size());
    put_be32(out, idx.magic());
    for (auto d : idx.dims) put_be32(out, d);
    out.insert(out.end(), idx.values.begin(), idx.values.end());
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
    std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(Errc::io_error, "failed reading " + path.string());
    return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
}

}  // namespace nad::data
