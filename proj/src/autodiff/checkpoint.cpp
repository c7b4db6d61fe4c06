#include "nad/autodiff/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "nad/error.hpp"

namespace nad::ad {
namespace {

constexpr char kMagic[4] = {'N', 'A', 'D', 'T'};

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
    }
    void f64(double d) {
        const auto v = std::bit_cast<std::uint64_t>(d);
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
    }
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::byte*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    std::vector<std::byte> take() { return std::move(out_); }

private:
    std::vector<std::byte> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::byte> in) : in_(in) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(in_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::to_integer<std::uint64_t>(in_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return std::bit_cast<double>(v);
    }
    std::span<const std::byte> bytes(std::size_t n) {
        need(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return in_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw Error(Errc::truncated_file, "checkpoint ends early");
    }
    std::span<const std::byte> in_;
    std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(Errc::dimension_overflow, std::string(what) + " does not fit in u32");
    }
    return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::byte> encode_checkpoint(std::span<const NamedTensor> tensors) {
    Writer w;
    w.raw(kMagic, 4);
    w.u32(kCheckpointVersion);
    w.u32(checked_u32(tensors.size(), "tensor count"));
    for (const auto& [name, t] : tensors) {
        w.u32(checked_u32(name.size(), "name length"));
        w.raw(name.data(), name.size());
        w.u32(checked_u32(t.rank(), "rank"));
        for (std::size_t d : t.shape()) w.u32(checked_u32(d, "dimension"));
        for (double v : t.data()) w.f64(v);
    }
    return w.take();
}

std::vector<NamedTensor> decode_checkpoint(std::span<const std::byte> bytes) {
    Reader r(bytes);
    const auto magic = r.bytes(4);
    if (std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw Error(Errc::bad_magic, "not a NADT checkpoint");
    }
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        throw Error(Errc::bad_magic, "unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t count = r.u32();
    std::vector<NamedTensor> out;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = r.u32();
        const auto name_bytes = r.bytes(name_len);
        std::string name(reinterpret_cast<const char*>(name_bytes.data()), name_len);
        const std::uint32_t rank = r.u32();
        Shape shape(rank);
        std::size_t numel = 1;
        for (auto& d : shape) {
            d = r.u32();
            if (d != 0 && numel > std::numeric_limits<std::size_t>::max() / d) {
                throw Error(Errc::dimension_overflow, "tensor " + name + " is too large");
            }
            numel *= d;
        }
        if (numel > r.remaining() / 8) {
            throw Error(Errc::truncated_file, "tensor " + name + " data ends early");
        }
        std::vector<double> data(numel);
        for (auto& v : data) v = r.f64();
        out.push_back({std::move(name), Tensor(std::move(shape), std::move(data))});
    }
    return out;
}

void write_checkpoint(const std::filesystem::path& path, std::span<const NamedTensor> tensors) {
    const auto bytes = encode_checkpoint(tensors);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(std::as_bytes(std::span<const char>(raw)));
}

}  // namespace nad::ad
