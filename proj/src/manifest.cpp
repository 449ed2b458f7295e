#include "revgrid/manifest.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "revgrid/errors.hpp"

namespace revgrid {

namespace {

class Sha1 {
public:
    void update(const void* data, std::size_t len) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        total_ += len;
        while (len > 0) {
            const std::size_t take = std::min(len, std::size_t(64) - fill_);
            std::memcpy(block_ + fill_, p, take);
            fill_ += take;
            p += take;
            len -= take;
            if (fill_ == 64) {
                process();
                fill_ = 0;
            }
        }
    }

    std::array<unsigned char, 20> digest() {
        const std::uint64_t bits = total_ * 8;
        unsigned char pad = 0x80;
        update(&pad, 1);
        unsigned char zero = 0x00;
        while (fill_ != 56) update(&zero, 1);
        unsigned char len_be[8];
        for (int i = 0; i < 8; ++i) len_be[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        update(len_be, 8);
        std::array<unsigned char, 20> out{};
        for (int i = 0; i < 5; ++i) {
            out[4 * i] = static_cast<unsigned char>(h_[i] >> 24);
            out[4 * i + 1] = static_cast<unsigned char>(h_[i] >> 16);
            out[4 * i + 2] = static_cast<unsigned char>(h_[i] >> 8);
            out[4 * i + 3] = static_cast<unsigned char>(h_[i]);
        }
        return out;
    }

private:
    static std::uint32_t rotl(std::uint32_t v, int s) { return (v << s) | (v >> (32 - s)); }

    void process() {
        std::uint32_t w[80];
        for (int i = 0; i < 16; ++i) {
            w[i] = (std::uint32_t(block_[4 * i]) << 24) | (std::uint32_t(block_[4 * i + 1]) << 16) |
                   (std::uint32_t(block_[4 * i + 2]) << 8) | std::uint32_t(block_[4 * i + 3]);
        }
        for (int i = 16; i < 80; ++i) w[i] = rotl(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
        std::uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3], e = h_[4];
        for (int i = 0; i < 80; ++i) {
            std::uint32_t f, k;
            if (i < 20) {
                f = (b & c) | (~b & d);
                k = 0x5A827999;
            } else if (i < 40) {
                f = b ^ c ^ d;
                k = 0x6ED9EBA1;
            } else if (i < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8F1BBCDC;
            } else {
                f = b ^ c ^ d;
                k = 0xCA62C1D6;
            }
            const std::uint32_t tmp = rotl(a, 5) + f + e + k + w[i];
            e = d;
            d = c;
            c = rotl(b, 30);
            b = a;
            a = tmp;
        }
        h_[0] += a;
        h_[1] += b;
        h_[2] += c;
        h_[3] += d;
        h_[4] += e;
    }

    std::uint32_t h_[5] = {0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476, 0xC3D2E1F0};
    unsigned char block_[64] = {};
    std::size_t fill_ = 0;
    std::uint64_t total_ = 0;
};

std::string to_hex(const std::array<unsigned char, 20>& digest) {
    static const char* hex = "0123456789abcdef";
    std::string out(40, '0');
    for (int i = 0; i < 20; ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0x0F];
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::InvalidInput, "manifest: cannot read output file " + path);
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return buffer.str();
}

}  // namespace

std::string sha1_hex(const std::string& bytes) {
    Sha1 sha;
    sha.update(bytes.data(), bytes.size());
    return to_hex(sha.digest());
}

std::string git_blob_hash(const std::string& bytes) {
    Sha1 sha;
    const std::string header = "blob " + std::to_string(bytes.size());
    sha.update(header.data(), header.size() + 1);  // includes the NUL
    sha.update(bytes.data(), bytes.size());
    return to_hex(sha.digest());
}

void write_manifest(const std::string& out_dir, const ConfigFile& config,
                    const std::vector<std::string>& relative_files) {
    std::ostringstream body;
    body << "revgrid-run-manifest v1\n";
    body << "[config]\n";
    for (const auto& [section, entries] : config.sections()) {
        for (const auto& [key, value] : entries) {
            body << section << "." << key << " = " << value << "\n";
        }
    }
    body << "[outputs]\n";
    std::string combined_input;
    for (const auto& name : relative_files) {
        const std::string hash = git_blob_hash(read_file(out_dir + "/" + name));
        body << hash << "  " << name << "\n";
        combined_input += hash + "  " + name + "\n";
    }
    body << "[combined]\n" << sha1_hex(combined_input) << "\n";

    std::ofstream os(out_dir + "/manifest.txt", std::ios::binary);
    if (!os) throw Error(ErrorKind::InvalidInput, "manifest: cannot write " + out_dir);
    os << body.str();
}

}  // namespace revgrid
