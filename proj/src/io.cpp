#include "gsep/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace gsep {

namespace {
constexpr char kMagic[4] = {'G', 'S', 'E', 'P'};

void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)(v >> 8 & 0xff),
                          (unsigned char)(v >> 16 & 0xff), (unsigned char)(v >> 24 & 0xff)};
    os.write(reinterpret_cast<char*>(b), 4);
}
uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}
}  // namespace

void write_raw(const std::string& path, const Image& img) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + tmp);
        os.write(kMagic, 4);
        put_u32(os, uint32_t(img.grid.n));
        put_u32(os, 0);  // flags
        put_u32(os, 0);  // reserved
        static_assert(sizeof(cplx) == 16);
        os.write(reinterpret_cast<const char*>(img.v.data()),
                 std::streamsize(sizeof(cplx)) * img.grid.n * img.grid.n);
        if (!os) throw std::runtime_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed for " + path);
}

Image read_raw(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("bad magic in " + path);
    uint32_t n = get_u32(is);
    get_u32(is);
    get_u32(is);
    Image img = Image::zero(FrequencyGrid::make(int(n)));
    is.read(reinterpret_cast<char*>(img.v.data()), std::streamsize(sizeof(cplx)) * n * n);
    if (!is) throw std::runtime_error("short read from " + path);
    return img;
}

void write_pgm(const std::string& path, const Image& img) {
    const int n = img.grid.n;
    RArray re = img.v.real();
    double lo = re.minCoeff(), hi = re.maxCoeff();
    double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    std::vector<unsigned char> px(size_t(n) * n);
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++)
            px[size_t(i) * n + j] = (unsigned char)(std::lround((re(i, j) - lo) * scale));
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + tmp);
        os << "P5\n" << n << " " << n << "\n255\n";
        os.write(reinterpret_cast<const char*>(px.data()), std::streamsize(px.size()));
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed for " + path);
}

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + tmp);
        os << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed for " + path);
}

}  // namespace gsep
