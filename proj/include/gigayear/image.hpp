#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gigayear {

// 8-bit grayscale raster with optional provenance comments, stored as
// binary PGM (P5, maxval 255).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;          // row-major
    std::vector<std::string> comments;         // written as '#' header lines

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
    void set(int row, int col, std::uint8_t v) {
        pixels[static_cast<std::size_t>(row) * width + col] = v;
    }
};

namespace pnm {

inline void skip_comments(std::istream& in, std::vector<std::string>* comments = nullptr) {
    while (true) {
        while (std::isspace(in.peek())) in.get();
        if (in.peek() != '#') return;
        std::string line;
        std::getline(in, line);
        if (comments) comments->push_back(line.substr(1).empty() ? "" : line.substr(1));
    }
}

}  // namespace pnm

inline void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
    out << "P5\n";
    for (const auto& c : img.comments) out << "#" << c << "\n";
    out << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
}

inline GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("read_pgm: not a binary PGM: " + path);
    GrayImage img;
    pnm::skip_comments(in, &img.comments);
    in >> img.width;
    pnm::skip_comments(in);
    in >> img.height;
    pnm::skip_comments(in);
    int maxval = 0;
    in >> maxval;
    if (maxval != 255) throw std::runtime_error("read_pgm: expected maxval 255");
    in.get();  // single whitespace after header
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (!in) throw std::runtime_error("read_pgm: truncated pixel data in " + path);
    return img;
}

// 1-bit raster, stored as binary PBM (P4); bit 1 = tungsten present.
struct BitImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // one byte per pixel, 0 or 1

    std::uint8_t at(int row, int col) const {
        return bits[static_cast<std::size_t>(row) * width + col];
    }
    void set(int row, int col, bool v) {
        bits[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0;
    }
};

inline void write_pbm(const BitImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pbm: cannot open " + path);
    out << "P4\n" << img.width << " " << img.height << "\n";
    const int rowBytes = (img.width + 7) / 8;
    std::vector<std::uint8_t> row(static_cast<std::size_t>(rowBytes));
    for (int r = 0; r < img.height; ++r) {
        std::fill(row.begin(), row.end(), 0);
        for (int c = 0; c < img.width; ++c)
            if (img.at(r, c))
                row[static_cast<std::size_t>(c / 8)] =
                    static_cast<std::uint8_t>(row[static_cast<std::size_t>(c / 8)] |
                                              (0x80 >> (c % 8)));
        out.write(reinterpret_cast<const char*>(row.data()), rowBytes);
    }
}

inline BitImage read_pbm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pbm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P4") throw std::runtime_error("read_pbm: not a binary PBM: " + path);
    BitImage img;
    pnm::skip_comments(in);
    in >> img.width;
    pnm::skip_comments(in);
    in >> img.height;
    in.get();
    const int rowBytes = (img.width + 7) / 8;
    std::vector<std::uint8_t> row(static_cast<std::size_t>(rowBytes));
    img.bits.assign(static_cast<std::size_t>(img.width) * img.height, 0);
    for (int r = 0; r < img.height; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), rowBytes);
        if (!in) throw std::runtime_error("read_pbm: truncated pixel data in " + path);
        for (int c = 0; c < img.width; ++c)
            img.set(r, c, (row[static_cast<std::size_t>(c / 8)] >> (7 - c % 8)) & 1);
    }
    return img;
}

}  // namespace gigayear
