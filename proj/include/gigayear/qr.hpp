#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gigayear/gf256.hpp"
#include "gigayear/qr_tables.hpp"

namespace gigayear {

// Square bit matrix; bit 1 = dark module.
class BitMatrix {
public:
    BitMatrix() = default;
    explicit BitMatrix(int size) : size_(size), bits_(static_cast<std::size_t>(size) * size, 0) {}

    int size() const { return size_; }
    bool get(int row, int col) const { return bits_[index(row, col)] != 0; }
    void set(int row, int col, bool v) { bits_[index(row, col)] = v ? 1 : 0; }

    bool operator==(const BitMatrix& o) const { return size_ == o.size_ && bits_ == o.bits_; }

private:
    std::size_t index(int row, int col) const {
        if (row < 0 || col < 0 || row >= size_ || col >= size_)
            throw std::out_of_range("BitMatrix: index out of range");
        return static_cast<std::size_t>(row) * size_ + col;
    }
    int size_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct QrSymbol {
    int version = 1;
    EcLevel ecLevel = EcLevel::L;
    BitMatrix modules;
    std::vector<std::uint8_t> payload;
};

enum class DecodeStatus { Ok, FinderNotFound, FormatUnreadable, UncorrectableBlock, BadPayload };

struct DecodeReport {
    DecodeStatus status = DecodeStatus::BadPayload;
    std::vector<std::uint8_t> payload;
    int correctedCodewords = 0;
    int usedErasures = 0;
    std::array<bool, 3> finderFound{false, false, false};
    std::string message;

    bool ok() const { return status == DecodeStatus::Ok; }
};

namespace qrdetail {

// 1 = dark, in the 7x7 finder square.
inline bool finder_dark(int r, int c) {
    const bool border = (r == 0 || r == 6 || c == 0 || c == 6);
    const bool core = (r >= 2 && r <= 4 && c >= 2 && c <= 4);
    return border || core;
}

// Corner order: top-left, top-right, bottom-left.
inline std::array<std::pair<int, int>, 3> finder_origins(int size) {
    return {{{0, 0}, {0, size - 7}, {size - 7, 0}}};
}

// Marks function modules and draws the fixed patterns (finders, separators,
// timing, alignment, dark module).  Format/version areas are marked as
// function modules; their bits are drawn separately.
inline void draw_fixed_patterns(BitMatrix& m, BitMatrix& func, int version) {
    const int size = m.size();
    auto setFunc = [&](int r, int c, bool dark) {
        if (r < 0 || c < 0 || r >= size || c >= size) return;
        m.set(r, c, dark);
        func.set(r, c, true);
    };

    // Finder patterns with separators.
    for (const auto& [or_, oc] : finder_origins(size))
        for (int r = -1; r <= 7; ++r)
            for (int c = -1; c <= 7; ++c) {
                const int rr = or_ + r, cc = oc + c;
                if (rr < 0 || cc < 0 || rr >= size || cc >= size) continue;
                const bool inside = (r >= 0 && r <= 6 && c >= 0 && c <= 6);
                setFunc(rr, cc, inside && finder_dark(r, c));
            }

    // Timing patterns.
    for (int i = 8; i < size - 8; ++i) {
        setFunc(6, i, i % 2 == 0);
        setFunc(i, 6, i % 2 == 0);
    }

    // Alignment patterns (skip the three that overlap finders).
    const auto centers = QrTables::alignmentCenters(version);
    for (std::size_t a = 0; a < centers.size(); ++a)
        for (std::size_t b = 0; b < centers.size(); ++b) {
            const int cr = centers[a], cc = centers[b];
            const bool atFinder =
                (cr <= 8 && cc <= 8) || (cr <= 8 && cc >= size - 9) ||
                (cr >= size - 9 && cc <= 8);
            if (atFinder) continue;
            for (int r = -2; r <= 2; ++r)
                for (int c = -2; c <= 2; ++c) {
                    const int d = std::max(std::abs(r), std::abs(c));
                    setFunc(cr + r, cc + c, d != 1);
                }
        }

    // Reserve format areas (bits drawn later) and the dark module.
    for (int i = 0; i <= 8; ++i) {
        if (i != 6) {
            func.set(8, i, true);
            func.set(i, 8, true);
        }
    }
    for (int i = 0; i < 8; ++i) {
        func.set(8, size - 1 - i, true);
        func.set(size - 1 - i, 8, true);
    }
    setFunc(size - 8, 8, true);  // dark module

    // Version information areas (versions >= 7).
    if (version >= 7)
        for (int i = 0; i < 18; ++i) {
            const int a = size - 11 + i % 3, b = i / 3;
            func.set(a, b, true);
            func.set(b, a, true);
        }
}

// BCH(15,5) format word with the standard XOR mask.
inline int format_bits(EcLevel level, int mask) {
    const int data = (ec_level_format_bits(level) << 3) | mask;
    int rem = data;
    for (int i = 0; i < 10; ++i) rem = (rem << 1) ^ ((rem >> 9) * 0x537);
    return ((data << 10) | rem) ^ 0x5412;
}

inline void draw_format_bits(BitMatrix& m, EcLevel level, int mask) {
    const int bits = format_bits(level, mask);
    const int size = m.size();
    auto bit = [&](int i) { return ((bits >> i) & 1) != 0; };
    for (int i = 0; i <= 5; ++i) m.set(i, 8, bit(i));
    m.set(7, 8, bit(6));
    m.set(8, 8, bit(7));
    m.set(8, 7, bit(8));
    for (int i = 9; i < 15; ++i) m.set(8, 14 - i, bit(i));
    for (int i = 0; i < 8; ++i) m.set(8, size - 1 - i, bit(i));
    for (int i = 8; i < 15; ++i) m.set(size - 15 + i, 8, bit(i));
}

inline int version_bits(int version) {
    int rem = version;
    for (int i = 0; i < 12; ++i) rem = (rem << 1) ^ ((rem >> 11) * 0x1F25);
    return (version << 12) | rem;
}

inline void draw_version_bits(BitMatrix& m, int version) {
    if (version < 7) return;
    const int bits = version_bits(version);
    const int size = m.size();
    for (int i = 0; i < 18; ++i) {
        const bool bit = ((bits >> i) & 1) != 0;
        const int a = size - 11 + i % 3, b = i / 3;
        m.set(a, b, bit);
        m.set(b, a, bit);
    }
}

inline bool mask_bit(int mask, int r, int c) {
    switch (mask) {
        case 0: return (r + c) % 2 == 0;
        case 1: return r % 2 == 0;
        case 2: return c % 3 == 0;
        case 3: return (r + c) % 3 == 0;
        case 4: return (r / 2 + c / 3) % 2 == 0;
        case 5: return (r * c) % 2 + (r * c) % 3 == 0;
        case 6: return ((r * c) % 2 + (r * c) % 3) % 2 == 0;
        case 7: return ((r + c) % 2 + (r * c) % 3) % 2 == 0;
        default: throw std::invalid_argument("mask_bit: mask must be 0..7");
    }
}

// Coordinates of data modules in placement order (the two-column zigzag).
inline std::vector<std::pair<int, int>> data_module_order(const BitMatrix& func) {
    const int size = func.size();
    std::vector<std::pair<int, int>> order;
    order.reserve(static_cast<std::size_t>(size) * size);
    bool upward = true;
    for (int right = size - 1; right >= 1; right -= 2) {
        if (right == 6) right = 5;  // skip the timing column
        for (int i = 0; i < size; ++i) {
            const int r = upward ? size - 1 - i : i;
            for (int dc = 0; dc < 2; ++dc) {
                const int c = right - dc;
                if (!func.get(r, c)) order.emplace_back(r, c);
            }
        }
        upward = !upward;
    }
    return order;
}

// Standard four-rule mask penalty.
inline long penalty_score(const BitMatrix& m) {
    const int size = m.size();
    long score = 0;

    auto runPenalty = [&](auto getter) {
        for (int i = 0; i < size; ++i) {
            int run = 1;
            bool color = getter(i, 0);
            for (int j = 1; j < size; ++j) {
                if (getter(i, j) == color) {
                    ++run;
                } else {
                    if (run >= 5) score += 3 + (run - 5);
                    color = getter(i, j);
                    run = 1;
                }
            }
            if (run >= 5) score += 3 + (run - 5);
        }
    };
    runPenalty([&](int i, int j) { return m.get(i, j); });
    runPenalty([&](int i, int j) { return m.get(j, i); });

    for (int r = 0; r + 1 < size; ++r)
        for (int c = 0; c + 1 < size; ++c) {
            const bool v = m.get(r, c);
            if (m.get(r, c + 1) == v && m.get(r + 1, c) == v && m.get(r + 1, c + 1) == v)
                score += 3;
        }

    // 1:1:3:1:1 finder-like pattern with 4 light modules on either side.
    auto finderLike = [&](auto getter) {
        for (int i = 0; i < size; ++i) {
            int pattern = 0;
            for (int j = 0; j < size; ++j) {
                pattern = ((pattern << 1) | (getter(i, j) ? 1 : 0)) & 0x7FF;
                if (j >= 10 && (pattern == 0x05D || pattern == 0x5D0)) score += 40;
            }
        }
    };
    finderLike([&](int i, int j) { return m.get(i, j); });
    finderLike([&](int i, int j) { return m.get(j, i); });

    long dark = 0;
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c)
            if (m.get(r, c)) ++dark;
    const long total = static_cast<long>(size) * size;
    const long k = (std::abs(dark * 20 - total * 10) + total - 1) / total - 1;
    score += k * 10;
    return score;
}

// Interleaved codeword sequence from per-block codewords (data + parity).
inline std::vector<std::uint8_t> interleave_blocks(
    const std::vector<std::vector<std::uint8_t>>& dataBlocks,
    const std::vector<std::vector<std::uint8_t>>& parityBlocks) {
    std::vector<std::uint8_t> out;
    std::size_t maxData = 0;
    for (const auto& b : dataBlocks) maxData = std::max(maxData, b.size());
    for (std::size_t i = 0; i < maxData; ++i)
        for (const auto& b : dataBlocks)
            if (i < b.size()) out.push_back(b[i]);
    std::size_t maxPar = 0;
    for (const auto& b : parityBlocks) maxPar = std::max(maxPar, b.size());
    for (std::size_t i = 0; i < maxPar; ++i)
        for (const auto& b : parityBlocks)
            if (i < b.size()) out.push_back(b[i]);
    return out;
}

// For each position in the interleaved stream, the (block, offset) it maps
// to, with offset indexing the block codeword data-first.
inline std::vector<std::pair<int, int>> interleave_map(const QrBlockSpec& spec) {
    const int nBlocks = spec.blockCount();
    std::vector<int> dataLen(static_cast<std::size_t>(nBlocks));
    for (int b = 0; b < nBlocks; ++b)
        dataLen[static_cast<std::size_t>(b)] = b < spec.blocks1 ? spec.size1 : spec.size2;
    std::vector<std::pair<int, int>> map;
    map.reserve(static_cast<std::size_t>(spec.totalCodewords));
    const int maxData = *std::max_element(dataLen.begin(), dataLen.end());
    for (int i = 0; i < maxData; ++i)
        for (int b = 0; b < nBlocks; ++b)
            if (i < dataLen[static_cast<std::size_t>(b)]) map.emplace_back(b, i);
    for (int i = 0; i < spec.parityPerBlock; ++i)
        for (int b = 0; b < nBlocks; ++b)
            map.emplace_back(b, dataLen[static_cast<std::size_t>(b)] + i);
    return map;
}

}  // namespace qrdetail

// Canonical finder + separator overwrite; everything else untouched.
inline BitMatrix repair_finders(BitMatrix m) {
    const int size = m.size();
    if (size < 21 || (size - 17) % 4 != 0)
        throw std::invalid_argument("repair_finders: not a valid symbol size");
    for (const auto& [or_, oc] : qrdetail::finder_origins(size))
        for (int r = -1; r <= 7; ++r)
            for (int c = -1; c <= 7; ++c) {
                const int rr = or_ + r, cc = oc + c;
                if (rr < 0 || cc < 0 || rr >= size || cc >= size) continue;
                const bool inside = (r >= 0 && r <= 6 && c >= 0 && c <= 6);
                m.set(rr, cc, inside && qrdetail::finder_dark(r, c));
            }
    return m;
}

inline QrSymbol qr_encode(const std::vector<std::uint8_t>& payload, int version,
                          EcLevel level, const QrTables& tables) {
    if (version < QrTables::minVersion || version > QrTables::maxVersion)
        throw std::invalid_argument("qr_encode: version must be 1..10");
    const QrBlockSpec& spec = tables.spec(version, level);
    const int capacity = tables.byteModeCapacity(version, level);
    if (static_cast<int>(payload.size()) > capacity)
        throw std::invalid_argument(
            "qr_encode: payload of " + std::to_string(payload.size()) +
            " bytes exceeds capacity of " + std::to_string(capacity) +
            " for version " + std::to_string(version) + "-" + ec_level_name(level));

    // Bit stream: mode 0100, char count, data, terminator, byte padding.
    std::vector<bool> bits;
    auto appendBits = [&](std::uint32_t value, int count) {
        for (int i = count - 1; i >= 0; --i) bits.push_back(((value >> i) & 1) != 0);
    };
    appendBits(0x4, 4);
    appendBits(static_cast<std::uint32_t>(payload.size()), QrTables::charCountBits(version));
    for (std::uint8_t b : payload) appendBits(b, 8);
    const int capacityBits = spec.dataCodewords() * 8;
    const int terminator = std::min(4, capacityBits - static_cast<int>(bits.size()));
    appendBits(0, terminator);
    while (bits.size() % 8 != 0) bits.push_back(false);
    for (std::uint8_t pad = 0xEC; static_cast<int>(bits.size()) < capacityBits;
         pad ^= 0xEC ^ 0x11)
        appendBits(pad, 8);

    std::vector<std::uint8_t> dataCodewords(bits.size() / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i])
            dataCodewords[i / 8] =
                static_cast<std::uint8_t>(dataCodewords[i / 8] | (0x80 >> (i % 8)));

    // Split into blocks, compute parity, interleave.
    std::vector<std::vector<std::uint8_t>> dataBlocks, parityBlocks;
    std::size_t offset = 0;
    for (int b = 0; b < spec.blockCount(); ++b) {
        const int len = b < spec.blocks1 ? spec.size1 : spec.size2;
        std::vector<std::uint8_t> block(dataCodewords.begin() + offset,
                                        dataCodewords.begin() + offset + len);
        offset += static_cast<std::size_t>(len);
        parityBlocks.push_back(rs_encode(block, spec.parityPerBlock));
        dataBlocks.push_back(std::move(block));
    }
    const std::vector<std::uint8_t> stream =
        qrdetail::interleave_blocks(dataBlocks, parityBlocks);

    // Place and pick the mask with the lowest penalty.
    const int size = QrTables::symbolSize(version);
    BitMatrix base(size), func(size);
    qrdetail::draw_fixed_patterns(base, func, version);
    qrdetail::draw_version_bits(base, version);
    const auto order = qrdetail::data_module_order(func);

    BitMatrix best;
    long bestPenalty = -1;
    for (int mask = 0; mask < 8; ++mask) {
        BitMatrix m = base;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const auto [r, c] = order[i];
            bool bit = false;
            if (i / 8 < stream.size()) bit = (stream[i / 8] >> (7 - i % 8)) & 1;
            m.set(r, c, bit ^ qrdetail::mask_bit(mask, r, c));
        }
        qrdetail::draw_format_bits(m, level, mask);
        const long p = qrdetail::penalty_score(m);
        if (bestPenalty < 0 || p < bestPenalty) {
            bestPenalty = p;
            best = m;
        }
    }
    return {version, level, best, payload};
}

inline DecodeReport qr_decode(const BitMatrix& matrix,
                              const QrTables& tables,
                              const BitMatrix* erasureMask = nullptr) {
    DecodeReport report;
    const int size = matrix.size();
    if (size < 21 || (size - 17) % 4 != 0 || (size - 17) / 4 > QrTables::maxVersion) {
        report.message = "not a valid symbol size";
        return report;
    }
    if (erasureMask && erasureMask->size() != size) {
        report.message = "erasure mask size mismatch";
        return report;
    }
    const int version = (size - 17) / 4;

    // Finder check: each 7x7 corner must be close to the canonical pattern.
    const auto origins = qrdetail::finder_origins(size);
    for (int k = 0; k < 3; ++k) {
        int mismatches = 0;
        for (int r = 0; r < 7; ++r)
            for (int c = 0; c < 7; ++c)
                if (matrix.get(origins[k].first + r, origins[k].second + c) !=
                    qrdetail::finder_dark(r, c))
                    ++mismatches;
        report.finderFound[k] = mismatches <= 6;
    }
    if (!report.finderFound[0] || !report.finderFound[1] || !report.finderFound[2]) {
        report.status = DecodeStatus::FinderNotFound;
        report.message = "finder not found";
        return report;
    }

    // Format info: try both copies against all 32 candidate words.
    auto readFormatCopy = [&](bool first) {
        std::array<bool, 15> v{};
        if (first) {
            for (int i = 0; i <= 5; ++i) v[static_cast<std::size_t>(i)] = matrix.get(i, 8);
            v[6] = matrix.get(7, 8);
            v[7] = matrix.get(8, 8);
            v[8] = matrix.get(8, 7);
            for (int i = 9; i < 15; ++i) v[static_cast<std::size_t>(i)] = matrix.get(8, 14 - i);
        } else {
            for (int i = 0; i < 8; ++i) v[static_cast<std::size_t>(i)] = matrix.get(8, size - 1 - i);
            for (int i = 8; i < 15; ++i)
                v[static_cast<std::size_t>(i)] = matrix.get(size - 15 + i, 8);
        }
        int word = 0;
        for (int i = 0; i < 15; ++i)
            if (v[static_cast<std::size_t>(i)]) word |= 1 << i;
        return word;
    };
    const int copy1 = readFormatCopy(true);
    const int copy2 = readFormatCopy(false);
    int bestDist = 16;
    EcLevel level = EcLevel::L;
    int mask = 0;
    for (int ec = 0; ec < 4; ++ec)
        for (int mk = 0; mk < 8; ++mk) {
            EcLevel cand;
            switch (ec) {
                case 0: cand = EcLevel::M; break;
                case 1: cand = EcLevel::L; break;
                case 2: cand = EcLevel::H; break;
                default: cand = EcLevel::Q; break;
            }
            const int word = qrdetail::format_bits(cand, mk);
            const int d1 = __builtin_popcount(static_cast<unsigned>(word ^ copy1));
            const int d2 = __builtin_popcount(static_cast<unsigned>(word ^ copy2));
            const int d = std::min(d1, d2);
            if (d < bestDist) {
                bestDist = d;
                level = cand;
                mask = mk;
            }
        }
    if (bestDist > 3) {
        report.status = DecodeStatus::FormatUnreadable;
        report.message = "format unreadable";
        return report;
    }

    // Unmask and collect the codeword stream.
    const QrBlockSpec& spec = tables.spec(version, level);
    BitMatrix dummy(size), func(size);
    qrdetail::draw_fixed_patterns(dummy, func, version);
    const auto order = qrdetail::data_module_order(func);

    const int totalCodewords = spec.totalCodewords;
    std::vector<std::uint8_t> stream(static_cast<std::size_t>(totalCodewords), 0);
    std::vector<bool> erased(static_cast<std::size_t>(totalCodewords), false);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i / 8 >= static_cast<std::size_t>(totalCodewords)) break;  // remainder bits
        const auto [r, c] = order[i];
        const bool bit = matrix.get(r, c) ^ qrdetail::mask_bit(mask, r, c);
        if (bit)
            stream[i / 8] = static_cast<std::uint8_t>(stream[i / 8] | (0x80 >> (i % 8)));
        if (erasureMask && erasureMask->get(r, c)) erased[i / 8] = true;
    }

    // Deinterleave and decode each block.
    const auto map = qrdetail::interleave_map(spec);
    const int nBlocks = spec.blockCount();
    std::vector<std::vector<std::uint8_t>> blocks(static_cast<std::size_t>(nBlocks));
    std::vector<std::vector<int>> blockErasures(static_cast<std::size_t>(nBlocks));
    for (int b = 0; b < nBlocks; ++b)
        blocks[static_cast<std::size_t>(b)].resize(
            static_cast<std::size_t>((b < spec.blocks1 ? spec.size1 : spec.size2) +
                                     spec.parityPerBlock));
    for (int i = 0; i < totalCodewords; ++i) {
        const auto [b, off] = map[static_cast<std::size_t>(i)];
        blocks[static_cast<std::size_t>(b)][static_cast<std::size_t>(off)] =
            stream[static_cast<std::size_t>(i)];
        if (erased[static_cast<std::size_t>(i)])
            blockErasures[static_cast<std::size_t>(b)].push_back(off);
    }

    std::vector<std::uint8_t> data;
    for (int b = 0; b < nBlocks; ++b) {
        auto& erasures = blockErasures[static_cast<std::size_t>(b)];
        if (static_cast<int>(erasures.size()) > spec.parityPerBlock)
            erasures.clear();  // too many to use; fall back to plain decoding
        auto res = rs_decode(blocks[static_cast<std::size_t>(b)], spec.parityPerBlock, erasures);
        if (!res.ok && !erasures.empty()) {
            // Erasure hints can be wrong on damaged media; retry without them.
            erasures.clear();
            res = rs_decode(blocks[static_cast<std::size_t>(b)], spec.parityPerBlock, {});
        }
        if (!res.ok) {
            report.status = DecodeStatus::UncorrectableBlock;
            report.message = "uncorrectable block " + std::to_string(b) + ": " + res.diagnostic;
            return report;
        }
        report.correctedCodewords += res.correctedErrors + res.correctedErasures;
        report.usedErasures += res.correctedErasures;
        data.insert(data.end(), res.data.begin(), res.data.end());
    }

    // Parse mode, length, payload.
    std::size_t bitPos = 0;
    auto readBits = [&](int count) -> int {
        int v = 0;
        for (int i = 0; i < count; ++i, ++bitPos) {
            const std::size_t byte = bitPos / 8;
            if (byte >= data.size()) throw std::runtime_error("bit stream exhausted");
            v = (v << 1) | ((data[byte] >> (7 - bitPos % 8)) & 1);
        }
        return v;
    };
    try {
        const int mode = readBits(4);
        if (mode != 0x4) {
            report.status = DecodeStatus::BadPayload;
            report.message = "unsupported mode " + std::to_string(mode);
            return report;
        }
        const int count = readBits(QrTables::charCountBits(version));
        std::vector<std::uint8_t> payload;
        payload.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            payload.push_back(static_cast<std::uint8_t>(readBits(8)));
        report.payload = std::move(payload);
        report.status = DecodeStatus::Ok;
    } catch (const std::runtime_error& e) {
        report.status = DecodeStatus::BadPayload;
        report.message = e.what();
    }
    return report;
}

}  // namespace gigayear
