#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gigayear {

enum class EcLevel { L, M, Q, H };

inline char ec_level_name(EcLevel e) {
    switch (e) {
        case EcLevel::L: return 'L';
        case EcLevel::M: return 'M';
        case EcLevel::Q: return 'Q';
        case EcLevel::H: return 'H';
    }
    throw std::logic_error("bad EcLevel");
}

inline EcLevel ec_level_from_name(const std::string& s) {
    if (s == "L") return EcLevel::L;
    if (s == "M") return EcLevel::M;
    if (s == "Q") return EcLevel::Q;
    if (s == "H") return EcLevel::H;
    throw std::invalid_argument("unknown EC level: " + s);
}

// Format-info EC bits per the QR standard: L=01, M=00, Q=11, H=10.
inline int ec_level_format_bits(EcLevel e) {
    switch (e) {
        case EcLevel::L: return 1;
        case EcLevel::M: return 0;
        case EcLevel::Q: return 3;
        case EcLevel::H: return 2;
    }
    throw std::logic_error("bad EcLevel");
}

// Block structure for one (version, level): blocks1 blocks of size1 data
// codewords followed by blocks2 blocks of size2 = size1 + 1.
struct QrBlockSpec {
    int totalCodewords = 0;
    int parityPerBlock = 0;
    int blocks1 = 0;
    int size1 = 0;
    int blocks2 = 0;
    int size2 = 0;

    int blockCount() const { return blocks1 + blocks2; }
    int dataCodewords() const { return blocks1 * size1 + blocks2 * size2; }
};

// Structural constants for versions 1-10, loaded from the bundled CSV so
// they stay diffable against the standard.
class QrTables {
public:
    static constexpr int minVersion = 1;
    static constexpr int maxVersion = 10;

    static QrTables load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("QrTables: cannot open " + path);
        QrTables t;
        std::string line;
        int lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            while (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (lineNo == 1) {
                if (line !=
                    "version,ecLevel,totalCodewords,parityPerBlock,blocks1,size1,blocks2,size2")
                    throw std::runtime_error("QrTables: unexpected header in " + path);
                continue;
            }
            std::istringstream row(line);
            std::string field;
            std::vector<std::string> fields;
            while (std::getline(row, field, ',')) fields.push_back(field);
            if (fields.size() != 8)
                throw std::runtime_error("QrTables: malformed row at line " +
                                         std::to_string(lineNo));
            const int version = std::stoi(fields[0]);
            const EcLevel level = ec_level_from_name(fields[1]);
            QrBlockSpec spec;
            spec.totalCodewords = std::stoi(fields[2]);
            spec.parityPerBlock = std::stoi(fields[3]);
            spec.blocks1 = std::stoi(fields[4]);
            spec.size1 = std::stoi(fields[5]);
            spec.blocks2 = std::stoi(fields[6]);
            spec.size2 = std::stoi(fields[7]);
            if (spec.dataCodewords() + spec.blockCount() * spec.parityPerBlock !=
                spec.totalCodewords)
                throw std::runtime_error("QrTables: inconsistent block structure at line " +
                                         std::to_string(lineNo));
            t.specs_[{version, level}] = spec;
        }
        for (int v = minVersion; v <= maxVersion; ++v)
            for (EcLevel e : {EcLevel::L, EcLevel::M, EcLevel::Q, EcLevel::H})
                if (t.specs_.find({v, e}) == t.specs_.end())
                    throw std::runtime_error("QrTables: missing entry for version " +
                                             std::to_string(v));
        return t;
    }

    const QrBlockSpec& spec(int version, EcLevel level) const {
        auto it = specs_.find({version, level});
        if (it == specs_.end())
            throw std::invalid_argument("QrTables: unsupported version " +
                                        std::to_string(version));
        return it->second;
    }

    // Maximum payload in byte mode: mode (4 bits) + length (8 or 16 bits)
    // plus 8 bits per byte must fit in the data codewords.
    int byteModeCapacity(int version, EcLevel level) const {
        const int dataBits = spec(version, level).dataCodewords() * 8;
        const int headerBits = 4 + charCountBits(version);
        return (dataBits - headerBits) / 8;
    }

    static int charCountBits(int version) { return version <= 9 ? 8 : 16; }

    static int symbolSize(int version) { return 17 + 4 * version; }

    // Alignment pattern centers; exact for versions up to 10.
    static std::vector<int> alignmentCenters(int version) {
        if (version < minVersion || version > maxVersion)
            throw std::invalid_argument("alignmentCenters: unsupported version");
        if (version == 1) return {};
        const int size = symbolSize(version);
        if (version <= 6) return {6, size - 7};
        return {6, (6 + size - 7) / 2, size - 7};
    }

private:
    std::map<std::pair<int, EcLevel>, QrBlockSpec> specs_;
};

}  // namespace gigayear
