#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gigayear/image.hpp"
#include "gigayear/qr.hpp"
#include "gigayear/sha256.hpp"

namespace gigayear {

struct LayoutParams {
    int outerVersion = 2;
    EcLevel outerEcLevel = EcLevel::H;
    int innerVersion = 1;
    EcLevel innerEcLevel = EcLevel::H;
    double pixelPitch = 2e-6;  // [m] per inner module
};

inline constexpr int quiet_zone_modules = 4;

// Nested disk layout: an outer symbol whose dark modules each hold a full
// inner symbol; light modules carry no metal.
struct DiskLayout {
    QrSymbol outer;
    std::map<int, std::vector<std::uint8_t>> innerPayloads;  // outer module index -> document
    int innerVersion = 1;
    EcLevel innerEcLevel = EcLevel::H;
    double pixelPitch = 2e-6;
    double totalSize = 0.0;  // physical side length incl. quiet zones [m]

    int outerSide() const { return outer.modules.size(); }
    int innerSide() const { return QrTables::symbolSize(innerVersion); }
    int imageSide() const { return (outerSide() + 2 * quiet_zone_modules) * innerSide(); }
};

struct MaskBitmap {
    BitImage bits;
    double pitch = 2e-6;  // [m/pixel]
};

inline DiskLayout build_layout(const std::vector<std::uint8_t>& outerPayload,
                               const std::vector<std::vector<std::uint8_t>>& innerDocuments,
                               const LayoutParams& params, const QrTables& tables) {
    if (innerDocuments.empty())
        throw std::invalid_argument("build_layout: need at least one inner document");
    const int innerCapacity = tables.byteModeCapacity(params.innerVersion, params.innerEcLevel);
    for (std::size_t i = 0; i < innerDocuments.size(); ++i)
        if (static_cast<int>(innerDocuments[i].size()) > innerCapacity)
            throw std::invalid_argument(
                "build_layout: inner document " + std::to_string(i) + " (" +
                std::to_string(innerDocuments[i].size()) + " bytes) exceeds inner capacity of " +
                std::to_string(innerCapacity) + " bytes");

    DiskLayout layout;
    layout.outer = qr_encode(outerPayload, params.outerVersion, params.outerEcLevel, tables);
    layout.innerVersion = params.innerVersion;
    layout.innerEcLevel = params.innerEcLevel;
    layout.pixelPitch = params.pixelPitch;

    // Dark modules filled row-major; documents past the end repeat the last.
    const int side = layout.outerSide();
    std::size_t next = 0;
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            if (!layout.outer.modules.get(r, c)) continue;
            const std::size_t doc = next < innerDocuments.size() ? next
                                                                 : innerDocuments.size() - 1;
            layout.innerPayloads[r * side + c] = innerDocuments[doc];
            ++next;
        }
    layout.totalSize = layout.imageSide() * params.pixelPitch;
    return layout;
}

inline MaskBitmap render_mask(const DiskLayout& layout, const QrTables& tables) {
    const int innerSide = layout.innerSide();
    const int side = layout.outerSide();
    const int imageSide = layout.imageSide();

    MaskBitmap mask;
    mask.pitch = layout.pixelPitch;
    mask.bits.width = mask.bits.height = imageSide;
    mask.bits.bits.assign(static_cast<std::size_t>(imageSide) * imageSide, 0);

    std::map<std::vector<std::uint8_t>, BitMatrix> cache;
    for (const auto& [index, payload] : layout.innerPayloads) {
        auto it = cache.find(payload);
        if (it == cache.end())
            it = cache
                     .emplace(payload, qr_encode(payload, layout.innerVersion,
                                                 layout.innerEcLevel, tables)
                                           .modules)
                     .first;
        const BitMatrix& inner = it->second;
        const int r0 = (index / side + quiet_zone_modules) * innerSide;
        const int c0 = (index % side + quiet_zone_modules) * innerSide;
        for (int r = 0; r < innerSide; ++r)
            for (int c = 0; c < innerSide; ++c)
                mask.bits.set(r0 + r, c0 + c, inner.get(r, c));
    }
    return mask;
}

struct SampledLayout {
    BitMatrix outer;
    std::map<int, BitMatrix> inner;  // outer module index -> inner matrix
};

// Geometry needed to invert a rendered bitmap.
struct LayoutGeometry {
    int outerVersion = 2;
    int innerVersion = 1;

    int outerSide() const { return QrTables::symbolSize(outerVersion); }
    int innerSide() const { return QrTables::symbolSize(innerVersion); }
    int imageSide() const { return (outerSide() + 2 * quiet_zone_modules) * innerSide(); }
};

// Nearest-pixel inversion of render_mask; exact on clean bitmaps.  An outer
// module reads dark when its block holds a non-trivial share of set pixels.
inline SampledLayout sample_layout(const BitImage& bitmap, const LayoutGeometry& geom) {
    if (bitmap.width != geom.imageSide() || bitmap.height != geom.imageSide())
        throw std::invalid_argument("sample_layout: bitmap does not match layout geometry");
    const int innerSide = geom.innerSide();
    const int side = geom.outerSide();

    SampledLayout out;
    out.outer = BitMatrix(side);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            const int r0 = (r + quiet_zone_modules) * innerSide;
            const int c0 = (c + quiet_zone_modules) * innerSide;
            int dark = 0;
            for (int i = 0; i < innerSide; ++i)
                for (int j = 0; j < innerSide; ++j)
                    dark += bitmap.at(r0 + i, c0 + j);
            const bool isDark = dark * 5 > innerSide * innerSide;  // > 20% set
            out.outer.set(r, c, isDark);
            if (isDark) {
                BitMatrix m(innerSide);
                for (int i = 0; i < innerSide; ++i)
                    for (int j = 0; j < innerSide; ++j)
                        m.set(i, j, bitmap.at(r0 + i, c0 + j));
                out.inner.emplace(r * side + c, std::move(m));
            }
        }
    return out;
}

inline nlohmann::ordered_json make_manifest(const DiskLayout& layout) {
    nlohmann::ordered_json j;
    j["outerVersion"] = layout.outer.version;
    j["outerEcLevel"] = std::string(1, ec_level_name(layout.outer.ecLevel));
    j["innerVersion"] = layout.innerVersion;
    j["innerEcLevel"] = std::string(1, ec_level_name(layout.innerEcLevel));
    j["pitch_m"] = layout.pixelPitch;
    j["darkModuleCount"] = layout.innerPayloads.size();
    nlohmann::ordered_json docs = nlohmann::ordered_json::array();
    for (const auto& [index, payload] : layout.innerPayloads)
        docs.push_back({{"index", index}, {"bytes_sha256", Sha256::hex(payload)}});
    j["documents"] = std::move(docs);
    return j;
}

struct ManifestInfo {
    int outerVersion = 2;
    EcLevel outerEcLevel = EcLevel::H;
    int innerVersion = 1;
    EcLevel innerEcLevel = EcLevel::H;
    double pitch = 2e-6;
    int darkModuleCount = 0;
    std::vector<std::pair<int, std::string>> documents;  // (outer index, payload sha256)

    LayoutGeometry geometry() const { return {outerVersion, innerVersion}; }
};

inline ManifestInfo parse_manifest(const nlohmann::json& j) {
    ManifestInfo info;
    info.outerVersion = j.at("outerVersion").get<int>();
    info.outerEcLevel = ec_level_from_name(j.at("outerEcLevel").get<std::string>());
    info.innerVersion = j.at("innerVersion").get<int>();
    info.innerEcLevel = ec_level_from_name(j.at("innerEcLevel").get<std::string>());
    info.pitch = j.at("pitch_m").get<double>();
    info.darkModuleCount = j.at("darkModuleCount").get<int>();
    for (const auto& d : j.at("documents"))
        info.documents.emplace_back(d.at("index").get<int>(),
                                    d.at("bytes_sha256").get<std::string>());
    if (static_cast<int>(info.documents.size()) != info.darkModuleCount)
        throw std::runtime_error("manifest: darkModuleCount disagrees with document list");
    return info;
}

}  // namespace gigayear
