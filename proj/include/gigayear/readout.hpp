#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gigayear/degrade.hpp"
#include "gigayear/layout.hpp"
#include "gigayear/qr.hpp"
#include "gigayear/rng.hpp"
#include "gigayear/sha256.hpp"

namespace gigayear {

enum class ReadoutMode { Monochromatic, Whitelight };

struct ReadoutOptions {
    bool repairFinders = true;
    ReadoutMode mode = ReadoutMode::Monochromatic;
    double alphaTarget = 1e-6;
    double erasureBand = 0.10;  // half-width of the erasure band, as a fraction of threshold
    std::uint64_t seed = 0;
    double grayBare = 0.0;   // pristine reflectance levels on the 0..255 scale
    double grayMetal = 0.0;
};

struct PerSymbolResult {
    int index = 0;
    std::string status;
    int corrected = 0;
    int erasures = 0;
    std::array<bool, 3> finder{false, false, false};
};

struct ReadoutReport {
    int totalInner = 0;
    int decoded = 0;
    int decodedAfterRepair = 0;
    double alphaObserved = 0.0;
    double alphaTarget = 1e-6;
    bool passed = false;
    std::vector<PerSymbolResult> perSymbol;
};

inline nlohmann::ordered_json report_to_json(const ReadoutReport& r) {
    nlohmann::ordered_json j;
    j["totalInner"] = r.totalInner;
    j["decoded"] = r.decoded;
    j["decodedAfterRepair"] = r.decodedAfterRepair;
    j["alphaObserved"] = r.alphaObserved;
    j["alphaTarget"] = r.alphaTarget;
    j["passed"] = r.passed;
    j["perSymbol"] = nlohmann::ordered_json::array();
    for (const auto& s : r.perSymbol)
        j["perSymbol"].push_back({{"index", s.index},
                                  {"status", s.status},
                                  {"corrected", s.corrected},
                                  {"erasures", s.erasures},
                                  {"finder", {s.finder[0], s.finder[1], s.finder[2]}}});
    return j;
}

inline ReadoutReport report_from_json(const nlohmann::json& j) {
    ReadoutReport r;
    r.totalInner = j.at("totalInner").get<int>();
    r.decoded = j.at("decoded").get<int>();
    r.decodedAfterRepair = j.at("decodedAfterRepair").get<int>();
    r.alphaObserved = j.at("alphaObserved").get<double>();
    r.alphaTarget = j.at("alphaTarget").get<double>();
    r.passed = j.at("passed").get<bool>();
    for (const auto& s : j.at("perSymbol")) {
        PerSymbolResult p;
        p.index = s.at("index").get<int>();
        p.status = s.at("status").get<std::string>();
        p.corrected = s.at("corrected").get<int>();
        p.erasures = s.at("erasures").get<int>();
        const auto& f = s.at("finder");
        p.finder = {f.at(0).get<bool>(), f.at(1).get<bool>(), f.at(2).get<bool>()};
        r.perSymbol.push_back(std::move(p));
    }
    return r;
}

struct ClassifiedImage {
    BitImage bits;      // 1 = classified dark (tungsten)
    BitImage erasures;  // 1 = sample too close to the threshold to trust
};

// Per-pixel classification against the two pristine reflectance levels.
// Monochromatic: nearest level wins, samples within the erasure band of the
// threshold are flagged.  Whitelight: samples that sit away from both
// pristine levels (crack-perturbed thickness shifts the local colour) are
// assigned at random, reproducing the white-light camera failure mode.
inline ClassifiedImage classify(const GrayImage& image, const LayoutGeometry& geom,
                                const ReadoutOptions& options) {
    if (image.width != geom.imageSide() || image.height != geom.imageSide())
        throw std::invalid_argument("classify: image does not match layout geometry");
    if (options.grayBare == options.grayMetal)
        throw std::invalid_argument("classify: pristine levels must differ");

    const double threshold = (options.grayBare + options.grayMetal) / 2.0;
    const double band = options.erasureBand * threshold;
    const double offLevelTol = std::max(6.0, band);
    const CounterRng rng(options.seed, 0xC1A551F7ULL);

    ClassifiedImage out;
    out.bits.width = out.erasures.width = image.width;
    out.bits.height = out.erasures.height = image.height;
    out.bits.bits.assign(image.pixels.size(), 0);
    out.erasures.bits.assign(image.pixels.size(), 0);

    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        const double v = image.pixels[i];
        const double dBare = std::abs(v - options.grayBare);
        const double dMetal = std::abs(v - options.grayMetal);
        if (options.mode == ReadoutMode::Whitelight &&
            dBare > offLevelTol && dMetal > offLevelTol) {
            out.bits.bits[i] = rng.uniform(i) < 0.5 ? 1 : 0;
            continue;
        }
        out.bits.bits[i] = dMetal < dBare ? 1 : 0;
        if (std::abs(v - threshold) <= band) out.erasures.bits[i] = 1;
    }
    return out;
}

namespace readoutdetail {

inline BitMatrix cut(const BitImage& img, int r0, int c0, int side) {
    BitMatrix m(side);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) m.set(r, c, img.at(r0 + r, c0 + c) != 0);
    return m;
}

}  // namespace readoutdetail

inline ReadoutReport read_disk(const GrayImage& image, const ManifestInfo& manifest,
                               const QrTables& tables, const ReadoutOptions& options) {
    const LayoutGeometry geom = manifest.geometry();
    if (image.width != geom.imageSide() || image.height != geom.imageSide())
        throw std::invalid_argument("read_disk: image does not match the manifest geometry");

    const ClassifiedImage classified = classify(image, geom, options);
    const int innerSide = geom.innerSide();
    const int outerSide = geom.outerSide();

    ReadoutReport report;
    report.alphaTarget = options.alphaTarget;
    report.totalInner = static_cast<int>(manifest.documents.size());

    const long modulesPerSymbol = static_cast<long>(innerSide) * innerSide;
    double flippedModules = 0.0;
    long totalModules = 0;

    for (const auto& [index, sha] : manifest.documents) {
        const int r0 = (index / outerSide + quiet_zone_modules) * innerSide;
        const int c0 = (index % outerSide + quiet_zone_modules) * innerSide;
        const BitMatrix sampled = readoutdetail::cut(classified.bits, r0, c0, innerSide);
        const BitMatrix erasures = readoutdetail::cut(classified.erasures, r0, c0, innerSide);

        PerSymbolResult result;
        result.index = index;
        totalModules += modulesPerSymbol;

        DecodeReport decode = qr_decode(sampled, tables, &erasures);
        bool repaired = false;
        if (!decode.ok() && options.repairFinders) {
            DecodeReport retry = qr_decode(repair_finders(sampled), tables, &erasures);
            if (retry.ok()) {
                retry.finderFound = decode.finderFound;  // report the pre-repair status
                decode = std::move(retry);
                repaired = true;
            }
        }
        result.finder = decode.finderFound;
        result.corrected = decode.correctedCodewords;
        result.erasures = decode.usedErasures;

        if (decode.ok() && Sha256::hex(decode.payload) != sha) {
            decode.status = DecodeStatus::UncorrectableBlock;
            result.status = "miscorrected";
        }

        if (decode.ok()) {
            result.status = repaired ? "ok_after_repair" : "ok";
            if (!repaired) ++report.decoded;
            ++report.decodedAfterRepair;
            const BitMatrix reference =
                qr_encode(decode.payload, manifest.innerVersion, manifest.innerEcLevel, tables)
                    .modules;
            long flips = 0;
            for (int r = 0; r < innerSide; ++r)
                for (int c = 0; c < innerSide; ++c)
                    if (sampled.get(r, c) != reference.get(r, c)) ++flips;
            flippedModules += static_cast<double>(flips);
        } else {
            if (result.status.empty()) {
                switch (decode.status) {
                    case DecodeStatus::FinderNotFound: result.status = "finder_not_found"; break;
                    case DecodeStatus::FormatUnreadable: result.status = "format_unreadable"; break;
                    case DecodeStatus::UncorrectableBlock: result.status = "uncorrectable"; break;
                    default: result.status = "bad_payload"; break;
                }
            }
            // Undecoded symbols contribute the uninformative worst case.
            flippedModules += 0.5 * static_cast<double>(modulesPerSymbol);
        }
        report.perSymbol.push_back(std::move(result));
    }

    report.alphaObserved = totalModules > 0 ? flippedModules / static_cast<double>(totalModules)
                                            : 0.0;
    report.passed = report.alphaObserved <= report.alphaTarget;
    return report;
}

}  // namespace gigayear
