#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gigayear/constants.hpp"
#include "gigayear/image.hpp"
#include "gigayear/layout.hpp"
#include "gigayear/optics.hpp"
#include "gigayear/retention.hpp"
#include "gigayear/rng.hpp"
#include "gigayear/sha256.hpp"

namespace gigayear {

struct ScheduleSegment {
    double temperature;  // [K]
    double duration;     // [s]
};

struct DamageScenario {
    std::vector<ScheduleSegment> schedule;
    double bitBarrier = 70.0 * k_boltzmann * 300.0;  // [J] per tungsten pixel
    double f0 = 1e9;                                 // attempt frequency [1/s]
    double crackOnsetTemp = 513.0;                   // [K]
    double crackDensity = 15.0;                      // cracks per mm^2 per 100 K above onset
    double destructionTemp = 1373.0;                 // [K]
    double whiskerTemp = 923.0;                      // [K]
    std::uint64_t seed = 0;

    void validate() const {
        for (const auto& s : schedule) {
            if (!(s.temperature > 0.0))
                throw std::invalid_argument("DamageScenario: temperatures must be > 0");
            if (!(s.duration >= 0.0))
                throw std::invalid_argument("DamageScenario: durations must be >= 0");
        }
        if (!(bitBarrier >= 0.0) || !(f0 > 0.0))
            throw std::invalid_argument("DamageScenario: bad bit flip parameters");
        if (!(crackOnsetTemp < whiskerTemp && whiskerTemp < destructionTemp))
            throw std::invalid_argument(
                "DamageScenario: require crackOnsetTemp < whiskerTemp < destructionTemp");
    }
};

inline nlohmann::ordered_json scenario_to_json(const DamageScenario& s) {
    nlohmann::ordered_json j;
    j["schedule"] = nlohmann::ordered_json::array();
    for (const auto& seg : s.schedule)
        j["schedule"].push_back({{"temperature", seg.temperature}, {"duration", seg.duration}});
    j["bitBarrier"] = s.bitBarrier;
    j["f0"] = s.f0;
    j["crackOnsetTemp"] = s.crackOnsetTemp;
    j["crackDensity"] = s.crackDensity;
    j["destructionTemp"] = s.destructionTemp;
    j["whiskerTemp"] = s.whiskerTemp;
    j["seed"] = s.seed;
    return j;
}

inline DamageScenario scenario_from_json(const nlohmann::json& j) {
    DamageScenario s;
    for (const auto& seg : j.at("schedule"))
        s.schedule.push_back({seg.at("temperature").get<double>(),
                              seg.at("duration").get<double>()});
    if (j.contains("bitBarrier")) s.bitBarrier = j.at("bitBarrier").get<double>();
    if (j.contains("f0")) s.f0 = j.at("f0").get<double>();
    if (j.contains("crackOnsetTemp")) s.crackOnsetTemp = j.at("crackOnsetTemp").get<double>();
    if (j.contains("crackDensity")) s.crackDensity = j.at("crackDensity").get<double>();
    if (j.contains("destructionTemp")) s.destructionTemp = j.at("destructionTemp").get<double>();
    if (j.contains("whiskerTemp")) s.whiskerTemp = j.at("whiskerTemp").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    s.validate();
    return s;
}

struct AgedDiskImage {
    GrayImage gray;
    std::string maskSha;
    std::string scenarioSha;
};

namespace degradedetail {

inline std::uint8_t to_gray(double reflectance) {
    const double v = std::round(255.0 * std::clamp(reflectance, 0.0, 1.0));
    return static_cast<std::uint8_t>(v);
}

// RNG stream ids; one stream per independent damage channel.
enum Stream : std::uint64_t {
    FlipStream = 1,
    CrackCountStream = 2,
    CrackShapeStream = 3,
    ThicknessStream = 4,
    WhiskerStream = 5,
    DestructionStream = 6,
};

// Poisson sample with sequential counters starting at `base`.
inline int poisson(const CounterRng& rng, double lambda, std::uint64_t base) {
    if (lambda <= 0.0) return 0;
    if (lambda > 50.0) {
        const double v = lambda + std::sqrt(lambda) * rng.normal(base);
        return std::max(0, static_cast<int>(std::lround(v)));
    }
    const double limit = std::exp(-lambda);
    double p = 1.0;
    int k = 0;
    std::uint64_t c = base;
    do {
        p *= rng.uniform(c++);
        ++k;
    } while (p > limit && k < 10000);
    return k - 1;
}

}  // namespace degradedetail

// Accumulated per-pixel switching probability over the whole schedule:
// hazards add across independent exponential epochs.
inline double accumulated_switch_probability(const DamageScenario& scenario) {
    scenario.validate();
    double hazard = 0.0;
    for (const auto& seg : scenario.schedule)
        hazard += switching_rate({scenario.f0, scenario.bitBarrier, seg.temperature}) *
                  seg.duration;
    return -std::expm1(-hazard);
}

inline double expected_flip_count(const MaskBitmap& mask, const DamageScenario& scenario) {
    long tungsten = 0;
    for (std::uint8_t b : mask.bits.bits) tungsten += b;
    return accumulated_switch_probability(scenario) * static_cast<double>(tungsten);
}

// Reflectance render of an undamaged mask: metal level where tungsten is
// present, bare level elsewhere.
inline GrayImage pristine_render(const MaskBitmap& mask, const LayerStack& bare,
                                 const LayerStack& metal) {
    const std::uint8_t gBare = degradedetail::to_gray(reflectance(bare));
    const std::uint8_t gMetal = degradedetail::to_gray(reflectance(metal));
    GrayImage img;
    img.width = mask.bits.width;
    img.height = mask.bits.height;
    img.pixels.resize(mask.bits.bits.size());
    for (std::size_t i = 0; i < mask.bits.bits.size(); ++i)
        img.pixels[i] = mask.bits.bits[i] ? gMetal : gBare;
    return img;
}

inline AgedDiskImage age_disk(const MaskBitmap& mask, const LayerStack& bare,
                              const LayerStack& metal, const DamageScenario& scenario) {
    scenario.validate();
    using namespace degradedetail;

    const int w = mask.bits.width, h = mask.bits.height;
    const std::size_t nPixels = static_cast<std::size_t>(w) * h;

    AgedDiskImage aged;
    aged.gray.width = w;
    aged.gray.height = h;
    aged.gray.pixels.assign(nPixels, 0);
    aged.maskSha = Sha256::hex(mask.bits.bits);
    aged.scenarioSha = Sha256::hex(
        reinterpret_cast<const std::uint8_t*>(scenario_to_json(scenario).dump().data()),
        scenario_to_json(scenario).dump().size());
    aged.gray.comments = {"mask_sha256:" + aged.maskSha,
                          "scenario_sha256:" + aged.scenarioSha};

    bool destroyed = false, whiskers = false;
    for (const auto& seg : scenario.schedule) {
        if (seg.duration <= 0.0) continue;
        if (seg.temperature >= scenario.destructionTemp) destroyed = true;
        if (seg.temperature >= scenario.whiskerTemp) whiskers = true;
    }

    if (destroyed) {
        // Uniform mid-gray noise; the pattern is gone entirely.
        const CounterRng rng(scenario.seed, DestructionStream);
        for (std::size_t i = 0; i < nPixels; ++i) {
            const double v = 128.0 + 20.0 * rng.normal(i);
            aged.gray.pixels[i] =
                static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
        return aged;
    }

    // (a) Arrhenius bit flips on tungsten pixels.
    const double pFlip = accumulated_switch_probability(scenario);
    std::vector<std::uint8_t> tungsten = mask.bits.bits;
    if (pFlip > 0.0) {
        const CounterRng rng(scenario.seed, FlipStream);
        for (std::size_t i = 0; i < nPixels; ++i)
            if (tungsten[i] && rng.uniform(i) < pFlip) tungsten[i] = 0;
    }

    // (b) Crack fields for segments above the onset temperature.
    std::vector<std::uint8_t> cracked(nPixels, 0);
    const double areaMm2 = (w * mask.pitch * 1e3) * (h * mask.pitch * 1e3);
    const CounterRng countRng(scenario.seed, CrackCountStream);
    for (std::size_t s = 0; s < scenario.schedule.size(); ++s) {
        const auto& seg = scenario.schedule[s];
        if (seg.duration <= 0.0 || seg.temperature <= scenario.crackOnsetTemp) continue;
        const double lambda = scenario.crackDensity * areaMm2 *
                              (seg.temperature - scenario.crackOnsetTemp) / 100.0;
        const int nCracks = poisson(countRng, lambda, s * 100000ULL);
        const CounterRng shapeRng(scenario.seed, CrackShapeStream + 100 * s);
        for (int k = 0; k < nCracks; ++k) {
            std::uint64_t c = static_cast<std::uint64_t>(k) * 4096ULL;
            double x = shapeRng.uniform(c++, 0.0, w);
            double y = shapeRng.uniform(c++, 0.0, h);
            double angle = shapeRng.uniform(c++, 0.0, 2.0 * M_PI);
            const double length = -200.0 * std::log1p(-shapeRng.uniform(c++));
            const int steps = std::max(1, static_cast<int>(std::ceil(length / 5.0)));
            for (int step = 0; step < steps && c < (static_cast<std::uint64_t>(k) + 1) * 4096ULL;
                 ++step) {
                const double nx = x + 5.0 * std::cos(angle);
                const double ny = y + 5.0 * std::sin(angle);
                // mark pixels within 2 px of the segment, sampled each pixel
                for (int sub = 0; sub <= 5; ++sub) {
                    const double px = x + (nx - x) * sub / 5.0;
                    const double py = y + (ny - y) * sub / 5.0;
                    for (int dr = -2; dr <= 2; ++dr)
                        for (int dc = -2; dc <= 2; ++dc) {
                            const int rr = static_cast<int>(std::lround(py)) + dr;
                            const int cc = static_cast<int>(std::lround(px)) + dc;
                            if (rr >= 0 && cc >= 0 && rr < h && cc < w)
                                cracked[static_cast<std::size_t>(rr) * w + cc] = 1;
                        }
                }
                x = nx;
                y = ny;
                angle += shapeRng.uniform(c++, -0.5, 0.5);
            }
        }
    }

    // (d) Reflectance map; crack-perturbed pixels get a recomputed value
    // with the top layer thickness off by up to +-20%.
    const std::uint8_t gBare = to_gray(reflectance(bare));
    const std::uint8_t gMetal = to_gray(reflectance(metal));
    const CounterRng thickRng(scenario.seed, ThicknessStream);
    for (std::size_t i = 0; i < nPixels; ++i) {
        if (!cracked[i]) {
            aged.gray.pixels[i] = tungsten[i] ? gMetal : gBare;
            continue;
        }
        LayerStack stack = tungsten[i] ? metal : bare;
        if (!stack.layers.empty()) {
            const double factor = 1.0 + thickRng.uniform(i, -0.2, 0.2);
            stack.layers.front().thickness = *stack.layers.front().thickness * factor;
        }
        aged.gray.pixels[i] = to_gray(reflectance(stack));
    }

    // Whisker regime: bright salt noise at 1% pixel density.
    if (whiskers) {
        const CounterRng rng(scenario.seed, WhiskerStream);
        for (std::size_t i = 0; i < nPixels; ++i)
            if (rng.uniform(i) < 0.01) aged.gray.pixels[i] = 255;
    }

    return aged;
}

}  // namespace gigayear
