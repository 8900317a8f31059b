// Command-line front end for the gigayear storage toolkit: retention math,
// accelerated-test planning, stack optimization, disk mastering, aging
// simulation and readout.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gigayear/constants.hpp"
#include "gigayear/degrade.hpp"
#include "gigayear/image.hpp"
#include "gigayear/layout.hpp"
#include "gigayear/optics.hpp"
#include "gigayear/qr.hpp"
#include "gigayear/readout.hpp"
#include "gigayear/retention.hpp"

#ifndef GIGAYEAR_DATA_DIR
#define GIGAYEAR_DATA_DIR "data"
#endif

namespace {

using namespace gigayear;

constexpr double seconds_per_hour = 3600.0;
constexpr double seconds_per_week = 604800.0;

struct StackDesign {
    double wavelength = 550e-9;
    double bottomThickness = 338e-9;  // LPCVD nitride on the silicon base
    double metalThickness = 50e-9;
    double topThickness = 225e-9;     // PECVD nitride capping layer
};

// Bare/metallized stack pair for the W-in-nitride medium, indices taken
// from the bundled dispersion table.
std::pair<LayerStack, LayerStack> build_stacks(const IndexTable& table,
                                               const StackDesign& d) {
    const Complex nSi = table.interpolate("Si", d.wavelength);
    const Complex nSiN = table.interpolate("Si3N4", d.wavelength);
    const Complex nW = table.interpolate("W", d.wavelength);
    const OpticalLayer air{"air", {1.0, 0.0}, std::nullopt};
    const OpticalLayer si{"Si", nSi, std::nullopt};

    LayerStack bare{air,
                    {{"SiN-top", nSiN, d.topThickness},
                     {"SiN-bottom", nSiN, d.bottomThickness}},
                    si,
                    d.wavelength};
    LayerStack metal{air,
                     {{"SiN-top", nSiN, d.topThickness},
                      {"W", nW, d.metalThickness},
                      {"SiN-bottom", nSiN, d.bottomThickness}},
                     si,
                     d.wavelength};
    return {bare, metal};
}

std::vector<std::uint8_t> to_bytes(const std::string& s) {
    return {s.begin(), s.end()};
}

// Optional JSON config: keys match long flag names; explicit command-line
// arguments win because every option takes the last value seen.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    nlohmann::json j;
    in >> j;
    std::vector<std::string> tokens;
    for (const auto& [key, value] : j.items()) {
        if (value.is_boolean()) {
            if (value.get<bool>()) tokens.push_back("--" + key);
        } else if (value.is_array()) {
            for (const auto& v : value) {
                tokens.push_back("--" + key);
                tokens.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            }
        } else {
            tokens.push_back("--" + key);
            tokens.push_back(value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    return tokens;
}

struct CommonPaths {
    std::string dataDir = GIGAYEAR_DATA_DIR;

    QrTables qrTables() const { return QrTables::load(dataDir + "/qr_constants.csv"); }
    IndexTable indexTable() const { return load_index_table(dataDir + "/index_table.csv"); }
};

DamageScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    nlohmann::json j;
    in >> j;
    return scenario_from_json(j);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << text;
}

int run_read(const GrayImage& image, const ManifestInfo& manifest, const QrTables& tables,
             const ReadoutOptions& options, const std::string& reportPath) {
    const ReadoutReport report = read_disk(image, manifest, tables, options);
    write_text(reportPath, report_to_json(report).dump(2) + "\n");
    std::printf("decoded %d/%d inner symbols (%d after finder repair), alpha = %.3g, %s\n",
                report.decoded, report.totalInner, report.decodedAfterRepair,
                report.alphaObserved, report.passed ? "PASS" : "FAIL");
    return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Design and verification toolkit for gigayear W/Si3N4 storage media"};
    app.require_subcommand(1);

    CommonPaths paths;
    app.add_option("--data-dir", paths.dataDir, "Directory with the bundled data tables")
        ->capture_default_str();
    std::string configPath;
    app.add_option("--config", configPath, "JSON config file with keys matching flag names");
    bool deterministic = false;
    app.add_flag("--deterministic", deterministic,
                 "CI mode: randomized subcommands must receive an explicit --seed");

    auto takeLast = [](CLI::Option* o) { return o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };

    // --- retention ---
    auto* retention = app.add_subcommand("retention", "Required energy barrier for a storage target");
    double storageYears = 1e6, alpha = 1e-5, f0 = 1e9, tempK = 300.0;
    takeLast(retention->add_option("--storage-years", storageYears, "Storage time [years]")->required());
    takeLast(retention->add_option("--alpha", alpha, "Tolerable error fraction")->required());
    takeLast(retention->add_option("--f0", f0, "Attempt frequency [Hz]")->required());
    takeLast(retention->add_option("--temp-k", tempK, "Temperature for the eV conversion [K]"));
    retention->callback([&] {
        const double barrier =
            required_barrier(storageYears * seconds_per_year, alpha, f0);
        const double ev = barrier * k_boltzmann * tempK / joules_per_ev;
        std::printf("%.1f kBT (%.2f eV at %.0f K)\n", barrier, ev, tempK);
    });

    // --- plan-test ---
    auto* plan = app.add_subcommand("plan-test", "Accelerated-aging test temperature");
    double testHours = 1.0, alphaT = 1e-6;
    bool printTable = false;
    takeLast(plan->add_option("--storage-years", storageYears, "Storage time [years]")->required());
    takeLast(plan->add_option("--test-hours", testHours, "Test duration [hours]")->required());
    takeLast(plan->add_option("--alpha", alpha, "Storage error fraction")->required());
    takeLast(plan->add_option("--alpha-t", alphaT, "Observed test error fraction")->required());
    takeLast(plan->add_option("--f0", f0, "Attempt frequency [Hz]")->required());
    takeLast(plan->add_option("--temp-k", tempK, "Storage temperature [K]"));
    plan->add_flag("--table", printTable, "Print the full storage-period x test-time grid");
    plan->callback([&] {
        if (printTable) {
            std::printf("%-12s %8s %8s %8s\n", "storage", "1 hour", "1 week", "1 year");
            for (double years : {1e6, 1e9}) {
                std::printf("%-12s", years == 1e6 ? "1e6 years" : "1e9 years");
                for (double tt : {seconds_per_hour, seconds_per_week, seconds_per_year}) {
                    const TestPlan p{years * seconds_per_year, tempK, alpha, tt, alphaT, f0};
                    std::printf(" %7.0f K", test_temperature(p));
                }
                std::printf("\n");
            }
            return;
        }
        const TestPlan p{storageYears * seconds_per_year, tempK, alpha,
                         testHours * seconds_per_hour, alphaT, f0};
        std::printf("%.0f K\n", test_temperature(p));
    });

    // --- optimize-stack ---
    auto* optimize = app.add_subcommand("optimize-stack",
                                        "Nitride thicknesses maximizing bare/metal contrast");
    double wavelengthNm = 550.0, metalNm = 50.0;
    double bottomMinNm = 100.0, bottomMaxNm = 500.0, topMinNm = 100.0, topMaxNm = 400.0;
    int gridSteps = 81;
    takeLast(optimize->add_option("--wavelength-nm", wavelengthNm, "Readout wavelength [nm]"));
    takeLast(optimize->add_option("--metal-nm", metalNm, "Tungsten thickness [nm]"));
    takeLast(optimize->add_option("--bottom-min-nm", bottomMinNm, "Bottom nitride lower bound [nm]"));
    takeLast(optimize->add_option("--bottom-max-nm", bottomMaxNm, "Bottom nitride upper bound [nm]"));
    takeLast(optimize->add_option("--top-min-nm", topMinNm, "Top nitride lower bound [nm]"));
    takeLast(optimize->add_option("--top-max-nm", topMaxNm, "Top nitride upper bound [nm]"));
    takeLast(optimize->add_option("--grid", gridSteps, "Grid steps per axis"));
    optimize->callback([&] {
        const IndexTable table = paths.indexTable();
        StackDesign d;
        d.wavelength = wavelengthNm * 1e-9;
        d.metalThickness = metalNm * 1e-9;
        auto [bare, metal] = build_stacks(table, d);
        ContrastDesign design{bare, metal, 1, 2, 0, 0};
        const OptimizeResult r = optimize_thicknesses(
            design, {bottomMinNm * 1e-9, bottomMaxNm * 1e-9},
            {topMinNm * 1e-9, topMaxNm * 1e-9}, gridSteps);
        std::printf("bottom %.1f nm, top %.1f nm, contrast %.4f\n",
                    r.bottomThickness * 1e9, r.topThickness * 1e9, r.contrast);
    });

    // --- shared mastering/simulation/readout flags ---
    std::string outerPayload = "GIGAYEAR DISK";
    std::vector<std::string> documents;
    std::string documentsFile;
    int outerVersion = 2, innerVersion = 1;
    std::string outerEc = "H", innerEc = "H";
    double pitchUm = 2.0;
    std::string maskPath = "mask.pbm", manifestPath = "manifest.json";
    std::string scenarioPath, imagePath = "aged.pgm", reportPath = "report.json";
    std::string mode = "monochromatic";
    bool noRepair = false;
    double alphaTarget = 1e-6;
    std::uint64_t seed = 0;

    auto addMasterFlags = [&](CLI::App* cmd) {
        takeLast(cmd->add_option("--outer-payload", outerPayload, "Payload of the outer symbol"));
        cmd->add_option("--document", documents, "Inner document (repeatable)");
        takeLast(cmd->add_option("--documents-file", documentsFile,
                                 "File with one inner document per line"));
        takeLast(cmd->add_option("--outer-version", outerVersion, "Outer symbol version"));
        takeLast(cmd->add_option("--outer-ec", outerEc, "Outer EC level (L/M/Q/H)"));
        takeLast(cmd->add_option("--inner-version", innerVersion, "Inner symbol version"));
        takeLast(cmd->add_option("--inner-ec", innerEc, "Inner EC level (L/M/Q/H)"));
        takeLast(cmd->add_option("--pitch-um", pitchUm, "Inner module pitch [um]"));
    };
    auto addReadFlags = [&](CLI::App* cmd) {
        takeLast(cmd->add_option("--mode", mode, "monochromatic|whitelight"));
        cmd->add_flag("--no-repair", noRepair, "Do not retry failed symbols with finder repair");
        takeLast(cmd->add_option("--alpha-target", alphaTarget, "Acceptance error fraction"));
    };

    auto collectDocuments = [&]() {
        std::vector<std::vector<std::uint8_t>> docs;
        for (const auto& d : documents) docs.push_back(to_bytes(d));
        if (!documentsFile.empty()) {
            std::ifstream in(documentsFile);
            if (!in) throw std::runtime_error("cannot open " + documentsFile);
            std::string line;
            while (std::getline(in, line)) docs.push_back(to_bytes(line));
        }
        if (docs.empty()) docs.push_back(to_bytes("HDP"));
        return docs;
    };
    auto layoutParams = [&]() {
        return LayoutParams{outerVersion, ec_level_from_name(outerEc), innerVersion,
                            ec_level_from_name(innerEc), pitchUm * 1e-6};
    };
    auto readoutOptions = [&](const IndexTable& table) {
        auto [bare, metal] = build_stacks(table, StackDesign{});
        ReadoutOptions o;
        o.repairFinders = !noRepair;
        if (mode == "monochromatic") o.mode = ReadoutMode::Monochromatic;
        else if (mode == "whitelight") o.mode = ReadoutMode::Whitelight;
        else throw CLI::ValidationError("--mode", "must be monochromatic or whitelight");
        o.alphaTarget = alphaTarget;
        o.seed = seed;
        o.grayBare = 255.0 * reflectance(bare);
        o.grayMetal = 255.0 * reflectance(metal);
        return o;
    };

    // --- master ---
    auto* master = app.add_subcommand("master", "Encode the nested layout to a mask + manifest");
    addMasterFlags(master);
    takeLast(master->add_option("--mask", maskPath, "Output mask bitmap (PBM)"));
    takeLast(master->add_option("--manifest", manifestPath, "Output manifest (JSON)"));
    master->callback([&] {
        const QrTables tables = paths.qrTables();
        const DiskLayout layout =
            build_layout(to_bytes(outerPayload), collectDocuments(), layoutParams(), tables);
        const MaskBitmap mask = render_mask(layout, tables);
        write_pbm(mask.bits, maskPath);
        write_text(manifestPath, make_manifest(layout).dump(2) + "\n");
        std::printf("mask %dx%d px, %zu inner symbols, total size %.2f mm\n",
                    mask.bits.width, mask.bits.height, layout.innerPayloads.size(),
                    layout.totalSize * 1e3);
    });

    // --- simulate ---
    auto* simulate = app.add_subcommand("simulate", "Thermally age a mask into a readout image");
    takeLast(simulate->add_option("--mask", maskPath, "Input mask bitmap (PBM)")->required());
    takeLast(simulate->add_option("--manifest", manifestPath, "Layout manifest (JSON)")->required());
    takeLast(simulate->add_option("--scenario", scenarioPath, "Damage scenario (JSON)")->required());
    takeLast(simulate->add_option("--out", imagePath, "Output aged image (PGM)"));
    auto* simSeed = takeLast(simulate->add_option("--seed", seed, "Scenario seed override"));
    simulate->callback([&] {
        DamageScenario scenario = load_scenario(scenarioPath);
        if (simSeed->count() > 0) scenario.seed = seed;
        else if (deterministic)
            throw CLI::ValidationError("--deterministic", "requires an explicit --seed");
        std::ifstream in(manifestPath);
        if (!in) throw std::runtime_error("cannot open " + manifestPath);
        nlohmann::json mj;
        in >> mj;
        const ManifestInfo manifest = parse_manifest(mj);
        MaskBitmap mask{read_pbm(maskPath), manifest.pitch};
        auto [bare, metal] = build_stacks(paths.indexTable(), StackDesign{});
        const AgedDiskImage aged = age_disk(mask, bare, metal, scenario);
        write_pgm(aged.gray, imagePath);
        std::printf("aged image %dx%d px written to %s\n", aged.gray.width, aged.gray.height,
                    imagePath.c_str());
    });

    // --- read ---
    auto* read = app.add_subcommand("read", "Decode an aged image back to documents");
    takeLast(read->add_option("--image", imagePath, "Aged image (PGM)")->required());
    takeLast(read->add_option("--manifest", manifestPath, "Layout manifest (JSON)")->required());
    takeLast(read->add_option("--report", reportPath, "Output report (JSON)"));
    takeLast(read->add_option("--seed", seed, "Classifier seed (whitelight mode)"));
    addReadFlags(read);
    int exitCode = 0;
    read->callback([&] {
        const QrTables tables = paths.qrTables();
        std::ifstream in(manifestPath);
        if (!in) throw std::runtime_error("cannot open " + manifestPath);
        nlohmann::json mj;
        in >> mj;
        const ManifestInfo manifest = parse_manifest(mj);
        const GrayImage image = read_pgm(imagePath);
        exitCode = run_read(image, manifest, tables, readoutOptions(paths.indexTable()),
                            reportPath);
    });

    // --- pipeline ---
    auto* pipeline = app.add_subcommand("pipeline", "master -> simulate -> read in one run");
    addMasterFlags(pipeline);
    addReadFlags(pipeline);
    takeLast(pipeline->add_option("--scenario", scenarioPath, "Damage scenario (JSON)")->required());
    std::string outDir = ".";
    takeLast(pipeline->add_option("--out-dir", outDir, "Directory for the produced artifacts"));
    auto* pipeSeed = takeLast(pipeline->add_option("--seed", seed, "Seed for aging and readout"));
    pipeline->callback([&] {
        if (deterministic && pipeSeed->count() == 0)
            throw CLI::ValidationError("--deterministic", "requires an explicit --seed");
        const QrTables tables = paths.qrTables();
        const IndexTable table = paths.indexTable();
        const DiskLayout layout =
            build_layout(to_bytes(outerPayload), collectDocuments(), layoutParams(), tables);
        const MaskBitmap mask = render_mask(layout, tables);
        write_pbm(mask.bits, outDir + "/mask.pbm");
        const auto manifestJson = make_manifest(layout);
        write_text(outDir + "/manifest.json", manifestJson.dump(2) + "\n");

        DamageScenario scenario = load_scenario(scenarioPath);
        if (pipeSeed->count() > 0) scenario.seed = seed;
        auto [bare, metal] = build_stacks(table, StackDesign{});
        const AgedDiskImage aged = age_disk(mask, bare, metal, scenario);
        write_pgm(aged.gray, outDir + "/aged.pgm");

        exitCode = run_read(aged.gray, parse_manifest(manifestJson), tables,
                            readoutOptions(table), outDir + "/report.json");
    });

    // Apply the optional JSON config before the chosen subcommand's options.
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") {
            try {
                const auto extra = config_tokens(args[i + 1]);
                // Insert right after the subcommand name so the flags bind to
                // it while later command-line tokens still take precedence.
                const std::vector<std::string> names{"retention", "plan-test",
                                                     "optimize-stack", "master",
                                                     "simulate", "read", "pipeline"};
                std::size_t insertAt = args.size();
                for (std::size_t k = 0; k < args.size(); ++k)
                    if (std::find(names.begin(), names.end(), args[k]) != names.end()) {
                        insertAt = k + 1;
                        break;
                    }
                args.insert(args.begin() + static_cast<long>(insertAt), extra.begin(), extra.end());
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
            break;
        }

    try {
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exitCode;
}
