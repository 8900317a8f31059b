#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gigayear {

using Complex = std::complex<double>;

struct OpticalLayer {
    std::string name;
    Complex n;                        // complex refractive index, Im >= 0 absorbing
    std::optional<double> thickness;  // [m]; absent for semi-infinite media

    void validate() const {
        if (!(n.real() > 0.0))
            throw std::invalid_argument("OpticalLayer " + name + ": Re(n) must be > 0");
        if (!(n.imag() >= 0.0))
            throw std::invalid_argument("OpticalLayer " + name + ": Im(n) must be >= 0");
        if (thickness && !(*thickness > 0.0))
            throw std::invalid_argument("OpticalLayer " + name + ": thickness must be > 0");
    }
};

// Coherent stack at a single wavelength: semi-infinite ambient, finite
// layers top to bottom, semi-infinite substrate.
struct LayerStack {
    OpticalLayer ambient;
    std::vector<OpticalLayer> layers;
    OpticalLayer substrate;
    double wavelength;  // [m]

    void validate() const {
        if (!(wavelength > 0.0))
            throw std::invalid_argument("LayerStack: wavelength must be > 0");
        if (ambient.thickness || substrate.thickness)
            throw std::invalid_argument("LayerStack: ambient/substrate must be semi-infinite");
        ambient.validate();
        substrate.validate();
        for (const auto& l : layers) {
            l.validate();
            if (!l.thickness)
                throw std::invalid_argument("LayerStack: interior layer " + l.name +
                                            " needs a thickness");
        }
    }
};

namespace detail {

// Characteristic matrix product; returns amplitude coefficients (r, t).
inline std::pair<Complex, Complex> stack_amplitudes(const LayerStack& s) {
    s.validate();
    // 2x2 matrix [B, C; D, E] acting on (field, admittance-weighted field).
    // Internally the index is taken as n' - ik so that absorbing layers
    // attenuate under the exp(-i*omega*t) convention used here.
    Complex m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
    const Complex i(0.0, 1.0);
    for (const auto& layer : s.layers) {
        const Complex n = std::conj(layer.n);
        const Complex delta = 2.0 * M_PI * n * (*layer.thickness) / s.wavelength;
        const Complex c = std::cos(delta);
        const Complex sn = std::sin(delta);
        const Complex a00 = c, a01 = i * sn / n;
        const Complex a10 = i * n * sn, a11 = c;
        const Complex n00 = m00 * a00 + m01 * a10;
        const Complex n01 = m00 * a01 + m01 * a11;
        const Complex n10 = m10 * a00 + m11 * a10;
        const Complex n11 = m10 * a01 + m11 * a11;
        m00 = n00; m01 = n01; m10 = n10; m11 = n11;
    }
    const Complex na = std::conj(s.ambient.n), ns = std::conj(s.substrate.n);
    const Complex b = m00 + m01 * ns;
    const Complex c = m10 + m11 * ns;
    const Complex r = (na * b - c) / (na * b + c);
    const Complex t = 2.0 * na / (na * b + c);
    return {r, t};
}

}  // namespace detail

// Normal-incidence reflectance R = |r|^2.
inline double reflectance(const LayerStack& s) {
    const auto [r, t] = detail::stack_amplitudes(s);
    return std::min(1.0, std::norm(r));
}

// Transmittance into the substrate; R + T = 1 for non-absorbing stacks.
inline double transmittance(const LayerStack& s) {
    const auto [r, t] = detail::stack_amplitudes(s);
    return (s.substrate.n.real() / s.ambient.n.real()) * std::norm(t);
}

// Readout discriminant between the bare and metallized regions.
inline double contrast(const LayerStack& bare, const LayerStack& metallized) {
    if (bare.wavelength != metallized.wavelength)
        throw std::invalid_argument("contrast: stacks must share a wavelength");
    if (bare.ambient.n != metallized.ambient.n)
        throw std::invalid_argument("contrast: stacks must share the ambient medium");
    return std::abs(reflectance(bare) - reflectance(metallized));
}

// Two-thickness contrast design: the bottom and top free layers appear in
// the bare stack and (optionally) in the metallized stack; an index of -1
// means the layer is absent from that stack.
struct ContrastDesign {
    LayerStack bare;
    LayerStack metal;
    int bottomIndexBare = -1;
    int bottomIndexMetal = -1;
    int topIndexBare = -1;
    int topIndexMetal = -1;

    void apply(double bottom, double top) {
        auto set = [](LayerStack& s, int idx, double t) {
            if (idx >= 0) s.layers[static_cast<std::size_t>(idx)].thickness = t;
        };
        set(bare, bottomIndexBare, bottom);
        set(metal, bottomIndexMetal, bottom);
        set(bare, topIndexBare, top);
        set(metal, topIndexMetal, top);
    }

    double evaluate(double bottom, double top) {
        apply(bottom, top);
        return contrast(bare, metal);
    }
};

struct OptimizeResult {
    double bottomThickness = 0.0;
    double topThickness = 0.0;
    double contrast = 0.0;
};

// Exhaustive grid search followed by golden-section refinement along each
// axis.  Deterministic; ties broken toward the lexicographically smallest
// thickness pair (the grid is scanned in ascending order and only strict
// improvements are kept).
inline OptimizeResult optimize_thicknesses(ContrastDesign design,
                                           std::pair<double, double> bottomBounds,
                                           std::pair<double, double> topBounds,
                                           int gridSteps) {
    if (!(bottomBounds.first > 0.0) || !(topBounds.first > 0.0) ||
        !(bottomBounds.second >= bottomBounds.first) ||
        !(topBounds.second >= topBounds.first))
        throw std::invalid_argument("optimize_thicknesses: bounds must be positive and ordered");
    if (gridSteps < 2)
        throw std::invalid_argument("optimize_thicknesses: grid must have >= 2 steps per axis");

    auto gridValue = [](std::pair<double, double> b, int k, int n) {
        return b.first + (b.second - b.first) * k / (n - 1);
    };

    OptimizeResult best;
    best.bottomThickness = bottomBounds.first;
    best.topThickness = topBounds.first;
    best.contrast = design.evaluate(best.bottomThickness, best.topThickness);
    for (int ib = 0; ib < gridSteps; ++ib) {
        const double tb = gridValue(bottomBounds, ib, gridSteps);
        for (int it = 0; it < gridSteps; ++it) {
            const double tt = gridValue(topBounds, it, gridSteps);
            const double c = design.evaluate(tb, tt);
            if (c > best.contrast + 1e-15) {
                best = {tb, tt, c};
            }
        }
    }

    const double stepB = (bottomBounds.second - bottomBounds.first) / (gridSteps - 1);
    const double stepT = (topBounds.second - topBounds.first) / (gridSteps - 1);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;

    auto refineAxis = [&](bool bottomAxis) {
        const double step = bottomAxis ? stepB : stepT;
        if (step <= 0.0) return;
        const auto bounds = bottomAxis ? bottomBounds : topBounds;
        double lo = std::max(bounds.first,
                             (bottomAxis ? best.bottomThickness : best.topThickness) - step);
        double hi = std::min(bounds.second,
                             (bottomAxis ? best.bottomThickness : best.topThickness) + step);
        auto eval = [&](double x) {
            return bottomAxis ? design.evaluate(x, best.topThickness)
                              : design.evaluate(best.bottomThickness, x);
        };
        double a = lo, b = hi;
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = eval(x1), f2 = eval(x2);
        for (int iter = 0; iter < 60 && (b - a) > 1e-13; ++iter) {
            if (f1 >= f2) {
                b = x2; x2 = x1; f2 = f1;
                x1 = b - phi * (b - a); f1 = eval(x1);
            } else {
                a = x1; x1 = x2; f1 = f2;
                x2 = a + phi * (b - a); f2 = eval(x2);
            }
        }
        const double x = (f1 >= f2) ? x1 : x2;
        const double f = std::max(f1, f2);
        if (f > best.contrast + 1e-15) {
            if (bottomAxis) best.bottomThickness = x; else best.topThickness = x;
            best.contrast = f;
        }
    };

    for (int round = 0; round < 3; ++round) {
        refineAxis(true);
        refineAxis(false);
    }
    return best;
}

// Dispersion samples per material; linear interpolation in wavelength.
class IndexTable {
public:
    using Samples = std::vector<std::pair<double, Complex>>;  // (wavelength [m], n)

    void add(const std::string& material, double wavelength, Complex n) {
        auto& s = table_[material];
        s.emplace_back(wavelength, n);
        std::sort(s.begin(), s.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < s.size(); ++i)
            if (!(s[i].first > s[i - 1].first))
                throw std::invalid_argument("IndexTable: duplicate wavelength for " + material);
    }

    Complex interpolate(const std::string& material, double wavelength) const {
        auto it = table_.find(material);
        if (it == table_.end())
            throw std::invalid_argument("IndexTable: unknown material " + material);
        const Samples& s = it->second;
        if (s.size() < 2)
            throw std::invalid_argument("IndexTable: need >= 2 samples for " + material);
        // Absorb rounding differences (e.g. 500e-9 vs stod("500") * 1e-9) at
        // the tabulated endpoints before rejecting out-of-range queries.
        const double tol = 1e-12 * s.back().first;
        if (wavelength < s.front().first - tol || wavelength > s.back().first + tol)
            throw std::out_of_range("IndexTable: wavelength outside tabulated range for " +
                                    material);
        wavelength = std::clamp(wavelength, s.front().first, s.back().first);
        auto hi = std::lower_bound(s.begin(), s.end(), wavelength,
                                   [](const auto& a, double w) { return a.first < w; });
        if (hi->first == wavelength) return hi->second;
        auto lo = hi - 1;
        const double f = (wavelength - lo->first) / (hi->first - lo->first);
        return {lo->second.real() + f * (hi->second.real() - lo->second.real()),
                lo->second.imag() + f * (hi->second.imag() - lo->second.imag())};
    }

    const std::map<std::string, Samples>& materials() const { return table_; }

private:
    std::map<std::string, Samples> table_;
};

// CSV loader, header `material,wavelength_nm,n_real,n_imag`.
inline IndexTable load_index_table(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_index_table: cannot open " + path);
    IndexTable table;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty() || line.back() == '\r') {
            while (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
        }
        if (lineNo == 1) {
            if (line != "material,wavelength_nm,n_real,n_imag")
                throw std::runtime_error("load_index_table: bad header at line 1");
            continue;
        }
        std::istringstream row(line);
        std::string material, wl, nr, ni;
        if (!std::getline(row, material, ',') || !std::getline(row, wl, ',') ||
            !std::getline(row, nr, ',') || !std::getline(row, ni, ','))
            throw std::runtime_error("load_index_table: malformed row at line " +
                                     std::to_string(lineNo));
        try {
            table.add(material, std::stod(wl) * 1e-9, {std::stod(nr), std::stod(ni)});
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("load_index_table: malformed number at line " +
                                     std::to_string(lineNo));
        }
    }
    return table;
}

}  // namespace gigayear
