#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gigayear {

// GF(2^8) with the QR primitive polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11D),
// generator alpha = 2.  Log/antilog tables built once at static init.
class GF256 {
public:
    static std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
        if (a == 0 || b == 0) return 0;
        return tables().exp[tables().log[a] + tables().log[b]];
    }

    static std::uint8_t div(std::uint8_t a, std::uint8_t b) {
        if (b == 0) throw std::domain_error("GF256: division by zero");
        if (a == 0) return 0;
        return tables().exp[tables().log[a] + 255 - tables().log[b]];
    }

    static std::uint8_t inv(std::uint8_t a) { return div(1, a); }

    // alpha^k, any integer k.
    static std::uint8_t pow_alpha(int k) {
        return tables().exp[((k % 255) + 255) % 255];
    }

    static int log_alpha(std::uint8_t a) {
        if (a == 0) throw std::domain_error("GF256: log of zero");
        return tables().log[a];
    }

private:
    struct Tables {
        std::array<std::uint8_t, 512> exp{};
        std::array<int, 256> log{};
        Tables() {
            int x = 1;
            for (int i = 0; i < 255; ++i) {
                exp[i] = static_cast<std::uint8_t>(x);
                log[x] = i;
                x <<= 1;
                if (x & 0x100) x ^= 0x11D;
            }
            for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
        }
    };
    static const Tables& tables() {
        static const Tables t;
        return t;
    }
};

// Polynomial over GF(256), coefficients lowest degree first.
struct GFPoly {
    std::vector<std::uint8_t> coeffs;

    int degree() const {
        for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
            if (coeffs[i] != 0) return i;
        return -1;
    }

    std::uint8_t eval(std::uint8_t x) const {
        std::uint8_t acc = 0;
        for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
            acc = static_cast<std::uint8_t>(GF256::mul(acc, x) ^ coeffs[i]);
        return acc;
    }

    static GFPoly mul(const GFPoly& a, const GFPoly& b) {
        GFPoly r;
        r.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, 0);
        for (std::size_t i = 0; i < a.coeffs.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs.size(); ++j)
                r.coeffs[i + j] = static_cast<std::uint8_t>(
                    r.coeffs[i + j] ^ GF256::mul(a.coeffs[i], b.coeffs[j]));
        return r;
    }
};

// Reed-Solomon parity for `data`: remainder of data * x^nParity modulo the
// generator polynomial prod_{i=0}^{nParity-1} (x - alpha^i).
inline std::vector<std::uint8_t> rs_encode(const std::vector<std::uint8_t>& data,
                                           int nParity) {
    if (nParity < 1) throw std::invalid_argument("rs_encode: nParity must be >= 1");
    if (data.empty()) throw std::invalid_argument("rs_encode: data is empty");

    // Generator coefficients, highest degree first: prod (x - alpha^i).
    std::vector<std::uint8_t> gen{1};
    for (int i = 0; i < nParity; ++i) {
        const std::uint8_t root = GF256::pow_alpha(i);
        std::vector<std::uint8_t> out(gen.size() + 1, 0);
        for (std::size_t j = 0; j < gen.size(); ++j) {
            out[j] = static_cast<std::uint8_t>(out[j] ^ gen[j]);
            out[j + 1] = static_cast<std::uint8_t>(out[j + 1] ^ GF256::mul(gen[j], root));
        }
        gen = out;
    }

    // Synthetic long division of data || nParity zeros.
    std::vector<std::uint8_t> rem(static_cast<std::size_t>(nParity), 0);
    for (std::uint8_t d : data) {
        const std::uint8_t factor = static_cast<std::uint8_t>(d ^ rem.front());
        rem.erase(rem.begin());
        rem.push_back(0);
        for (int j = 0; j < nParity; ++j)
            rem[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(
                rem[static_cast<std::size_t>(j)] ^ GF256::mul(gen[static_cast<std::size_t>(j) + 1], factor));
    }
    return rem;
}

struct RsDecodeResult {
    bool ok = false;
    std::vector<std::uint8_t> data;   // corrected data part (codeword minus parity)
    int correctedErrors = 0;          // error positions fixed (excluding erasures)
    int correctedErasures = 0;
    std::string diagnostic;
};

// Berlekamp-Massey with erasure support.  Corrects e errors and f erasures
// whenever 2e + f <= nParity.  The corrected codeword is re-checked against
// the syndromes; a wrong payload is never returned silently.
inline RsDecodeResult rs_decode(std::vector<std::uint8_t> codeword, int nParity,
                                const std::vector<int>& erasures = {}) {
    RsDecodeResult result;
    const int n = static_cast<int>(codeword.size());
    if (nParity < 1 || n <= nParity) {
        result.diagnostic = "codeword shorter than parity";
        return result;
    }
    if (static_cast<int>(erasures.size()) > nParity) {
        result.diagnostic = "more erasures than parity symbols";
        return result;
    }
    for (int e : erasures)
        if (e < 0 || e >= n) {
            result.diagnostic = "erasure position out of range";
            return result;
        }

    auto syndromes = [&](const std::vector<std::uint8_t>& cw) {
        std::vector<std::uint8_t> s(static_cast<std::size_t>(nParity), 0);
        bool nonzero = false;
        for (int i = 0; i < nParity; ++i) {
            std::uint8_t acc = 0;
            const std::uint8_t x = GF256::pow_alpha(i);
            // coefficient order: codeword[0] is the highest-degree term
            for (std::uint8_t c : cw) acc = static_cast<std::uint8_t>(GF256::mul(acc, x) ^ c);
            s[static_cast<std::size_t>(i)] = acc;
            nonzero |= (acc != 0);
        }
        return std::make_pair(s, nonzero);
    };

    auto [synd, anyError] = syndromes(codeword);
    if (!anyError) {
        result.ok = true;
        result.data.assign(codeword.begin(), codeword.end() - nParity);
        return result;
    }

    // Erasure locator Gamma(x) = prod (1 - X_j x), X_j = alpha^(n-1-pos).
    std::vector<std::uint8_t> gamma{1};
    for (int pos : erasures) {
        const std::uint8_t xj = GF256::pow_alpha(n - 1 - pos);
        std::vector<std::uint8_t> next(gamma.size() + 1, 0);
        for (std::size_t j = 0; j < gamma.size(); ++j) {
            next[j] = static_cast<std::uint8_t>(next[j] ^ gamma[j]);
            next[j + 1] = static_cast<std::uint8_t>(next[j + 1] ^ GF256::mul(gamma[j], xj));
        }
        gamma = next;
    }

    // Modified syndromes: S'(x) = S(x) * Gamma(x) mod x^nParity.
    std::vector<std::uint8_t> msynd(static_cast<std::size_t>(nParity), 0);
    for (int i = 0; i < nParity; ++i) {
        std::uint8_t acc = 0;
        for (int j = 0; j <= i && j < static_cast<int>(gamma.size()); ++j)
            acc = static_cast<std::uint8_t>(
                acc ^ GF256::mul(gamma[static_cast<std::size_t>(j)],
                                 synd[static_cast<std::size_t>(i - j)]));
        msynd[static_cast<std::size_t>(i)] = acc;
    }

    // Berlekamp-Massey on the modified syndromes for the error locator.
    const int f = static_cast<int>(erasures.size());
    std::vector<std::uint8_t> lambda{1}, prev{1};
    int L = 0, m = 1;
    std::uint8_t bcoef = 1;
    // The first f modified syndromes are accounted for by Gamma; the error
    // locator is determined by the tail msynd[f..nParity-1] only.
    for (int i = f; i < nParity; ++i) {
        std::uint8_t delta = msynd[static_cast<std::size_t>(i)];
        for (int j = 1; j <= L && j < static_cast<int>(lambda.size()); ++j)
            delta = static_cast<std::uint8_t>(
                delta ^ GF256::mul(lambda[static_cast<std::size_t>(j)],
                                   msynd[static_cast<std::size_t>(i - j)]));
        if (delta == 0) {
            ++m;
        } else if (2 * L <= i - f) {
            std::vector<std::uint8_t> t = lambda;
            const std::uint8_t coef = GF256::div(delta, bcoef);
            if (lambda.size() < prev.size() + static_cast<std::size_t>(m))
                lambda.resize(prev.size() + static_cast<std::size_t>(m), 0);
            for (std::size_t j = 0; j < prev.size(); ++j)
                lambda[j + static_cast<std::size_t>(m)] = static_cast<std::uint8_t>(
                    lambda[j + static_cast<std::size_t>(m)] ^ GF256::mul(prev[j], coef));
            prev = t;
            bcoef = delta;
            L = i - f + 1 - L;
            m = 1;
        } else {
            const std::uint8_t coef = GF256::div(delta, bcoef);
            if (lambda.size() < prev.size() + static_cast<std::size_t>(m))
                lambda.resize(prev.size() + static_cast<std::size_t>(m), 0);
            for (std::size_t j = 0; j < prev.size(); ++j)
                lambda[j + static_cast<std::size_t>(m)] = static_cast<std::uint8_t>(
                    lambda[j + static_cast<std::size_t>(m)] ^ GF256::mul(prev[j], coef));
            ++m;
        }
    }

    // Combined locator Psi = Lambda * Gamma.
    GFPoly psi = GFPoly::mul(GFPoly{lambda}, GFPoly{gamma});

    // Chien search over all codeword positions.
    std::vector<int> positions;
    for (int pos = 0; pos < n; ++pos) {
        const std::uint8_t xinv = GF256::pow_alpha(-(n - 1 - pos));
        if (psi.eval(xinv) == 0) positions.push_back(pos);
    }
    if (static_cast<int>(positions.size()) != psi.degree()) {
        result.diagnostic = "uncorrectable: locator roots do not match degree";
        return result;
    }

    // Forney: Omega(x) = S(x) * Psi(x) mod x^nParity.
    std::vector<std::uint8_t> omega(static_cast<std::size_t>(nParity), 0);
    for (int i = 0; i < nParity; ++i) {
        std::uint8_t acc = 0;
        for (int j = 0; j <= i && j < static_cast<int>(psi.coeffs.size()); ++j)
            acc = static_cast<std::uint8_t>(
                acc ^ GF256::mul(psi.coeffs[static_cast<std::size_t>(j)],
                                 synd[static_cast<std::size_t>(i - j)]));
        omega[static_cast<std::size_t>(i)] = acc;
    }
    GFPoly omegaPoly{omega};
    // Formal derivative of Psi (odd-degree terms only).
    GFPoly psiDeriv;
    psiDeriv.coeffs.assign(psi.coeffs.size() > 1 ? psi.coeffs.size() - 1 : 1, 0);
    for (std::size_t j = 1; j < psi.coeffs.size(); j += 2)
        psiDeriv.coeffs[j - 1] = psi.coeffs[j];

    for (int pos : positions) {
        const std::uint8_t x = GF256::pow_alpha(n - 1 - pos);
        const std::uint8_t xinv = GF256::inv(x);
        const std::uint8_t denom = psiDeriv.eval(xinv);
        if (denom == 0) {
            result.diagnostic = "uncorrectable: Forney denominator vanished";
            return result;
        }
        const std::uint8_t magnitude =
            GF256::mul(x, GF256::div(omegaPoly.eval(xinv), denom));
        codeword[static_cast<std::size_t>(pos)] =
            static_cast<std::uint8_t>(codeword[static_cast<std::size_t>(pos)] ^ magnitude);
    }

    // Final check: all syndromes of the corrected word must vanish.
    auto [synd2, stillBad] = syndromes(codeword);
    (void)synd2;
    if (stillBad) {
        result.diagnostic = "uncorrectable: syndromes nonzero after correction";
        return result;
    }

    int erasureHits = 0;
    for (int pos : positions)
        for (int e : erasures)
            if (e == pos) { ++erasureHits; break; }
    result.ok = true;
    result.correctedErasures = erasureHits;
    result.correctedErrors = static_cast<int>(positions.size()) - erasureHits;
    result.data.assign(codeword.begin(), codeword.end() - nParity);
    return result;
}

}  // namespace gigayear
