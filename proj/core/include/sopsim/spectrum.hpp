#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sopsim/errors.hpp"

namespace sopsim {

// Problem spectrum: K+1 distinct output values f_0 < ... < f_K with exact
// integer multiplicities m_j summing to 2^n.  The offset e_0 shifts every
// diagonal entry but never enters the reduced dynamics; driver_scale is the
// uniform-driver energy E_0.
struct spectrum_spec {
    int n = 0;
    std::vector<double> values;
    std::vector<mpz_class> multiplicities;
    double offset = 0.0;
    double driver_scale = 1.0;
};

enum class dj_kind { constant0, constant1, balanced };

// Validation gate.  Construction checks the exact sum identity and value
// ordering; the eta ratios m_j/2^n are precomputed as doubles.
class validated_spectrum {
public:
    explicit validated_spectrum(spectrum_spec spec);

    const spectrum_spec& spec() const { return spec_; }
    int n() const { return spec_.n; }
    // number of distinct values, K+1
    std::size_t size() const { return spec_.values.size(); }
    double value(std::size_t j) const { return spec_.values[j]; }
    double offset() const { return spec_.offset; }
    double driver_scale() const { return spec_.driver_scale; }
    const std::vector<double>& eta() const { return eta_; }

private:
    spectrum_spec spec_;
    std::vector<double> eta_;
};

validated_spectrum validate_spectrum(spectrum_spec spec);

// m_j / 2^n for a validated spec; each ratio is the nearest double and the
// vector sums to 1 within 1e-12 for n up to 1024.
std::vector<double> eta_ratios(const spectrum_spec& spec);

spectrum_spec dj_spectrum(int n, dj_kind kind);
spectrum_spec rem_spectrum(int n);
spectrum_spec grover_spectrum(int n, std::uint64_t marked);

// Spectrum of 1 - F: values mapped to 1 - f_j and re-sorted ascending with
// their multiplicities.  Values must lie in [0, 1].
spectrum_spec complement_spectrum(const spectrum_spec& spec);

// Full 2^n diagonal with a hidden assignment of basis states to classes.
struct scrambled_diagonal {
    int n = 0;
    double offset = 0.0;
    std::vector<double> values;            // class values, ascending
    std::vector<double> entries;           // entries[i] = offset + values[class_of[i]]
    std::vector<std::int32_t> class_of;    // size 2^n
};

inline constexpr int scramble_default_cap = 24;

// Seeded uniform permutation of class labels over all 2^n basis states.
scrambled_diagonal scramble(const validated_spectrum& vs, std::uint64_t seed,
                            int max_n = scramble_default_cap);

// JSON round-trip; multiplicities carried as decimal strings to stay exact.
std::string spectrum_to_json(const spectrum_spec& spec);
spectrum_spec spectrum_from_json(const std::string& text);

} // namespace sopsim
