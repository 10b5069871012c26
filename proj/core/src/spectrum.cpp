#include "sopsim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

namespace sopsim {

namespace {

// m / 2^n as the nearest double without ever forming 2^n in floating point.
double ratio_pow2(const mpz_class& m, int n) {
    long exp2 = 0;
    double mant = mpz_get_d_2exp(&exp2, m.get_mpz_t());
    return std::ldexp(mant, static_cast<long>(exp2) - n);
}

void check_spec(const spectrum_spec& spec) {
    if (spec.n < 1) fail(errc::bad_argument, "n must be >= 1, got " + std::to_string(spec.n));
    if (spec.values.empty()) fail(errc::empty_spectrum, "spectrum has no values");
    if (spec.values.size() != spec.multiplicities.size())
        fail(errc::bad_argument, "values and multiplicities differ in length");
    for (std::size_t j = 1; j < spec.values.size(); ++j) {
        if (!(spec.values[j - 1] < spec.values[j]))
            fail(errc::non_monotone_values,
                 "values must be strictly increasing at index " + std::to_string(j));
    }
    mpz_class sum = 0;
    for (const auto& m : spec.multiplicities) {
        if (m < 1) fail(errc::multiplicity_sum_mismatch, "multiplicities must be >= 1");
        sum += m;
    }
    mpz_class full = 1;
    full <<= spec.n;
    if (sum != full) {
        fail(errc::multiplicity_sum_mismatch,
             "multiplicities sum to " + sum.get_str() + ", expected 2^" + std::to_string(spec.n));
    }
    if (!std::isfinite(spec.offset) || !std::isfinite(spec.driver_scale))
        fail(errc::bad_argument, "offset and driver_scale must be finite");
    if (spec.driver_scale <= 0.0)
        fail(errc::bad_argument, "driver_scale must be positive");
    for (double v : spec.values)
        if (!std::isfinite(v)) fail(errc::bad_argument, "values must be finite");
}

} // namespace

validated_spectrum::validated_spectrum(spectrum_spec spec) : spec_(std::move(spec)) {
    check_spec(spec_);
    eta_.reserve(spec_.multiplicities.size());
    for (const auto& m : spec_.multiplicities) eta_.push_back(ratio_pow2(m, spec_.n));
}

validated_spectrum validate_spectrum(spectrum_spec spec) {
    return validated_spectrum(std::move(spec));
}

std::vector<double> eta_ratios(const spectrum_spec& spec) {
    return validated_spectrum(spec).eta();
}

spectrum_spec dj_spectrum(int n, dj_kind kind) {
    if (n < 1) fail(errc::bad_argument, "dj spectrum needs n >= 1");
    spectrum_spec spec;
    spec.n = n;
    spec.driver_scale = 1.0;
    mpz_class full = 1;
    full <<= n;
    switch (kind) {
    case dj_kind::constant0:
        spec.values = {0.0};
        spec.multiplicities = {full};
        break;
    case dj_kind::constant1:
        spec.values = {1.0};
        spec.multiplicities = {full};
        break;
    case dj_kind::balanced:
        spec.values = {0.0, 1.0};
        spec.multiplicities = {full / 2, full / 2};
        break;
    }
    return spec;
}

spectrum_spec rem_spectrum(int n) {
    if (n < 1) fail(errc::bad_argument, "rem spectrum needs n >= 1");
    spectrum_spec spec;
    spec.n = n;
    spec.driver_scale = static_cast<double>(n);
    spec.values.resize(n + 1);
    spec.multiplicities.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        spec.values[j] = static_cast<double>(j);
        mpz_bin_uiui(spec.multiplicities[j].get_mpz_t(), n, j);
    }
    return spec;
}

spectrum_spec grover_spectrum(int n, std::uint64_t marked) {
    if (n < 1) fail(errc::bad_argument, "grover spectrum needs n >= 1");
    mpz_class full = 1;
    full <<= n;
    mpz_class m(static_cast<unsigned long>(marked));
    if (marked == 0 || m >= full)
        fail(errc::marked_count_out_of_range,
             "marked count must satisfy 1 <= M < 2^n, got " + std::to_string(marked));
    spectrum_spec spec;
    spec.n = n;
    spec.driver_scale = 1.0;
    spec.values = {0.0, 1.0};
    spec.multiplicities = {m, full - m};
    return spec;
}

spectrum_spec complement_spectrum(const spectrum_spec& spec) {
    check_spec(spec);
    for (double v : spec.values)
        if (v < 0.0 || v > 1.0)
            fail(errc::bad_argument, "complement defined for values in [0, 1]");
    spectrum_spec out = spec;
    const std::size_t k = spec.values.size();
    for (std::size_t j = 0; j < k; ++j) {
        out.values[j] = 1.0 - spec.values[k - 1 - j];
        out.multiplicities[j] = spec.multiplicities[k - 1 - j];
    }
    // 1 - f of a strictly decreasing list is strictly increasing unless two
    // mirrored values collide, which cannot happen for distinct inputs.
    return out;
}

scrambled_diagonal scramble(const validated_spectrum& vs, std::uint64_t seed, int max_n) {
    const int n = vs.n();
    if (n > max_n)
        fail(errc::dimension_too_large,
             "2^" + std::to_string(n) + " amplitudes exceed the configured cap (n <= " +
                 std::to_string(max_n) + ")");
    const std::size_t dim = std::size_t{1} << n;
    scrambled_diagonal d;
    d.n = n;
    d.offset = vs.offset();
    d.values = vs.spec().values;
    d.class_of.resize(dim);
    std::size_t at = 0;
    for (std::size_t j = 0; j < vs.size(); ++j) {
        const auto count = mpz_get_ui(vs.spec().multiplicities[j].get_mpz_t());
        std::fill_n(d.class_of.begin() + at, count, static_cast<std::int32_t>(j));
        at += count;
    }
    std::mt19937_64 rng(seed);
    for (std::size_t i = dim - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(d.class_of[i], d.class_of[pick(rng)]);
    }
    d.entries.resize(dim);
    for (std::size_t i = 0; i < dim; ++i)
        d.entries[i] = d.offset + d.values[static_cast<std::size_t>(d.class_of[i])];
    return d;
}

std::string spectrum_to_json(const spectrum_spec& spec) {
    nlohmann::ordered_json j;
    j["n"] = spec.n;
    j["values"] = spec.values;
    std::vector<std::string> mults;
    mults.reserve(spec.multiplicities.size());
    for (const auto& m : spec.multiplicities) mults.push_back(m.get_str());
    j["multiplicities"] = mults;
    j["offset"] = spec.offset;
    j["driver_scale"] = spec.driver_scale;
    return j.dump(2) + "\n";
}

spectrum_spec spectrum_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::io_failure, std::string("spectrum JSON parse: ") + e.what());
    }
    spectrum_spec spec;
    try {
        spec.n = j.at("n").get<int>();
        spec.values = j.at("values").get<std::vector<double>>();
        for (const auto& item : j.at("multiplicities")) {
            if (item.is_string())
                spec.multiplicities.emplace_back(item.get<std::string>(), 10);
            else
                spec.multiplicities.emplace_back(item.get<long>());
        }
        spec.offset = j.value("offset", 0.0);
        spec.driver_scale = j.value("driver_scale", 1.0);
    } catch (const std::invalid_argument&) {
        fail(errc::io_failure, "spectrum JSON: bad multiplicity string");
    } catch (const nlohmann::json::exception& e) {
        fail(errc::io_failure, std::string("spectrum JSON fields: ") + e.what());
    }
    return spec;
}

const char* errc_name(errc c) {
    switch (c) {
    case errc::empty_spectrum: return "EmptySpectrum";
    case errc::non_monotone_values: return "NonMonotoneValues";
    case errc::multiplicity_sum_mismatch: return "MultiplicitySumMismatch";
    case errc::marked_count_out_of_range: return "MarkedCountOutOfRange";
    case errc::dimension_too_large: return "DimensionTooLarge";
    case errc::degenerate_ground: return "DegenerateGround";
    case errc::bracketing_failure: return "BracketingFailure";
    case errc::step_size_underflow: return "StepSizeUnderflow";
    case errc::tolerance_not_met: return "ToleranceNotMet";
    case errc::non_positive_gap: return "NonPositiveGap";
    case errc::quadrature_failure: return "QuadratureFailure";
    case errc::endpoint_singularity: return "EndpointSingularity";
    case errc::path_ill_defined: return "PathIllDefined";
    case errc::divergent_runtime: return "DivergentRuntime";
    case errc::promise_violation: return "PromiseViolation";
    case errc::degenerate_fit: return "DegenerateFit";
    case errc::io_failure: return "IoFailure";
    case errc::bad_argument: return "BadArgument";
    }
    return "UnknownError";
}

} // namespace sopsim
