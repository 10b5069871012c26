#include "sopsim/io.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sopsim/errors.hpp"

namespace sopsim {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    return fnv1a64(text.data(), text.size());
}

std::string hex64(std::uint64_t value) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_failure, "cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) fail(errc::io_failure, "short write to " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_failure, "cannot open " + path.string() + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) fail(errc::io_failure, "read error on " + path.string());
    return buf.str();
}

void write_spectral_scan_csv(const std::filesystem::path& path,
                             const std::vector<spectral_data>& rows) {
    std::string text = "s,E0,E1,E2,gap,v01\n";
    for (const spectral_data& row : rows) {
        text += format_double(row.s);
        for (std::size_t j = 0; j < 3; ++j) {
            text += ',';
            text += j < row.eigenvalues.size() ? format_double(row.eigenvalues[j]) : "nan";
        }
        text += ',';
        text += format_double(row.gap);
        text += ',';
        text += format_double(row.v01);
        text += '\n';
    }
    write_text_file(path, text);
}

void write_trajectory_csv(const std::filesystem::path& path, const reduced_trajectory& traj) {
    if (traj.samples.empty()) fail(errc::bad_argument, "empty trajectory");
    const std::size_t k1 = traj.samples.front().class_probabilities.size();
    std::string text = "t,s";
    for (std::size_t j = 0; j < k1; ++j) text += ",p_" + std::to_string(j);
    text += ",weighted_norm\n";
    for (const trajectory_sample& smp : traj.samples) {
        text += format_double(smp.t);
        text += ',';
        text += format_double(smp.s);
        for (double p : smp.class_probabilities) {
            text += ',';
            text += format_double(p);
        }
        text += ',';
        text += format_double(smp.weighted_norm);
        text += '\n';
    }
    write_text_file(path, text);
}

void write_schedule_csv(const std::filesystem::path& path, const schedule& sched) {
    std::string text = "t,s\n";
    const auto& ts = sched.knot_times();
    const auto& vs = sched.knot_values();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        text += format_double(ts[i]);
        text += ',';
        text += format_double(vs[i]);
        text += '\n';
    }
    write_text_file(path, text);
}

schedule schedule_from_csv(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail(errc::io_failure, "empty schedule file " + path.string());
    if (line.rfind("t,s", 0) != 0)
        fail(errc::io_failure, "schedule file must start with a t,s header");
    std::vector<double> times, values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            fail(errc::io_failure,
                 "line " + std::to_string(line_no) + " of " + path.string() + " is not t,s");
        try {
            times.push_back(std::stod(line.substr(0, comma)));
            values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            fail(errc::io_failure,
                 "line " + std::to_string(line_no) + " of " + path.string() + " is not numeric");
        }
    }
    return schedule::from_knots(times, values, schedule_kind::custom);
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

void write_manifest(const std::filesystem::path& directory, const std::string& config_json,
                    const std::vector<std::filesystem::path>& files) {
    nlohmann::ordered_json config;
    try {
        config = nlohmann::ordered_json::parse(config_json);
    } catch (const std::exception& e) {
        fail(errc::bad_argument, std::string("manifest config is not valid JSON: ") + e.what());
    }

    std::vector<std::filesystem::path> sorted = files;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });

    nlohmann::ordered_json doc;
    doc["tool"] = "sopsim";
    doc["version"] = version_string;
    doc["created"] = utc_timestamp();
    doc["config"] = config;
    doc["outputs"] = nlohmann::ordered_json::array();
    for (const auto& file : sorted) {
        const std::string text = read_text_file(file);
        nlohmann::ordered_json entry;
        entry["name"] = file.filename().string();
        entry["bytes"] = text.size();
        entry["fnv1a64"] = hex64(fnv1a64(text.data(), text.size()));
        doc["outputs"].push_back(entry);
    }

    const std::filesystem::path final_path = directory / "manifest.json";
    const std::filesystem::path tmp_path = directory / "manifest.json.tmp";
    write_text_file(tmp_path, doc.dump(2) + "\n");
    std::error_code ec;
    std::filesystem::rename(tmp_path, final_path, ec);
    if (ec) fail(errc::io_failure, "cannot move manifest into place: " + ec.message());
}

} // namespace sopsim
