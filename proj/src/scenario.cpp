#include "mzduality/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace mzduality {

namespace {

constexpr std::size_t kMaxGridPoints = 1'000'000;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Leading number and the trimmed remainder.
std::optional<std::pair<double, std::string_view>> split_number(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || !std::isfinite(value)) {
        return std::nullopt;
    }
    return std::pair{value, trim(text.substr(static_cast<std::size_t>(ptr - text.data())))};
}

std::optional<double> parse_number(std::string_view text) {
    const auto parsed = split_number(text);
    if (!parsed || !parsed->second.empty()) {
        return std::nullopt;
    }
    return parsed->first;
}

std::optional<double> parse_phase(std::string_view text) {
    const auto parsed = split_number(text);
    if (!parsed || !(parsed->second.empty() || parsed->second == "rad")) {
        return std::nullopt;
    }
    return parsed->first;
}

template <class Int>
std::optional<Int> parse_integer(std::string_view text) {
    text = trim(text);
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

struct Entry {
    std::string value;
    int line;
};

using RawConfig = std::map<std::string, Entry, std::less<>>;

RawConfig read_entries(std::string_view text, std::vector<Diagnostic>& diags) {
    RawConfig raw;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || trim(line.substr(1, line.size() - 2)).empty()) {
                diags.push_back({"", "malformed section header", line_no});
            } else {
                section = std::string(trim(line.substr(1, line.size() - 2)));
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            diags.push_back({"", "expected `key = value`", line_no});
            continue;
        }
        const std::string_view key = trim(line.substr(0, eq));
        if (key.empty()) {
            diags.push_back({"", "missing key before `=`", line_no});
            continue;
        }
        std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        if (const auto it = raw.find(full); it != raw.end()) {
            diags.push_back({full, "duplicate key (first set on line " + std::to_string(it->second.line) + ")",
                             line_no});
            continue;
        }
        raw.emplace(std::move(full), Entry{std::string(trim(line.substr(eq + 1))), line_no});
    }
    return raw;
}

}  // namespace

std::string Diagnostic::message() const {
    std::string out;
    if (line > 0) {
        out += "line " + std::to_string(line) + ": ";
    }
    if (!field.empty()) {
        out += field + " ";
    }
    return out + reason;
}

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(diagnostics.empty() ? std::string("invalid scenario")
                                             : diagnostics.front().message()),
      diagnostics_(std::move(diagnostics)) {}

std::string_view to_string(ScanAxis axis) {
    switch (axis) {
        case ScanAxis::delay: return "delay";
        case ScanAxis::tangential: return "tangential";
        case ScanAxis::radial: return "radial";
        case ScanAxis::phase: return "phase";
    }
    return "?";
}

std::string_view to_string(Observables observables) {
    return observables == Observables::analytic ? "analytic" : "estimated";
}

std::optional<double> parse_length(std::string_view text) {
    const auto parsed = split_number(text);
    if (!parsed) {
        return std::nullopt;
    }
    const auto [value, unit] = *parsed;
    static const std::map<std::string_view, double, std::less<>> scale{
        {"", 1.0},     {"m", 1.0},     {"cm", 1e-2},        {"mm", 1e-3},
        {"um", 1e-6},  {"µm", 1e-6}, {"μm", 1e-6}, {"nm", 1e-9},
    };
    const auto it = scale.find(unit);
    if (it == scale.end()) {
        return std::nullopt;
    }
    return value * it->second;
}

std::vector<double> Grid::values() const {
    std::vector<double> out;
    if (points) {
        const std::size_t n = *points;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(n == 1 ? start
                                 : start + (stop - start) * static_cast<double>(i) /
                                               static_cast<double>(n - 1));
        }
        return out;
    }
    if (!(step > 0.0) || stop < start) {
        return out;
    }
    // Tolerate the rounding of (stop - start) / step so `stop` itself is kept.
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (n > kMaxGridPoints) {
        return out;
    }
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
}

std::vector<Diagnostic> Scenario::check() const {
    std::vector<Diagnostic> d;
    const auto need = [&](bool ok, std::string field, std::string reason) {
        if (!ok) {
            d.push_back({std::move(field), std::move(reason), 0});
        }
    };

    need(!name.empty(), "name", "must be non-empty");
    need(geometry.waist_radius > 0.0, "geometry.waist_radius", "must be > 0");
    need(geometry.wavelength > 0.0, "geometry.wavelength", "must be > 0");
    need(geometry.reference_distance > 0.0, "geometry.reference_distance", "must be > 0");
    need(filter.center_wavelength > 0.0, "filter.center_wavelength", "must be > 0");
    need(filter.fwhm_bandwidth > 0.0 && filter.fwhm_bandwidth < filter.center_wavelength / 10.0,
         "filter.fwhm", "must be > 0 and below filter.center_wavelength / 10");
    if (geometry.wavelength > 0.0 && filter.center_wavelength > 0.0) {
        need(std::abs(filter.center_wavelength - geometry.wavelength) <= 1e-12 * geometry.wavelength,
             "filter.center_wavelength", "must equal geometry.wavelength");
    }
    need(v_max >= 0.0 && v_max <= 1.0, "model.v_max", "must lie in [0, 1]");
    need(mean_rate > 0.0, "scan.mean_rate", "must be > 0");

    if (axis == ScanAxis::delay || axis == ScanAxis::phase) {
        if (geometry.reference_distance > 0.0) {
            const double z = geometry.reference_distance;
            need(std::abs(displacement.tangential / z) < kMaxParaxialTilt,
                 "model.displacement_tangential", "implies a non-paraxial tilt");
            need(std::abs(displacement.radial / z) < kMaxParaxialTilt, "model.displacement_radial",
                 "implies a non-paraxial tilt");
        }
    }

    if (grid.points) {
        need(*grid.points > 0, "scan.points", "must be > 0 (grid is empty)");
        need(*grid.points <= kMaxGridPoints, "scan.points", "exceeds 1000000 grid points");
        need(grid.stop >= grid.start, "scan.stop", "must be >= scan.start");
    } else {
        need(grid.step > 0.0, "scan.step", "must be > 0");
        need(grid.stop >= grid.start, "scan.stop", "must be >= scan.start (grid is empty)");
        if (grid.step > 0.0 && grid.stop >= grid.start) {
            need((grid.stop - grid.start) / grid.step < static_cast<double>(kMaxGridPoints), "scan.step",
                 "yields more than 1000000 grid points");
        }
    }

    if (observables == Observables::estimated) {
        need(monte_carlo.has_value(), "montecarlo", "section is required when scan.observables = estimated");
    } else {
        need(!monte_carlo.has_value(), "montecarlo",
             "section must be omitted when scan.observables = analytic");
    }
    if (monte_carlo) {
        const auto& mc = *monte_carlo;
        need(mc.seed.has_value(), "montecarlo.seed", "is required for reproducibility");
        need(mc.pairs_per_point > 0, "montecarlo.pairs_per_point", "must be > 0");
        need(mc.phases >= 3, "montecarlo.phases", "must be >= 3");
        need(mc.dark_counts >= 0.0, "montecarlo.dark_counts", "must be >= 0");
        if (axis == ScanAxis::tangential || axis == ScanAxis::radial) {
            need(mc.coincidence_fraction > 0.0, "montecarlo.coincidence_fraction", "must be > 0");
        } else {
            need(mc.coincidence_fraction >= 0.0, "montecarlo.coincidence_fraction", "must be >= 0");
        }
    }
    return d;
}

Scenario parse_scenario(std::string_view text) {
    std::vector<Diagnostic> diags;
    const RawConfig raw = read_entries(text, diags);
    Scenario s;

    std::map<std::string, int, std::less<>> used;
    const auto field = [&](std::string_view key) -> const Entry* {
        const auto it = raw.find(key);
        if (it == raw.end()) {
            return nullptr;
        }
        used.emplace(std::string(key), it->second.line);
        return &it->second;
    };
    const auto bad = [&](std::string_view key, const Entry& e, std::string reason) {
        diags.push_back({std::string(key), std::move(reason), e.line});
    };
    const auto read_length = [&](std::string_view key, double& out) {
        if (const Entry* e = field(key)) {
            if (const auto v = parse_length(e->value)) {
                out = *v;
            } else {
                bad(key, *e, "expects a length such as `82.5 um` (units nm, um, mm, cm, m)");
            }
        }
    };
    const auto read_number = [&](std::string_view key, double& out) {
        if (const Entry* e = field(key)) {
            if (const auto v = parse_number(e->value)) {
                out = *v;
            } else {
                bad(key, *e, "expects a number");
            }
        }
    };
    const auto read_count = [&](std::string_view key, auto& out) {
        if (const Entry* e = field(key)) {
            using Int = std::remove_cvref_t<decltype(out)>;
            if (const auto v = parse_integer<Int>(e->value)) {
                out = *v;
            } else {
                bad(key, *e, "expects a non-negative integer");
            }
        }
    };

    if (const Entry* e = field("name")) {
        s.name = e->value;
    } else {
        diags.push_back({"name", "is required", 0});
    }
    s.output = s.name;
    if (const Entry* e = field("output.stem")) {
        s.output = e->value;
        if (s.output.empty() || s.output.find('/') != std::string::npos) {
            bad("output.stem", *e, "must be a non-empty file name without '/'");
        }
    }

    read_length("geometry.waist_radius", s.geometry.waist_radius);
    read_length("geometry.wavelength", s.geometry.wavelength);
    read_length("geometry.reference_distance", s.geometry.reference_distance);
    s.filter.center_wavelength = s.geometry.wavelength;
    read_length("filter.center_wavelength", s.filter.center_wavelength);
    read_length("filter.fwhm", s.filter.fwhm_bandwidth);
    read_number("model.v_max", s.v_max);
    read_length("model.displacement_tangential", s.displacement.tangential);
    read_length("model.displacement_radial", s.displacement.radial);

    if (const Entry* e = field("scan.axis")) {
        static const std::map<std::string_view, ScanAxis, std::less<>> axes{
            {"delay", ScanAxis::delay},
            {"tangential", ScanAxis::tangential},
            {"radial", ScanAxis::radial},
            {"phase", ScanAxis::phase}};
        if (const auto it = axes.find(e->value); it != axes.end()) {
            s.axis = it->second;
        } else {
            bad("scan.axis", *e, "must be one of delay, tangential, radial, phase");
        }
    } else {
        diags.push_back({"scan.axis", "is required", 0});
    }

    const auto read_grid = [&](std::string_view key, double& out, bool required) {
        const Entry* e = field(key);
        if (!e) {
            if (required) {
                diags.push_back({std::string(key), "is required", 0});
            }
            return;
        }
        const auto v = s.axis == ScanAxis::phase ? parse_phase(e->value) : parse_length(e->value);
        if (v) {
            out = *v;
        } else {
            bad(key, *e, s.axis == ScanAxis::phase ? "expects a phase in rad" : "expects a length");
        }
    };
    read_grid("scan.start", s.grid.start, true);
    read_grid("scan.stop", s.grid.stop, true);
    if (const Entry* e = field("scan.points")) {
        std::size_t n = 0;
        if (const auto v = parse_integer<std::size_t>(e->value)) {
            n = *v;
            s.grid.points = n;
        } else {
            bad("scan.points", *e, "expects a non-negative integer");
        }
        read_grid("scan.step", s.grid.step, false);
    } else {
        read_grid("scan.step", s.grid.step, true);
    }
    if (const Entry* e = field("scan.observables")) {
        if (e->value == "analytic") {
            s.observables = Observables::analytic;
        } else if (e->value == "estimated") {
            s.observables = Observables::estimated;
        } else {
            bad("scan.observables", *e, "must be analytic or estimated");
        }
    }
    read_number("scan.mean_rate", s.mean_rate);

    const bool has_mc = std::any_of(raw.begin(), raw.end(),
                                    [](const auto& kv) { return kv.first.starts_with("montecarlo."); });
    if (has_mc) {
        MonteCarloSpec mc;
        read_count("montecarlo.pairs_per_point", mc.pairs_per_point);
        if (field("montecarlo.seed")) {
            std::uint64_t seed = 0;
            read_count("montecarlo.seed", seed);
            mc.seed = seed;
        }
        read_count("montecarlo.phases", mc.phases);
        read_number("montecarlo.coincidence_fraction", mc.coincidence_fraction);
        read_number("montecarlo.dark_counts", mc.dark_counts);
        s.monte_carlo = mc;
    }

    for (const auto& [key, entry] : raw) {
        if (!used.contains(key)) {
            diags.push_back({key, "is not a recognised key", entry.line});
        }
    }

    // Semantic checks get the line of the offending key where there is one.
    for (Diagnostic d : s.check()) {
        if (const auto it = used.find(d.field); it != used.end()) {
            d.line = it->second;
        }
        diags.push_back(std::move(d));
    }
    if (!diags.empty()) {
        throw ConfigError(std::move(diags));
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read scenario file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    if (in.bad()) {
        throw IoError("error while reading " + path.string());
    }
    return parse_scenario(text.str());
}

std::vector<Diagnostic> validate_scenario(const std::filesystem::path& path) {
    try {
        load_scenario(path);
    } catch (const ConfigError& e) {
        return e.diagnostics();
    }
    return {};
}

}  // namespace mzduality
