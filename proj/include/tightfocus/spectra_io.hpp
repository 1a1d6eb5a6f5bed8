#pragma once

// Spectrum files: CSV with header `detuning_mhz,transmission[,sigma]`,
// `#` comment lines; fit results as JSON.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tightfocus/spectra.hpp"

namespace tightfocus {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_number(std::string_view field, std::size_t line_no) {
    double v = 0.0;
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw std::invalid_argument("spectrum csv line " + std::to_string(line_no) + ": bad number '" +
                                    std::string(field) + "'");
    return v;
}

inline std::string format_g10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace detail

inline SpectrumRecord read_spectrum_csv(std::istream& in) {
    SpectrumRecord rec;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool with_sigma = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = detail::trim(line);
        if (line_no == 1 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);  // UTF-8 BOM
        if (s.empty() || s.front() == '#') continue;
        const auto fields = detail::split_commas(s);
        if (!header_seen) {
            if (fields.size() < 2 || fields[0] != "detuning_mhz" || fields[1] != "transmission" ||
                fields.size() > 3 || (fields.size() == 3 && fields[2] != "sigma"))
                throw std::invalid_argument("spectrum csv line " + std::to_string(line_no) +
                                            ": expected header detuning_mhz,transmission[,sigma]");
            with_sigma = fields.size() == 3;
            header_seen = true;
            continue;
        }
        if (fields.size() != (with_sigma ? 3u : 2u))
            throw std::invalid_argument("spectrum csv line " + std::to_string(line_no) + ": wrong number of columns");
        SpectrumPoint p;
        p.detuning_mhz = detail::parse_number(fields[0], line_no);
        p.transmission = detail::parse_number(fields[1], line_no);
        if (with_sigma) p.sigma = detail::parse_number(fields[2], line_no);
        rec.points.push_back(p);
    }
    if (!header_seen) throw std::invalid_argument("spectrum csv: missing header");
    rec.validate();
    return rec;
}

inline SpectrumRecord read_spectrum_csv(const std::string& text) {
    std::istringstream in(text);
    return read_spectrum_csv(in);
}

inline void write_spectrum_csv(const SpectrumRecord& rec, std::ostream& out) {
    const bool sigma = rec.has_sigma();
    out << (sigma ? "detuning_mhz,transmission,sigma\n" : "detuning_mhz,transmission\n");
    for (const auto& p : rec.points) {
        out << detail::format_g10(p.detuning_mhz) << ',' << detail::format_g10(p.transmission);
        if (sigma) out << ',' << detail::format_g10(p.sigma.value_or(0.0));
        out << '\n';
    }
}

inline nlohmann::ordered_json fit_to_json(const LorentzianFit& fit) {
    nlohmann::ordered_json j;
    j["center_mhz"] = fit.center;
    j["fwhm_mhz"] = fit.fwhm;
    j["t_min"] = fit.t_min;
    j["epsilon_max"] = fit.epsilon_max();
    j["residual_rms"] = fit.residual_rms;
    j["degenerate"] = fit.degenerate;
    j["iterations"] = fit.iterations;
    auto cov = nlohmann::ordered_json::array();
    for (const auto& row : fit.covariance) {
        auto r = nlohmann::ordered_json::array();
        for (double v : row) {
            if (std::isfinite(v)) r.push_back(v);
            else r.push_back(nullptr);
        }
        cov.push_back(r);
    }
    j["covariance"] = cov;
    return j;
}

}  // namespace tightfocus
