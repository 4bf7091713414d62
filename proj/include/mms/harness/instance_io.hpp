#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "mms/bitvec.hpp"
#include "mms/errors.hpp"
#include "mms/geometry.hpp"
#include "mms/hardgen.hpp"
#include "mms/oracle.hpp"

namespace mms::harness {

/// Norm deviation a loaded sphere point may have and still be accepted (then renormalized).
inline constexpr double load_renormalize_tol = 1e-6;
/// Below this deviation a loaded vector is kept bit-for-bit, so write -> read is exact.
inline constexpr double load_keep_tol = 1e-12;

inline std::string format_double(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// Hidden-set text format. Binary: "B d n", then n lines of d characters over {0,1}.
/// Sphere: "S d n", then n lines of d numbers separated by single spaces (shortest
/// round-trip representation). LF line endings.
inline void write_hidden_set(std::ostream& os, const HiddenSet& h)
{
    if (const auto* b = std::get_if<BinaryHiddenSet>(&h)) {
        os << "B " << b->d << ' ' << b->points.size() << '\n';
        for (const auto& p : b->points) os << p.to_string() << '\n';
        return;
    }
    const auto& s = std::get<SphereHiddenSet>(h);
    os << "S " << s.d << ' ' << s.points.size() << '\n';
    for (const auto& p : s.points) {
        for (std::size_t i = 0; i < p.dim(); ++i) {
            if (i > 0) os << ' ';
            os << format_double(p[i]);
        }
        os << '\n';
    }
}

inline std::string hidden_set_to_string(const HiddenSet& h)
{
    std::ostringstream os;
    write_hidden_set(os, h);
    return os.str();
}

namespace detail {

inline std::size_t parse_size(std::string_view tok, const char* what)
{
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) throw ParseError(std::string("bad ") + what + ": '" + std::string(tok) + "'");
    return v;
}

inline std::vector<std::string_view> split_spaces(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(' ', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline SpherePoint load_sphere_point(Vector v)
{
    const double n = norm(v);
    if (!std::isfinite(n)) throw ParseError("non-finite sphere coordinate");
    if (std::abs(n - 1.0) > load_renormalize_tol) throw ParseError("sphere point norm " + format_double(n) + " is not within 1e-6 of 1");
    if (std::abs(n - 1.0) <= load_keep_tol) return SpherePoint::make(std::move(v), load_keep_tol);
    return SpherePoint::normalize(std::move(v));
}

} // namespace detail

inline HiddenSet read_hidden_set(std::istream& is, double eps_tie = Tolerances{}.eps_tie)
{
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty hidden-set file");
    const auto header = detail::split_spaces(line);
    if (header.size() != 3 || (header[0] != "B" && header[0] != "S"))
        throw ParseError("header must be 'B d n' or 'S d n', got '" + line + "'");
    const std::size_t d = detail::parse_size(header[1], "dimension");
    const std::size_t n = detail::parse_size(header[2], "point count");
    const bool binary = header[0] == "B"; // header views into `line`, which is reused below
    if (d == 0 || n == 0) throw ParseError("dimension and point count must be positive");

    std::vector<std::string> lines;
    while (std::getline(is, line)) {
        if (line.empty() && lines.size() == n) continue; // tolerate trailing blank lines
        lines.push_back(line);
    }
    if (lines.size() != n) throw ParseError("expected " + std::to_string(n) + " points, found " + std::to_string(lines.size()));

    if (binary) {
        std::unordered_set<std::string> seen;
        std::vector<BinaryPoint> pts;
        for (const auto& l : lines) {
            if (l.size() != d) throw ParseError("binary point of length " + std::to_string(l.size()) + ", expected " + std::to_string(d));
            if (!seen.insert(l).second) throw ParseError("duplicate point " + l);
            pts.push_back(BinaryPoint::from_string(l));
        }
        return make_binary_hidden_set(std::move(pts));
    }

    std::vector<SpherePoint> pts;
    for (const auto& l : lines) {
        const auto toks = detail::split_spaces(l);
        if (toks.size() != d) throw ParseError("sphere point with " + std::to_string(toks.size()) + " coordinates, expected " + std::to_string(d));
        Vector v;
        for (auto tok : toks) {
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
            if (ec != std::errc{} || ptr != tok.data() + tok.size()) throw ParseError("bad number '" + std::string(tok) + "'");
            v.push_back(x);
        }
        pts.push_back(detail::load_sphere_point(std::move(v)));
    }
    try {
        return make_sphere_hidden_set(std::move(pts), eps_tie);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

inline HiddenSet read_hidden_set_file(const std::string& path, double eps_tie = Tolerances{}.eps_tie)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return read_hidden_set(in, eps_tie);
}

inline void write_hidden_set_file(const std::string& path, const HiddenSet& h)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    write_hidden_set(out, h);
}

/// Sidecar record of a generated hard instance; keys follow the HardInstanceMeta fields.
inline nlohmann::ordered_json meta_to_json(const HardInstanceMeta& m)
{
    nlohmann::ordered_json j;
    j["level"] = m.level;
    j["u"] = m.u.to_string();
    auto blocks = nlohmann::ordered_json::array();
    for (const auto& b : m.block_supports) blocks.push_back({b.begin, b.end});
    j["block_supports"] = std::move(blocks);
    j["inner_dim"] = m.inner_dim;
    j["outer_dim"] = m.outer_dim;
    j["ell"] = m.ell;
    j["m1"] = m.m1;
    j["log_term"] = m.log_term;
    j["consts"] = {{"ell_mult", m.consts.ell_mult}, {"m1_mult", m.consts.m1_mult}, {"dim_mult", m.consts.dim_mult}};
    j["paper_constants"] = m.consts.is_paper();
    j["s_flips"] = m.s_flips;
    j["inner_instance"] = m.inner ? meta_to_json(*m.inner) : nlohmann::ordered_json(nullptr);
    return j;
}

} // namespace mms::harness
