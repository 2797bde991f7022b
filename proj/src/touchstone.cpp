// SPDX-License-Identifier: Apache-2.0
#include "remskit/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "remskit/errors.hpp"
#include "remskit/numio.hpp"

namespace remskit {

namespace {

std::string lower(std::string_view s)
{
    std::string o(s);
    for (auto& c : o)
        c = char(std::tolower(static_cast<unsigned char>(c)));
    return o;
}

double unit_scale(const std::string& unit)
{
    auto u = lower(unit);
    if (u == "hz")
        return 1.0;
    if (u == "khz")
        return 1e3;
    if (u == "mhz")
        return 1e6;
    if (u == "ghz")
        return 1e9;
    throw InputError("unknown frequency unit " + unit);
}

const char* format_name(TouchstoneFormat f)
{
    switch (f) {
    case TouchstoneFormat::RI: return "RI";
    case TouchstoneFormat::MA: return "MA";
    case TouchstoneFormat::DB: return "DB";
    }
    return "MA";
}

// File order of matrix entries as (row, col).
std::vector<std::pair<int, int>> entry_order(int n)
{
    std::vector<std::pair<int, int>> o;
    if (n == 2)
        return {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            o.emplace_back(i, j);
    return o;
}

}  // namespace

std::array<double, 2> to_touchstone_pair(Complex c, TouchstoneFormat f)
{
    switch (f) {
    case TouchstoneFormat::RI: return {c.real(), c.imag()};
    case TouchstoneFormat::MA: return {std::abs(c), std::arg(c) * 180.0 / kPi};
    case TouchstoneFormat::DB: return {20.0 * std::log10(std::abs(c)), std::arg(c) * 180.0 / kPi};
    }
    return {0.0, 0.0};
}

Complex from_touchstone_pair(const std::array<double, 2>& p, TouchstoneFormat f)
{
    switch (f) {
    case TouchstoneFormat::RI: return {p[0], p[1]};
    case TouchstoneFormat::MA: return std::polar(p[0], p[1] * kPi / 180.0);
    case TouchstoneFormat::DB: return std::polar(std::pow(10.0, p[0] / 20.0), p[1] * kPi / 180.0);
    }
    return 0.0;
}

double TouchstoneData::frequency_hz(std::size_t k) const { return frequencies.at(k) * unit_scale(frequency_unit); }

CMatrix TouchstoneData::matrix(std::size_t k) const
{
    CMatrix s(n_ports, n_ports);
    const auto& p = pairs.at(k);
    for (int i = 0; i < n_ports; ++i)
        for (int j = 0; j < n_ports; ++j)
            s(i, j) = from_touchstone_pair(p[std::size_t(i) * n_ports + j], format);
    return s;
}

void TouchstoneData::set_matrix(std::size_t k, const CMatrix& s)
{
    if (s.rows() != n_ports || s.cols() != n_ports)
        throw InputError("matrix size does not match port count");
    auto& p = pairs.at(k);
    p.resize(std::size_t(n_ports) * n_ports);
    for (int i = 0; i < n_ports; ++i)
        for (int j = 0; j < n_ports; ++j)
            p[std::size_t(i) * n_ports + j] = to_touchstone_pair(s(i, j), format);
}

TouchstoneData parse_touchstone(std::string_view text, int n_ports)
{
    if (n_ports < 1)
        throw InputError("Touchstone port count must be positive");
    TouchstoneData d;
    d.n_ports = n_ports;
    bool have_option = false;
    const auto order = entry_order(n_ports);
    const std::size_t n_entries = order.size();
    const int lines_per_row = n_ports <= 2 ? 0 : (n_ports + 3) / 4;

    std::vector<double> block;  // numbers of the frequency point being read
    int block_line = 0;         // lines consumed in the current block
    int first_line = 0;

    auto finish_block = [&](int line) {
        std::vector<std::array<double, 2>> p(n_entries);
        for (std::size_t e = 0; e < n_entries; ++e) {
            auto [i, j] = order[e];
            p[std::size_t(i) * n_ports + j] = {block[1 + 2 * e], block[2 + 2 * e]};
        }
        if (!d.frequencies.empty() && !(block[0] > d.frequencies.back()))
            throw ParseError("frequencies must be strictly increasing", line);
        d.frequencies.push_back(block[0]);
        d.pairs.push_back(std::move(p));
        block.clear();
        block_line = 0;
    };

    int ln = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto e = text.find('\n', pos);
        if (e == std::string_view::npos)
            e = text.size();
        auto line = text.substr(pos, e - pos);
        pos = e + 1;
        ++ln;
        if (auto bang = line.find('!'); bang != std::string_view::npos)
            line = line.substr(0, bang);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[')
            throw ParseError("Touchstone v2 keywords are not supported (v1 only)", ln);
        if (line.front() == '#') {
            if (have_option)
                continue;  // v1: only the first option line counts
            have_option = true;
            auto f = split_fields(line.substr(1));
            for (std::size_t i = 0; i < f.size(); ++i) {
                auto t = lower(f[i]);
                if (t == "hz" || t == "khz" || t == "mhz" || t == "ghz")
                    d.frequency_unit = std::string(f[i]);
                else if (t == "s")
                    ;
                else if (t == "y" || t == "z" || t == "h" || t == "g")
                    throw ParseError("only S-parameter files are supported, got " + std::string(f[i]), ln);
                else if (t == "ri")
                    d.format = TouchstoneFormat::RI;
                else if (t == "ma")
                    d.format = TouchstoneFormat::MA;
                else if (t == "db")
                    d.format = TouchstoneFormat::DB;
                else if (t == "r") {
                    if (i + 1 >= f.size() || !parse_double(f[i + 1], d.r0) || !(d.r0 > 0.0))
                        throw ParseError("malformed reference resistance in option line", ln);
                    ++i;
                } else
                    throw ParseError("malformed option line token '" + std::string(f[i]) + "'", ln);
            }
            continue;
        }
        auto f = split_fields(line);
        std::vector<double> nums(f.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            if (!parse_double(f[i], nums[i]))
                throw ParseError("bad number '" + std::string(f[i]) + "'", ln);
        if (block.empty())
            first_line = ln;
        if (n_ports <= 2) {
            if (nums.size() != 1 + 2 * n_entries)
                throw ParseError("expected " + std::to_string(1 + 2 * n_entries) + " columns, got " +
                                     std::to_string(nums.size()),
                                 ln);
            block = std::move(nums);
            finish_block(ln);
            continue;
        }
        // n >= 3: each matrix row spans lines_per_row lines of at most 4 pairs
        const int row_line = block_line % lines_per_row;
        const int in_row = std::min(4, n_ports - 4 * row_line);
        const std::size_t expect = std::size_t(2 * in_row) + (block_line == 0 ? 1 : 0);
        if (nums.size() != expect)
            throw ParseError("expected " + std::to_string(expect) + " columns, got " + std::to_string(nums.size()), ln);
        block.insert(block.end(), nums.begin(), nums.end());
        ++block_line;
        if (block_line == lines_per_row * n_ports)
            finish_block(ln);
    }
    if (!block.empty())
        throw ParseError("incomplete frequency point", first_line);
    return d;
}

std::string write_touchstone(const TouchstoneData& d)
{
    std::ostringstream os;
    os << "! " << d.n_ports << "-port S-parameters\n";
    os << "# " << d.frequency_unit << " S " << format_name(d.format) << " R " << format_double(d.r0) << '\n';
    const auto order = entry_order(d.n_ports);
    for (std::size_t k = 0; k < d.size(); ++k) {
        const auto& p = d.pairs[k];
        auto pair_at = [&](int i, int j) { return p[std::size_t(i) * d.n_ports + j]; };
        os << format_double(d.frequencies[k]);
        if (d.n_ports <= 2) {
            for (auto [i, j] : order) {
                auto v = pair_at(i, j);
                os << ' ' << format_double(v[0]) << ' ' << format_double(v[1]);
            }
            os << '\n';
            continue;
        }
        for (int i = 0; i < d.n_ports; ++i)
            for (int j = 0; j < d.n_ports; ++j) {
                if (j % 4 == 0 && !(i == 0 && j == 0))
                    os << "\n ";
                auto v = pair_at(i, j);
                os << ' ' << format_double(v[0]) << ' ' << format_double(v[1]);
            }
        os << '\n';
    }
    return os.str();
}

int touchstone_ports_from_path(const std::filesystem::path& path)
{
    auto ext = lower(path.extension().string());
    if (ext.size() >= 4 && ext[1] == 's' && ext.back() == 'p') {
        try {
            int n = std::stoi(ext.substr(2, ext.size() - 3));
            if (n >= 1)
                return n;
        } catch (const std::exception&) {
        }
    }
    throw InputError("cannot infer port count from file name " + path.string() + " (expected .sNp)");
}

TouchstoneData load_touchstone(const std::filesystem::path& path)
{
    return parse_touchstone(read_text_file(path), touchstone_ports_from_path(path));
}

}  // namespace remskit
