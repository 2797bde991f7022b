// SPDX-License-Identifier: Apache-2.0
#include "remskit/response_io.hpp"

#include <sstream>

#include "remskit/errors.hpp"
#include "remskit/numio.hpp"

namespace remskit {

namespace {

struct Header {
    double frequency_hz = 0.0;
    int n_theta = 0, n_phi = 0;
    int ports = 0;
    bool complete() const { return frequency_hz > 0.0 && n_theta > 0 && ports > 0; }
};

class Lines {
public:
    explicit Lines(std::string_view text) : text_(text) {}

    // Next non-empty, non-comment line split into fields; false at end.
    bool next(std::vector<std::string_view>& fields)
    {
        while (pos_ < text_.size()) {
            auto e = text_.find('\n', pos_);
            if (e == std::string_view::npos)
                e = text_.size();
            auto line = trim(text_.substr(pos_, e - pos_));
            pos_ = e + 1;
            ++line_no_;
            if (line.empty() || line.front() == '#')
                continue;
            fields = split_fields(line);
            return true;
        }
        return false;
    }
    int line() const { return line_no_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
};

double num(std::string_view f, int line)
{
    double v;
    if (!parse_double(f, v))
        throw ParseError("bad number '" + std::string(f) + "'", line);
    return v;
}

long integer(std::string_view f, int line)
{
    double v = num(f, line);
    if (v != std::floor(v))
        throw ParseError("expected an integer, got '" + std::string(f) + "'", line);
    return long(v);
}

void expect_count(const std::vector<std::string_view>& f, std::size_t n, int line)
{
    if (f.size() != n)
        throw ParseError("expected " + std::to_string(n) + " fields, got " + std::to_string(f.size()), line);
}

// Returns true if the line was a header field.
bool header_line(const std::vector<std::string_view>& f, Header& h, int line)
{
    if (f[0] == "frequency_hz") {
        expect_count(f, 2, line);
        h.frequency_hz = num(f[1], line);
        if (!(h.frequency_hz > 0.0))
            throw ParseError("frequency must be positive", line);
        return true;
    }
    if (f[0] == "grid") {
        expect_count(f, 4, line);
        if (f[1] != "latlon")
            throw ParseError("unsupported grid kind '" + std::string(f[1]) + "'", line);
        h.n_theta = int(integer(f[2], line));
        h.n_phi = int(integer(f[3], line));
        return true;
    }
    if (f[0] == "ports") {
        expect_count(f, 2, line);
        h.ports = int(integer(f[1], line));
        if (h.ports < 1)
            throw ParseError("port count must be positive", line);
        return true;
    }
    return false;
}

void require_header(const Header& h, int line)
{
    if (!h.complete())
        throw ParseError("record before complete header (frequency_hz, grid, ports)", line);
}

std::size_t grid_index(const DirectionGrid& g, std::string_view th, std::string_view ph, int line)
{
    Direction d = direction_from_degrees(num(th, line), num(ph, line));
    std::size_t i = g.find(d, 1e-7);
    if (i == g.size())
        throw ParseError("direction (" + std::string(th) + ", " + std::string(ph) + ") deg is not on the grid", line);
    return i;
}

int polarization(std::string_view f, int line)
{
    if (f == "theta")
        return 0;
    if (f == "phi")
        return 1;
    throw ParseError("polarization must be theta or phi, got '" + std::string(f) + "'", line);
}

int port_index(std::string_view f, int ports, int line)
{
    long m = integer(f, line);
    if (m < 1 || m > ports)
        throw ParseError("port " + std::to_string(m) + " out of range 1.." + std::to_string(ports), line);
    return int(m - 1);
}

Complex cplx(std::string_view re, std::string_view im, int line) { return {num(re, line), num(im, line)}; }

void write_header(std::ostringstream& os, double f, const DirectionGrid& g, int ports)
{
    os << "frequency_hz," << format_double(f) << '\n';
    os << "grid,latlon," << g.n_theta() << ',' << g.n_phi() << '\n';
    os << "ports," << ports << '\n';
}

std::string deg(double rad) { return format_double(rad * 180.0 / kPi); }

void write_c(std::ostringstream& os, Complex c) { os << ',' << format_double(c.real()) << ',' << format_double(c.imag()); }

void write_kernel(std::ostringstream& os, const char* tag, const DirectionGrid& g, const CMatrix& k)
{
    for (Eigen::Index m = 0; m < k.cols(); ++m)
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto& d = g.direction(i);
            os << tag << ',' << deg(d.theta) << ',' << deg(d.phi) << ',' << (m + 1);
            write_c(os, k(2 * i, m));
            write_c(os, k(2 * i + 1, m));
            os << '\n';
        }
}

void write_coupling(std::ostringstream& os, const CMatrix& c)
{
    for (Eigen::Index a = 0; a < c.rows(); ++a)
        for (Eigen::Index b = 0; b < c.cols(); ++b) {
            os << "coupling," << (a + 1) << ',' << (b + 1);
            write_c(os, c(a, b));
            os << '\n';
        }
}

void read_kernel_record(const std::vector<std::string_view>& f, const DirectionGrid& g, int ports, CMatrix& k,
                        int line)
{
    expect_count(f, 8, line);
    std::size_t i = grid_index(g, f[1], f[2], line);
    int m = port_index(f[3], ports, line);
    k(2 * i, m) = cplx(f[4], f[5], line);
    k(2 * i + 1, m) = cplx(f[6], f[7], line);
}

}  // namespace

PlaneWaveResponseSet parse_response_file(std::string_view text)
{
    Lines lines(text);
    Header h;
    PlaneWaveResponseSet r;
    bool initialized = false;
    std::vector<char> tx_present;
    long block = -1;  // column of the open scatter block
    std::vector<std::string_view> f;

    auto init = [&](int line) {
        require_header(h, line);
        if (!initialized) {
            r.frequency_hz = h.frequency_hz;
            r.resize(make_latlon_grid(h.n_theta, h.n_phi), h.ports, false);
            initialized = true;
        }
    };

    while (lines.next(f)) {
        const int ln = lines.line();
        if (initialized && (f[0] == "frequency_hz" || f[0] == "grid" || f[0] == "ports"))
            throw ParseError("header field after records", ln);
        if (header_line(f, h, ln))
            continue;
        init(ln);
        const auto& g = *r.grid;
        if (f[0] == "port") {
            block = -1;
            expect_count(f, 7, ln);
            std::size_t i = grid_index(g, f[1], f[2], ln);
            int p = polarization(f[3], ln);
            int m = port_index(f[4], r.ports, ln);
            r.port_waves(m, 2 * i + p) = cplx(f[5], f[6], ln);
            r.port_present[2 * i + p] = 1;
        } else if (f[0] == "transmit") {
            block = -1;
            if (r.tx.size() == 0) {
                r.tx = CMatrix::Zero(2 * g.size(), r.ports);
                tx_present.assign(std::size_t(r.ports) * g.size(), 0);
            }
            read_kernel_record(f, g, r.ports, r.tx, ln);
            tx_present[std::size_t(port_index(f[3], r.ports, ln)) * g.size() + grid_index(g, f[1], f[2], ln)] = 1;
        } else if (f[0] == "coupling") {
            block = -1;
            expect_count(f, 5, ln);
            if (r.coupling.size() == 0)
                r.coupling = CMatrix::Zero(r.ports, r.ports);
            int a = port_index(f[1], r.ports, ln);
            int b = port_index(f[2], r.ports, ln);
            r.coupling(a, b) = cplx(f[3], f[4], ln);
        } else if (f[0] == "scatter") {
            expect_count(f, 4, ln);
            if (r.scattered.size() == 0) {
                r.scattered = CMatrix::Zero(2 * g.size(), 2 * g.size());
                r.scatter_present.assign(2 * g.size(), 0);
            }
            std::size_t i = grid_index(g, f[1], f[2], ln);
            block = long(2 * i + polarization(f[3], ln));
            r.scatter_present[block] = 1;
        } else {
            double probe;
            if (!parse_double(f[0], probe))
                throw ParseError("unknown record '" + std::string(f[0]) + "'", ln);
            if (block < 0)
                throw ParseError("scattered-field row outside a scatter block", ln);
            expect_count(f, 6, ln);
            std::size_t i = grid_index(g, f[0], f[1], ln);
            r.scattered(2 * i, block) = cplx(f[2], f[3], ln);
            r.scattered(2 * i + 1, block) = cplx(f[4], f[5], ln);
        }
    }
    if (!initialized)
        throw ParseError("response file has no records", lines.line());
    if (!tx_present.empty())
        for (char c : tx_present)
            if (!c)
                throw InputError("transmit records present but incomplete");
    return r;
}

std::string format_response_file(const PlaneWaveResponseSet& r)
{
    std::ostringstream os;
    const auto& g = *r.grid;
    os << "# plane-wave response set\n";
    write_header(os, r.frequency_hz, g, r.ports);
    for (std::size_t c = 0; c < 2 * g.size(); ++c) {
        if (!r.port_present.empty() && !r.port_present[c])
            continue;
        const auto& d = g.direction(c / 2);
        for (int m = 0; m < r.ports; ++m) {
            os << "port," << deg(d.theta) << ',' << deg(d.phi) << ',' << (c % 2 ? "phi" : "theta") << ',' << (m + 1);
            write_c(os, r.port_waves(m, c));
            os << '\n';
        }
    }
    if (r.tx.size())
        write_kernel(os, "transmit", g, r.tx);
    if (r.coupling.size())
        write_coupling(os, r.coupling);
    if (r.scattered.size()) {
        for (std::size_t c = 0; c < 2 * g.size(); ++c) {
            if (!r.scatter_present.empty() && !r.scatter_present[c])
                continue;
            const auto& d = g.direction(c / 2);
            os << "scatter," << deg(d.theta) << ',' << deg(d.phi) << ',' << (c % 2 ? "phi" : "theta") << '\n';
            for (std::size_t i = 0; i < g.size(); ++i) {
                const auto& o = g.direction(i);
                os << deg(o.theta) << ',' << deg(o.phi);
                write_c(os, r.scattered(2 * i, c));
                write_c(os, r.scattered(2 * i + 1, c));
                os << '\n';
            }
        }
    }
    return os.str();
}

RadiatingStructure parse_kernel_bundle(std::string_view text)
{
    Lines lines(text);
    Header h;
    RadiatingStructure s;
    bool initialized = false, have_tx = false, have_rx = false;
    std::vector<std::string_view> f;
    while (lines.next(f)) {
        const int ln = lines.line();
        if (header_line(f, h, ln)) {
            if (initialized)
                throw ParseError("header field after records", ln);
            continue;
        }
        require_header(h, ln);
        if (!initialized) {
            s.grid = make_latlon_grid(h.n_theta, h.n_phi);
            s.frequency_hz = h.frequency_hz;
            s.coupling = CMatrix::Zero(h.ports, h.ports);
            s.tx = CMatrix::Zero(2 * s.grid->size(), h.ports);
            s.rx = s.tx;
            initialized = true;
        }
        const auto& g = *s.grid;
        if (f[0] == "coupling") {
            expect_count(f, 5, ln);
            s.coupling(port_index(f[1], h.ports, ln), port_index(f[2], h.ports, ln)) = cplx(f[3], f[4], ln);
        } else if (f[0] == "tx") {
            read_kernel_record(f, g, h.ports, s.tx, ln);
            have_tx = true;
        } else if (f[0] == "rx") {
            read_kernel_record(f, g, h.ports, s.rx, ln);
            have_rx = true;
        } else if (f[0] == "scatter") {
            expect_count(f, 11, ln);
            long i = integer(f[1], ln), j = integer(f[2], ln);
            if (i < 0 || j < 0 || std::size_t(i) >= g.size() || std::size_t(j) >= g.size())
                throw ParseError("scatter grid index out of range", ln);
            if (!s.has_scatter())
                s.scatter = CMatrixRM::Zero(2 * g.size(), 2 * g.size());
            s.scatter(2 * i, 2 * j) = cplx(f[3], f[4], ln);
            s.scatter(2 * i, 2 * j + 1) = cplx(f[5], f[6], ln);
            s.scatter(2 * i + 1, 2 * j) = cplx(f[7], f[8], ln);
            s.scatter(2 * i + 1, 2 * j + 1) = cplx(f[9], f[10], ln);
        } else {
            throw ParseError("unknown record '" + std::string(f[0]) + "'", ln);
        }
    }
    if (!initialized)
        throw ParseError("kernel bundle has no records", lines.line());
    if (!have_tx || !have_rx)
        throw InputError("kernel bundle needs both tx and rx records");
    s.validate();
    return s;
}

std::string format_kernel_bundle(const RadiatingStructure& s)
{
    s.validate();
    std::ostringstream os;
    const auto& g = *s.grid;
    os << "# sampled radiating-structure kernels\n";
    write_header(os, s.frequency_hz, g, s.ports());
    write_coupling(os, s.coupling);
    write_kernel(os, "tx", g, s.tx);
    write_kernel(os, "rx", g, s.rx);
    if (s.has_scatter())
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) {
                os << "scatter," << i << ',' << j;
                write_c(os, s.scatter(2 * i, 2 * j));
                write_c(os, s.scatter(2 * i, 2 * j + 1));
                write_c(os, s.scatter(2 * i + 1, 2 * j));
                write_c(os, s.scatter(2 * i + 1, 2 * j + 1));
                os << '\n';
            }
    return os.str();
}

}  // namespace remskit
