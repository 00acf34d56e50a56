#include "nf/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <istream>

#include "nf/error.hpp"

namespace nf::io {

std::string format_double(double x) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) throw Error("io", "double formatting failed");
    return std::string(buf.data(), end);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), width_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(double x) { return cell(std::string_view(format_double(x))); }
CsvWriter& CsvWriter::cell(std::int64_t x) { return cell(std::string_view(std::to_string(x))); }
CsvWriter& CsvWriter::cell(std::uint64_t x) { return cell(std::string_view(std::to_string(x))); }

CsvWriter& CsvWriter::cell(std::string_view s) {
    if (filled_ == width_) throw Error("io", "csv row wider than header");
    if (filled_++) out_ << ',';
    out_ << s;
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != width_) throw Error("io", "csv row narrower than header");
    out_ << '\n';
    filled_ = 0;
}

void write_trajectory_csv(std::ostream& out, const network::TrajectoryRecord& record,
                          const network::PopulationLayout& layout) {
    std::vector<std::string> header{"time", "neuron_id", "population"};
    for (std::size_t c = 0; c < record.dim; ++c) header.push_back("x" + std::to_string(c));
    CsvWriter w(out, header);
    for (std::size_t k = 0; k < record.frames(); ++k)
        for (std::size_t i = 0; i < record.neurons; ++i) {
            w.cell(record.times[k]).cell(std::uint64_t{i}).cell(std::uint64_t{layout.neuron_population[i]});
            for (std::size_t c = 0; c < record.dim; ++c) w.cell(record.at(k, i, c));
            w.end_row();
        }
}

namespace {

static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error("io", "truncated binary dump");
    return v;
}

} // namespace

void write_trajectory_binary(std::ostream& out, const network::TrajectoryRecord& record, std::uint64_t stride) {
    out.write("NFTR", 4);
    put<std::uint32_t>(out, 1);
    put<std::uint64_t>(out, record.neurons);
    put<std::uint64_t>(out, record.dim);
    put<std::uint64_t>(out, stride);
    put<std::uint64_t>(out, record.frames());
    for (std::size_t k = 0; k < record.frames(); ++k) {
        put<double>(out, record.times[k]);
        const auto f = record.frame(k);
        out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
    }
}

network::TrajectoryRecord read_trajectory_binary(std::istream& in, std::uint64_t* stride) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "NFTR", 4) != 0) throw Error("io", "not a trajectory dump");
    if (get<std::uint32_t>(in) != 1) throw Error("io", "unsupported dump version");
    network::TrajectoryRecord rec;
    rec.neurons = get<std::uint64_t>(in);
    rec.dim = get<std::uint64_t>(in);
    const auto s = get<std::uint64_t>(in);
    if (stride) *stride = s;
    const auto frames = get<std::uint64_t>(in);
    rec.times.resize(frames);
    rec.states.resize(frames * rec.neurons * rec.dim);
    for (std::size_t k = 0; k < frames; ++k) {
        rec.times[k] = get<double>(in);
        auto* dst = rec.states.data() + k * rec.neurons * rec.dim;
        const auto bytes = static_cast<std::streamsize>(rec.neurons * rec.dim * sizeof(double));
        if (!in.read(reinterpret_cast<char*>(dst), bytes)) throw Error("io", "truncated binary dump");
    }
    return rec;
}

void write_moments_csv(std::ostream& out, const meanfield::MomentField& field) {
    CsvWriter w(out, {"t", "r", "M", "v"});
    for (std::size_t k = 0; k < field.frames(); ++k) {
        const auto m = field.mean_row(k);
        const auto v = field.variance_row(k);
        for (std::size_t j = 0; j < field.nodes(); ++j) {
            w.cell(field.times[k]).cell(field.grid.nodes[j]).cell(m[j]).cell(v[j]);
            w.end_row();
        }
    }
}

void write_picard_csv(std::ostream& out, const meanfield::PicardReport& report) {
    CsvWriter w(out, {"k", "D_k"});
    for (std::size_t k = 0; k < report.distances.size(); ++k) {
        w.cell(std::uint64_t{k + 1}).cell(report.distances[k]);
        w.end_row();
    }
}

void write_curve_csv(std::ostream& out, const std::vector<bifurcation::HopfCurve>& curves) {
    CsvWriter w(out, {"k", "m", "omega", "sigma", "tau_s"});
    for (const auto& c : curves)
        for (const auto& s : c.samples) {
            w.cell(std::int64_t{c.k}).cell(std::int64_t{c.m}).cell(s.omega).cell(s.sigma).cell(s.tau_s);
            w.end_row();
        }
}

void write_roots_csv(std::ostream& out, const bifurcation::RootSet& roots) {
    CsvWriter w(out, {"k", "re", "im", "residual"});
    for (const auto& r : roots.roots) {
        w.cell(std::int64_t{r.k}).cell(r.xi.real()).cell(r.xi.imag()).cell(r.residual);
        w.end_row();
    }
}

void write_scan_csv(std::ostream& out, const chaos::ConvergenceReport& report) {
    CsvWriter w(out, {"N", "P", "e_N", "mismatch", "mismatch_stderr"});
    for (const auto& r : report.rows) {
        w.cell(std::uint64_t{r.neurons}).cell(std::uint64_t{r.populations}).cell(r.e_n).cell(r.mismatch).cell(r.mismatch_stderr);
        w.end_row();
    }
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t x) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = digits[x & 0xf];
    return s;
}

} // namespace nf::io
