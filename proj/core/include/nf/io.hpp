#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "nf/chaos.hpp"
#include "nf/dispersion.hpp"
#include "nf/moments.hpp"
#include "nf/network.hpp"
#include "nf/picard.hpp"

namespace nf::io {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

/// Comma-separated rows with a header; every row must match the header
/// width.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);
    CsvWriter& cell(double x);
    CsvWriter& cell(std::int64_t x);
    CsvWriter& cell(std::uint64_t x);
    CsvWriter& cell(std::string_view s);
    void end_row();

private:
    std::ostream& out_;
    std::size_t width_;
    std::size_t filled_ = 0;
};

/// time, neuron_id, population, x0..x{d-1}
void write_trajectory_csv(std::ostream& out, const network::TrajectoryRecord& record,
                          const network::PopulationLayout& layout);

/// Little-endian layout:
///   "NFTR" | u32 version=1 | u64 N | u64 d | u64 stride | u64 frames
///   then per frame: f64 time, N*d f64 states (neuron-major).
void write_trajectory_binary(std::ostream& out, const network::TrajectoryRecord& record, std::uint64_t stride);
network::TrajectoryRecord read_trajectory_binary(std::istream& in, std::uint64_t* stride = nullptr);

/// t, r, M, v
void write_moments_csv(std::ostream& out, const meanfield::MomentField& field);
/// k, D_k
void write_picard_csv(std::ostream& out, const meanfield::PicardReport& report);
/// k, m, omega, sigma, tau_s
void write_curve_csv(std::ostream& out, const std::vector<bifurcation::HopfCurve>& curves);
/// k, re, im, residual
void write_roots_csv(std::ostream& out, const bifurcation::RootSet& roots);
/// N, P, e_N, mismatch, mismatch_stderr
void write_scan_csv(std::ostream& out, const chaos::ConvergenceReport& report);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t x);

} // namespace nf::io
