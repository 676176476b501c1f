#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovl/rational.hpp"

namespace ovl {

struct ClockConfig {
    double frequency_hz = 300e6;
};

// e-Slice accounting: one FU = 81 slices + 1 DSP block, one DSP counted as
// 60 slices, so 141 e-Slices per FU.
struct AreaModel {
    int slices_per_fu = 81;
    int dsp_per_fu = 1;
    int slices_per_dsp = 60;

    int eslices_per_fu() const { return slices_per_fu + dsp_per_fu * slices_per_dsp; }
};

// One benchmark row: DFG characteristics plus the published area/throughput
// numbers of the three implementations. The reference columns are data,
// never recomputed.
struct BenchmarkRecord {
    int no = 0;
    std::string name;
    int inputs = 0;
    int outputs = 0;
    int edges = 0;
    int op_nodes = 0;
    int depth = 0;
    std::string parallelism; // printed 2-decimal string
    int ii = 0;
    std::string eopc; // printed 1-decimal string
    double tput_overlay = 0.0;
    int area_overlay = 0;
    double tput_scfu = 0.0;
    int area_scfu = 0;
    double tput_hls = 0.0;
    int area_hls = 0;
};

// Effective operations per cycle: op_nodes / ii. Display with one decimal,
// rounding half up.
Rational eopc(int op_nodes, int ii);
std::string eopc_display(int op_nodes, int ii);

// Throughput model: op_nodes * f / ii. Display in GOPS with two decimals,
// rounding half up.
double throughput_gops(int op_nodes, int ii, const ClockConfig& clock);
std::string throughput_display(int op_nodes, int ii, const ClockConfig& clock);

std::int64_t area_eslices(int fu_count, const AreaModel& model = {});

// Seconds to stream `word_count` 40-bit context words, one per cycle.
double config_time_seconds(std::int64_t word_count, const ClockConfig& clock);

// Physical 8-FU pipelines needed for a chain of `depth` FUs.
int pipeline_count(int depth);

// Linear replication scaling; factor must be >= 1.
double replicated_throughput(double base_gops, int factor);

struct BenchmarkComparison {
    std::string name;
    double area_reduction_vs_scfu = 0.0; // 1 - overlay/scfu
    double area_ratio_vs_hls = 0.0;      // overlay/hls
    double tput_ratio_scfu = 0.0;        // scfu/overlay
    double tput_ratio_hls = 0.0;         // hls/overlay
    double mops_per_eslice = 0.0;        // overlay throughput density
};

struct ComparisonReport {
    std::vector<BenchmarkComparison> rows;
    double max_area_reduction_vs_scfu = 0.0;
    double min_tput_ratio_scfu = 0.0;
    double max_tput_ratio_scfu = 0.0;
};

ComparisonReport comparison_report(const std::vector<BenchmarkRecord>& records);

// Versioned plain-text benchmark table ("ovl-benchtab 1"): one row per
// benchmark with the Table II + Table III columns.
std::vector<BenchmarkRecord> parse_benchmark_table(const std::string& text);
std::vector<BenchmarkRecord> load_benchmark_table(const std::string& path);

// The eight rows shipped with the toolchain.
const std::vector<BenchmarkRecord>& reference_benchmarks();

std::string render_comparison_text(const ComparisonReport& report);
std::string render_comparison_kv(const ComparisonReport& report);

} // namespace ovl
