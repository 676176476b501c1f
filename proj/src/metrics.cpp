#include "ovl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ovl/error.hpp"
#include "ovl/files.hpp"

namespace ovl {

Rational eopc(int op_nodes, int ii) {
    if (op_nodes < 0 || ii <= 0) throw Error("eopc: need op_nodes >= 0 and ii > 0");
    return {op_nodes, ii};
}

std::string eopc_display(int op_nodes, int ii) {
    return format_round_half_up(eopc(op_nodes, ii), 1);
}

namespace {

// Throughput as an exact rational in GOPS; frequencies are integral Hz in
// practice, which keeps the display rounding exact.
Rational throughput_rational(int op_nodes, int ii, const ClockConfig& clock) {
    if (op_nodes < 0 || ii <= 0) throw Error("throughput: need op_nodes >= 0 and ii > 0");
    if (!(clock.frequency_hz > 0)) throw Error("throughput: frequency must be positive");
    return {static_cast<std::int64_t>(std::llround(clock.frequency_hz)) * op_nodes,
            static_cast<std::int64_t>(ii) * 1'000'000'000};
}

} // namespace

double throughput_gops(int op_nodes, int ii, const ClockConfig& clock) {
    const Rational r = throughput_rational(op_nodes, ii, clock);
    return static_cast<double>(r.num) / static_cast<double>(r.den);
}

std::string throughput_display(int op_nodes, int ii, const ClockConfig& clock) {
    return format_round_half_up(throughput_rational(op_nodes, ii, clock), 2);
}

std::int64_t area_eslices(int fu_count, const AreaModel& model) {
    if (fu_count < 0) throw Error("area_eslices: negative FU count");
    return static_cast<std::int64_t>(fu_count) * model.eslices_per_fu();
}

double config_time_seconds(std::int64_t word_count, const ClockConfig& clock) {
    if (word_count < 0) throw Error("config_time: negative word count");
    if (!(clock.frequency_hz > 0)) throw Error("config_time: frequency must be positive");
    return static_cast<double>(word_count) / clock.frequency_hz;
}

int pipeline_count(int depth) {
    if (depth < 0) throw Error("pipeline_count: negative depth");
    return (depth + 7) / 8;
}

double replicated_throughput(double base_gops, int factor) {
    if (factor < 1) throw Error("replicated_throughput: factor must be >= 1");
    return base_gops * factor;
}

ComparisonReport comparison_report(const std::vector<BenchmarkRecord>& records) {
    if (records.empty()) throw Error("comparison_report: no records");
    ComparisonReport rep;
    for (const BenchmarkRecord& r : records) {
        if (r.area_overlay <= 0 || r.area_scfu <= 0 || r.area_hls <= 0 ||
            r.tput_overlay <= 0 || r.tput_scfu <= 0 || r.tput_hls <= 0)
            throw Error("comparison_report: benchmark '" + r.name +
                        "' is missing reference data");
        BenchmarkComparison c;
        c.name = r.name;
        c.area_reduction_vs_scfu = 1.0 - static_cast<double>(r.area_overlay) / r.area_scfu;
        c.area_ratio_vs_hls = static_cast<double>(r.area_overlay) / r.area_hls;
        c.tput_ratio_scfu = r.tput_scfu / r.tput_overlay;
        c.tput_ratio_hls = r.tput_hls / r.tput_overlay;
        c.mops_per_eslice = r.tput_overlay * 1000.0 / r.area_overlay;
        rep.rows.push_back(c);
    }
    rep.max_area_reduction_vs_scfu = rep.rows[0].area_reduction_vs_scfu;
    rep.min_tput_ratio_scfu = rep.rows[0].tput_ratio_scfu;
    rep.max_tput_ratio_scfu = rep.rows[0].tput_ratio_scfu;
    for (const BenchmarkComparison& c : rep.rows) {
        rep.max_area_reduction_vs_scfu =
            std::max(rep.max_area_reduction_vs_scfu, c.area_reduction_vs_scfu);
        rep.min_tput_ratio_scfu = std::min(rep.min_tput_ratio_scfu, c.tput_ratio_scfu);
        rep.max_tput_ratio_scfu = std::max(rep.max_tput_ratio_scfu, c.tput_ratio_scfu);
    }
    return rep;
}

namespace {

int parse_int_field(const std::string& tok, const std::string& where) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error(where + ": bad integer '" + tok + "'");
    }
}

double parse_double_field(const std::string& tok, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error(where + ": bad number '" + tok + "'");
    }
}

} // namespace

std::vector<BenchmarkRecord> parse_benchmark_table(const std::string& text) {
    std::vector<BenchmarkRecord> records;
    std::istringstream in(text);
    std::string line;
    bool saw_version = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = "benchmark table line " + std::to_string(lineno);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string tok;
        while (ls >> tok) toks.push_back(tok);
        if (toks.empty() || toks[0][0] == '#') continue;
        if (!saw_version) {
            if (toks.size() != 2 || toks[0] != "ovl-benchtab" || toks[1] != "1")
                throw Error(where + ": expected version line `ovl-benchtab 1`");
            saw_version = true;
            continue;
        }
        if (toks.size() != 15)
            throw Error(where + ": expected 15 columns, got " + std::to_string(toks.size()));
        BenchmarkRecord r;
        r.no = parse_int_field(toks[0], where);
        r.name = toks[1];
        const std::string& io = toks[2];
        const std::size_t slash = io.find('/');
        if (slash == std::string::npos) throw Error(where + ": i/o column must be like `3/1`");
        r.inputs = parse_int_field(io.substr(0, slash), where);
        r.outputs = parse_int_field(io.substr(slash + 1), where);
        r.edges = parse_int_field(toks[3], where);
        r.op_nodes = parse_int_field(toks[4], where);
        r.depth = parse_int_field(toks[5], where);
        r.parallelism = toks[6];
        r.ii = parse_int_field(toks[7], where);
        r.eopc = toks[8];
        r.tput_overlay = parse_double_field(toks[9], where);
        r.area_overlay = parse_int_field(toks[10], where);
        r.tput_scfu = parse_double_field(toks[11], where);
        r.area_scfu = parse_int_field(toks[12], where);
        r.tput_hls = parse_double_field(toks[13], where);
        r.area_hls = parse_int_field(toks[14], where);
        records.push_back(r);
    }
    if (!saw_version) throw Error("benchmark table: missing version line");
    if (records.empty()) throw Error("benchmark table: no rows");
    return records;
}

std::vector<BenchmarkRecord> load_benchmark_table(const std::string& path) {
    return parse_benchmark_table(read_text_file(path));
}

const std::vector<BenchmarkRecord>& reference_benchmarks() {
    static const std::vector<BenchmarkRecord> table = {
        {1, "chebyshev", 1, 1, 12, 7, 7, "1.00", 6, "1.2", 0.35, 987, 2.35, 1900, 2.21, 265},
        {2, "sgfilter", 2, 1, 27, 18, 9, "2.00", 10, "1.8", 0.54, 1269, 6.03, 4560, 4.59, 645},
        {3, "mibench", 3, 1, 22, 13, 6, "2.16", 11, "1.2", 0.35, 846, 4.36, 3040, 3.51, 305},
        {4, "qspline", 7, 1, 50, 26, 8, "3.25", 18, "1.4", 0.43, 1128, 8.71, 8360, 6.11, 1270},
        {5, "poly5", 3, 1, 43, 27, 9, "3.00", 14, "1.9", 0.58, 1269, 9.05, 6460, 7.02, 765},
        {6, "poly6", 3, 1, 72, 44, 11, "4.00", 17, "2.6", 0.78, 1551, 14.74, 11400, 11.88, 1455},
        {7, "poly7", 3, 1, 62, 39, 13, "3.00", 17, "2.3", 0.69, 1833, 13.07, 10640, 10.92, 1025},
        {8, "poly8", 3, 1, 51, 32, 11, "2.90", 15, "2.1", 0.64, 1551, 10.72, 7220, 8.32, 1025},
    };
    return table;
}

std::string render_comparison_text(const ComparisonReport& report) {
    std::ostringstream out;
    char buf[160];
    out << "benchmark    area-red(SCFU)  tput-ratio(SCFU)  tput-ratio(HLS)  area-ratio(HLS)  "
           "MOPS/e-Slice\n";
    for (const BenchmarkComparison& c : report.rows) {
        std::snprintf(buf, sizeof(buf), "%-12s %13.1f%% %16.1fx %15.1fx %15.2fx %13.2f\n",
                      c.name.c_str(), 100.0 * c.area_reduction_vs_scfu, c.tput_ratio_scfu,
                      c.tput_ratio_hls, c.area_ratio_vs_hls, c.mops_per_eslice);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "max area reduction vs SCFU-SCN: %.1f%%\n"
                  "throughput ratio vs SCFU-SCN: %.1fx to %.1fx\n",
                  100.0 * report.max_area_reduction_vs_scfu, report.min_tput_ratio_scfu,
                  report.max_tput_ratio_scfu);
    out << buf;
    return out.str();
}

std::string render_comparison_kv(const ComparisonReport& report) {
    std::ostringstream out;
    char buf[96];
    out << "format ovl-comparison 1\n";
    for (const BenchmarkComparison& c : report.rows) {
        out << "benchmark " << c.name << "\n";
        std::snprintf(buf, sizeof(buf), "area_reduction_vs_scfu_pct %.2f\n",
                      100.0 * c.area_reduction_vs_scfu);
        out << buf;
        std::snprintf(buf, sizeof(buf), "tput_ratio_scfu %.2f\n", c.tput_ratio_scfu);
        out << buf;
        std::snprintf(buf, sizeof(buf), "tput_ratio_hls %.2f\n", c.tput_ratio_hls);
        out << buf;
        std::snprintf(buf, sizeof(buf), "area_ratio_hls %.2f\n", c.area_ratio_vs_hls);
        out << buf;
        std::snprintf(buf, sizeof(buf), "mops_per_eslice %.3f\n", c.mops_per_eslice);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "max_area_reduction_vs_scfu_pct %.2f\n",
                  100.0 * report.max_area_reduction_vs_scfu);
    out << buf;
    std::snprintf(buf, sizeof(buf), "min_tput_ratio_scfu %.2f\n", report.min_tput_ratio_scfu);
    out << buf;
    std::snprintf(buf, sizeof(buf), "max_tput_ratio_scfu %.2f\n", report.max_tput_ratio_scfu);
    out << buf;
    return out.str();
}

} // namespace ovl
