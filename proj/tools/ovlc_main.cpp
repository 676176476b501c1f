// ovlc: compile straight-line kernels to overlay context images, simulate
// them cycle by cycle, disassemble images and reproduce the evaluation
// metrics.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ovl/dfg.hpp"
#include "ovl/error.hpp"
#include "ovl/files.hpp"
#include "ovl/isa.hpp"
#include "ovl/kernel.hpp"
#include "ovl/metrics.hpp"
#include "ovl/scheduler.hpp"
#include "ovl/simulator.hpp"

namespace {

std::string stem_of(const std::string& path) {
    std::size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    const std::size_t dot = name.find_last_of('.');
    if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
    return name;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(),
                                                  suffix) == 0;
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

std::string default_out_dir() {
    const char* env = std::getenv("OVLC_OUT_DIR");
    return env && *env ? env : ".";
}

void ensure_out_dir(const std::string& dir) {
    if (dir.empty() || dir == ".") return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ovl::Error("cannot create output directory '" + dir + "'");
}

struct CompileOptions {
    std::vector<std::string> sources;
    std::string out_dir = default_out_dir();
    std::string from = "auto"; // auto | kernel | dfg
    double clock_mhz = 300.0;
    int jobs = 1;
    int table_cycles = 0; // 0: 32 or three periods, whichever is larger
};

std::string compile_one(const CompileOptions& opt, const std::string& src) {
    const std::string text = ovl::read_text_file(src);
    const bool is_dfg = opt.from == "dfg" || (opt.from == "auto" && has_suffix(src, ".dfg"));
    ovl::Dfg dfg;
    try {
        dfg = is_dfg ? ovl::parse_dfg_text(text) : ovl::lower_to_dfg(ovl::parse_kernel(text));
    } catch (const ovl::Error& e) {
        throw ovl::Error(src + ": " + e.what());
    }

    const ovl::DfgStats st = ovl::stats(dfg);
    const ovl::Schedule sched = ovl::schedule_dfg(dfg);
    const ovl::ContextImage img = ovl::build_context(sched);
    const ovl::ClockConfig clock{opt.clock_mhz * 1e6};

    const std::string stem = stem_of(src);
    ovl::write_binary_file(join_path(opt.out_dir, stem + ".ctx"), ovl::serialize(img));
    ovl::write_text_file(join_path(opt.out_dir, stem + ".sched"),
                         ovl::render_schedule_kv(sched));

    int cycles = opt.table_cycles;
    if (cycles <= 0) cycles = std::max(32, 3 * sched.ii);
    ovl::write_text_file(join_path(opt.out_dir, stem + ".table.txt"),
                         ovl::render_schedule_table(sched, cycles));

    std::ostringstream m;
    char buf[64];
    const int fus = static_cast<int>(sched.fu_programs.size());
    m << "format ovl-metrics 1\n";
    m << "source " << src << "\n";
    m << "fus " << fus << "\n";
    m << "ii " << sched.ii << "\n";
    m << "op_nodes " << st.op_nodes << "\n";
    m << "eopc " << ovl::eopc_display(st.op_nodes, sched.ii) << "\n";
    std::snprintf(buf, sizeof(buf), "%g", opt.clock_mhz);
    m << "clock_mhz " << buf << "\n";
    m << "throughput_gops " << ovl::throughput_display(st.op_nodes, sched.ii, clock) << "\n";
    m << "area_eslices " << ovl::area_eslices(fus) << "\n";
    m << "pipelines " << ovl::pipeline_count(fus) << "\n";
    m << "context_words " << img.words.size() << "\n";
    m << "context_bytes " << ovl::context_bytes(static_cast<std::int64_t>(img.words.size()))
      << "\n";
    std::snprintf(buf, sizeof(buf), "%.4f",
                  1e6 * ovl::config_time_seconds(
                            static_cast<std::int64_t>(img.words.size()), clock));
    m << "config_time_us " << buf << "\n";
    m << "inputs";
    for (const std::string& in : sched.input_order) m << " " << in;
    m << "\n";
    m << "outputs";
    for (const std::string& o : sched.output_order) m << " " << o;
    m << "\n";
    ovl::write_text_file(join_path(opt.out_dir, stem + ".metrics"), m.str());

    std::ostringstream line;
    line << "compiled " << src << ": fus=" << fus << " ii=" << sched.ii
         << " words=" << img.words.size();
    return line.str();
}

int run_compile(const CompileOptions& opt) {
    ensure_out_dir(opt.out_dir);
    if (opt.jobs <= 1 || opt.sources.size() <= 1) {
        for (const std::string& src : opt.sources) std::cout << compile_one(opt, src) << "\n";
        return 0;
    }
    // Independent sources; compilation is pure, so a plain worker pool is
    // enough.
    std::mutex mu;
    std::size_t next = 0;
    std::vector<std::string> lines(opt.sources.size());
    std::vector<std::string> errors;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> g(mu);
                if (next >= opt.sources.size()) return;
                i = next++;
            }
            try {
                lines[i] = compile_one(opt, opt.sources[i]);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> g(mu);
                errors.push_back(e.what());
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(opt.jobs, static_cast<int>(opt.sources.size()));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (!errors.empty()) throw ovl::Error(errors.front());
    for (const std::string& l : lines) std::cout << l << "\n";
    return 0;
}

std::vector<std::vector<std::int32_t>> parse_input_vectors(const std::string& text) {
    std::vector<std::vector<std::int32_t>> vecs;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) stripped += c;
        if (stripped.empty() || stripped[0] == '#') continue;
        std::vector<std::int32_t> vec;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= stripped.size(); ++i) {
            if (i == stripped.size() || stripped[i] == ',') {
                const std::string tok = stripped.substr(start, i - start);
                start = i + 1;
                try {
                    std::size_t pos = 0;
                    const long long v = std::stoll(tok, &pos);
                    if (pos != tok.size() || v < INT32_MIN || v > INT32_MAX)
                        throw std::invalid_argument(tok);
                    vec.push_back(static_cast<std::int32_t>(v));
                } catch (const std::exception&) {
                    throw ovl::Error("inputs line " + std::to_string(lineno) +
                                     ": bad 32-bit word '" + tok + "'");
                }
            }
        }
        vecs.push_back(std::move(vec));
    }
    return vecs;
}

struct SimulateOptions {
    std::string context_path;
    std::string inputs_path;
    std::string out_dir = default_out_dir();
    std::string trace_format = "table";
    double clock_mhz = 300.0;
    int iterations = 0; // 0: one per input line
};

int run_simulate(const SimulateOptions& opt) {
    ensure_out_dir(opt.out_dir);
    ovl::ContextImage img;
    if (has_suffix(opt.context_path, ".sched")) {
        img = ovl::build_context(
            ovl::parse_schedule_kv(ovl::read_text_file(opt.context_path)));
    } else {
        img = ovl::deserialize(ovl::read_binary_file(opt.context_path));
    }
    const auto vecs = parse_input_vectors(ovl::read_text_file(opt.inputs_path));
    const int iterations =
        opt.iterations > 0 ? opt.iterations : static_cast<int>(vecs.size());

    const ovl::SimResult res = ovl::run(img, vecs, iterations);

    const std::string stem = stem_of(opt.context_path);
    std::ostringstream out;
    for (const auto& vals : res.outputs) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            out << (i ? "," : "") << vals[i];
        out << "\n";
    }
    ovl::write_text_file(join_path(opt.out_dir, stem + ".out"), out.str());

    if (opt.trace_format == "rows") {
        ovl::write_text_file(join_path(opt.out_dir, stem + ".trace.csv"),
                             ovl::render_trace_rows(res.trace));
    } else {
        ovl::write_text_file(join_path(opt.out_dir, stem + ".trace.txt"),
                             ovl::render_trace(res.trace, static_cast<int>(img.fu_count)));
    }

    const ovl::ClockConfig clock{opt.clock_mhz * 1e6};
    char buf[64];
    std::cout << "iterations " << iterations << "\n";
    std::cout << "measured_period " << res.measured_period << "\n";
    std::cout << "config_cycles " << res.config_cycles << "\n";
    std::snprintf(buf, sizeof(buf), "%.4f",
                  1e6 * ovl::config_time_seconds(res.config_cycles, clock));
    std::cout << "config_time_us " << buf << "\n";
    return 0;
}

int run_report(const std::string& table_path, const std::string& kv_path) {
    const auto records = ovl::load_benchmark_table(table_path);
    const ovl::ComparisonReport rep = ovl::comparison_report(records);
    std::cout << ovl::render_comparison_text(rep);
    if (!kv_path.empty()) ovl::write_text_file(kv_path, ovl::render_comparison_kv(rep));
    return 0;
}

int run_disassemble(const std::string& path) {
    const ovl::ContextImage img = ovl::deserialize(ovl::read_binary_file(path));
    std::cout << ovl::disassemble(img);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ovlc - compiler and cycle simulator for the linear "
                 "time-multiplexed FU overlay"};
    app.require_subcommand(1);

    CompileOptions copt;
    CLI::App* compile = app.add_subcommand(
        "compile", "Compile kernels (.k) or DFG files (.dfg) to context images");
    compile->add_option("sources", copt.sources, "kernel or DFG source files")
        ->required()
        ->expected(-1);
    compile->add_option("--out-dir", copt.out_dir, "output directory (env OVLC_OUT_DIR)");
    compile->add_option("--from", copt.from, "source language: auto|kernel|dfg")
        ->check(CLI::IsMember({"auto", "kernel", "dfg"}));
    compile->add_option("--clock-mhz", copt.clock_mhz, "clock for metrics (default 300)");
    compile->add_option("--jobs", copt.jobs, "compile sources concurrently");
    compile->add_option("--table-cycles", copt.table_cycles,
                        "cycles in the schedule table (default max(32, 3*II))");

    SimulateOptions sopt;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Run a context image over input vectors");
    simulate->add_option("context", sopt.context_path, "context image (.ctx) or .sched file")
        ->required();
    simulate->add_option("--inputs", sopt.inputs_path, "input vectors, one iteration per line")
        ->required();
    simulate->add_option("--iterations", sopt.iterations,
                         "iteration count (default: all input lines)");
    simulate->add_option("--trace-format", sopt.trace_format, "table|rows")
        ->check(CLI::IsMember({"table", "rows"}));
    simulate->add_option("--out-dir", sopt.out_dir, "output directory (env OVLC_OUT_DIR)");
    simulate->add_option("--clock-mhz", sopt.clock_mhz, "clock for timing lines");

    std::string table_path;
    std::string kv_path;
    CLI::App* report =
        app.add_subcommand("report", "Area/throughput comparison from a benchmark table");
    report->add_option("table", table_path, "benchmark table file")->required();
    report->add_option("--kv", kv_path, "also write the machine-readable report here");

    std::string ctx_path;
    CLI::App* disas = app.add_subcommand("disassemble", "List the words of a context image");
    disas->add_option("context", ctx_path, "context image (.ctx)")->required();

    try {
        app.parse(argc, argv);
        if (*compile) return run_compile(copt);
        if (*simulate) return run_simulate(sopt);
        if (*report) return run_report(table_path, kv_path);
        if (*disas) return run_disassemble(ctx_path);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const ovl::ContractViolation& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const ovl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
