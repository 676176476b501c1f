#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ovl/dfg.hpp"
#include "ovl/error.hpp"
#include "ovl/files.hpp"
#include "ovl/isa.hpp"
#include "ovl/kernel.hpp"
#include "ovl/metrics.hpp"
#include "ovl/scheduler.hpp"
#include "ovl/simulator.hpp"

namespace py = pybind11;
using namespace ovl;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Compiler and cycle simulator for the linear time-multiplexed FU overlay";

    py::register_exception<Error>(m, "OvlError", PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "OvlContractViolation", PyExc_RuntimeError);

    py::enum_<OpKind>(m, "OpKind")
        .value("Input", OpKind::Input)
        .value("Output", OpKind::Output)
        .value("Add", OpKind::Add)
        .value("Sub", OpKind::Sub)
        .value("Mul", OpKind::Mul)
        .value("Bypass", OpKind::Bypass);

    py::class_<DfgNode>(m, "DfgNode")
        .def_readonly("id", &DfgNode::id)
        .def_readonly("kind", &DfgNode::kind)
        .def_readonly("operands", &DfgNode::operands)
        .def("__repr__", [](const DfgNode& n) {
            std::string r = "DfgNode(" + n.id + ", " + kind_name(n.kind);
            for (const auto& op : n.operands) r += ", " + op;
            return r + ")";
        });

    py::class_<Dfg>(m, "Dfg")
        .def_readonly("nodes", &Dfg::nodes)
        .def_readonly("consts", &Dfg::consts)
        .def("__eq__", [](const Dfg& a, const Dfg& b) { return a == b; });

    py::class_<DfgStats>(m, "DfgStats")
        .def_readonly("input_count", &DfgStats::input_count)
        .def_readonly("output_count", &DfgStats::output_count)
        .def_readonly("edge_count", &DfgStats::edge_count)
        .def_readonly("op_nodes", &DfgStats::op_nodes)
        .def_readonly("graph_depth", &DfgStats::graph_depth)
        .def_property_readonly("avg_parallelism",
                               [](const DfgStats& s) {
                                   return s.graph_depth
                                              ? static_cast<double>(s.avg_parallelism.num) /
                                                    static_cast<double>(s.avg_parallelism.den)
                                              : 0.0;
                               })
        .def_property_readonly("avg_parallelism_display", [](const DfgStats& s) {
            return format_truncated(s.avg_parallelism, 2);
        });

    py::class_<FuInstr>(m, "FuInstr")
        .def_readonly("op", &FuInstr::op)
        .def_readonly("src_a", &FuInstr::src_a)
        .def_readonly("src_b", &FuInstr::src_b);

    py::class_<FuProgram>(m, "FuProgram")
        .def_readonly("fu_index", &FuProgram::fu_index)
        .def_readonly("instrs", &FuProgram::instrs)
        .def_readonly("expected_loads", &FuProgram::expected_loads);

    py::class_<Schedule>(m, "Schedule")
        .def_readonly("fu_programs", &Schedule::fu_programs)
        .def_readonly("ii", &Schedule::ii)
        .def_readonly("input_order", &Schedule::input_order)
        .def_readonly("output_order", &Schedule::output_order)
        .def_readonly("consts", &Schedule::consts);

    py::class_<ContextSidecar>(m, "ContextSidecar")
        .def_readonly("input_order", &ContextSidecar::input_order)
        .def_readonly("output_order", &ContextSidecar::output_order)
        .def_readonly("consts", &ContextSidecar::consts)
        .def_readonly("expected_loads", &ContextSidecar::expected_loads)
        .def_readonly("ii", &ContextSidecar::ii);

    py::class_<ContextImage>(m, "ContextImage")
        .def_property_readonly("fu_count",
                               [](const ContextImage& img) { return int(img.fu_count); })
        .def_property_readonly("word_count",
                               [](const ContextImage& img) { return img.words.size(); })
        .def_readonly("sidecar", &ContextImage::sidecar)
        .def("__eq__", [](const ContextImage& a, const ContextImage& b) { return a == b; });

    py::class_<TraceEvent> ev(m, "TraceEvent");
    py::enum_<TraceEvent::Action>(ev, "Action")
        .value("Load", TraceEvent::Action::Load)
        .value("Issue", TraceEvent::Action::Issue)
        .value("Emit", TraceEvent::Action::Emit)
        .value("Stall", TraceEvent::Action::Stall);
    ev.def_readonly("cycle", &TraceEvent::cycle)
        .def_readonly("fu", &TraceEvent::fu)
        .def_readonly("action", &TraceEvent::action)
        .def_readonly("op", &TraceEvent::op)
        .def_readonly("a", &TraceEvent::a)
        .def_readonly("b", &TraceEvent::b)
        .def_readonly("value", &TraceEvent::value);

    py::class_<SimResult>(m, "SimResult")
        .def_readonly("outputs", &SimResult::outputs)
        .def_readonly("trace", &SimResult::trace)
        .def_readonly("measured_period", &SimResult::measured_period)
        .def_readonly("config_cycles", &SimResult::config_cycles)
        .def_readonly("completion_cycles", &SimResult::completion_cycles);

    py::class_<ClockConfig>(m, "ClockConfig")
        .def(py::init<>())
        .def(py::init([](double hz) { return ClockConfig{hz}; }), py::arg("frequency_hz"))
        .def_readwrite("frequency_hz", &ClockConfig::frequency_hz);

    py::class_<AreaModel>(m, "AreaModel")
        .def(py::init<>())
        .def_readwrite("slices_per_fu", &AreaModel::slices_per_fu)
        .def_readwrite("dsp_per_fu", &AreaModel::dsp_per_fu)
        .def_readwrite("slices_per_dsp", &AreaModel::slices_per_dsp)
        .def("eslices_per_fu", &AreaModel::eslices_per_fu);

    py::class_<BenchmarkRecord>(m, "BenchmarkRecord")
        .def_readonly("name", &BenchmarkRecord::name)
        .def_readonly("inputs", &BenchmarkRecord::inputs)
        .def_readonly("outputs", &BenchmarkRecord::outputs)
        .def_readonly("edges", &BenchmarkRecord::edges)
        .def_readonly("op_nodes", &BenchmarkRecord::op_nodes)
        .def_readonly("depth", &BenchmarkRecord::depth)
        .def_readonly("parallelism", &BenchmarkRecord::parallelism)
        .def_readonly("ii", &BenchmarkRecord::ii)
        .def_readonly("eopc", &BenchmarkRecord::eopc)
        .def_readonly("tput_overlay", &BenchmarkRecord::tput_overlay)
        .def_readonly("area_overlay", &BenchmarkRecord::area_overlay)
        .def_readonly("tput_scfu", &BenchmarkRecord::tput_scfu)
        .def_readonly("area_scfu", &BenchmarkRecord::area_scfu)
        .def_readonly("tput_hls", &BenchmarkRecord::tput_hls)
        .def_readonly("area_hls", &BenchmarkRecord::area_hls);

    py::class_<BenchmarkComparison>(m, "BenchmarkComparison")
        .def_readonly("name", &BenchmarkComparison::name)
        .def_readonly("area_reduction_vs_scfu", &BenchmarkComparison::area_reduction_vs_scfu)
        .def_readonly("area_ratio_vs_hls", &BenchmarkComparison::area_ratio_vs_hls)
        .def_readonly("tput_ratio_scfu", &BenchmarkComparison::tput_ratio_scfu)
        .def_readonly("tput_ratio_hls", &BenchmarkComparison::tput_ratio_hls)
        .def_readonly("mops_per_eslice", &BenchmarkComparison::mops_per_eslice);

    py::class_<ComparisonReport>(m, "ComparisonReport")
        .def_readonly("rows", &ComparisonReport::rows)
        .def_readonly("max_area_reduction_vs_scfu",
                      &ComparisonReport::max_area_reduction_vs_scfu)
        .def_readonly("min_tput_ratio_scfu", &ComparisonReport::min_tput_ratio_scfu)
        .def_readonly("max_tput_ratio_scfu", &ComparisonReport::max_tput_ratio_scfu);

    // dfg-core
    m.def("parse_dfg", &parse_dfg_text, py::arg("text"));
    m.def("render_dfg", &render_dfg_text, py::arg("dfg"));
    m.def("stats", &stats, py::arg("dfg"));
    m.def("evaluate", &evaluate, py::arg("dfg"), py::arg("inputs"));
    m.def("topological_order", [](const Dfg& dfg) {
        std::vector<std::string> ids;
        for (const DfgNode* n : topological_order(dfg)) ids.push_back(n->id);
        return ids;
    });

    // frontend
    m.def("lower_kernel",
          [](const std::string& text) { return lower_to_dfg(parse_kernel(text)); },
          py::arg("text"), "Parse kernel source and lower it to a Dfg");

    // scheduler
    m.def("schedule", &schedule_dfg, py::arg("dfg"));
    m.def("compute_ii", &compute_ii, py::arg("schedule"));
    m.def("render_schedule_table", &render_schedule_table, py::arg("schedule"),
          py::arg("cycles"));
    m.def("render_schedule_kv", &render_schedule_kv, py::arg("schedule"));
    m.def("parse_schedule_kv", &parse_schedule_kv, py::arg("text"));

    // isa-codegen
    m.def("build_context", &build_context, py::arg("schedule"));
    m.def("serialize", [](const ContextImage& img) {
        const std::vector<std::uint8_t> bytes = serialize(img);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    });
    m.def("deserialize", [](const py::bytes& blob) {
        const std::string s = blob;
        return deserialize(std::vector<std::uint8_t>(s.begin(), s.end()));
    });
    m.def("context_bytes", &context_bytes, py::arg("word_count"));
    m.def("disassemble", &disassemble, py::arg("image"));

    // simulator
    m.def("simulate", &run, py::arg("image"), py::arg("inputs"), py::arg("iterations"));
    m.def("render_trace", &render_trace, py::arg("events"), py::arg("fu_count"));
    m.def("render_trace_rows", &render_trace_rows, py::arg("events"));

    // metrics
    m.def("eopc", [](int ops, int ii) {
        const Rational r = eopc(ops, ii);
        return static_cast<double>(r.num) / static_cast<double>(r.den);
    });
    m.def("eopc_display", &eopc_display, py::arg("op_nodes"), py::arg("ii"));
    m.def("throughput_gops", &throughput_gops, py::arg("op_nodes"), py::arg("ii"),
          py::arg("clock") = ClockConfig{});
    m.def("throughput_display", &throughput_display, py::arg("op_nodes"), py::arg("ii"),
          py::arg("clock") = ClockConfig{});
    m.def("area_eslices", &area_eslices, py::arg("fu_count"), py::arg("model") = AreaModel{});
    m.def("config_time_seconds", &config_time_seconds, py::arg("word_count"),
          py::arg("clock") = ClockConfig{});
    m.def("pipeline_count", &pipeline_count, py::arg("depth"));
    m.def("replicated_throughput", &replicated_throughput, py::arg("base_gops"),
          py::arg("factor"));
    m.def("comparison_report", &comparison_report, py::arg("records"));
    m.def("load_benchmark_table", &load_benchmark_table, py::arg("path"));
    m.def("parse_benchmark_table", &parse_benchmark_table, py::arg("text"));
    m.def("reference_benchmarks", [] { return reference_benchmarks(); });
    m.def("render_comparison_text", &render_comparison_text, py::arg("report"));
    m.def("render_comparison_kv", &render_comparison_kv, py::arg("report"));
}
