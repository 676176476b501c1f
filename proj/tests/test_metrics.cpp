#include <doctest.h>

#include <cstdio>

#include "ovl/error.hpp"
#include "ovl/files.hpp"
#include "ovl/metrics.hpp"

using namespace ovl;

TEST_CASE("eOPC display matches the published column") {
    CHECK(eopc_display(44, 17) == "2.6");
    CHECK(eopc_display(7, 6) == "1.2");
    CHECK(eopc_display(10, 10) == "1.0");
    for (const BenchmarkRecord& r : reference_benchmarks())
        CHECK(eopc_display(r.op_nodes, r.ii) == r.eopc);
}

TEST_CASE("throughput model reproduces the published GOPS") {
    const ClockConfig mhz300{300e6};
    CHECK(throughput_display(18, 10, mhz300) == "0.54");
    CHECK(throughput_display(32, 15, mhz300) == "0.64");
    CHECK(throughput_display(5, 5, mhz300) == "0.30"); // one op per cycle = f
    for (const BenchmarkRecord& r : reference_benchmarks()) {
        char want[16];
        std::snprintf(want, sizeof(want), "%.2f", r.tput_overlay);
        CHECK(throughput_display(r.op_nodes, r.ii, mhz300) == want);
    }
}

TEST_CASE("e-Slice area: 141 per FU") {
    CHECK(AreaModel{}.eslices_per_fu() == 141);
    CHECK(area_eslices(7) == 987);
    CHECK(area_eslices(13) == 1833);
    CHECK(area_eslices(0) == 0);
    for (const BenchmarkRecord& r : reference_benchmarks())
        CHECK(area_eslices(r.depth) == r.area_overlay);
}

TEST_CASE("configuration timing at 300 MHz") {
    const ClockConfig mhz300{300e6};
    CHECK(config_time_seconds(256, mhz300) == doctest::Approx(0.853e-6).epsilon(0.01));
    CHECK(config_time_seconds(82, mhz300) == doctest::Approx(0.273e-6).epsilon(0.01));
    CHECK(config_time_seconds(0, mhz300) == 0.0);
    // linear in the word count
    CHECK(config_time_seconds(512, mhz300) == doctest::Approx(2 * config_time_seconds(256, mhz300)));
}

TEST_CASE("pipeline count: ceil over 8-FU physical pipelines") {
    CHECK(pipeline_count(4) == 1);
    CHECK(pipeline_count(8) == 1);
    CHECK(pipeline_count(9) == 2);
    CHECK(pipeline_count(13) == 2);
    CHECK(pipeline_count(0) == 0);
}

TEST_CASE("replication scales linearly and rejects factor 0") {
    CHECK(replicated_throughput(0.54, 1) == doctest::Approx(0.54));
    CHECK(replicated_throughput(0.54, 4) == doctest::Approx(2.16));
    CHECK_THROWS_AS(replicated_throughput(0.54, 0), Error);
}

TEST_CASE("comparison report reproduces the headline claims") {
    const ComparisonReport rep = comparison_report(reference_benchmarks());
    REQUIRE(rep.rows.size() == 8);

    // qspline: 1 - 1128/8360 = 86.5% reduction
    const BenchmarkComparison* qspline = nullptr;
    const BenchmarkComparison* chebyshev = nullptr;
    for (const BenchmarkComparison& c : rep.rows) {
        if (c.name == "qspline") qspline = &c;
        if (c.name == "chebyshev") chebyshev = &c;
    }
    REQUIRE(qspline);
    REQUIRE(chebyshev);
    CHECK(qspline->area_reduction_vs_scfu == doctest::Approx(0.865).epsilon(0.001));
    CHECK(chebyshev->tput_ratio_scfu == doctest::Approx(6.7).epsilon(0.01));
    CHECK(rep.max_area_reduction_vs_scfu == doctest::Approx(0.865).epsilon(0.001));

    for (const BenchmarkComparison& c : rep.rows) {
        CHECK(c.mops_per_eslice >= 0.30);
        CHECK(c.mops_per_eslice <= 0.55);
    }
}

TEST_CASE("identical record compares to itself as 1x and 0%") {
    BenchmarkRecord r = reference_benchmarks()[0];
    r.tput_scfu = r.tput_overlay;
    r.area_scfu = r.area_overlay;
    const ComparisonReport rep = comparison_report({r});
    CHECK(rep.rows[0].area_reduction_vs_scfu == doctest::Approx(0.0));
    CHECK(rep.rows[0].tput_ratio_scfu == doctest::Approx(1.0));
}

TEST_CASE("benchmark table file parses and matches the embedded data") {
    const auto records = load_benchmark_table(std::string(OVLC_DATA_DIR) + "/benchmarks.tbl");
    const auto& ref = reference_benchmarks();
    REQUIRE(records.size() == ref.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].name == ref[i].name);
        CHECK(records[i].inputs == ref[i].inputs);
        CHECK(records[i].outputs == ref[i].outputs);
        CHECK(records[i].edges == ref[i].edges);
        CHECK(records[i].op_nodes == ref[i].op_nodes);
        CHECK(records[i].depth == ref[i].depth);
        CHECK(records[i].parallelism == ref[i].parallelism);
        CHECK(records[i].ii == ref[i].ii);
        CHECK(records[i].eopc == ref[i].eopc);
        CHECK(records[i].tput_overlay == doctest::Approx(ref[i].tput_overlay));
        CHECK(records[i].area_overlay == ref[i].area_overlay);
        CHECK(records[i].tput_scfu == doctest::Approx(ref[i].tput_scfu));
        CHECK(records[i].area_scfu == ref[i].area_scfu);
        CHECK(records[i].tput_hls == doctest::Approx(ref[i].tput_hls));
        CHECK(records[i].area_hls == ref[i].area_hls);
    }
}

TEST_CASE("table schema errors") {
    CHECK_THROWS_WITH_AS(parse_benchmark_table("ovl-benchtab 1\n1 chebyshev 1/1 12 7\n"),
                         doctest::Contains("15 columns"), Error);
    CHECK_THROWS_WITH_AS(parse_benchmark_table("nonsense\n"), doctest::Contains("version"),
                         Error);
    CHECK_THROWS_WITH_AS(parse_benchmark_table("ovl-benchtab 1\n"), doctest::Contains("no rows"),
                         Error);
    // single row still reports
    const auto one = parse_benchmark_table(
        "ovl-benchtab 1\n1 chebyshev 1/1 12 7 7 1.00 6 1.2 0.35 987 2.35 1900 2.21 265\n");
    CHECK(comparison_report(one).rows.size() == 1);
}

TEST_CASE("parallelism truncation examples") {
    CHECK(format_truncated(Rational{13, 6}, 2) == "2.16");
    CHECK(format_truncated(Rational{32, 11}, 2) == "2.90");
    CHECK(format_truncated(Rational{26, 8}, 2) == "3.25");
}
