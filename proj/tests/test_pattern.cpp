#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "core/error.hpp"
#include "core/pattern.hpp"

using namespace markcorr;

namespace {

std::string temp_path(const std::string& name) {
    return std::string("pattern_test_") + name;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::trunc);
    f << content;
}

} // namespace

TEST_CASE("read a small csv") {
    const auto path = temp_path("ok.csv");
    write_file(path, "x,y,mark\n# a comment\n0.1,0.2,5\n0.5,0.5,7.5\n0.9,0.1,-2\n");
    const auto pattern = read_pattern(path, Window(0, 1, 0, 1));
    CHECK(pattern.size() == 3);
    CHECK(pattern.point(1).x == doctest::Approx(0.5));
    CHECK(pattern.mark(2) == doctest::Approx(-2.0));
    std::remove(path.c_str());
}

TEST_CASE("header-only file gives an empty pattern") {
    const auto path = temp_path("empty.csv");
    write_file(path, "x,y,mark\n");
    CHECK(read_pattern(path, Window(0, 1, 0, 1)).size() == 0);
    std::remove(path.c_str());
}

TEST_CASE("out-of-window rows are reported by number") {
    const auto path = temp_path("outside.csv");
    write_file(path, "x,y,mark\n0.5,0.5,1\n1.5,0.5,2\n");
    try {
        read_pattern(path, Window(0, 1, 0, 1));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::domain);
        CHECK(std::string(e.what()).find("rows 3") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("parse errors carry the row number") {
    const auto path = temp_path("bad.csv");
    write_file(path, "x,y,mark\n0.5,0.5,1\n0.2,zzz,2\n");
    try {
        read_pattern(path, Window(0, 1, 0, 1));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse);
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("non-finite marks are rejected") {
    const auto path = temp_path("nan.csv");
    write_file(path, "x,y,mark\n0.5,0.5,nan\n");
    CHECK_THROWS_AS(read_pattern(path, Window(0, 1, 0, 1)), Error);
    std::remove(path.c_str());
}

TEST_CASE("duplicate locations produce a warning") {
    const auto path = temp_path("dup.csv");
    write_file(path, "x,y,mark\n0.5,0.5,1\n0.5,0.5,2\n0.2,0.2,3\n");
    const auto pattern = read_pattern(path, Window(0, 1, 0, 1));
    CHECK(pattern.size() == 3);
    REQUIRE(pattern.warnings().size() == 1);
    CHECK(pattern.warnings()[0].find("duplicate") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("windows-style line endings parse cleanly") {
    const auto path = temp_path("crlf.csv");
    write_file(path, "x,y,mark\r\n0.1,0.2,5\r\n0.5, 0.5 ,7.5\r\n");
    const auto pattern = read_pattern(path, Window(0, 1, 0, 1));
    REQUIRE(pattern.size() == 2);
    CHECK(pattern.mark(1) == doctest::Approx(7.5));
    std::remove(path.c_str());
}

TEST_CASE("write then read reproduces the pattern") {
    const Window w(0, 2, 0, 2);
    const MarkedPointPattern pattern(
        w, {{0.123456789012345, 1.9}, {1.0 / 3.0, 0.7}, {1.999999999999, 2.0 / 7.0}},
        {3.14159265358979, -1e-7, 42.0});
    const auto path = temp_path("roundtrip.csv");
    write_pattern(pattern, path);
    const auto back = read_pattern(path, w);
    REQUIRE(back.size() == pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        CHECK(back.point(i).x == pattern.point(i).x);
        CHECK(back.point(i).y == pattern.point(i).y);
        CHECK(back.mark(i) == pattern.mark(i));
    }
    std::remove(path.c_str());
}

TEST_CASE("mark summary") {
    const Window w(0, 1, 0, 1);
    const MarkedPointPattern two(w, {{0.1, 0.1}, {0.2, 0.2}}, {2.0, 4.0});
    const auto s = mark_summary(two);
    CHECK(s.mean == doctest::Approx(3.0));
    CHECK(s.variance == doctest::Approx(2.0));

    const MarkedPointPattern flat(w, {{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}}, {5.5, 5.5, 5.5});
    CHECK(mark_summary(flat).mean == doctest::Approx(5.5));
    CHECK(mark_summary(flat).variance == 0.0);

    const MarkedPointPattern single(w, {{0.5, 0.5}}, {1.0});
    CHECK_THROWS_AS(mark_summary(single), Error);
}

TEST_CASE("permute marks is a deterministic relabelling") {
    const Window w(0, 1, 0, 1);
    std::vector<Point> pts;
    std::vector<double> marks;
    for (int i = 0; i < 40; ++i) {
        pts.push_back({(i % 8) * 0.12 + 0.02, (i / 8) * 0.19 + 0.03});
        marks.push_back(i * 0.5);
    }
    const MarkedPointPattern pattern(w, pts, marks);

    const auto a = permute_marks(pattern, 99);
    const auto b = permute_marks(pattern, 99);
    const auto c = permute_marks(pattern, 100);
    CHECK(a.marks() == b.marks());
    CHECK(a.marks() != c.marks());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        CHECK(a.point(i).x == pattern.point(i).x);
        CHECK(a.point(i).y == pattern.point(i).y);
    }

    // multiset of marks is preserved for every seed
    for (std::uint64_t seed : {1ULL, 2ULL, 77ULL, 123456789ULL}) {
        auto permuted = permute_marks(pattern, seed).marks();
        auto original = pattern.marks();
        std::sort(permuted.begin(), permuted.end());
        std::sort(original.begin(), original.end());
        CHECK(permuted == original);
    }
}

TEST_CASE("permuting a single point is the identity") {
    const MarkedPointPattern one(Window(0, 1, 0, 1), {{0.5, 0.5}}, {3.0});
    const auto same = permute_marks(one, 5);
    CHECK(same.marks() == one.marks());
}
